#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rfx/env.hpp"
#include "rfx/maximizer.hpp"
#include "rfx/planner.hpp"

namespace rfx {

// Exploration-driven reward shape: sqrt takes the square root of the
// maximized Sigma^{-1} norm (main formula), linear uses the norm itself
// (the form the summation argument actually consumes).
enum class RewardVariant { sqrt, linear };

struct ExploreConfig {
  std::uint64_t seed = 1;
  double delta = 0.1;
  std::optional<double> lambda_override;  // default lambda = B^{-2}
  // Replaces the formula confidence radius. The formula constants are
  // far too conservative for small-K experiments: the bonus then clips every
  // optimistic Q at H and the greedy policy degenerates to the tie rule.
  std::optional<double> beta_override;
  RewardVariant variant = RewardVariant::sqrt;
  int restarts = 8;  // relaxed-maximizer restarts, used only when S > cap
  bool record_trajectory = true;
  bool record_estimates = true;
};

// Per-step variance quantities of the Bernstein explorer; hoeffding runs
// leave these empty.
struct VarianceRecord {
  double bar_v = 0.0;      // estimated variance of the next-step value
  double correction = 0.0; // calibration term E
  double nu = 0.0;         // max(alpha, bar_v + correction)
  double sigma_bar = 0.0;  // sqrt(nu)
};

struct EpisodeStep {
  int s = 0;
  int a = 0;
  int s_next = 0;
  double reward_used = 0.0;  // exploration reward at the visited pair
  Vector u;                  // pseudo value function, length S
  double u_target = 0.0;     // u(s_next)
};

struct EpisodeRecord {
  int initial_state = 0;
  double v1 = 0.0;  // planned value at the initial state
  std::vector<EpisodeStep> steps;
  Matrix values;  // (H+1) x S plan values, kept with the trajectory
  std::vector<VarianceRecord> variance;
  // Post-close estimate snapshot (record_estimates).
  Vector theta;
  Matrix sigma;
};

struct ExplorationLog {
  std::vector<EpisodeRecord> episodes;
};

// Anytime view of the regression the planning phase would consume if the run
// stopped after the episode that just closed.
struct AnytimeEstimate {
  Vector theta;
  const CovarianceView* cov = nullptr;
  double beta = 0.0;
};

// Transient per-episode context handed to diagnostic hooks. References stay
// valid only during the call.
struct EpisodeInfo {
  long long k = 0;  // 0-based episode index
  int initial_state = 0;
  const Vector* theta_start = nullptr;          // estimate used by this episode's plan
  const CovarianceView* cov_start = nullptr;    // covariance used by this episode's plan
  const RewardFunction* exploration_reward = nullptr;
  const PlanResult* plan = nullptr;
  const std::vector<EpisodeStep>* steps = nullptr;
};

using EpisodeHook = std::function<void(const EpisodeInfo&, const AnytimeEstimate&)>;

namespace detail {

// Box-[0,1] maximizers for every (s,a) against a fixed covariance; results
// for box [0,c] follow by homogeneity.
struct BaseMaximizers {
  std::vector<MaximizerResult> base;  // indexed s * A + a
  const MaximizerResult& at(int s, int a, int A) const { return base[s * A + a]; }
};

BaseMaximizers compute_base_maximizers(const FeatureView& features, const CovarianceView& cov,
                                       int restarts, SplitRng ascent_rng);

// Reward tables r(h,s,a) = min{1, (2 beta / H) * g(box_hi(h) * m(s,a))}.
RewardFunction exploration_reward_tables(const BaseMaximizers& base, int H, int S, int A,
                                         double beta, RewardVariant variant);

double shaped_reward(double norm_value, double beta, int H, RewardVariant variant);

}  // namespace detail

}  // namespace rfx
