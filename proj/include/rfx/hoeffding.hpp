#pragma once

#include <utility>

#include "rfx/explore.hpp"

namespace rfx {

// One unweighted ridge-regression stream: Sigma = lambda I + sum psi psi^T,
// b accumulates psi-weighted targets, theta = Sigma^{-1} b at episode close.
struct ExplorationState {
  CovarianceView cov;
  Vector b;
  Vector theta;
  long long episode = 0;
  double lambda = 0.0;
  double beta = 0.0;

  ExplorationState(int dim, double lambda_in, double beta_in)
      : cov(dim, lambda_in),
        b(Vector::Zero(dim)),
        theta(Vector::Zero(dim)),
        lambda(lambda_in),
        beta(beta_in) {}
};

// Confidence radius of the unweighted stream:
//   beta = H sqrt(d log(3 (1 + K H^3 B^2) / delta)) + 1.
double hoeffding_beta(int d, long long K, int H, double B, double delta);

// Exploration-driven reward at one (h, s, a): the maximal Sigma^{-1} norm of
// psi_f over f: S -> [0, H-1-step], shaped by the variant and clipped to 1.
// step is 0-based, so the final step always returns 0.
double exploration_reward(const ExplorationState& state, const ExplorationEnv& env, int step,
                          int s, int a, RewardVariant variant);

// Phase I: K episodes of pseudo-value-targeted exploration. The environment
// is touched only through transition and initial-state sampling.
std::pair<ExplorationState, ExplorationLog> run_exploration(const ExplorationEnv& env,
                                                            long long K,
                                                            const ExploreConfig& config,
                                                            const EpisodeHook& hook = {});

// Phase II: plan for a supplied reward from the collected regression state.
PlanResult plan_phase(const ExplorationState& state, const FeatureView& features,
                      const RewardFunction& reward);

}  // namespace rfx
