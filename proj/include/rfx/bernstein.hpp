#pragma once

#include <utility>

#include "rfx/hoeffding.hpp"

namespace rfx {

struct BernsteinRadii {
  double beta = 0.0;        // unweighted pseudo-value stream, planning phase
  double hat_beta = 0.0;    // variance-weighted value stream
  double check_beta = 0.0;  // value stream, correction-term radius
  double tilde_beta = 0.0;  // squared-value stream
};

// The four confidence radii with lambda = B^{-2} and alpha = H^2/d:
//   hat   = 8 sqrt(d log(1+KHB^2) log(48K^2H^2/delta)) + 4 sqrt(d) log(48K^2H^2/delta) + 1
//   check = 8 d sqrt(log(1+KHB^2) log(48K^2H^2/delta)) + 4 sqrt(d) log(48K^2H^2/delta) + 1
//   tilde = 8 H^2 sqrt(d log(1+KHB^2) log(48K^2H^2/delta)) + 4 H^2 log(48K^2H^2/delta) + 1
//   beta  = H sqrt(d log(12 (1 + K H^3 B^2) / delta)) + 1
BernsteinRadii bernstein_radii(int d, long long K, int H, double B, double delta);

// A weighted regression stream (covariance, target accumulator, estimate).
struct RegressionStream {
  CovarianceView cov;
  Vector b;
  Vector theta;

  RegressionStream(int dim, double lambda)
      : cov(dim, lambda), b(Vector::Zero(dim)), theta(Vector::Zero(dim)) {}
};

// The three regression streams plus variance bookkeeping. theta injection is
// public on purpose: several confidence-level properties are only assertable
// with the true parameter planted in a stream.
struct BernsteinState {
  ExplorationState u_stream;      // pseudo-value targets; theta set at finalize
  RegressionStream hat_stream;    // value targets weighted by 1/nu
  RegressionStream tilde_stream;  // squared-value targets
  BernsteinRadii radii;
  double alpha_floor = 0.0;  // H^2 / d
  int horizon = 0;
  long long episode = 0;
  bool finalized = false;

  BernsteinState(int dim, int H, double lambda, BernsteinRadii radii_in)
      : u_stream(dim, lambda, radii_in.beta),
        hat_stream(dim, lambda),
        tilde_stream(dim, lambda),
        radii(radii_in),
        alpha_floor(static_cast<double>(H) * H / dim),
        horizon(H) {}

  void inject_hat_theta(const Vector& theta) { hat_stream.theta = theta; }
  void inject_tilde_theta(const Vector& theta) { tilde_stream.theta = theta; }
};

// clip_{[0,H^2]}(<psi_{V^2}, tilde theta>) - clip_{[0,H]}(<psi_V, hat theta>)^2;
// may come out negative, the floor lives in nu.
double variance_estimate(const BernsteinState& state, const FeatureView& features,
                         const Vector& v_next, int s, int a);

// min{H^2, tilde_beta ||psi_{V^2}||_{tilde Sigma^{-1}}}
//   + min{H^2, 2 H check_beta ||psi_V||_{hat Sigma^{-1}}}, always in [0, 2H^2].
double correction_term(const BernsteinState& state, const FeatureView& features,
                       const Vector& v_next, int s, int a);

// nu = max(H^2/d, bar_v + correction), sigma_bar = sqrt(nu).
VarianceRecord nu(const BernsteinState& state, const FeatureView& features,
                  const Vector& v_next, int s, int a);

std::pair<BernsteinState, ExplorationLog> run_exploration_plus(const ExplorationEnv& env,
                                                               long long K,
                                                               const ExploreConfig& config,
                                                               const EpisodeHook& hook = {});

// Planning phase on the unweighted pseudo-value stream; requires the state to
// have been finalized by run_exploration_plus.
PlanResult plan_phase_plus(const BernsteinState& state, const FeatureView& features,
                           const RewardFunction& reward);

}  // namespace rfx
