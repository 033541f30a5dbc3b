#include "rfx/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace rfx {

namespace {

constexpr std::uint64_t kTagInit = 0x11;
constexpr std::uint64_t kTagStep = 0x22;
constexpr std::uint64_t kTagAscent = 0x33;

}  // namespace

BernsteinRadii bernstein_radii(int d, long long K, int H, double B, double delta) {
  if (d < 1 || H < 1 || K < 1 || !(B > 0.0))
    throw std::invalid_argument("bernstein_radii: d, K, H, B must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("bernstein_radii: delta must lie in (0,1)");
  const double dd = static_cast<double>(d);
  const double h = static_cast<double>(H);
  const double k = static_cast<double>(K);
  const double log_data = std::log(1.0 + k * h * B * B);
  const double log_conf = std::log(48.0 * k * k * h * h / delta);

  BernsteinRadii r;
  r.hat_beta = 8.0 * std::sqrt(dd * log_data * log_conf) + 4.0 * std::sqrt(dd) * log_conf + 1.0;
  r.check_beta = 8.0 * dd * std::sqrt(log_data * log_conf) + 4.0 * std::sqrt(dd) * log_conf + 1.0;
  r.tilde_beta =
      8.0 * h * h * std::sqrt(dd * log_data * log_conf) + 4.0 * h * h * log_conf + 1.0;
  r.beta = h * std::sqrt(dd * std::log(12.0 * (1.0 + k * h * h * h * B * B) / delta)) + 1.0;
  return r;
}

double variance_estimate(const BernsteinState& state, const FeatureView& features,
                         const Vector& v_next, int s, int a) {
  const double h = static_cast<double>(state.horizon);
  Vector psi_v = features.map(s, a) * v_next;
  Vector psi_v2 = features.map(s, a) * Vector(v_next.cwiseProduct(v_next));
  double second = std::clamp(psi_v2.dot(state.tilde_stream.theta), 0.0, h * h);
  double first = std::clamp(psi_v.dot(state.hat_stream.theta), 0.0, h);
  return second - first * first;
}

double correction_term(const BernsteinState& state, const FeatureView& features,
                       const Vector& v_next, int s, int a) {
  const double h = static_cast<double>(state.horizon);
  Vector psi_v = features.map(s, a) * v_next;
  Vector psi_v2 = features.map(s, a) * Vector(v_next.cwiseProduct(v_next));
  double tilde_part =
      std::min(h * h, state.radii.tilde_beta * state.tilde_stream.cov.inv_norm(psi_v2));
  double hat_part =
      std::min(h * h, 2.0 * h * state.radii.check_beta * state.hat_stream.cov.inv_norm(psi_v));
  return tilde_part + hat_part;
}

VarianceRecord nu(const BernsteinState& state, const FeatureView& features,
                  const Vector& v_next, int s, int a) {
  VarianceRecord rec;
  rec.bar_v = variance_estimate(state, features, v_next, s, a);
  rec.correction = correction_term(state, features, v_next, s, a);
  rec.nu = std::max(state.alpha_floor, rec.bar_v + rec.correction);
  rec.sigma_bar = std::sqrt(rec.nu);
  return rec;
}

std::pair<BernsteinState, ExplorationLog> run_exploration_plus(const ExplorationEnv& env,
                                                               long long K,
                                                               const ExploreConfig& config,
                                                               const EpisodeHook& hook) {
  if (K < 0) throw std::invalid_argument("run_exploration_plus: K must be >= 0");
  const int S = env.num_states(), A = env.num_actions(), H = env.horizon(), d = env.dim();
  const double B = env.param_bound();
  const double lambda = config.lambda_override.value_or(1.0 / (B * B));
  BernsteinRadii radii = bernstein_radii(d, std::max<long long>(K, 1), H, B, config.delta);
  if (config.beta_override) {
    // Exploration plan and final planning radius only; the variance
    // correction radii keep their formula values.
    radii.beta = *config.beta_override;
    radii.hat_beta = *config.beta_override;
  }

  BernsteinState state(d, H, lambda, radii);
  ExplorationLog log;
  SplitRng root(config.seed);
  const FeatureView features = env.features();

  for (long long k = 0; k < K; ++k) {
    // Episode-start snapshot: the reward tables, the plan, and every nu
    // evaluated during the rollout use the estimates indexed by k.
    BernsteinState frozen = state;

    detail::BaseMaximizers base = detail::compute_base_maximizers(
        features, frozen.u_stream.cov, config.restarts, root.at(k, kTagAscent));
    RewardFunction reward =
        detail::exploration_reward_tables(base, H, S, A, radii.beta, config.variant);
    PlanResult planned =
        plan(features, frozen.hat_stream.theta, frozen.hat_stream.cov, reward, radii.hat_beta);

    SplitRng init_rng = root.at(k, kTagInit);
    int s = env.sample_initial(init_rng);

    EpisodeRecord rec;
    rec.initial_state = s;
    rec.v1 = planned.v(0, s);

    std::vector<EpisodeStep> steps;
    std::vector<VarianceRecord> var_records;
    steps.reserve(H);
    var_records.reserve(H);

    for (int t = 0; t < H; ++t) {
      int a = planned.policy.actions[t][s];
      SplitRng step_rng = root.at(k, kTagStep, t);
      int s_next = env.sample_transition(s, a, step_rng);

      Vector v_next = planned.v.row(t + 1);
      double box_hi = static_cast<double>(H - 1 - t);
      Vector u = box_hi * base.at(s, a, A).f_star;
      Vector psi_u = features.map(s, a) * u;

      VarianceRecord vr = nu(frozen, features, v_next, s, a);

      Vector psi_v = features.map(s, a) * v_next;
      Vector psi_v2 = features.map(s, a) * Vector(v_next.cwiseProduct(v_next));

      state.u_stream.cov.rank_one_update(psi_u);
      state.u_stream.b += psi_u * u[s_next];
      state.hat_stream.cov.rank_one_update(psi_v / vr.sigma_bar);
      state.hat_stream.b += psi_v * (v_next[s_next] / vr.nu);
      state.tilde_stream.cov.rank_one_update(psi_v2);
      state.tilde_stream.b += psi_v2 * (v_next[s_next] * v_next[s_next]);

      EpisodeStep step;
      step.s = s;
      step.a = a;
      step.s_next = s_next;
      step.reward_used = reward.at(t, s, a);
      step.u = std::move(u);
      step.u_target = step.u[s_next];
      steps.push_back(std::move(step));
      var_records.push_back(vr);
      s = s_next;
    }

    state.hat_stream.theta = state.hat_stream.cov.sigma_inv() * state.hat_stream.b;
    state.tilde_stream.theta = state.tilde_stream.cov.sigma_inv() * state.tilde_stream.b;
    state.episode = k + 1;

    if (hook) {
      EpisodeInfo info;
      info.k = k;
      info.initial_state = rec.initial_state;
      info.theta_start = &frozen.hat_stream.theta;
      info.cov_start = &frozen.hat_stream.cov;
      info.exploration_reward = &reward;
      info.plan = &planned;
      info.steps = &steps;
      AnytimeEstimate estimate;
      estimate.theta = state.u_stream.cov.sigma_inv() * state.u_stream.b;
      estimate.cov = &state.u_stream.cov;
      estimate.beta = radii.beta;
      hook(info, estimate);
    }
    if (config.record_trajectory) {
      rec.steps = std::move(steps);
      rec.values = planned.v;
      rec.variance = std::move(var_records);
    }
    if (config.record_estimates) {
      rec.theta = state.u_stream.cov.sigma_inv() * state.u_stream.b;
      rec.sigma = state.u_stream.cov.sigma();
    }
    if (config.record_trajectory || config.record_estimates) log.episodes.push_back(std::move(rec));
  }

  state.u_stream.theta = state.u_stream.cov.sigma_inv() * state.u_stream.b;
  state.u_stream.episode = K;
  state.finalized = true;
  return {std::move(state), std::move(log)};
}

PlanResult plan_phase_plus(const BernsteinState& state, const FeatureView& features,
                           const RewardFunction& reward) {
  if (!state.finalized)
    throw StateError("plan_phase_plus: exploration state has not been finalized");
  return plan(features, state.u_stream.theta, state.u_stream.cov, reward, state.radii.beta);
}

}  // namespace rfx
