#include "rfx/hoeffding.hpp"

#include <cmath>

namespace rfx {

namespace {

// Substream tags; fixed constants so draws stay addressable by purpose.
constexpr std::uint64_t kTagInit = 0x11;
constexpr std::uint64_t kTagStep = 0x22;
constexpr std::uint64_t kTagAscent = 0x33;

}  // namespace

namespace detail {

BaseMaximizers compute_base_maximizers(const FeatureView& features, const CovarianceView& cov,
                                       int restarts, SplitRng ascent_rng) {
  const int S = features.num_states, A = features.num_actions;
  BaseMaximizers out;
  out.base.resize(static_cast<std::size_t>(S) * A);
  const Matrix& inv_sqrt = cov.inv_sqrt();
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      if (S <= kExactEnumerationCap) {
        out.base[s * A + a] = maximize_exact(features.map(s, a), inv_sqrt, 1.0);
      } else {
        SplitRng cell = ascent_rng.at(static_cast<std::uint64_t>(s) * A + a);
        out.base[s * A + a] =
            maximize_l1_ascent(features.map(s, a), inv_sqrt, 1.0, restarts, cell);
      }
    }
  }
  return out;
}

double shaped_reward(double norm_value, double beta, int H, RewardVariant variant) {
  double scaled = (variant == RewardVariant::sqrt) ? std::sqrt(norm_value) : norm_value;
  return std::min(1.0, (2.0 * beta / H) * scaled);
}

RewardFunction exploration_reward_tables(const BaseMaximizers& base, int H, int S, int A,
                                         double beta, RewardVariant variant) {
  RewardFunction r = RewardFunction::zeros(H, S, A);
  for (int h = 0; h < H; ++h) {
    double box_hi = static_cast<double>(H - 1 - h);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        r.at(h, s, a) =
            shaped_reward(box_hi * base.at(s, a, A).objective_l2, beta, H, variant);
  }
  return r;
}

}  // namespace detail

double hoeffding_beta(int d, long long K, int H, double B, double delta) {
  if (d < 1 || H < 1 || K < 0 || !(B > 0.0))
    throw std::invalid_argument("hoeffding_beta: d, H, B must be positive and K >= 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("hoeffding_beta: delta must lie in (0,1)");
  double h = static_cast<double>(H);
  double inner = 3.0 * (1.0 + static_cast<double>(K) * h * h * h * B * B) / delta;
  return h * std::sqrt(static_cast<double>(d) * std::log(inner)) + 1.0;
}

double exploration_reward(const ExplorationState& state, const ExplorationEnv& env, int step,
                          int s, int a, RewardVariant variant) {
  const int H = env.horizon();
  if (step < 0 || step >= H) throw std::invalid_argument("exploration_reward: step out of range");
  double box_hi = static_cast<double>(H - 1 - step);
  MaximizerResult res;
  if (env.num_states() <= kExactEnumerationCap) {
    res = maximize_exact(env.features().map(s, a), state.cov.inv_sqrt(), box_hi);
  } else {
    SplitRng rng(SplitRng::mix(kTagAscent, static_cast<std::uint64_t>(s) * env.num_actions() + a));
    res = maximize_l1_ascent(env.features().map(s, a), state.cov.inv_sqrt(), box_hi, 8, rng);
  }
  return detail::shaped_reward(res.objective_l2, state.beta, H, variant);
}

std::pair<ExplorationState, ExplorationLog> run_exploration(const ExplorationEnv& env,
                                                            long long K,
                                                            const ExploreConfig& config,
                                                            const EpisodeHook& hook) {
  if (K < 0) throw std::invalid_argument("run_exploration: K must be >= 0");
  const int S = env.num_states(), A = env.num_actions(), H = env.horizon(), d = env.dim();
  const double B = env.param_bound();
  const double lambda = config.lambda_override.value_or(1.0 / (B * B));
  const double beta = config.beta_override.value_or(hoeffding_beta(d, K, H, B, config.delta));

  ExplorationState state(d, lambda, beta);
  ExplorationLog log;
  SplitRng root(config.seed);
  const FeatureView features = env.features();

  for (long long k = 0; k < K; ++k) {
    // Sigma_{1,k} is fixed within the episode: reward tables, the plan and
    // the rollout pseudo-values all read the episode-start covariance.
    detail::BaseMaximizers base = detail::compute_base_maximizers(
        features, state.cov, config.restarts, root.at(k, kTagAscent));
    RewardFunction reward =
        detail::exploration_reward_tables(base, H, S, A, beta, config.variant);
    PlanResult planned = plan(features, state.theta, state.cov, reward, beta);

    SplitRng init_rng = root.at(k, kTagInit);
    int s = env.sample_initial(init_rng);

    EpisodeRecord rec;
    rec.initial_state = s;
    rec.v1 = planned.v(0, s);

    Vector theta_start = state.theta;
    std::optional<CovarianceView> cov_start;
    if (hook) cov_start = state.cov;  // keep the pre-rollout covariance for diagnostics
    std::vector<EpisodeStep> steps;
    steps.reserve(H);
    for (int t = 0; t < H; ++t) {
      int a = planned.policy.actions[t][s];
      double box_hi = static_cast<double>(H - 1 - t);
      Vector u = box_hi * base.at(s, a, A).f_star;
      Vector psi_u = features.map(s, a) * u;

      SplitRng step_rng = root.at(k, kTagStep, t);
      int s_next = env.sample_transition(s, a, step_rng);

      state.cov.rank_one_update(psi_u);
      state.b += psi_u * u[s_next];

      EpisodeStep step;
      step.s = s;
      step.a = a;
      step.s_next = s_next;
      step.reward_used = reward.at(t, s, a);
      step.u = std::move(u);
      step.u_target = step.u[s_next];
      steps.push_back(std::move(step));
      s = s_next;
    }

    state.theta = state.cov.sigma_inv() * state.b;
    state.episode = k + 1;

    if (hook) {
      EpisodeInfo info;
      info.k = k;
      info.initial_state = rec.initial_state;
      info.theta_start = &theta_start;
      info.cov_start = &*cov_start;
      info.exploration_reward = &reward;
      info.plan = &planned;
      info.steps = &steps;
      AnytimeEstimate estimate{state.theta, &state.cov, beta};
      hook(info, estimate);
    }
    if (config.record_trajectory) {
      rec.steps = std::move(steps);
      rec.values = planned.v;
    }
    if (config.record_estimates) {
      rec.theta = state.theta;
      rec.sigma = state.cov.sigma();
    }
    if (config.record_trajectory || config.record_estimates) log.episodes.push_back(std::move(rec));
  }

  return {std::move(state), std::move(log)};
}

PlanResult plan_phase(const ExplorationState& state, const FeatureView& features,
                      const RewardFunction& reward) {
  return plan(features, state.theta, state.cov, reward, state.beta);
}

}  // namespace rfx
