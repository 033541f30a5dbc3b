#include "rfx/hard_instance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace rfx {

int PackingSet::target_size(int d_prime, double gamma) {
  double raw = std::exp(d_prime * gamma * gamma / 4.0);
  return static_cast<int>(std::ceil(raw)) - 1;
}

PackingSet build_packing_set(int d_prime, double gamma, std::uint64_t seed,
                             long long max_attempts) {
  if (d_prime < 1) throw std::invalid_argument("build_packing_set: d_prime must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("build_packing_set: gamma must lie in (0,1)");

  PackingSet pack;
  pack.dim = d_prime;
  pack.gamma = gamma;
  const int target = PackingSet::target_size(d_prime, gamma);
  const double bound = d_prime * gamma;

  SplitRng rng(seed);
  long long attempts = 0;
  Eigen::VectorXi candidate(d_prime);
  while (pack.size() < target && attempts < max_attempts) {
    ++attempts;
    for (int i = 0; i < d_prime; ++i) candidate[i] = rng.next_sign() ? 1 : -1;
    bool ok = true;
    for (const auto& kept : pack.vectors) {
      if (candidate.dot(kept) > bound) {
        ok = false;
        break;
      }
    }
    if (ok) pack.vectors.push_back(candidate);
  }
  if (pack.size() < target) {
    std::ostringstream os;
    os << "build_packing_set: reached size " << pack.size() << " of " << target << " after "
       << attempts << " attempts";
    throw GenerationError(os.str());
  }

  for (int i = 0; i < pack.size(); ++i)
    for (int j = i + 1; j < pack.size(); ++j)
      if (pack.vectors[i].dot(pack.vectors[j]) > bound)
        throw GenerationError("build_packing_set: pairwise verification failed");
  return pack;
}

HardMdp build_hard_mdp(const PackingSet& pack, int theta_index, double alpha_scale, int H) {
  if (pack.size() < 1) throw std::invalid_argument("build_hard_mdp: empty packing set");
  if (theta_index < 0 || theta_index >= pack.size())
    throw std::invalid_argument("build_hard_mdp: theta_index out of range");
  if (H < 2) throw std::invalid_argument("build_hard_mdp: H must be >= 2");
  if (!(alpha_scale > 0.0) || alpha_scale / std::sqrt(2.0) > 0.5)
    throw std::invalid_argument("build_hard_mdp: need 0 < alpha / sqrt(2) <= 1/2");

  const int d_prime = pack.dim;
  const int d = d_prime + 1;
  const int S = 3;
  const int A = pack.size();
  const double root2 = std::sqrt(2.0);
  const double feat_scale = 1.0 / std::sqrt(2.0 * d_prime);

  std::vector<Matrix> maps(static_cast<std::size_t>(S) * A, Matrix::Zero(d, S));
  for (int j = 0; j < A; ++j) {
    Vector dir(d_prime);
    for (int i = 0; i < d_prime; ++i) dir[i] = static_cast<double>(pack.vectors[j][i]);

    Matrix& start_map = maps[kHardStart * A + j];
    start_map(0, kHardUp) = root2 / 4.0;
    start_map(0, kHardDown) = root2 / 4.0;
    start_map.block(1, kHardUp, d_prime, 1) = feat_scale * dir;
    start_map.block(1, kHardDown, d_prime, 1) = -feat_scale * dir;

    maps[kHardUp * A + j](0, kHardUp) = 1.0 / root2;
    maps[kHardDown * A + j](0, kHardDown) = 1.0 / root2;
  }

  Vector theta(d);
  theta[0] = root2;
  for (int i = 0; i < d_prime; ++i)
    theta[1 + i] = alpha_scale * pack.vectors[theta_index][i] / std::sqrt(double(d_prime));

  Vector mu = Vector::Zero(S);
  mu[kHardStart] = 1.0;

  const double B = std::sqrt(2.0 + alpha_scale * alpha_scale);
  LinearMixtureMdp inner(S, A, H, d, B, std::move(maps), std::move(theta), std::move(mu));
  ValidationReport report = inner.validate();
  if (!report.ok())
    throw GenerationError("build_hard_mdp: constructed instance is invalid: " + report.summary());
  return HardMdp{std::move(inner), theta_index, alpha_scale};
}

RewardFunction adversarial_reward(int H, int num_actions, RewardOrientation orientation) {
  if (H < 2) throw std::invalid_argument("adversarial_reward: H must be >= 2");
  RewardFunction r = RewardFunction::zeros(H, 3, num_actions);
  const int target = orientation == RewardOrientation::reward_down ? kHardDown : kHardUp;
  for (int h = 0; h < H; ++h)
    for (int a = 0; a < num_actions; ++a) r.at(h, target, a) = 1.0;
  return r;
}

namespace {

int decode_first_action(const AnytimeEstimate& estimate, const FeatureView& features,
                        const RewardFunction& reward) {
  PlanResult planned = plan(features, estimate.theta, *estimate.cov, reward, estimate.beta);
  return planned.policy.actions[0][kHardStart];
}

}  // namespace

IdentificationReport identification_experiment(Algo algo, const PackingSet& pack,
                                               const std::vector<long long>& checkpoints,
                                               const std::vector<std::uint64_t>& seeds,
                                               double alpha_scale, int H, double delta,
                                               int workers, double beta_override) {
  if (checkpoints.empty() || seeds.empty())
    throw std::invalid_argument("identification_experiment: need checkpoints and seeds");

  IdentificationReport report;
  report.checkpoints = checkpoints;
  long long max_k = 0;
  for (long long c : checkpoints) {
    if (c < 0) throw std::invalid_argument("identification_experiment: negative checkpoint");
    max_k = std::max(max_k, c);
  }

  report.cells.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto run_cell = [&](std::size_t idx) {
    IdentificationCell cell;
    cell.seed = seeds[idx];
    cell.theta_index = static_cast<int>(idx % pack.size());
    HardMdp hard = build_hard_mdp(pack, cell.theta_index, alpha_scale, H);
    ExplorationEnv env(hard.inner);
    RewardFunction probe = adversarial_reward(H, pack.size(), RewardOrientation::reward_up);
    FeatureView features = env.features();

    ExploreConfig config;
    config.seed = cell.seed;
    config.delta = delta;
    config.beta_override = beta_override;
    config.record_trajectory = false;
    config.record_estimates = false;

    std::vector<long long> sorted = checkpoints;
    std::sort(sorted.begin(), sorted.end());

    if (sorted.front() == 0) {
      const double B = hard.inner.param_bound();
      ExplorationState zero(env.dim(), 1.0 / (B * B), beta_override);
      AnytimeEstimate est{zero.theta, &zero.cov, zero.beta};
      cell.decoded[0] = decode_first_action(est, features, probe);
    }

    EpisodeHook hook = [&](const EpisodeInfo& info, const AnytimeEstimate& estimate) {
      long long closed = info.k + 1;
      if (std::binary_search(sorted.begin(), sorted.end(), closed))
        cell.decoded[closed] = decode_first_action(estimate, features, probe);
    };

    if (algo == Algo::hoeffding) {
      run_exploration(env, max_k, config, hook);
    } else {
      run_exploration_plus(env, max_k, config, hook);
    }
    report.cells[idx] = std::move(cell);
  };

  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= seeds.size()) break;
      try {
        run_cell(idx);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(seeds.size())));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  for (long long c : checkpoints) {
    int hits = 0;
    for (const auto& cell : report.cells)
      if (cell.decoded.count(c) && cell.decoded.at(c) == cell.theta_index) ++hits;
    report.recovery_frequency[c] = static_cast<double>(hits) / report.cells.size();
  }
  return report;
}

}  // namespace rfx
