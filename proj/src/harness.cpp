#include "rfx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rfx {

namespace {

std::vector<RewardFunction> probe_rewards_for(int H, int S, int A) {
  std::vector<RewardFunction> rewards;
  SplitRng rng(benchmark::kProbeSeed);
  for (int i = 0; i < benchmark::kProbeRewards; ++i) {
    SplitRng stream = rng.at(i);
    RewardFunction r = RewardFunction::zeros(H, S, A);
    for (int h = 0; h < H; ++h)
      for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) r.at(h, s, a) = stream.next_double();
    rewards.push_back(std::move(r));
  }
  return rewards;
}

}  // namespace

namespace benchmark {

LinearMixtureMdp instance() {
  return random_mdp(kStates, kActions, kHorizon, kDim, kParamBound, kInstanceSeed);
}

std::vector<RewardFunction> probe_rewards() {
  return probe_rewards_for(kHorizon, kStates, kActions);
}

}  // namespace benchmark

const char* algo_name(Algo algo) {
  return algo == Algo::hoeffding ? "hoeffding" : "bernstein";
}

const char* variant_name(RewardVariant v) { return v == RewardVariant::sqrt ? "sqrt" : "linear"; }

int default_workers() {
  if (const char* env = std::getenv("RFX_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

double worst_probe_gap(const LinearMixtureMdp& mdp,
                       const std::vector<RewardFunction>& eval_rewards,
                       const FeatureView& features, const AnytimeEstimate& estimate) {
  double worst = 0.0;
  for (const RewardFunction& r : eval_rewards) {
    PlanResult planned = plan(features, estimate.theta, *estimate.cov, r, estimate.beta);
    worst = std::max(worst, expected_gap(mdp, r, planned.policy));
  }
  return worst;
}

bool coverage_holds(const LinearMixtureMdp& mdp, const AnytimeEstimate& estimate) {
  Vector diff = estimate.theta - mdp.theta_star();
  double norm = std::sqrt(std::max(0.0, diff.dot(estimate.cov->sigma() * diff)));
  return norm <= estimate.beta;
}

}  // namespace

RunRecord run_cell(const LinearMixtureMdp& mdp, const std::vector<RewardFunction>& eval_rewards,
                   const RunConfig& config) {
  RunRecord record;
  record.config = config;

  std::vector<long long> checkpoints = config.checkpoints;
  if (checkpoints.empty()) checkpoints = {config.episodes};
  std::sort(checkpoints.begin(), checkpoints.end());
  for (long long c : checkpoints)
    if (c < 0 || c > config.episodes)
      throw std::invalid_argument("run_cell: checkpoints must lie in [0, K]");

  ExplorationEnv env(mdp);
  const FeatureView features = env.features();
  ExploreConfig explore;
  explore.seed = config.seed;
  explore.delta = config.delta;
  explore.lambda_override = config.lambda_override;
  explore.variant = config.reward_variant;
  explore.restarts = config.restarts;
  explore.record_trajectory = false;
  explore.record_estimates = false;

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  auto emit_row = [&](long long k, const AnytimeEstimate& estimate, double v1) {
    CheckpointRow row;
    row.episodes = k;
    row.gap_exact = worst_probe_gap(mdp, eval_rewards, features, estimate);
    row.v1_episode = v1;
    row.coverage = coverage_holds(mdp, estimate);
    row.wall_ms = elapsed_ms();
    record.rows.push_back(row);
  };

  if (checkpoints.front() == 0) {
    const double B = mdp.param_bound();
    const double lambda = config.lambda_override.value_or(1.0 / (B * B));
    double beta0 =
        config.algorithm == Algo::hoeffding
            ? hoeffding_beta(mdp.dim(), config.episodes, mdp.horizon(), B, config.delta)
            : bernstein_radii(mdp.dim(), std::max<long long>(config.episodes, 1), mdp.horizon(),
                              B, config.delta)
                  .beta;
    ExplorationState zero(mdp.dim(), lambda, beta0);
    AnytimeEstimate estimate{zero.theta, &zero.cov, zero.beta};
    emit_row(0, estimate, 0.0);
  }

  EpisodeHook hook = [&](const EpisodeInfo& info, const AnytimeEstimate& estimate) {
    long long closed = info.k + 1;
    if (std::binary_search(checkpoints.begin(), checkpoints.end(), closed))
      emit_row(closed, estimate, info.plan->v(0, info.initial_state));
  };

  if (config.algorithm == Algo::hoeffding) {
    run_exploration(env, config.episodes, explore, hook);
  } else {
    run_exploration_plus(env, config.episodes, explore, hook);
  }
  return record;
}

std::uint64_t grid_hash(const SweepGrid& grid) {
  std::ostringstream os;
  os << "v" << kSchemaVersion << "|mdp=" << grid.mdp_path << "|K=" << grid.episodes << "|delta="
     << grid.delta << "|variant=" << variant_name(grid.reward_variant)
     << "|restarts=" << grid.restarts;
  if (grid.lambda_override) os << "|lambda=" << *grid.lambda_override;
  os << "|algos=";
  for (Algo a : grid.algorithms) os << algo_name(a) << ",";
  os << "|seeds=";
  for (std::uint64_t s : grid.seeds) os << s << ",";
  os << "|ckpts=";
  for (long long c : grid.checkpoints) os << c << ",";
  const std::string text = os.str();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::vector<RunRecord> cmd_sweep(const SweepGrid& grid, const std::string& out_dir, int workers) {
  if (grid.algorithms.empty() || grid.seeds.empty())
    throw std::invalid_argument("cmd_sweep: grid must have algorithms and seeds");

  std::optional<LinearMixtureMdp> loaded;
  if (!grid.mdp_path.empty()) {
    loaded = load_mdp(grid.mdp_path);
    loaded->require_valid();
  }
  const LinearMixtureMdp mdp = loaded ? std::move(*loaded) : benchmark::instance();
  const std::vector<RewardFunction> eval_rewards =
      probe_rewards_for(mdp.horizon(), mdp.num_states(), mdp.num_actions());

  std::vector<RunConfig> cells;
  for (Algo algo : grid.algorithms) {
    for (std::uint64_t seed : grid.seeds) {
      RunConfig config;
      config.algorithm = algo;
      config.mdp_path = grid.mdp_path;
      config.episodes = grid.episodes;
      config.checkpoints = grid.checkpoints;
      config.delta = grid.delta;
      config.seed = seed;
      config.reward_variant = grid.reward_variant;
      config.restarts = grid.restarts;
      config.lambda_override = grid.lambda_override;
      cells.push_back(std::move(config));
    }
  }

  std::vector<RunRecord> records(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) break;
      try {
        records[idx] = run_cell(mdp, eval_rewards, cells[idx]);
      } catch (const std::exception& e) {
        records[idx].config = cells[idx];
        records[idx].error = e.what();
      }
    }
  };
  int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::filesystem::create_directories(out_dir);
  const std::string csv_path = out_dir + "/results.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot open for writing: " + csv_path);
  csv << kCsvHeader << "\n";
  for (const RunRecord& record : records) {
    if (!record.error.empty()) {
      csv << algo_name(record.config.algorithm) << "," << record.config.seed << ","
          << record.config.episodes << ",nan,nan,0,0\n";
      continue;
    }
    for (const CheckpointRow& row : record.rows) {
      csv << algo_name(record.config.algorithm) << "," << record.config.seed << ","
          << row.episodes << "," << format_real(row.gap_exact) << ","
          << format_real(row.v1_episode) << "," << (row.coverage ? 1 : 0) << ","
          << format_real(row.wall_ms) << "\n";
    }
  }
  csv.close();
  if (!csv) throw IoError("write failed: " + csv_path);

  nlohmann::json manifest{{"schema_version", kSchemaVersion},
                          {"grid_hash", grid_hash(grid)},
                          {"cells", cells.size()},
                          {"episodes", grid.episodes},
                          {"checkpoints", grid.checkpoints},
                          {"mdp", grid.mdp_path.empty() ? "benchmark" : grid.mdp_path},
                          {"delta", grid.delta},
                          {"reward_variant", variant_name(grid.reward_variant)}};
  nlohmann::json failures = nlohmann::json::array();
  for (const RunRecord& record : records)
    if (!record.error.empty())
      failures.push_back({{"algorithm", algo_name(record.config.algorithm)},
                          {"seed", record.config.seed},
                          {"error", record.error}});
  manifest["failures"] = std::move(failures);
  std::ofstream mf(out_dir + "/manifest.json");
  if (!mf) throw IoError("cannot open for writing: " + out_dir + "/manifest.json");
  mf << manifest.dump(1, '\t') << '\n';

  return records;
}

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

double slope_from_rows(const std::vector<SlopeInput>& rows) {
  std::map<long long, std::vector<double>> by_k;
  for (const SlopeInput& row : rows) {
    if (row.episodes > 0) by_k[row.episodes].push_back(row.gap);
  }
  if (by_k.size() < 4)
    throw std::invalid_argument("slope: need at least 4 distinct positive checkpoints");
  if (by_k.rbegin()->first < 10 * by_k.begin()->first)
    throw std::invalid_argument("slope: checkpoints must span at least one decade of K");

  std::vector<double> xs, ys;
  for (auto& [k, gaps] : by_k) {
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(std::max(median(std::move(gaps)), 1e-15)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double cmd_slope(const std::string& csv_path, const std::string& algo_filter) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open for reading: " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("slope: empty csv " + csv_path);
  if (line != kCsvHeader) throw std::invalid_argument("slope: unexpected csv header in " + csv_path);

  std::vector<SlopeInput> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string algo, seed, k, gap;
    if (!std::getline(ls, algo, ',') || !std::getline(ls, seed, ',') ||
        !std::getline(ls, k, ',') || !std::getline(ls, gap, ','))
      throw std::invalid_argument("slope: malformed row in " + csv_path);
    if (!algo_filter.empty() && algo != algo_filter) continue;
    if (gap == "nan") continue;
    rows.push_back({std::stoll(k), std::stod(gap)});
  }
  return slope_from_rows(rows);
}

GapReport cmd_eval(const std::string& mdp_path, const std::string& policy_path,
                   const std::string& reward_path) {
  LinearMixtureMdp mdp = load_mdp(mdp_path);
  mdp.require_valid();
  Policy policy = load_policy(policy_path);
  RewardFunction reward = load_reward(reward_path);

  auto [opt, opt_pi] = optimal_values(mdp, reward);
  (void)opt_pi;
  ValueTables under = policy_value(mdp, reward, policy);
  GapReport report;
  report.per_state = Vector(opt.v.row(0) - under.v.row(0));
  report.expected_gap = mdp.init_dist().dot(report.per_state);
  return report;
}

}  // namespace rfx
