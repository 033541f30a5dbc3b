#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfx/dp.hpp"
#include "rfx/hard_instance.hpp"
#include "rfx/mdp_io.hpp"

namespace rfx {

// Frozen desk-scale benchmark: one fixed generated instance plus a fixed
// probe family of evaluation rewards, so gap numbers are comparable across
// runs and machines.
namespace benchmark {

inline constexpr int kStates = 6;
inline constexpr int kActions = 4;
inline constexpr int kHorizon = 5;
inline constexpr int kDim = 4;
inline constexpr double kParamBound = 1.0;
inline constexpr std::uint64_t kInstanceSeed = 61;
inline constexpr int kProbeRewards = 5;
inline constexpr std::uint64_t kProbeSeed = 7002;

LinearMixtureMdp instance();
std::vector<RewardFunction> probe_rewards();

}  // namespace benchmark

struct RunConfig {
  Algo algorithm = Algo::hoeffding;
  std::string mdp_path;  // empty selects the frozen benchmark
  long long episodes = 0;
  std::vector<long long> checkpoints;  // defaults to {episodes}
  double delta = 0.1;
  double epsilon_target = 0.0;  // reporting only
  std::uint64_t seed = 1;
  RewardVariant reward_variant = RewardVariant::sqrt;
  int restarts = 8;
  std::optional<double> lambda_override;
  std::string output_path;
};

struct CheckpointRow {
  long long episodes = 0;
  double gap_exact = 0.0;   // worst exact gap over the probe rewards
  double v1_episode = 0.0;  // planned value at the checkpoint episode's start state
  bool coverage = false;    // ||theta - theta*||_Sigma <= beta at this checkpoint
  double wall_ms = 0.0;
};

struct RunRecord {
  RunConfig config;
  std::vector<CheckpointRow> rows;
  std::string error;  // nonempty when the cell failed
};

// One run of one algorithm on one instance with anytime checkpoints; the
// random stream derives solely from the config seed.
RunRecord run_cell(const LinearMixtureMdp& mdp, const std::vector<RewardFunction>& eval_rewards,
                   const RunConfig& config);

struct SweepGrid {
  std::vector<Algo> algorithms{Algo::hoeffding};
  std::vector<std::uint64_t> seeds{1};
  long long episodes = 0;
  std::vector<long long> checkpoints;
  double delta = 0.1;
  RewardVariant reward_variant = RewardVariant::sqrt;
  int restarts = 8;
  std::optional<double> lambda_override;
  std::string mdp_path;  // empty selects the frozen benchmark
};

// Executes every (algorithm, seed) cell, possibly in parallel, and writes
// results.csv plus manifest.json under out_dir. Row order is the
// deterministic cell order, never completion order.
std::vector<RunRecord> cmd_sweep(const SweepGrid& grid, const std::string& out_dir, int workers);

// CSV schema shared by sweep output and the slope reader.
inline constexpr const char* kCsvHeader = "algorithm,seed,K,gap,v1,coverage,wall_ms";

struct SlopeInput {
  long long episodes;
  double gap;
};

// Least-squares slope of log(median gap) vs log(K). Requires at least four
// distinct checkpoints spanning a decade.
double slope_from_rows(const std::vector<SlopeInput>& rows);
double cmd_slope(const std::string& csv_path, const std::string& algo_filter = "");

struct GapReport {
  double expected_gap = 0.0;
  Vector per_state;  // V*_1 - V^pi_1 per state
};

GapReport cmd_eval(const std::string& mdp_path, const std::string& policy_path,
                   const std::string& reward_path);

// Hash of the canonical grid description, recorded in the sweep manifest.
std::uint64_t grid_hash(const SweepGrid& grid);

const char* algo_name(Algo algo);
const char* variant_name(RewardVariant v);

int default_workers();  // RFX_WORKERS when set, hardware concurrency otherwise

}  // namespace rfx
