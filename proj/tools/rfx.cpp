#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfx/harness.hpp"

namespace {

using namespace rfx;

std::vector<long long> parse_checkpoints(const std::string& text) {
  std::vector<long long> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(std::stoll(token));
  }
  return out;
}

Algo parse_algo(const std::string& name) {
  if (name == "hoeffding") return Algo::hoeffding;
  if (name == "bernstein") return Algo::bernstein;
  throw CLI::ValidationError("--algo must be hoeffding or bernstein");
}

RewardVariant parse_variant(const std::string& name) {
  if (name == "sqrt") return RewardVariant::sqrt;
  if (name == "linear") return RewardVariant::linear;
  throw CLI::ValidationError("--reward-variant must be sqrt or linear");
}

int run(int argc, char** argv) {
  CLI::App app{"reward-free exploration laboratory for linear mixture MDPs"};
  app.require_subcommand(1);

  // gen-mdp
  auto* gen = app.add_subcommand("gen-mdp", "generate a random valid instance");
  int gen_S = 6, gen_A = 4, gen_H = 5, gen_d = 4;
  double gen_B = 1.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "mdp.json";
  gen->add_option("--S", gen_S, "states");
  gen->add_option("--A", gen_A, "actions");
  gen->add_option("--H", gen_H, "horizon");
  gen->add_option("--d", gen_d, "feature dimension");
  gen->add_option("--B", gen_B, "parameter norm bound");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path");

  // gen-hard
  auto* hard = app.add_subcommand("gen-hard", "generate a lower-bound family instance");
  int hard_dp = 8, hard_H = 5, hard_index = 0;
  double hard_gamma = 0.5, hard_alpha = 0.3;
  std::uint64_t hard_seed = 1;
  long long hard_attempts = 200000;
  std::string hard_out = "hard_mdp.json";
  hard->add_option("--d-prime", hard_dp, "packing dimension d'");
  hard->add_option("--gamma", hard_gamma, "packing inner-product level");
  hard->add_option("--alpha", hard_alpha, "transition bias scale");
  hard->add_option("--H", hard_H, "horizon");
  hard->add_option("--theta-index", hard_index, "which packing vector is the truth");
  hard->add_option("--seed", hard_seed, "packing seed");
  hard->add_option("--max-attempts", hard_attempts, "packing rejection budget");
  hard->add_option("--out", hard_out, "output path");

  // explore
  auto* explore = app.add_subcommand("explore", "run the exploration phase");
  std::string ex_mdp, ex_out = "state.json", ex_algo = "hoeffding", ex_variant = "sqrt";
  std::string ex_diag;
  long long ex_K = 100;
  std::uint64_t ex_seed = 1;
  double ex_delta = 0.1, ex_lambda = -1.0;
  int ex_restarts = 8;
  explore->add_option("--mdp", ex_mdp, "instance file")->required();
  explore->add_option("--algo", ex_algo, "hoeffding or bernstein");
  explore->add_option("--K", ex_K, "episodes");
  explore->add_option("--seed", ex_seed, "run seed");
  explore->add_option("--delta", ex_delta, "confidence level");
  explore->add_option("--reward-variant", ex_variant, "sqrt or linear");
  explore->add_option("--restarts", ex_restarts, "relaxed maximizer restarts");
  explore->add_option("--lambda", ex_lambda, "ridge regularizer override");
  explore->add_option("--out", ex_out, "output state path");
  explore->add_option("--diag", ex_diag, "write per-step diagnostics CSV here");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "plan for a reward from an exploration state");
  std::string pl_mdp, pl_state, pl_reward, pl_out = "policy.json";
  plan_cmd->add_option("--mdp", pl_mdp, "instance file")->required();
  plan_cmd->add_option("--state", pl_state, "exploration state file")->required();
  plan_cmd->add_option("--reward", pl_reward, "reward file")->required();
  plan_cmd->add_option("--out", pl_out, "output policy path");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "exact gap of a stored policy");
  std::string ev_mdp, ev_policy, ev_reward;
  eval_cmd->add_option("--mdp", ev_mdp, "instance file")->required();
  eval_cmd->add_option("--policy", ev_policy, "policy file")->required();
  eval_cmd->add_option("--reward", ev_reward, "reward file")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a (algorithm, seed) grid with checkpoints");
  std::string sw_mdp, sw_out = "sweep_out", sw_algo = "hoeffding", sw_variant = "sqrt";
  std::string sw_checkpoints;
  long long sw_K = 1000;
  int sw_seeds = 10, sw_restarts = 8, sw_workers = default_workers();
  double sw_delta = 0.1, sw_lambda = -1.0;
  sweep->add_option("--mdp", sw_mdp, "instance file (default: frozen benchmark)");
  sweep->add_option("--algo", sw_algo, "hoeffding, bernstein or both");
  sweep->add_option("--K", sw_K, "episodes per run");
  sweep->add_option("--checkpoints", sw_checkpoints, "comma-separated K values");
  sweep->add_option("--seeds", sw_seeds, "number of seeds (1..N)");
  sweep->add_option("--delta", sw_delta, "confidence level");
  sweep->add_option("--reward-variant", sw_variant, "sqrt or linear");
  sweep->add_option("--restarts", sw_restarts, "relaxed maximizer restarts");
  sweep->add_option("--lambda", sw_lambda, "ridge regularizer override");
  sweep->add_option("--workers", sw_workers, "parallel cells");
  sweep->add_option("--out", sw_out, "output directory");

  // slope
  auto* slope = app.add_subcommand("slope", "log-log slope of median gap vs K");
  std::string sl_csv, sl_algo;
  slope->add_option("--csv", sl_csv, "results.csv from a sweep")->required();
  slope->add_option("--algo", sl_algo, "restrict to one algorithm");

  // lower-bound-exp
  auto* lb = app.add_subcommand("lower-bound-exp", "identification experiment on the hard family");
  int lb_dp = 8, lb_H = 5, lb_seeds = 50, lb_workers = default_workers();
  double lb_gamma = 0.9, lb_alpha = 0.3, lb_delta = 0.1, lb_beta = 1.0;
  std::string lb_algo = "hoeffding", lb_checkpoints = "50,5000", lb_out;
  std::uint64_t lb_pack_seed = 1;
  long long lb_attempts = 200000;
  lb->add_option("--d-prime", lb_dp, "packing dimension d'");
  lb->add_option("--gamma", lb_gamma, "packing inner-product level");
  lb->add_option("--alpha", lb_alpha, "transition bias scale");
  lb->add_option("--H", lb_H, "horizon");
  lb->add_option("--algo", lb_algo, "hoeffding or bernstein");
  lb->add_option("--checkpoints", lb_checkpoints, "comma-separated K values");
  lb->add_option("--seeds", lb_seeds, "number of seeds");
  lb->add_option("--delta", lb_delta, "confidence level");
  lb->add_option("--beta", lb_beta, "confidence radius used by the runs");
  lb->add_option("--pack-seed", lb_pack_seed, "packing construction seed");
  lb->add_option("--max-attempts", lb_attempts, "packing rejection budget");
  lb->add_option("--workers", lb_workers, "parallel cells");
  lb->add_option("--out", lb_out, "write the per-cell CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    LinearMixtureMdp mdp = random_mdp(gen_S, gen_A, gen_H, gen_d, gen_B, gen_seed);
    save_mdp(mdp, gen_out);
    std::cout << "wrote " << gen_out << "\n";
    return 0;
  }

  if (hard->parsed()) {
    PackingSet pack = build_packing_set(hard_dp, hard_gamma, hard_seed, hard_attempts);
    HardMdp instance = build_hard_mdp(pack, hard_index, hard_alpha, hard_H);
    save_mdp(instance.inner, hard_out);
    std::cout << "packing size " << pack.size() << ", wrote " << hard_out << "\n";
    return 0;
  }

  if (explore->parsed()) {
    LinearMixtureMdp mdp = load_mdp(ex_mdp);
    mdp.require_valid();
    ExplorationEnv env(mdp);
    ExploreConfig config;
    config.seed = ex_seed;
    config.delta = ex_delta;
    config.variant = parse_variant(ex_variant);
    config.restarts = ex_restarts;
    if (ex_lambda > 0.0) config.lambda_override = ex_lambda;
    config.record_trajectory = !ex_diag.empty();
    config.record_estimates = false;

    PlannerInput out;
    out.episodes = ex_K;
    ExplorationLog log;
    if (parse_algo(ex_algo) == Algo::hoeffding) {
      auto [state, run_log] = run_exploration(env, ex_K, config);
      out.algorithm = "hoeffding";
      out.lambda = state.lambda;
      out.beta = state.beta;
      out.theta = state.theta;
      out.sigma = state.cov.sigma();
      log = std::move(run_log);
    } else {
      auto [state, run_log] = run_exploration_plus(env, ex_K, config);
      out.algorithm = "bernstein";
      out.lambda = state.u_stream.lambda;
      out.beta = state.radii.beta;
      out.theta = state.u_stream.theta;
      out.sigma = state.u_stream.cov.sigma();
      log = std::move(run_log);
    }
    save_planner_input(out, ex_out);
    if (!ex_diag.empty()) {
      std::ofstream diag(ex_diag);
      if (!diag) throw IoError("cannot open for writing: " + ex_diag);
      diag << "k,h,s,a,s_next,reward,u_target,bar_v,correction,nu,sigma_bar\n";
      for (std::size_t k = 0; k < log.episodes.size(); ++k) {
        const auto& episode = log.episodes[k];
        for (std::size_t t = 0; t < episode.steps.size(); ++t) {
          const auto& step = episode.steps[t];
          VarianceRecord vr;
          if (t < episode.variance.size()) vr = episode.variance[t];
          char line[256];
          std::snprintf(line, sizeof(line), "%zu,%zu,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                        k, t, step.s, step.a, step.s_next, step.reward_used, step.u_target,
                        vr.bar_v, vr.correction, vr.nu, vr.sigma_bar);
          diag << line;
        }
      }
      std::cout << "wrote " << ex_diag << "\n";
    }
    std::cout << "wrote " << ex_out << "\n";
    return 0;
  }

  if (plan_cmd->parsed()) {
    LinearMixtureMdp mdp = load_mdp(pl_mdp);
    mdp.require_valid();
    PlannerInput state = load_planner_input(pl_state);
    RewardFunction reward = load_reward(pl_reward);
    CovarianceView cov = CovarianceView::from_sigma(state.sigma, state.lambda);
    PlanResult planned = plan(mdp.features(), state.theta, cov, reward, state.beta);
    save_policy(planned.policy, pl_out);
    std::cout << "wrote " << pl_out << "\n";
    return 0;
  }

  if (eval_cmd->parsed()) {
    GapReport report = cmd_eval(ev_mdp, ev_policy, ev_reward);
    std::printf("expected_gap %.17g\n", report.expected_gap);
    for (int s = 0; s < report.per_state.size(); ++s)
      std::printf("state %d gap %.17g\n", s, report.per_state[s]);
    return 0;
  }

  if (sweep->parsed()) {
    SweepGrid grid;
    grid.episodes = sw_K;
    grid.checkpoints = parse_checkpoints(sw_checkpoints);
    grid.delta = sw_delta;
    grid.reward_variant = parse_variant(sw_variant);
    grid.restarts = sw_restarts;
    grid.mdp_path = sw_mdp;
    if (sw_lambda > 0.0) grid.lambda_override = sw_lambda;
    if (sw_algo == "both") {
      grid.algorithms = {Algo::hoeffding, Algo::bernstein};
    } else {
      grid.algorithms = {parse_algo(sw_algo)};
    }
    grid.seeds.clear();
    for (int i = 1; i <= sw_seeds; ++i) grid.seeds.push_back(static_cast<std::uint64_t>(i));
    cmd_sweep(grid, sw_out, sw_workers);
    std::cout << "wrote " << sw_out << "/results.csv\n";
    return 0;
  }

  if (slope->parsed()) {
    double value = cmd_slope(sl_csv, sl_algo);
    std::printf("slope %.17g\n", value);
    return 0;
  }

  if (lb->parsed()) {
    PackingSet pack = build_packing_set(lb_dp, lb_gamma, lb_pack_seed, lb_attempts);
    std::vector<std::uint64_t> seeds;
    for (int i = 1; i <= lb_seeds; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
    IdentificationReport report =
        identification_experiment(parse_algo(lb_algo), pack, parse_checkpoints(lb_checkpoints),
                                  seeds, lb_alpha, lb_H, lb_delta, lb_workers, lb_beta);
    std::printf("packing size %d\n", pack.size());
    for (const auto& [k, freq] : report.recovery_frequency)
      std::printf("K %lld recovery %.17g\n", k, freq);
    if (!lb_out.empty()) {
      std::ofstream csv(lb_out);
      if (!csv) throw IoError("cannot open for writing: " + lb_out);
      csv << "seed,theta_index,K,decoded,recovered\n";
      for (const auto& cell : report.cells)
        for (const auto& [k, decoded] : cell.decoded)
          csv << cell.seed << "," << cell.theta_index << "," << k << "," << decoded << ","
              << (decoded == cell.theta_index ? 1 : 0) << "\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const rfx::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const rfx::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 4;
  } catch (const rfx::GenerationError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
