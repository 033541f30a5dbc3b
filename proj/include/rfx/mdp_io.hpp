#pragma once

#include <string>

#include "rfx/maximizer.hpp"
#include "rfx/mdp.hpp"

namespace rfx {

inline constexpr int kSchemaVersion = 1;

// Document layout: {schema_version, S, A, H, d, B, mu[S], theta_star[d],
// features[S][A][S][d]}. Reals round-trip exactly.
void save_mdp(const LinearMixtureMdp& mdp, const std::string& path);
LinearMixtureMdp load_mdp(const std::string& path);

// {schema_version, H, S, A, values[H][S][A]}
void save_reward(const RewardFunction& reward, const std::string& path);
RewardFunction load_reward(const std::string& path);

// {schema_version, H, S, actions[H][S]}
void save_policy(const Policy& policy, const std::string& path);
Policy load_policy(const std::string& path);

// Regression snapshot sufficient to run the planning phase later:
// {schema_version, algorithm, d, K, lambda, beta, theta[d], sigma[d][d]}.
struct PlannerInput {
  std::string algorithm;  // "hoeffding" or "bernstein"
  long long episodes = 0;
  double lambda = 0.0;
  double beta = 0.0;
  Vector theta;
  Matrix sigma;
};

void save_planner_input(const PlannerInput& state, const std::string& path);
PlannerInput load_planner_input(const std::string& path);

}  // namespace rfx
