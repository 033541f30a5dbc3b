#include "rfx/dp.hpp"

#include <cmath>
#include <limits>

namespace rfx {

namespace {

void check_reward_shape(const LinearMixtureMdp& mdp, const RewardFunction& reward) {
  if (reward.horizon != mdp.horizon() || reward.num_states != mdp.num_states() ||
      reward.num_actions != mdp.num_actions())
    throw std::invalid_argument("reward tables do not match the MDP shape");
  if (static_cast<int>(reward.values.size()) != reward.horizon)
    throw std::invalid_argument("reward tables do not match their declared horizon");
}

void check_policy_shape(const LinearMixtureMdp& mdp, const Policy& pi) {
  if (pi.horizon != mdp.horizon() || pi.num_states != mdp.num_states())
    throw std::invalid_argument("policy does not match the MDP shape");
  for (const auto& row : pi.actions)
    for (int a : row)
      if (a < 0 || a >= mdp.num_actions())
        throw std::invalid_argument("policy holds an invalid action index");
}

}  // namespace

std::pair<ValueTables, Policy> optimal_values(const LinearMixtureMdp& mdp,
                                              const RewardFunction& reward) {
  check_reward_shape(mdp, reward);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ValueTables tables;
  tables.v = Matrix::Zero(H + 1, S);
  tables.q.assign(H + 1, Matrix::Zero(S, A));
  Policy pi;
  pi.horizon = H;
  pi.num_states = S;
  pi.actions.assign(H, std::vector<int>(S, 0));

  for (int h = H - 1; h >= 0; --h) {
    Vector v_next = tables.v.row(h + 1);
    for (int s = 0; s < S; ++s) {
      int best_a = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double q = reward.at(h, s, a) + mdp.transition_row(s, a).dot(v_next);
        tables.q[h](s, a) = q;
        if (q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      tables.v(h, s) = best_q;
      pi.actions[h][s] = best_a;
    }
  }
  return {std::move(tables), std::move(pi)};
}

ValueTables policy_value(const LinearMixtureMdp& mdp, const RewardFunction& reward,
                         const Policy& pi) {
  check_reward_shape(mdp, reward);
  check_policy_shape(mdp, pi);
  const int S = mdp.num_states(), A = mdp.num_actions(), H = mdp.horizon();
  ValueTables tables;
  tables.v = Matrix::Zero(H + 1, S);
  tables.q.assign(H + 1, Matrix::Zero(S, A));

  for (int h = H - 1; h >= 0; --h) {
    Vector v_next = tables.v.row(h + 1);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a)
        tables.q[h](s, a) = reward.at(h, s, a) + mdp.transition_row(s, a).dot(v_next);
      tables.v(h, s) = tables.q[h](s, pi.actions[h][s]);
    }
  }
  return tables;
}

double variance(const LinearMixtureMdp& mdp, const Vector& f, int s, int a) {
  if (f.size() != mdp.num_states()) throw std::invalid_argument("variance: f must have length S");
  if (!f.allFinite()) throw std::invalid_argument("variance: f must be finite");
  const Vector& row = mdp.transition_row(s, a);
  double mean = row.dot(f);
  double second = row.dot(f.cwiseProduct(f));
  return std::max(0.0, second - mean * mean);
}

double expected_gap(const LinearMixtureMdp& mdp, const RewardFunction& reward,
                    const Policy& pi) {
  auto [opt, opt_pi] = optimal_values(mdp, reward);
  (void)opt_pi;
  ValueTables under_pi = policy_value(mdp, reward, pi);
  Vector diff = opt.v.row(0) - under_pi.v.row(0);
  return mdp.init_dist().dot(diff);
}

}  // namespace rfx
