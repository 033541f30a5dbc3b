#pragma once

#include <utility>

#include "rfx/mdp.hpp"

namespace rfx {

// Exact finite-horizon value tables. Row/entry H is the all-zero terminal
// layer, so V has H+1 rows and Q has H+1 slices.
struct ValueTables {
  Matrix v;                 // (H+1) x S
  std::vector<Matrix> q;    // H+1 entries of S x A

  double value(int h, int s) const { return v(h, s); }
  double action_value(int h, int s, int a) const { return q[h](s, a); }
};

// Backward recursion with exact expectations; greedy ties break to the lowest
// action index so policies are comparable across modules.
std::pair<ValueTables, Policy> optimal_values(const LinearMixtureMdp& mdp,
                                              const RewardFunction& reward);

ValueTables policy_value(const LinearMixtureMdp& mdp, const RewardFunction& reward,
                         const Policy& pi);

// [P f^2](s,a) - ([P f](s,a))^2, clamped to be nonnegative.
double variance(const LinearMixtureMdp& mdp, const Vector& f, int s, int a);

// E_{s ~ mu}[V*_1(s) - V^pi_1(s)], computed from two exact passes.
double expected_gap(const LinearMixtureMdp& mdp, const RewardFunction& reward,
                    const Policy& pi);

}  // namespace rfx
