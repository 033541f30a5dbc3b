#pragma once

#include "rfx/maximizer.hpp"
#include "rfx/mdp.hpp"

namespace rfx {

struct PlanResult {
  Policy policy;
  Matrix v;               // (H+1) x S, clipped to [0, H]
  std::vector<Matrix> q;  // H+1 entries of S x A, clipped to [0, H]
};

// Backward optimistic value iteration: for each step and (s,a),
//   Q(s,a) = clip_{[0,H]}( r(s,a) + <psi_{V_next}(s,a), theta>
//                          + beta * ||psi_{V_next}(s,a)||_{Sigma^{-1}} ),
// greedy values and a lowest-index-tie policy.
PlanResult plan(const FeatureView& features, const Vector& theta, const CovarianceView& cov,
                const RewardFunction& reward, double beta);

}  // namespace rfx
