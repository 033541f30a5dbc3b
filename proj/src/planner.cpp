#include "rfx/planner.hpp"

#include <algorithm>
#include <limits>

namespace rfx {

PlanResult plan(const FeatureView& features, const Vector& theta, const CovarianceView& cov,
                const RewardFunction& reward, double beta) {
  const int S = features.num_states;
  const int A = features.num_actions;
  const int H = reward.horizon;
  if (!(beta >= 0.0)) throw std::invalid_argument("plan: beta must be >= 0");
  if (theta.size() != features.dim) throw std::invalid_argument("plan: theta must have length d");
  if (!theta.allFinite()) throw std::invalid_argument("plan: theta must be finite");
  if (cov.dim() != features.dim) throw std::invalid_argument("plan: covariance dimension mismatch");
  if (reward.num_states != S || reward.num_actions != A)
    throw std::invalid_argument("plan: reward tables do not match the feature shape");

  PlanResult result;
  result.v = Matrix::Zero(H + 1, S);
  result.q.assign(H + 1, Matrix::Zero(S, A));
  result.policy.horizon = H;
  result.policy.num_states = S;
  result.policy.actions.assign(H, std::vector<int>(S, 0));

  const double hi = static_cast<double>(H);
  for (int h = H - 1; h >= 0; --h) {
    Vector v_next = result.v.row(h + 1);
    for (int s = 0; s < S; ++s) {
      int best_a = 0;
      double best_q = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        Vector psi = features.map(s, a) * v_next;
        double q = reward.at(h, s, a) + theta.dot(psi);
        if (beta > 0.0) q += beta * cov.inv_norm(psi);
        q = std::clamp(q, 0.0, hi);
        result.q[h](s, a) = q;
        if (q > best_q) {
          best_q = q;
          best_a = a;
        }
      }
      result.v(h, s) = best_q;
      result.policy.actions[h][s] = best_a;
    }
  }
  return result;
}

}  // namespace rfx
