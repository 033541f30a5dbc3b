#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rfx/errors.hpp"
#include "rfx/rng.hpp"

namespace rfx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Deterministic time-indexed reward tables, one S x A matrix per step.
struct RewardFunction {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<Matrix> values;  // values[h](s, a), h in [0, H)

  static RewardFunction zeros(int H, int S, int A);

  double at(int h, int s, int a) const { return values[h](s, a); }
  double& at(int h, int s, int a) { return values[h](s, a); }

  // All entries finite and inside [0 - tol, 1 + tol].
  bool in_unit_range(double tol = 0.0) const;
};

// Deterministic time-indexed policy.
struct Policy {
  int horizon = 0;
  int num_states = 0;
  std::vector<std::vector<int>> actions;  // actions[h][s]

  static Policy constant(int H, int S, int a = 0);
  int at(int h, int s) const { return actions[h][s]; }
};

struct ValidationIssue {
  std::string what;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

// Read-only view over the per-(s,a) feature aggregation maps. Column s' of
// map(s,a) is phi(s'|s,a), so psi_V(s,a) = map(s,a) * V.
struct FeatureView {
  int num_states = 0;
  int num_actions = 0;
  int dim = 0;
  const std::vector<Matrix>* maps = nullptr;

  const Matrix& map(int s, int a) const { return (*maps)[s * num_actions + a]; }
  Vector psi(const Vector& v, int s, int a) const { return map(s, a) * v; }
};

// Finite linear mixture MDP: P(s'|s,a) = <phi(s'|s,a), theta*> with known
// features and unknown (to the learner) parameter vector. Immutable after
// construction and safe to share read-only across threads.
class LinearMixtureMdp {
 public:
  // psi_maps holds one d x S matrix per (s,a), indexed s * A + a.
  LinearMixtureMdp(int S, int A, int H, int d, double B, std::vector<Matrix> psi_maps,
                   Vector theta_star, Vector init_dist);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int dim() const { return dim_; }
  double param_bound() const { return param_bound_; }
  const Vector& theta_star() const { return theta_star_; }
  const Vector& init_dist() const { return init_dist_; }

  FeatureView features() const {
    return FeatureView{num_states_, num_actions_, dim_, &psi_maps_};
  }
  const Matrix& psi_map(int s, int a) const { return psi_maps_[index(s, a)]; }
  double feature(int s, int a, int s_next, int i) const {
    return psi_maps_[index(s, a)](i, s_next);
  }

  // psi_V(s,a) = sum_{s'} phi(s'|s,a) V(s').
  Vector psi(const Vector& v, int s, int a) const;

  // Raw transition row <phi(.|s,a), theta*>; may carry rounding-level
  // negatives, which sampling clamps away.
  const Vector& transition_row(int s, int a) const { return prob_rows_[index(s, a)]; }

  int sample_transition(int s, int a, SplitRng& rng) const;
  int sample_initial(SplitRng& rng) const;

  ValidationReport validate() const;
  void require_valid() const;  // throws ModelError with the report summary

 private:
  int index(int s, int a) const;
  void check_state(int s) const;
  void check_action(int a) const;

  int num_states_, num_actions_, horizon_, dim_;
  double param_bound_;
  std::vector<Matrix> psi_maps_;
  Vector theta_star_;
  Vector init_dist_;
  std::vector<Vector> prob_rows_;      // raw <phi, theta*> rows
  std::vector<Vector> sampling_rows_;  // clamped + renormalized, empty if row unusable
  std::vector<double> row_deviation_;  // max(|sum-1|, worst negative excess)
};

// Valid random instance: unit-norm parameter direction, a baseline transition
// kernel on that axis and d-1 zero-mass signed measures orthogonal to it,
// scaled so every invariant of the mixture model holds. Deterministic in seed.
LinearMixtureMdp random_mdp(int S, int A, int H, int d, double B, std::uint64_t seed);

// Exact max over V in {0,1}^S of ||map * V||_2 (vertex enumeration, S <= 15).
double max_vertex_psi_norm(const Matrix& map);

}  // namespace rfx
