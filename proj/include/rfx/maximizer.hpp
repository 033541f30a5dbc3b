#pragma once

#include "rfx/mdp.hpp"
#include "rfx/rng.hpp"

namespace rfx {

// States above this count must go through the relaxed l1 path; 2^15 vertices
// is still milliseconds at the dimensions this library targets.
inline constexpr int kExactEnumerationCap = 15;

enum class MaximizerMethod { exact_vertex, l1_ascent };

struct MaximizerResult {
  Vector f_star;        // length S, entries in {0, box_hi} resp. [0, box_hi]
  double objective_l2;  // achieved ||inv_sqrt * M * f_star||_2
  MaximizerMethod method;
};

// Running covariance Sigma = lambda I + sum x x^T with a maintained inverse
// (rank-one identity, refreshed directly every 64 updates) and a lazily
// recomputed symmetric inverse square root.
class CovarianceView {
 public:
  CovarianceView(int dim, double lambda);
  static CovarianceView from_sigma(Matrix sigma, double lambda);

  int dim() const { return static_cast<int>(sigma_.rows()); }
  double lambda() const { return lambda_; }
  const Matrix& sigma() const { return sigma_; }
  const Matrix& sigma_inv() const { return sigma_inv_; }
  const Matrix& inv_sqrt() const;
  int update_count() const { return updates_since_refresh_; }

  void rank_one_update(const Vector& x);

  // x^T Sigma^{-1} x, clamped to be nonnegative.
  double inv_quadratic(const Vector& x) const;
  double inv_norm(const Vector& x) const;

 private:
  Matrix sigma_;
  Matrix sigma_inv_;
  mutable Matrix inv_sqrt_;
  mutable bool inv_sqrt_stale_ = false;
  double lambda_ = 0.0;
  int updates_since_refresh_ = 0;
};

inline void covariance_rank_one_update(CovarianceView& view, const Vector& x) {
  view.rank_one_update(x);
}

// Global maximizer of ||inv_sqrt * M * f||_2 over f in [0, box_hi]^S by
// enumerating the box vertices; a convex function attains its box-constrained
// maximum at a vertex. Refuses S above the enumeration cap.
MaximizerResult maximize_exact(const Matrix& M, const Matrix& inv_sqrt, double box_hi);

// Relaxed path: alternating sign / box ascent on ||inv_sqrt * M * f||_1.
// Each restart runs the ascent from a sign vector and its antipode; the first
// restart starts from the full-box sign pattern, later ones from random signs.
// Returns the l2 value of the best iterate under the l1 objective. When
// l1_traces is given, every ascent appends its per-iteration l1 values.
MaximizerResult maximize_l1_ascent(const Matrix& M, const Matrix& inv_sqrt, double box_hi,
                                   int restarts, SplitRng& rng,
                                   std::vector<std::vector<double>>* l1_traces = nullptr);

}  // namespace rfx
