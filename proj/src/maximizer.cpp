#include "rfx/maximizer.hpp"

#include <cassert>
#include <cmath>

namespace rfx {

namespace {

constexpr int kRefreshInterval = 64;

// Plain scalar product in canonical (i, j, k) order so results are bit-stable
// against an independently written loop.
Matrix transform_columns(const Matrix& inv_sqrt, const Matrix& M) {
  const int d = static_cast<int>(inv_sqrt.rows());
  const int S = static_cast<int>(M.cols());
  Matrix A(d, S);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < S; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += inv_sqrt(i, k) * M(k, j);
      A(i, j) = acc;
    }
  }
  return A;
}

double vertex_objective_sq(const Matrix& A, std::uint64_t mask, double box_hi) {
  const int d = static_cast<int>(A.rows());
  const int S = static_cast<int>(A.cols());
  double norm2 = 0.0;
  for (int i = 0; i < d; ++i) {
    double yi = 0.0;
    for (int j = 0; j < S; ++j)
      if (mask & (1ULL << j)) yi += A(i, j) * box_hi;
    norm2 += yi * yi;
  }
  return norm2;
}

}  // namespace

CovarianceView::CovarianceView(int dim, double lambda) : lambda_(lambda) {
  if (dim < 1) throw std::invalid_argument("CovarianceView: dim must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("CovarianceView: lambda must be positive");
  sigma_ = Matrix::Identity(dim, dim) * lambda;
  sigma_inv_ = Matrix::Identity(dim, dim) / lambda;
  inv_sqrt_ = Matrix::Identity(dim, dim) / std::sqrt(lambda);
}

CovarianceView CovarianceView::from_sigma(Matrix sigma, double lambda) {
  if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
    throw std::invalid_argument("CovarianceView: sigma must be square");
  if (!(lambda > 0.0)) throw std::invalid_argument("CovarianceView: lambda must be positive");
  CovarianceView view(static_cast<int>(sigma.rows()), lambda);
  view.sigma_ = std::move(sigma);
  Eigen::LLT<Matrix> llt(view.sigma_);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("CovarianceView: sigma must be positive definite");
  view.sigma_inv_ = llt.solve(Matrix::Identity(view.dim(), view.dim()));
  view.inv_sqrt_stale_ = true;
  return view;
}

const Matrix& CovarianceView::inv_sqrt() const {
  if (inv_sqrt_stale_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_);
    inv_sqrt_ = es.eigenvectors() *
                es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
    inv_sqrt_stale_ = false;
  }
  return inv_sqrt_;
}

void CovarianceView::rank_one_update(const Vector& x) {
  if (x.size() != dim()) throw std::invalid_argument("rank_one_update: dimension mismatch");
  sigma_.selfadjointView<Eigen::Lower>().rankUpdate(x);
  sigma_ = sigma_.selfadjointView<Eigen::Lower>();
  Vector w = sigma_inv_ * x;
  double denom = 1.0 + x.dot(w);
  assert(denom > 0.0 && "covariance update cannot be singular with lambda > 0");
  sigma_inv_ -= (w * w.transpose()) / denom;
  inv_sqrt_stale_ = true;
  if (++updates_since_refresh_ >= kRefreshInterval) {
    sigma_inv_ = sigma_.llt().solve(Matrix::Identity(dim(), dim()));
    updates_since_refresh_ = 0;
  }
}

double CovarianceView::inv_quadratic(const Vector& x) const {
  return std::max(0.0, x.dot(sigma_inv_ * x));
}

double CovarianceView::inv_norm(const Vector& x) const {
  return std::sqrt(inv_quadratic(x));
}

MaximizerResult maximize_exact(const Matrix& M, const Matrix& inv_sqrt, double box_hi) {
  const int S = static_cast<int>(M.cols());
  if (S > kExactEnumerationCap)
    throw std::invalid_argument(
        "maximize_exact: state count above the enumeration cap, use maximize_l1_ascent");
  if (box_hi < 0.0) throw std::invalid_argument("maximize_exact: box_hi must be >= 0");

  MaximizerResult result;
  result.f_star = Vector::Zero(S);
  result.objective_l2 = 0.0;
  result.method = MaximizerMethod::exact_vertex;
  if (box_hi == 0.0) return result;

  const Matrix A = transform_columns(inv_sqrt, M);
  double best = -1.0;
  std::uint64_t best_mask = 0;
  const std::uint64_t count = 1ULL << S;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double obj = vertex_objective_sq(A, mask, box_hi);
    if (obj > best) {
      best = obj;
      best_mask = mask;
    }
  }
  for (int j = 0; j < S; ++j)
    if (best_mask & (1ULL << j)) result.f_star[j] = box_hi;
  result.objective_l2 = std::sqrt(best);
  return result;
}

namespace {

struct AscentOutcome {
  Vector f;
  double l1;
};

// One ascent to a stable sign vector. The l1 value never decreases step to
// step: the box step maximizes the current linear form and the sign step
// matches the form to the achieved vector.
AscentOutcome ascend(const Matrix& A, double box_hi, Vector sigma,
                     std::vector<std::vector<double>>* traces) {
  const int d = static_cast<int>(A.rows());
  const int S = static_cast<int>(A.cols());
  AscentOutcome best{Vector::Zero(S), -1.0};
  if (traces) traces->emplace_back();
  double prev_l1 = -1.0;
  for (int iter = 0; iter < 1000; ++iter) {
    Vector w = A.transpose() * sigma;
    Vector f = Vector::Zero(S);
    for (int j = 0; j < S; ++j) f[j] = w[j] > 0.0 ? box_hi : 0.0;
    Vector y = A * f;
    double l1 = y.lpNorm<1>();
    if (traces) traces->back().push_back(l1);
    if (l1 > best.l1) {
      best.l1 = l1;
      best.f = f;
    }
    Vector new_sigma(d);
    for (int i = 0; i < d; ++i) new_sigma[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    bool stable = (new_sigma - sigma).isZero(0.0);
    if (stable || l1 <= prev_l1) break;
    sigma = new_sigma;
    prev_l1 = l1;
  }
  return best;
}

}  // namespace

MaximizerResult maximize_l1_ascent(const Matrix& M, const Matrix& inv_sqrt, double box_hi,
                                   int restarts, SplitRng& rng,
                                   std::vector<std::vector<double>>* l1_traces) {
  if (restarts < 1) throw std::invalid_argument("maximize_l1_ascent: restarts must be >= 1");
  if (box_hi < 0.0) throw std::invalid_argument("maximize_l1_ascent: box_hi must be >= 0");
  const int d = static_cast<int>(M.rows());
  const int S = static_cast<int>(M.cols());

  MaximizerResult result;
  result.f_star = Vector::Zero(S);
  result.objective_l2 = 0.0;
  result.method = MaximizerMethod::l1_ascent;
  if (box_hi == 0.0) return result;

  const Matrix A = transform_columns(inv_sqrt, M);
  Vector best_f = Vector::Zero(S);
  double best_l1 = -1.0;
  for (int r = 0; r < restarts; ++r) {
    Vector sigma(d);
    if (r == 0) {
      Vector y = A * Vector::Constant(S, box_hi);
      for (int i = 0; i < d; ++i) sigma[i] = y[i] >= 0.0 ? 1.0 : -1.0;
    } else {
      for (int i = 0; i < d; ++i) sigma[i] = rng.next_sign() ? 1.0 : -1.0;
    }
    for (int polarity = 0; polarity < 2; ++polarity) {
      AscentOutcome out =
          ascend(A, box_hi, polarity == 0 ? sigma : Vector(-sigma), l1_traces);
      if (out.l1 > best_l1) {
        best_l1 = out.l1;
        best_f = out.f;
      }
    }
  }
  result.f_star = best_f;
  result.objective_l2 = (A * best_f).norm();
  return result;
}

}  // namespace rfx
