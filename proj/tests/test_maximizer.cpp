#include <doctest.h>

#include <cmath>

#include "rfx/maximizer.hpp"

using namespace rfx;

namespace {

Matrix random_matrix(int rows, int cols, SplitRng& rng, double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_range(lo, hi);
  return m;
}

// Independent vertex-enumeration oracle, written as plain loops in the same
// canonical accumulation order the library commits to.
struct VertexOracle {
  Vector f_star;
  double objective_l2;
};

VertexOracle brute_force_vertices(const Matrix& M, const Matrix& inv_sqrt, double box_hi) {
  const int d = static_cast<int>(M.rows());
  const int S = static_cast<int>(M.cols());
  Matrix A(d, S);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < S; ++j) {
      double acc = 0.0;
      for (int k = 0; k < d; ++k) acc += inv_sqrt(i, k) * M(k, j);
      A(i, j) = acc;
    }
  double best = -1.0;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < (1ULL << S); ++mask) {
    double norm2 = 0.0;
    for (int i = 0; i < d; ++i) {
      double yi = 0.0;
      for (int j = 0; j < S; ++j)
        if (mask & (1ULL << j)) yi += A(i, j) * box_hi;
      norm2 += yi * yi;
    }
    if (norm2 > best) {
      best = norm2;
      best_mask = mask;
    }
  }
  VertexOracle oracle;
  oracle.f_star = Vector::Zero(S);
  for (int j = 0; j < S; ++j)
    if (best_mask & (1ULL << j)) oracle.f_star[j] = box_hi;
  oracle.objective_l2 = std::sqrt(best);
  return oracle;
}

Matrix random_spd_inv_sqrt(int d, SplitRng& rng) {
  Matrix G = random_matrix(d, d, rng);
  Matrix sigma = G * G.transpose() + 0.5 * Matrix::Identity(d, d);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

TEST_CASE("a zero box admits only the zero function") {
  SplitRng rng(1);
  Matrix M = random_matrix(3, 4, rng);
  MaximizerResult exact = maximize_exact(M, Matrix::Identity(3, 3), 0.0);
  CHECK(exact.objective_l2 == 0.0);
  CHECK(exact.f_star.cwiseAbs().maxCoeff() == 0.0);
  MaximizerResult ascent = maximize_l1_ascent(M, Matrix::Identity(3, 3), 0.0, 4, rng);
  CHECK(ascent.objective_l2 == 0.0);
}

TEST_CASE("doubling the box doubles the maximizer and its objective") {
  SplitRng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix M = random_matrix(3, 5, rng);
    Matrix W = random_spd_inv_sqrt(3, rng);
    MaximizerResult one = maximize_exact(M, W, 1.0);
    MaximizerResult two = maximize_exact(M, W, 2.0);
    CHECK((two.f_star - 2.0 * one.f_star).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(std::abs(two.objective_l2 - 2.0 * one.objective_l2) <= 1e-12);
  }
}

TEST_CASE("a two-state instance matches the four-vertex check") {
  Matrix M(2, 2);
  M << 0.9, -0.4, 0.2, 0.7;
  VertexOracle oracle = brute_force_vertices(M, Matrix::Identity(2, 2), 1.0);
  MaximizerResult got = maximize_exact(M, Matrix::Identity(2, 2), 1.0);
  CHECK(got.objective_l2 == oracle.objective_l2);
  CHECK((got.f_star - oracle.f_star).isZero(0.0));
}

TEST_CASE("vertex enumeration equals independent brute force exactly") {
  SplitRng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    int d = 1 + rng.next_index(5);
    int S = 2 + rng.next_index(9);  // up to 10 states
    Matrix M = random_matrix(d, S, rng);
    Matrix W = random_spd_inv_sqrt(d, rng);
    double box_hi = rng.next_range(0.1, 3.0);
    VertexOracle oracle = brute_force_vertices(M, W, box_hi);
    MaximizerResult got = maximize_exact(M, W, box_hi);
    CHECK(got.objective_l2 == oracle.objective_l2);
    CHECK((got.f_star - oracle.f_star).isZero(0.0));
  }
}

TEST_CASE("the exact path refuses state counts above the cap") {
  SplitRng rng(4);
  Matrix M = random_matrix(2, kExactEnumerationCap + 1, rng);
  CHECK_THROWS_AS(maximize_exact(M, Matrix::Identity(2, 2), 1.0), std::invalid_argument);
}

TEST_CASE("one-dimensional ascent equals the exact optimum") {
  SplitRng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    int S = 2 + rng.next_index(8);
    Matrix M = random_matrix(1, S, rng);
    Matrix W = Matrix::Constant(1, 1, rng.next_range(0.2, 2.0));
    MaximizerResult exact = maximize_exact(M, W, 1.5);
    SplitRng ascent_rng = rng.at(rep);
    MaximizerResult ascent = maximize_l1_ascent(M, W, 1.5, 1, ascent_rng);
    CHECK(ascent.objective_l2 == doctest::Approx(exact.objective_l2).epsilon(1e-12));
  }
}

TEST_CASE("a single nonzero row is recovered in one sweep") {
  SplitRng rng(6);
  Matrix M = Matrix::Zero(3, 6);
  for (int j = 0; j < 6; ++j) M(1, j) = rng.next_range(-1.0, 1.0);
  MaximizerResult exact = maximize_exact(M, Matrix::Identity(3, 3), 1.0);
  SplitRng ascent_rng(7);
  MaximizerResult ascent = maximize_l1_ascent(M, Matrix::Identity(3, 3), 1.0, 1, ascent_rng);
  CHECK(ascent.objective_l2 == doctest::Approx(exact.objective_l2).epsilon(1e-12));
}

TEST_CASE("ascent values sandwich between the optimum and its sqrt(d) relaxation") {
  SplitRng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    int d = 1 + rng.next_index(6);
    int S = 2 + rng.next_index(11);  // up to 12 states
    Matrix M = random_matrix(d, S, rng);
    Matrix W = random_spd_inv_sqrt(d, rng);
    MaximizerResult exact = maximize_exact(M, W, 1.0);
    SplitRng ascent_rng = rng.at(rep);
    MaximizerResult ascent = maximize_l1_ascent(M, W, 1.0, 8, ascent_rng);
    CHECK(exact.objective_l2 >= ascent.objective_l2 - 1e-12);
    CHECK(ascent.objective_l2 >= exact.objective_l2 / std::sqrt(double(d)) - 1e-12);
  }
}

TEST_CASE("the l1 objective never decreases within one ascent") {
  SplitRng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    int d = 2 + rng.next_index(5);
    int S = 3 + rng.next_index(8);
    Matrix M = random_matrix(d, S, rng);
    Matrix W = random_spd_inv_sqrt(d, rng);
    std::vector<std::vector<double>> traces;
    SplitRng ascent_rng = rng.at(rep);
    maximize_l1_ascent(M, W, 2.0, 3, ascent_rng, &traces);
    for (const auto& trace : traces)
      for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-12);
  }
}

TEST_CASE("returned vectors satisfy the norm sandwich") {
  SplitRng rng(10);
  for (int rep = 0; rep < 50; ++rep) {
    int d = 1 + rng.next_index(6);
    int S = 2 + rng.next_index(9);
    Matrix M = random_matrix(d, S, rng);
    Matrix W = random_spd_inv_sqrt(d, rng);
    SplitRng ascent_rng = rng.at(rep);
    MaximizerResult res = maximize_l1_ascent(M, W, 1.0, 4, ascent_rng);
    Vector y = W * (M * res.f_star);
    double l1 = y.lpNorm<1>(), l2 = y.norm();
    CHECK(l1 / std::sqrt(double(d)) <= l2 + 1e-12);
    CHECK(l2 <= l1 + 1e-12);
    for (int j = 0; j < S; ++j) {
      CHECK(res.f_star[j] >= 0.0);
      CHECK(res.f_star[j] <= 1.0);
    }
  }
}

TEST_CASE("restart counts below one are rejected") {
  SplitRng rng(11);
  Matrix M = random_matrix(2, 3, rng);
  CHECK_THROWS_AS(maximize_l1_ascent(M, Matrix::Identity(2, 2), 1.0, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("a basis-vector update inverts by hand") {
  CovarianceView view(2, 1.0);
  Vector e1(2);
  e1 << 1.0, 0.0;
  view.rank_one_update(e1);
  CHECK(view.sigma()(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(view.sigma()(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(view.sigma()(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(view.sigma_inv()(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(view.sigma_inv()(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a zero update changes nothing") {
  CovarianceView view(3, 0.7);
  Matrix sigma_before = view.sigma();
  Matrix inv_before = view.sigma_inv();
  view.rank_one_update(Vector::Zero(3));
  CHECK((view.sigma() - sigma_before).isZero(0.0));
  CHECK((view.sigma_inv() - inv_before).isZero(0.0));
}

TEST_CASE("the maintained inverse tracks a fresh inversion after many updates") {
  SplitRng rng(12);
  CovarianceView view(4, 0.25);
  for (int i = 0; i < 1000; ++i) {
    Vector x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.next_range(-1.0, 1.0);
    view.rank_one_update(x);
  }
  Matrix fresh = view.sigma().llt().solve(Matrix::Identity(4, 4));
  CHECK((view.sigma_inv() - fresh).norm() <= 1e-8);
  CHECK((view.sigma() * view.sigma_inv() - Matrix::Identity(4, 4)).norm() <= 1e-8);
}

TEST_CASE("the inverse square root squares back to the inverse") {
  SplitRng rng(13);
  CovarianceView view(3, 1.5);
  for (int i = 0; i < 40; ++i) {
    Vector x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.next_range(-1.0, 1.0);
    view.rank_one_update(x);
  }
  Matrix w = view.inv_sqrt();
  Matrix fresh = view.sigma().llt().solve(Matrix::Identity(3, 3));
  CHECK((w * w - fresh).norm() <= 1e-10);
  // update_count resets on direct refresh
  CHECK(view.update_count() == 40 % 64);
}

TEST_CASE("covariance quadratic forms are never negative") {
  SplitRng rng(14);
  CovarianceView view(3, 1e-4);
  for (int i = 0; i < 200; ++i) {
    Vector x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.next_range(-2.0, 2.0);
    view.rank_one_update(x);
    CHECK(view.inv_quadratic(x) >= 0.0);
  }
}

TEST_CASE("the covariance never drops below its regularizer") {
  SplitRng rng(15);
  CovarianceView view(4, 0.8);
  for (int i = 0; i < 100; ++i) {
    Vector x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.next_range(-1.0, 1.0);
    view.rank_one_update(x);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(view.sigma());
  CHECK(es.eigenvalues().minCoeff() >= view.lambda() - 1e-12);
  CHECK((view.sigma() * view.sigma_inv() - Matrix::Identity(4, 4)).norm() <= 1e-8);
}
