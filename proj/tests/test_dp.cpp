#include <doctest.h>

#include <cmath>

#include "rfx/dp.hpp"
#include "rfx/hard_instance.hpp"

using namespace rfx;

namespace {

RewardFunction random_reward(int H, int S, int A, std::uint64_t seed) {
  RewardFunction r = RewardFunction::zeros(H, S, A);
  SplitRng rng(seed);
  for (int h = 0; h < H; ++h)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) r.at(h, s, a) = rng.next_double();
  return r;
}

// d = 1 instance whose features are the kernel rows themselves.
LinearMixtureMdp kernel_mdp(std::vector<std::vector<Vector>> rows, Vector mu, int H) {
  const int S = static_cast<int>(rows.size());
  const int A = static_cast<int>(rows[0].size());
  std::vector<Matrix> maps;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) maps.push_back(rows[s][a].transpose());
  Vector theta = Vector::Ones(1);
  return LinearMixtureMdp(S, A, H, 1, 1.0, std::move(maps), theta, std::move(mu));
}

}  // namespace

TEST_CASE("zero reward produces zero tables and the lowest-index policy") {
  LinearMixtureMdp mdp = random_mdp(5, 3, 4, 3, 1.0, 2);
  RewardFunction zero = RewardFunction::zeros(4, 5, 3);
  auto [tables, pi] = optimal_values(mdp, zero);
  CHECK(tables.v.cwiseAbs().maxCoeff() == 0.0);
  for (int h = 0; h < 4; ++h)
    for (int s = 0; s < 5; ++s) CHECK(pi.actions[h][s] == 0);
}

TEST_CASE("horizon one reduces to a reward argmax") {
  LinearMixtureMdp mdp = random_mdp(4, 3, 1, 2, 1.0, 8);
  RewardFunction r = random_reward(1, 4, 3, 12);
  auto [tables, pi] = optimal_values(mdp, r);
  for (int s = 0; s < 4; ++s) {
    double best = -1.0;
    for (int a = 0; a < 3; ++a) best = std::max(best, r.at(0, s, a));
    CHECK(tables.v(0, s) == doctest::Approx(best).epsilon(1e-15));
  }
}

TEST_CASE("hard-family value agrees with exhaustive first-action enumeration") {
  // All states except the start are absorbing, so a policy is determined by
  // its first action; enumerate them as an independent oracle.
  PackingSet pack = build_packing_set(8, 0.9, 3, 100000);
  const int H = 5;
  HardMdp hard = build_hard_mdp(pack, 2, 0.1, H);
  RewardFunction r = adversarial_reward(H, pack.size(), RewardOrientation::reward_down);
  auto [tables, pi] = optimal_values(hard.inner, r);

  double best = -1.0;
  for (int j = 0; j < pack.size(); ++j) {
    double p_down = hard.inner.transition_row(kHardStart, j)[kHardDown];
    best = std::max(best, static_cast<double>(H - 1) * p_down);
  }
  CHECK(tables.v(0, kHardStart) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("the greedy policy evaluates back to the optimal value") {
  LinearMixtureMdp mdp = random_mdp(6, 4, 5, 4, 1.0, 21);
  RewardFunction r = random_reward(5, 6, 4, 22);
  auto [tables, pi] = optimal_values(mdp, r);
  ValueTables under = policy_value(mdp, r, pi);
  CHECK((tables.v - under.v).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("value tables carry a zero terminal layer and stay in range") {
  LinearMixtureMdp mdp = random_mdp(5, 3, 4, 3, 1.0, 24);
  RewardFunction r = random_reward(4, 5, 3, 25);
  auto [tables, pi] = optimal_values(mdp, r);
  CHECK(tables.v.row(4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(tables.q[4].cwiseAbs().maxCoeff() == 0.0);
  for (int h = 0; h < 4; ++h) {
    CHECK(tables.v.row(h).minCoeff() >= 0.0);
    CHECK(tables.v.row(h).maxCoeff() <= 4.0 - h + 1e-12);
    for (int s = 0; s < 5; ++s) CHECK(tables.v(h, s) == tables.q[h].row(s).maxCoeff());
  }
}

TEST_CASE("policy evaluation matches Monte Carlo rollouts") {
  LinearMixtureMdp mdp = random_mdp(4, 3, 3, 3, 1.0, 33);
  RewardFunction r = random_reward(3, 4, 3, 34);
  Policy pi;
  pi.horizon = 3;
  pi.num_states = 4;
  pi.actions.assign(3, std::vector<int>(4, 0));
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 4; ++s) pi.actions[h][s] = (h + s) % 3;

  ValueTables under = policy_value(mdp, r, pi);
  const int start = 1;
  const int n = 100000;
  SplitRng rng(99);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    int s = start;
    double ret = 0.0;
    SplitRng episode = rng.at(i);
    for (int h = 0; h < 3; ++h) {
      int a = pi.actions[h][s];
      ret += r.at(h, s, a);
      SplitRng step = episode.at(h);
      s = mdp.sample_transition(s, a, step);
    }
    sum += ret;
    sum2 += ret * ret;
  }
  double mean = sum / n;
  double se = std::sqrt(std::max(sum2 / n - mean * mean, 0.0) / n);
  CHECK(std::abs(mean - under.v(0, start)) <= 3.0 * se + 1e-6);
}

TEST_CASE("variance of a constant and of a deterministic row is zero") {
  Vector mu(2);
  mu << 1.0, 0.0;
  Vector det_row(2), split_row(2);
  det_row << 1.0, 0.0;
  split_row << 0.5, 0.5;
  LinearMixtureMdp mdp = kernel_mdp({{det_row}, {split_row}}, mu, 2);

  Vector constant = Vector::Constant(2, 0.7);
  CHECK(variance(mdp, constant, 0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(variance(mdp, constant, 1, 0) == doctest::Approx(0.0).epsilon(1e-15));

  Vector indicator(2);
  indicator << 0.0, 1.0;
  CHECK(variance(mdp, indicator, 0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  // Two equally likely outcomes of 0 and 1: by hand, E f^2 - (E f)^2 = 1/4.
  CHECK(variance(mdp, indicator, 1, 0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("variance stays within the range bound on random instances") {
  LinearMixtureMdp mdp = random_mdp(5, 3, 4, 4, 1.0, 55);
  SplitRng rng(56);
  Vector f(5);
  for (int rep = 0; rep < 200; ++rep) {
    for (int j = 0; j < 5; ++j) f[j] = rng.next_range(0.0, 4.0);
    double spread = f.maxCoeff() - f.minCoeff();
    for (int s = 0; s < 5; ++s)
      for (int a = 0; a < 3; ++a) {
        double var = variance(mdp, f, s, a);
        CHECK(var >= 0.0);
        CHECK(var <= spread * spread / 4.0 + 1e-10);
      }
  }
}

TEST_CASE("gap of the optimal policy is zero and gaps are never negative") {
  LinearMixtureMdp mdp = random_mdp(5, 3, 4, 3, 1.0, 71);
  RewardFunction r = random_reward(4, 5, 3, 72);
  auto [tables, pi] = optimal_values(mdp, r);
  CHECK(expected_gap(mdp, r, pi) == doctest::Approx(0.0).epsilon(1e-12));

  SplitRng rng(73);
  for (int rep = 0; rep < 20; ++rep) {
    Policy random_pi = Policy::constant(4, 5, 0);
    for (auto& row : random_pi.actions)
      for (int& a : row) a = rng.next_index(3);
    CHECK(expected_gap(mdp, r, random_pi) >= -1e-10);
  }
}

TEST_CASE("a fixed suboptimal policy's gap matches two oracle passes") {
  PackingSet pack = build_packing_set(8, 0.9, 3, 100000);
  HardMdp hard = build_hard_mdp(pack, 1, 0.2, 4);
  RewardFunction r = adversarial_reward(4, pack.size(), RewardOrientation::reward_down);
  Policy pi = Policy::constant(4, 3, pack.size() - 1);
  auto [opt, opt_pi] = optimal_values(hard.inner, r);
  ValueTables under = policy_value(hard.inner, r, pi);
  double expect = hard.inner.init_dist().dot(Vector(opt.v.row(0) - under.v.row(0)));
  CHECK(expected_gap(hard.inner, r, pi) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("optimal values dominate every policy") {
  LinearMixtureMdp mdp = random_mdp(4, 3, 3, 3, 1.0, 81);
  RewardFunction r = random_reward(3, 4, 3, 82);
  auto [tables, pi] = optimal_values(mdp, r);
  SplitRng rng(83);
  for (int rep = 0; rep < 30; ++rep) {
    Policy other = Policy::constant(3, 4, 0);
    for (auto& row : other.actions)
      for (int& a : row) a = rng.next_index(3);
    ValueTables under = policy_value(mdp, r, other);
    for (int s = 0; s < 4; ++s) CHECK(tables.v(0, s) >= under.v(0, s) - 1e-10);
  }
}

TEST_CASE("pointwise larger rewards give pointwise larger optimal values") {
  LinearMixtureMdp mdp = random_mdp(4, 2, 3, 3, 1.0, 91);
  RewardFunction lo = random_reward(3, 4, 2, 92);
  RewardFunction hi = lo;
  SplitRng rng(93);
  for (int h = 0; h < 3; ++h)
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 2; ++a)
        hi.at(h, s, a) = std::min(1.0, lo.at(h, s, a) + 0.3 * rng.next_double());
  auto [lo_tables, lo_pi] = optimal_values(mdp, lo);
  auto [hi_tables, hi_pi] = optimal_values(mdp, hi);
  for (int s = 0; s < 4; ++s) CHECK(hi_tables.v(0, s) >= lo_tables.v(0, s) - 1e-12);
}

TEST_CASE("shape mismatches are argument errors") {
  LinearMixtureMdp mdp = random_mdp(4, 2, 3, 3, 1.0, 95);
  RewardFunction bad = RewardFunction::zeros(2, 4, 2);
  CHECK_THROWS_AS(optimal_values(mdp, bad), std::invalid_argument);
  Policy bad_pi = Policy::constant(3, 4, 5);
  RewardFunction good = RewardFunction::zeros(3, 4, 2);
  CHECK_THROWS_AS(policy_value(mdp, good, bad_pi), std::invalid_argument);
}
