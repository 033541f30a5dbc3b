#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rfx/bernstein.hpp"
#include "rfx/mdp.hpp"

namespace rfx {

// Sign vectors in {-1,+1}^{d'} with pairwise inner products at most d'*gamma.
struct PackingSet {
  int dim = 0;        // d'
  double gamma = 0.0;
  std::vector<Eigen::VectorXi> vectors;

  int size() const { return static_cast<int>(vectors.size()); }
  // ceil(exp(d' gamma^2 / 4)) - 1
  static int target_size(int d_prime, double gamma);
};

// Rejection sampling: draw uniform sign vectors, keep a candidate iff its
// inner product with every kept vector stays within the bound, stop at the
// target cardinality. The returned set is re-verified pair by pair.
PackingSet build_packing_set(int d_prime, double gamma, std::uint64_t seed,
                             long long max_attempts);

// Three-state family: a start state whose transitions split between two
// absorbing states with a parameter-dependent bias. State indices:
inline constexpr int kHardStart = 0;  // branching state
inline constexpr int kHardUp = 1;     // absorbing, bias pushes here for a = a_i
inline constexpr int kHardDown = 2;   // absorbing

struct HardMdp {
  LinearMixtureMdp inner;
  int theta_index = 0;
  double alpha_scale = 0.0;
};

// Features use the packing dimension d' uniformly in the normalizations, so
// P(up | start, a_j) = 1/2 + (alpha / (sqrt(2) d')) <pack[i], a_j>.
// Requires alpha / sqrt(2) <= 1/2 so all rows stay inside [0,1].
HardMdp build_hard_mdp(const PackingSet& pack, int theta_index, double alpha_scale, int H);

// Which absorbing state carries reward 1. With the reward on the up state the
// optimal first action is exactly the parameter's own pack vector, which is
// what the identification decoder relies on.
enum class RewardOrientation { reward_up, reward_down };

// r_h(down, .) = 1 and all else 0 for the default orientation.
RewardFunction adversarial_reward(int H, int num_actions,
                                  RewardOrientation orientation = RewardOrientation::reward_down);

enum class Algo { hoeffding, bernstein };

struct IdentificationCell {
  std::uint64_t seed = 0;
  int theta_index = 0;
  std::map<long long, int> decoded;  // checkpoint K -> decoded index
};

struct IdentificationReport {
  std::vector<long long> checkpoints;
  std::vector<IdentificationCell> cells;
  std::map<long long, double> recovery_frequency;
};

// One cell per seed with the true parameter index cycling through the pack.
// Each cell explores once to max K, decodes the planner's first action at the
// requested checkpoints against the reward-on-up adversarial reward, and the
// report aggregates how often the decoded index matches the truth.
//
// The runs use beta = sqrt(lambda) B = 1, the deterministic part of the
// formula radius: the formula constants keep every optimistic Q clipped at H
// on this family for any desk-scale K, which freezes the greedy policy at the
// tie rule and leaves nothing to decode. Pass beta_override to study other
// radii.
IdentificationReport identification_experiment(Algo algo, const PackingSet& pack,
                                               const std::vector<long long>& checkpoints,
                                               const std::vector<std::uint64_t>& seeds,
                                               double alpha_scale, int H, double delta,
                                               int workers, double beta_override = 1.0);

}  // namespace rfx
