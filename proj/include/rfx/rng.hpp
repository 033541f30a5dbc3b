#pragma once

#include <cstdint>

namespace rfx {

// Counter-based splittable random stream. Every draw is a stateless hash of
// (key, counter), and substreams are derived by hashing extra tags into the
// key, so a draw never depends on how many draws happened in other streams.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t key) : key_(key) {}

  // Avalanche mix of two words; used both internally and to build cell keys.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

  // Derived substream for (episode, step, purpose, ...) style addressing.
  SplitRng at(std::uint64_t a) const { return SplitRng(mix(key_, a)); }
  SplitRng at(std::uint64_t a, std::uint64_t b) const {
    return SplitRng(mix(mix(key_, a), b));
  }
  SplitRng at(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return SplitRng(mix(mix(mix(key_, a), b), c));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  double next_double();  // uniform in [0, 1)
  double next_range(double lo, double hi);
  int next_index(int n);  // uniform in {0, ..., n-1}
  double next_gaussian();
  bool next_sign();  // fair coin, true = +1

  // Draws an index from nonnegative weights w[0..n-1]; weights need not be
  // normalized but must have positive total.
  int sample_discrete(const double* w, int n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rfx
