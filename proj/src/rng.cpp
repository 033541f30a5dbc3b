#include "rfx/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rfx {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitRng::mix(std::uint64_t a, std::uint64_t b) {
  return finalize(finalize(a + kGolden) + kGolden * (b + 1));
}

std::uint64_t SplitRng::next_u64() {
  // SplitMix64 sequence seeded by the stream key.
  counter_ += 1;
  return finalize(key_ + kGolden * counter_);
}

double SplitRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitRng::next_range(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

int SplitRng::next_index(int n) {
  if (n <= 0) throw std::invalid_argument("SplitRng::next_index: n must be positive");
  // Rejection-free via 128-bit style scaling; bias is negligible for n << 2^64
  // but we keep the multiply-shift form for determinism across platforms.
  return static_cast<int>(next_double() * n) % n;
}

double SplitRng::next_gaussian() {
  // Box-Muller; u kept away from 0 so log() is finite.
  double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  double v = next_double();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
}

bool SplitRng::next_sign() { return (next_u64() & 1) != 0; }

int SplitRng::sample_discrete(const double* w, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += w[i];
  if (!(total > 0.0)) throw std::invalid_argument("sample_discrete: total weight must be positive");
  double u = next_double() * total;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return n - 1;
}

}  // namespace rfx
