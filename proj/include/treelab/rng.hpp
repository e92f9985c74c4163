#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace treelab {

// Counter-based splittable random stream (SplitMix64 output function over a
// keyed counter). Streams are derived by key, never by sharing state, so a
// replica's draws do not depend on how replicas are scheduled across workers.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  // Child stream keyed by (this key, id).
  Stream split(std::uint64_t id) const { return Stream(key_, id); }

  result_type operator()() { return at(counter_++); }

  // Value at an absolute counter position; does not advance the stream.
  result_type at(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGolden);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return to_unit(operator()()); }
  double uniform_at(std::uint64_t counter) const { return to_unit(at(counter)); }

  // Inverse-CDF draw from a probability vector (need not be normalized exactly).
  int categorical(std::span<const double> p);

  std::uint64_t key() const { return key_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  Stream(std::uint64_t parent, std::uint64_t id)
      : key_(mix(parent ^ mix(id + kGolden))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace treelab
