#pragma once

#include <cstdint>
#include <random>

namespace patrol {

// Portable seeded generator. std::mt19937_64 is fully specified by the
// standard; the distributions are not, so the bounded draws are done here to
// keep every run bit-identical across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index so that independent sub-streams
// (per run, per episode, per agent) never share state.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace patrol
