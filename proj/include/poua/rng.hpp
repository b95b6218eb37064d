#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace poua {

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive hash of a key tuple; used to address counter-based streams.
std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts);

// Purposes of independent streams. Keying every draw by (seed, purpose,
// slot, ...) means adding draws for one purpose never perturbs another.
enum class StreamTag : std::uint64_t {
  selection = 1,
  traffic = 2,
  drop = 3,
  grind = 4,
  payload = 5,
  graph = 6,
  sampling = 7,
  address = 8,
  roster = 9,
};

// xoshiro256** seeded through SplitMix64. Distributions are implemented here
// so results do not depend on the standard library in use.
class Stream {
 public:
  explicit Stream(std::uint64_t key);
  Stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0);

  std::uint64_t next();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();
  // Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform01() < p; }
  std::uint64_t poisson(double mean);
  // Standard normal via Box-Muller.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Single uniform draw on [0, 1) addressed by (seed, tag, a, b).
double counter_uniform(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b = 0);

}  // namespace poua
