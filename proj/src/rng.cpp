#include "poua/rng.hpp"

#include <cmath>
#include <numbers>

namespace poua {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

namespace {
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Stream::Stream(std::uint64_t key) {
  std::uint64_t x = key;
  for (auto& word : s_) {
    x += 0x9e3779b97f4a7c15ULL;
    word = splitmix64(x);
  }
}

Stream::Stream(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b)
    : Stream(mix_key({seed, static_cast<std::uint64_t>(tag), a, b})) {}

std::uint64_t Stream::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Stream::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Stream::below(std::uint64_t n) {
  // Rejection on the top of the range keeps the draw exactly uniform.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

std::uint64_t Stream::poisson(double mean) {
  // Inversion in chunks keeps exp(-chunk) far from underflow.
  constexpr double kChunk = 200.0;
  std::uint64_t total = 0;
  while (mean > 0.0) {
    const double m = mean > kChunk ? kChunk : mean;
    mean -= m;
    const double target = uniform01();
    double p = std::exp(-m);
    double cdf = p;
    std::uint64_t k = 0;
    while (target >= cdf && p > 0.0) {
      ++k;
      p *= m / static_cast<double>(k);
      cdf += p;
    }
    total += k;
  }
  return total;
}

double Stream::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double counter_uniform(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t x = mix_key({seed, static_cast<std::uint64_t>(tag), a, b});
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace poua
