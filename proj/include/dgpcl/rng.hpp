#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace dgpcl {

using RngEngine = std::mt19937_64;

// splitmix64 finalizer, used to decorrelate seed material.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream for repetition k of a run seeded with base_seed.
inline std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t k) {
  return mix64(mix64(base_seed) ^ mix64(k + 0x51ed270b0a1cbe6dULL));
}

inline RngEngine make_stream(std::uint64_t base_seed, std::uint64_t k) {
  return RngEngine(stream_seed(base_seed, k));
}

// Uniform on [0,1) with 53 random bits. No distribution object state.
inline double runif01(RngEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double runif(RngEngine& rng, double a, double b) {
  return a + (b - a) * runif01(rng);
}

// Uniform on {0, ..., n-1} without modulo bias.
inline std::size_t runif_index(RngEngine& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("runif_index: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return static_cast<std::size_t>(v % n);
}

// Standard normal via Box-Muller, one value per call and no cached spare, so
// engine state alone determines every future draw (checkpoint/resume relies
// on this).
inline double rnorm(RngEngine& rng) {
  double u1 = runif01(rng);
  while (u1 <= 0.0) u1 = runif01(rng);
  const double u2 = runif01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

inline std::string rng_to_string(const RngEngine& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

inline RngEngine rng_from_string(const std::string& s) {
  RngEngine rng;
  std::istringstream is(s);
  is >> rng;
  if (is.fail()) throw std::runtime_error("rng_from_string: malformed engine state");
  return rng;
}

}  // namespace dgpcl
