#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace hds {

enum class Errc {
  invalid_argument = 1,
  shape_mismatch = 2,
  domain_error = 3,
  undefined_metric = 4,
  io_error = 5,
  numeric_error = 6,
  geometry_error = 7,
  state_error = 8,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

inline void require(bool cond, Errc c, const std::string& msg) {
  if (!cond) fail(c, msg);
}

namespace rng {

// SplitMix64 finalizer, used only to derive stream seeds.
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One tag per purpose so sampling, weight init, shuffling etc. draw from
// independent sequences even when they share a master seed.
enum class Stream : std::uint64_t {
  sampling = 0x5eed0001,
  weight_init = 0x5eed0002,
  shuffle = 0x5eed0003,
  split = 0x5eed0004,
  pso = 0x5eed0005,
  snapshots = 0x5eed0006,
};

// All randomness goes through mt19937_64: the standard fixes its output, so a
// (seed, stream, index) triple pins every draw on any platform.
inline std::mt19937_64 make_stream(std::uint64_t seed, Stream s, std::uint64_t index = 0) {
  return std::mt19937_64(mix(mix(seed ^ mix(static_cast<std::uint64_t>(s))) ^ index));
}

// [0, 1). 53 high bits of the generator word; avoids the
// implementation-defined std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Uniform integer in [0, n) by rejection, bias-free.
inline std::uint64_t below(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

}  // namespace rng
}  // namespace hds
