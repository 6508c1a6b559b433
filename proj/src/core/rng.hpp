#pragma once

#include <cstdint>
#include <initializer_list>

namespace ptcov {

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// reproducible independently of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derives an independent stream from a master seed and a tag path,
  // e.g. substream(seed, {stream::fields, rep, k}). Streams with different
  // paths are decorrelated by construction.
  static Rng substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  std::uint64_t next();

  double uniform01();                     // [0, 1)
  double uniform(double a, double b);     // [a, b)
  double normal();                        // N(0, 1)
  long poisson(double mean);
  std::size_t uniform_index(std::size_t n);  // {0, ..., n-1}

 private:
  std::uint64_t state_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Named substream tags. All randomness in a run flows from one master seed
// through these, so each component is independently reproducible.
namespace stream {
inline constexpr std::uint64_t fields = 1;
inline constexpr std::uint64_t pattern = 2;
inline constexpr std::uint64_t shifts = 3;
inline constexpr std::uint64_t sampling = 4;
inline constexpr std::uint64_t gibbs = 5;
inline constexpr std::uint64_t select = 6;
}  // namespace stream

}  // namespace ptcov
