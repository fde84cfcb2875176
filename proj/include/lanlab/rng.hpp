#ifndef LANLAB_RNG_HPP
#define LANLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace lanlab {

/// splitmix64 finalizer; used to derive well-separated seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives the seed for replication `rep` from an experiment seed.
/// Each replication gets an independent stream; the map is stable across
/// runs and thread counts.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep) {
  return mix64(mix64(seed) ^ mix64(rep + 0x51ed270b8d2a1fc5ULL));
}

/// Gaussian stream backed by mt19937_64. One instance per path.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double operator()() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lanlab

#endif  // LANLAB_RNG_HPP
