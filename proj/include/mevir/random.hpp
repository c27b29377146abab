#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace mevir {

/// 64-bit FNV-1a; stable across platforms.
std::uint64_t hash_string(std::string_view text);

/// Counter-based seed derivation: mixes a master seed with a path of
/// integers (step, agent index, ...) so that per-stream seeds do not depend
/// on the order in which streams are consumed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

/// Deterministic random source. Conversions to doubles are done here rather
/// than through <random> distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0,1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n);
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

}  // namespace mevir
