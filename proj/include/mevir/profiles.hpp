#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mevir {

/// Intuitive moral foundations, in the fixed order used by every framing
/// vector and profile array (including scenario and lexicon files).
enum class Foundation : std::size_t {
  Care,
  FairnessEquity,
  FairnessProportionality,
  Liberty,
  Loyalty,
  Authority,
  Purity,
};
inline constexpr std::size_t kFoundationCount = 7;

/// Cooperative domains. Pathogen is the non-social contamination game that
/// feeds the Purity foundation.
enum class MacDomain : std::size_t {
  Kin,
  Group,
  Reciprocity,
  Heroism,
  Deference,
  Fairness,
  Property,
  Pathogen,
};
inline constexpr std::size_t kMacDomainCount = 8;

std::string_view to_string(Foundation f);
std::string_view to_string(MacDomain d);
std::optional<Foundation> parse_foundation(std::string_view name);
std::optional<MacDomain> parse_mac_domain(std::string_view name);

/// Raised when a value violates a documented domain invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an identifier does not resolve.
class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Per-foundation intensity of the moral framing attached to content.
class FramingVector {
 public:
  using Values = std::array<double, kFoundationCount>;

  FramingVector() = default;
  explicit FramingVector(const Values& values);

  double operator[](Foundation f) const { return values_[static_cast<std::size_t>(f)]; }
  const Values& values() const { return values_; }
  bool is_zero() const;

  friend bool operator==(const FramingVector&, const FramingVector&) = default;

 private:
  Values values_{};
};

/// Non-negative weights over a fixed index set, summing to one.
template <typename Index, std::size_t N>
class Distribution {
 public:
  using Values = std::array<double, N>;
  static constexpr double kTolerance = 1e-9;
  static constexpr std::size_t kSize = N;

  Distribution() { values_.fill(1.0 / static_cast<double>(N)); }

  /// Accepts weights that are already normalized; throws otherwise.
  static Distribution from_weights(const Values& values) {
    double sum = 0.0;
    for (double v : values) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("profile weight must be non-negative");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kTolerance) throw ValidationError("profile weights must sum to 1");
    Distribution d;
    d.values_ = values;
    return d;
  }

  /// Rescales non-negative raw weights to sum to one.
  static Distribution normalized(const Values& raw) {
    double sum = 0.0;
    for (double v : raw) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("profile weight must be non-negative");
      sum += v;
    }
    if (sum <= 0.0) throw ValidationError("profile weights sum to zero");
    Distribution d;
    for (std::size_t i = 0; i < N; ++i) d.values_[i] = raw[i] / sum;
    return d;
  }

  static Distribution pure(Index index) {
    Values v{};
    v[static_cast<std::size_t>(index)] = 1.0;
    return from_weights(v);
  }

  static Distribution uniform() { return Distribution{}; }

  double operator[](Index i) const { return values_[static_cast<std::size_t>(i)]; }
  double at(std::size_t i) const { return values_.at(i); }
  const Values& values() const { return values_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  Values values_{};
};

using MacProfile = Distribution<MacDomain, kMacDomainCount>;
using EmftProfile = Distribution<Foundation, kFoundationCount>;

/// Half the L1 distance between two distributions; lies in [0,1].
template <typename Index, std::size_t N>
double half_l1(const Distribution<Index, N>& a, const Distribution<Index, N>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) total += std::abs(a.at(i) - b.at(i));
  return total / 2.0;
}

}  // namespace mevir
