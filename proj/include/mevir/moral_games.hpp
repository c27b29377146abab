#pragma once

#include <array>
#include <span>
#include <vector>

#include "mevir/profiles.hpp"
#include "mevir/world.hpp"

namespace mevir {

/// Row-stochastic matrix from cooperative domains to intuitive foundations.
class MacEmftMap {
 public:
  using Row = std::array<double, kFoundationCount>;

  /// Validates non-negativity and a positive entry in every row, then
  /// normalizes each row to sum to one. Throws ValidationError on a
  /// dimension mismatch (must be 8 rows of 7).
  static MacEmftMap from_rows(std::span<const std::vector<double>> rows);

  const Row& row(MacDomain d) const { return rows_[static_cast<std::size_t>(d)]; }

 private:
  std::array<Row, kMacDomainCount> rows_{};
};

/// The bundled domain-to-foundation mapping.
MacEmftMap default_mac_emft_map();

EmftProfile mac_to_emft(const MacProfile& mac, const MacEmftMap& map);

/// Kin-selection game. r: relatedness, B: benefit to the recipient, C: cost to the actor.
struct KinGameParams {
  double relatedness = 0.0;
  double benefit = 0.0;
  double cost = 0.0;
};

/// Hawk-Dove contest. V: resource value, C: injury cost.
struct ContestGameParams {
  double value = 1.0;
  double cost = 1.0;
};

/// Hamilton's rule, strict: cooperate iff r*B > C.
bool hamilton_cooperate(const KinGameParams& p);

/// Evolutionarily stable probability of playing Hawk: min(1, V/C).
double hawk_dove_ess(const ContestGameParams& p);

/// violation * frame_salience(framing, profile).
double moral_alarm(const FramingVector& framing, const EmftProfile& profile, double violation);

/// 1 for sources caught signalling one norm while following another, else 0.
double hypocrisy_penalty(const Source& source);

/// The three pillars of an agent as seen by profile comparisons: the two
/// moral layers plus the flattened virtue/bias parameters (each in [0,1]).
struct ProfileLayers {
  MacProfile mac;
  EmftProfile emft;
  std::vector<double> traits;
};

struct LayerWeights {
  double mac = 1.0 / 3.0;
  double emft = 1.0 / 3.0;
  double traits = 1.0 / 3.0;
};

/// Weighted average of per-layer distances: half-L1 for the two profiles,
/// mean absolute difference for the trait vector. A pseudo-metric in [0,1].
double profile_distance(const ProfileLayers& a, const ProfileLayers& b, const LayerWeights& weights = {});

}  // namespace mevir
