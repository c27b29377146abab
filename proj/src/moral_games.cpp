#include "mevir/moral_games.hpp"

#include <algorithm>
#include <cmath>

namespace mevir {

MacEmftMap MacEmftMap::from_rows(std::span<const std::vector<double>> rows) {
  if (rows.size() != kMacDomainCount) throw ValidationError("MAC-EMFT map needs 8 rows");
  MacEmftMap map;
  for (std::size_t r = 0; r < kMacDomainCount; ++r) {
    if (rows[r].size() != kFoundationCount) throw ValidationError("MAC-EMFT map rows need 7 columns");
    double sum = 0.0;
    for (double v : rows[r]) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("MAC-EMFT coefficient must be non-negative");
      sum += v;
    }
    if (sum <= 0.0) throw ValidationError("MAC-EMFT row without a positive entry");
    for (std::size_t c = 0; c < kFoundationCount; ++c) map.rows_[r][c] = rows[r][c] / sum;
  }
  return map;
}

MacEmftMap default_mac_emft_map() {
  //                                    Care  FEq  FPr  Lib  Loy  Auth Pur
  static const std::vector<std::vector<double>> rows = {
      {1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0},  // Kin
      {0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0},  // Group
      {0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0},  // Reciprocity
      {0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0},  // Heroism
      {0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0},  // Deference (dove) vs coalition (liberty)
      {0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0},  // Fairness (division)
      {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0},  // Property; no ownership foundation, Liberty stands in
      {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0},  // Pathogen
  };
  return MacEmftMap::from_rows(rows);
}

EmftProfile mac_to_emft(const MacProfile& mac, const MacEmftMap& map) {
  EmftProfile::Values out{};
  for (std::size_t d = 0; d < kMacDomainCount; ++d) {
    const auto& row = map.row(static_cast<MacDomain>(d));
    for (std::size_t f = 0; f < kFoundationCount; ++f) out[f] += mac.at(d) * row[f];
  }
  return EmftProfile::normalized(out);
}

bool hamilton_cooperate(const KinGameParams& p) {
  if (!(p.relatedness >= 0.0 && p.relatedness <= 1.0) || !(p.benefit >= 0.0) || !(p.cost >= 0.0))
    throw ValidationError("kin game parameters out of range");
  return p.relatedness * p.benefit > p.cost;
}

double hawk_dove_ess(const ContestGameParams& p) {
  if (!(p.value > 0.0) || !(p.cost > 0.0)) throw ValidationError("contest parameters must be positive");
  return std::min(1.0, p.value / p.cost);
}

double moral_alarm(const FramingVector& framing, const EmftProfile& profile, double violation) {
  if (!(violation >= 0.0 && violation <= 1.0)) throw ValidationError("violation outside [0,1]");
  return violation * frame_salience(framing, profile);
}

double hypocrisy_penalty(const Source& source) { return source.hypocrisy_flag ? 1.0 : 0.0; }

double profile_distance(const ProfileLayers& a, const ProfileLayers& b, const LayerWeights& weights) {
  if (a.traits.size() != b.traits.size()) throw ValidationError("trait vectors differ in length");
  const double total_weight = weights.mac + weights.emft + weights.traits;
  if (!(weights.mac >= 0.0 && weights.emft >= 0.0 && weights.traits >= 0.0) || total_weight <= 0.0)
    throw ValidationError("layer weights must be non-negative with a positive sum");

  double trait_distance = 0.0;
  if (!a.traits.empty()) {
    for (std::size_t i = 0; i < a.traits.size(); ++i) trait_distance += std::abs(a.traits[i] - b.traits[i]);
    trait_distance /= static_cast<double>(a.traits.size());
  }
  const double d = weights.mac * half_l1(a.mac, b.mac) + weights.emft * half_l1(a.emft, b.emft) +
                   weights.traits * trait_distance;
  return std::clamp(d / total_weight, 0.0, 1.0);
}

}  // namespace mevir
