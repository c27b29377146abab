#pragma once
// Small hand-built worlds shared by the unit tests.

#include <memory>
#include <string>
#include <vector>

#include "mevir/world.hpp"

namespace fixture {

using namespace mevir;

inline FramingVector framing(std::initializer_list<std::pair<Foundation, double>> values) {
  FramingVector::Values v{};
  for (auto [f, x] : values) v[static_cast<std::size_t>(f)] = x;
  return FramingVector(v);
}

inline EvidenceItem item(std::string id, std::string author, std::string target, Polarity polarity,
                         double strength = 1.0, bool veracity = true) {
  EvidenceItem e;
  e.id = std::move(id);
  e.author = std::move(author);
  e.target = std::move(target);
  e.polarity = polarity;
  e.strength = strength;
  e.veracity = veracity;
  return e;
}

inline Source source(std::string id, double competence, std::string group = "", double honesty = 1.0) {
  Source s;
  s.id = std::move(id);
  s.competence["health"] = competence;
  s.group_tag = std::move(group);
  s.honesty = honesty;
  return s;
}

/// Three claims (two true, one false) with a layer of evidence on each and a
/// second layer on c1's evidence.
inline World three_claims() {
  std::vector<Claim> claims = {
      {"c1", "c1", "health", framing({{Foundation::Care, 0.8}}), 0.0},
      {"c2", "c2", "health", framing({{Foundation::Liberty, 1.0}, {Foundation::Purity, 0.8}}), 0.0},
      {"c3", "c3", "health", framing({{Foundation::Authority, 0.5}}), 0.0},
  };
  std::vector<TruthMakerFact> facts = {{"c1", true, 1.0}, {"c2", false, 1.0}, {"c3", true, 1.0}};
  std::vector<Source> sources = {source("lab", 0.9, "in"), source("clinic", 0.8, "in"),
                                 source("blog", 0.3, "out", 0.1)};
  std::vector<EvidenceItem> evidence = {
      item("e1", "lab", "c1", Polarity::Supports, 0.9),
      item("e2", "clinic", "e1", Polarity::Supports, 0.8),
      item("e3", "lab", "c2", Polarity::Attacks, 0.9),
      item("e4", "clinic", "c3", Polarity::Supports, 0.8),
  };
  return World({"health"}, claims, facts, sources, evidence);
}

}  // namespace fixture
