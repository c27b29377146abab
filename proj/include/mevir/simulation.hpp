#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mevir/tribes.hpp"

namespace mevir {

struct SimulationConfig {
  std::size_t steps = 1;
  std::size_t items_per_step = 1;
  /// Chance that an agent receives a given stream item.
  double reach = 1.0;
  /// Floor of the share-receipt probability before salience adds to it.
  double base_attention = 0.5;
  double homophily_rate = 0.0;
  TribeSettings tribes;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class CorrectionClass { BeliefAnchor, LeafEvidence, Other };
std::string_view to_string(CorrectionClass c);

struct CorrectionTally {
  std::uint64_t attempted = 0;
  std::uint64_t rejected = 0;

  double rate() const { return attempted ? static_cast<double>(rejected) / static_cast<double>(attempted) : 0.0; }
};

struct StepRecord {
  std::size_t step = 0;
  PolarizationMetrics metrics;
  TribeAssignment tribes;
  /// labels[i][claim] for agent i.
  std::vector<std::map<std::string, Label>> labels;
  std::vector<std::set<std::string>> beliefs;
  std::uint64_t stop_loss_events = 0;
  std::uint64_t deference_events = 0;
};

struct SimHistory {
  std::vector<StepRecord> steps;
  std::map<CorrectionClass, CorrectionTally> corrections;
  Network final_network;

  CorrectionTally total_corrections() const;
};

/// Runs the population forward. Step 0 records the initial evaluation of
/// every claim; steps 1..N each deliver a slice of the stream plus the
/// previous step's shares, then rewire and measure. Agents and network are
/// updated in place.
SimHistory propagate(std::vector<Agent>& population, Network& network, const World& world,
                     const std::vector<EvidenceItem>& stream, const SimulationConfig& config);

}  // namespace mevir
