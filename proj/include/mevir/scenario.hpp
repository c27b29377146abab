#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "mevir/simulation.hpp"

namespace mevir {

/// Invalid scenario file; `key` is the dotted path of the offending entry.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string key, const std::string& message)
      : ValidationError(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct NetworkSpec {
  std::string topology = "complete";
  double weight = 1.0;
  std::size_t k = 2;
  double p = 0.1;
  double p_in = 0.5;
  double p_out = 0.05;
};

struct OutputSpec {
  std::string metrics = "metrics.csv";
  std::string summary = "summary.json";
  bool lattices = false;
};

/// Population entry before expansion: a cohort template or an explicit agent (count 1).
struct CohortSpec {
  std::string name;
  std::size_t count = 1;
  bool explicit_agent = false;
  Agent prototype;
  double competence_noise = 0.0;
  double source_noise = 0.0;
};

struct Scenario {
  nlohmann::json config;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::shared_ptr<const World> world;
  std::vector<CohortSpec> cohorts;
  NetworkSpec network;
  StreamConfig stream;
  SimulationConfig simulation;
  OutputSpec outputs;
};

/// Validates every key; unknown keys and bad values throw ConfigError.
Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) serialization.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hex64(std::uint64_t v);

/// Expands cohorts into agents, drawing observation noise from the seed.
std::vector<Agent> build_population(const Scenario& scenario, std::uint64_t seed);
Network build_network(const Scenario& scenario, std::size_t population_size, std::uint64_t seed);

/// Same scenario with every intervention switched off, or both switched on for every cohort.
Scenario interventions_off(const Scenario& scenario);
Scenario interventions_on(const Scenario& scenario);
/// Baseline without echo-chamber ingredients: biases zeroed, out-group
/// rejection off, no homophily rewiring.
Scenario echo_chamber_off(const Scenario& scenario);

struct RunResult {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<Agent> population;
  Network network;
  std::vector<EvidenceItem> stream;
  SimHistory history;
};

RunResult run_scenario(const Scenario& scenario, std::uint64_t seed);

/// Fraction of (agent, claim) labels that match ground truth: Accepted for
/// true claims, Rejected for false ones.
double label_accuracy(const RunResult& result, const World& world);

std::string metrics_csv(const RunResult& result);
nlohmann::ordered_json run_summary(const RunResult& result, const Scenario& scenario);
nlohmann::ordered_json lattice_json(const Agent& agent);

/// Writes via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
/// Writes metrics, summary and (if enabled) lattice dumps into `out_dir`.
void write_outputs(const RunResult& result, const Scenario& scenario, const std::filesystem::path& out_dir,
                   bool dump_lattices);

}  // namespace mevir
