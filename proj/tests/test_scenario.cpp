#include <doctest.h>

#include <fstream>

#include "mevir/scenario.hpp"

using namespace mevir;
using nlohmann::json;

namespace {

const std::string kScenarios = std::string(MEVIR_DATA_DIR) + "/scenarios/";

json raw(const std::string& name) {
  std::ifstream in(kScenarios + name + ".json");
  return json::parse(in);
}

// A small, quick variant of the consensus scenario.
json small() {
  json j = raw("consensus");
  j["cohorts"][0]["count"] = 4;
  j["simulation"]["steps"] = 3;
  j["stream"]["length"] = 12;
  return j;
}

std::string error_key(const json& j) {
  try {
    parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("bundled scenarios parse") {
  for (const char* name : {"consensus", "tribe_emergence", "tribe_emergence_interventions", "stickiness"}) {
    CAPTURE(name);
    const Scenario s = load_scenario(kScenarios + name + ".json");
    CHECK(s.world);
    CHECK_FALSE(s.cohorts.empty());
  }
}

TEST_CASE("unknown keys and bad values are reported by dotted path") {
  json j = small();
  j["simulation"]["stepz"] = 3;
  CHECK(error_key(j) == "simulation.stepz");

  j = small();
  j["cohorts"][0]["biases"] = {{"confirmation", 1.5}};
  CHECK(error_key(j).starts_with("cohorts[0].biases"));

  j = small();
  j["network"]["topology"] = "torus";
  CHECK(error_key(j) == "network.topology");

  j = small();
  j["colour"] = "blue";
  CHECK(error_key(j) == "colour");

  j = small();
  j["cohorts"][0]["template"] = "nobody";
  CHECK(error_key(j) == "cohorts[0].template");

  j = small();
  j["simulation"]["steps"] = 0;
  CHECK(error_key(j).starts_with("simulation"));

  CHECK_THROWS_AS(load_scenario(kScenarios + "missing.json"), ValidationError);
}

TEST_CASE("config hash is canonical") {
  const json a = json::parse(R"({"b": 1, "a": {"y": [1, 2], "x": "s"}})");
  const json b = json::parse(R"({"a": {"x": "s", "y": [1, 2]}, "b": 1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(json::parse(R"({"b": 2, "a": {"y": [1, 2], "x": "s"}})")));
  CHECK(hex64(0x1f) == "000000000000001f");
  CHECK(parse_scenario(small()).config_hash == config_hash(small()));
}

TEST_CASE("the interventions scenario differs from tribe emergence only in its switches") {
  json with = raw("tribe_emergence_interventions");
  const json without = raw("tribe_emergence");
  for (auto& c : with["cohorts"]) {
    CHECK(c["interventions"] == json{{"stop_loss", true}, {"adversarial_deference", true}});
    c.erase("interventions");
  }
  CHECK(with == without);
}

TEST_CASE("scenario transforms") {
  const Scenario s = load_scenario(kScenarios + "tribe_emergence.json");
  const Scenario on = interventions_on(s);
  for (const auto& c : on.cohorts) {
    CHECK(c.prototype.interventions.stop_loss);
    CHECK(c.prototype.interventions.adversarial_deference);
  }
  for (const auto& c : interventions_off(on).cohorts) {
    CHECK_FALSE(c.prototype.interventions.stop_loss);
    CHECK_FALSE(c.prototype.interventions.adversarial_deference);
  }
  const Scenario calm = echo_chamber_off(s);
  CHECK(calm.simulation.homophily_rate == 0.0);
  for (const auto& c : calm.cohorts) {
    CHECK_FALSE(c.prototype.policy.out_group_rejection);
    CHECK(c.prototype.biases.confirmation == 0.0);
  }
}

TEST_CASE("population and network follow the scenario") {
  const Scenario s = parse_scenario(small());
  const auto pop = build_population(s, 5);
  REQUIRE(pop.size() == 4);
  for (const auto& a : pop) CHECK(a.accepted_authorities.size() == 3);
  CHECK(pop[0].id != pop[1].id);
  CHECK(build_network(s, pop.size(), 5).edge_count() == 6);
}

TEST_CASE("runs are reproducible and serialize") {
  const Scenario s = parse_scenario(small());
  const RunResult a = run_scenario(s, 3), b = run_scenario(s, 3);
  CHECK(metrics_csv(a) == metrics_csv(b));
  CHECK(run_summary(a, s).dump() == run_summary(b, s).dump());
  CHECK(a.history.steps.size() == 4);
  const double acc = label_accuracy(a, *s.world);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  const std::string csv = metrics_csv(a);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header plus steps 0..3
  const auto dump = lattice_json(a.population[0]);
  CHECK(dump["agent"] == a.population[0].id);
  CHECK(dump["claims"].contains("c_vaccine_safe"));
}
