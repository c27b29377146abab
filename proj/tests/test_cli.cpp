#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mevir/app.hpp"
#include "mevir/scenario.hpp"

using namespace mevir;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MEVIR_DATA_DIR;
const fs::path kWork = fs::path(MEVIR_TEST_DIR) / "cli_runs";

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Consensus scenario shrunk to a few agents and steps, written under the test directory.
fs::path small_scenario(const std::string& name, const std::function<void(nlohmann::json&)>& edit = {}) {
  std::ifstream in(kData / "scenarios" / "consensus.json");
  auto j = nlohmann::json::parse(in);
  j["cohorts"][0]["count"] = 4;
  j["simulation"]["steps"] = 3;
  j["stream"]["length"] = 12;
  if (edit) edit(j);
  fs::create_directories(kWork);
  const fs::path p = kWork / (name + ".json");
  std::ofstream(p) << j.dump(2);
  return p;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = kWork / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0) == "1.0");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("games subcommands") {
  CHECK(cli({"games", "hawkdove", "--v", "2", "--c", "4"}).out == "0.5\n");
  CHECK(cli({"games", "hawkdove", "--v", "5", "--c", "5"}).out == "1.0\n");
  CHECK(cli({"games", "hamilton", "--r", "0", "--b", "5", "--c", "1"}).out == "defect\n");
  CHECK(cli({"games", "hamilton", "--r", "0.5", "--b", "5", "--c", "1"}).out == "cooperate\n");
  CHECK(cli({"games", "hawkdove", "--v", "-1", "--c", "4"}).code == kExitInvalid);
  CHECK(cli({"games", "hawkdove", "--v", "2"}).code == kExitInvalid);
  CHECK(cli({"nonsense"}).code == kExitInvalid);
}

TEST_CASE("profile subcommand") {
  const std::string doc = (kData / "fixtures" / "vaccine_skeptic.txt").string();
  const auto json_run = cli({"profile", doc, "--format", "json"});
  REQUIRE(json_run.code == kExitOk);
  const auto report = nlohmann::json::parse(json_run.out);
  const auto& first = report.is_array() ? report[0] : report;
  CHECK(first["level4"]["tribe_matches"][0]["tribe"] == "sovereignty_purity");

  const auto text_run = cli({"profile", doc, "--format", "text"});
  REQUIRE(text_run.code == kExitOk);
  CHECK(text_run.out.find("sovereignty_purity") != std::string::npos);
  CHECK(text_run.out != json_run.out);

  CHECK(cli({"profile", "--lexicon", "/no/such/lexicon.tsv", doc}).code == kExitInvalid);
  CHECK(cli({"profile", "/no/such/document.txt"}).code != kExitOk);

  const auto piped = cli({"profile", "--format", "json"}, slurp(doc));
  CHECK(piped.code == kExitOk);
  CHECK(piped.out == json_run.out);

  const fs::path out = kWork / "profile.json";
  fs::create_directories(kWork);
  fs::remove(out);
  CHECK(cli({"profile", doc, "--out", out.string()}).code == kExitOk);
  CHECK(slurp(out) == json_run.out);
}

TEST_CASE("simulate writes reproducible outputs") {
  const fs::path scenario = small_scenario("sim");
  const fs::path a = fresh_dir("sim_a"), b = fresh_dir("sim_b");
  REQUIRE(cli({"simulate", "--scenario", scenario.string(), "--seed", "7", "--out", a.string()}).code == kExitOk);
  REQUIRE(cli({"simulate", "--scenario", scenario.string(), "--seed", "7", "--out", b.string()}).code == kExitOk);
  for (const char* f : {"metrics.csv", "summary.json"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(summary["seed"] == 7);
}

TEST_CASE("malformed scenarios exit 2 and write nothing") {
  const fs::path bad = small_scenario("bad", [](nlohmann::json& j) { j["simulation"]["stepz"] = 1; });
  const fs::path out = fresh_dir("bad_out");
  const auto r = cli({"simulate", "--scenario", bad.string(), "--out", out.string()});
  CHECK(r.code == kExitInvalid);
  CHECK(r.err.find("simulation.stepz") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  const fs::path garbled = kWork / "garbled.json";
  std::ofstream(garbled) << "{ not json";
  CHECK(cli({"simulate", "--scenario", garbled.string(), "--out", out.string()}).code == kExitInvalid);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("ab subcommand") {
  const fs::path scenario = small_scenario("ab");
  CHECK(cli({"ab", "--scenario", scenario.string(), "--seeds", "0", "--out", fresh_dir("ab0").string()}).code ==
        kExitInvalid);

  // No interventions configured: both arms are the same run.
  const fs::path out = fresh_dir("ab_same");
  REQUIRE(cli({"ab", "--scenario", scenario.string(), "--seeds", "2", "--out", out.string()}).code == kExitOk);
  std::istringstream csv(slurp(out / "ab.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line.starts_with("seed,polarization_off"));
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 11);
    for (std::size_t i : {3u, 6u, 9u}) CHECK(std::stod(cells[i]) == 0.0);
    CHECK(cells[10] == "0");
  }
  CHECK(rows == 2);
}
