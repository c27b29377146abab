#include "mevir/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mevir/moral_games.hpp"
#include "mevir/profiler.hpp"
#include "mevir/scenario.hpp"

namespace mevir {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s = buf;
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const Scenario scenario = load_scenario(options.scenario);
    const std::uint64_t seed = options.seed.value_or(scenario.seed);
    const RunResult result = run_scenario(scenario, seed);
    write_outputs(result, scenario, options.out, options.dump_lattices);
    const auto& m = result.history.steps.back().metrics;
    out << "wrote " << (options.out / scenario.outputs.metrics).string() << " and "
        << (options.out / scenario.outputs.summary).string() << " (tribes " << m.tribe_count << ", polarization "
        << fixed6(m.polarization_index) << ")\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "invalid scenario: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "simulation failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_games_hamilton(double r, double b, double c, std::ostream& out, std::ostream& err) {
  try {
    out << (hamilton_cooperate({r, b, c}) ? "cooperate" : "defect") << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  }
}

int cmd_games_hawkdove(double v, double c, std::ostream& out, std::ostream& err) {
  try {
    out << format_number(hawk_dove_ess({v, c})) << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  }
}

int cmd_profile(const ProfileOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
  if (options.format != "json" && options.format != "text") {
    err << "unknown format '" << options.format << "' (expected json or text)\n";
    return kExitInvalid;
  }
  Lexicon lexicon;
  try {
    lexicon = Lexicon::load(options.lexicon.value_or(default_lexicon_path()));
    if (lexicon.empty()) throw ValidationError("lexicon has no entries");
  } catch (const std::exception& e) {
    err << "lexicon: " << e.what() << "\n";
    return kExitInvalid;
  }

  std::vector<std::pair<std::string, std::string>> docs;
  if (options.documents.empty()) {
    std::ostringstream ss;
    ss << in.rdbuf();
    docs.emplace_back("-", ss.str());
  }
  for (const auto& path : options.documents) {
    if (path == "-") {
      std::ostringstream ss;
      ss << in.rdbuf();
      docs.emplace_back("-", ss.str());
      continue;
    }
    std::ifstream f(path);
    if (!f) {
      err << "cannot read document '" << path.string() << "'\n";
      return kExitInvalid;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    docs.emplace_back(path.string(), ss.str());
  }

  std::ostringstream rendered;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const ProfileReport report = analyze(docs[i].second, lexicon, bundled_templates(), bundled_cue_rules(), options.stem);
    if (options.format == "json") {
      rendered << report_to_json(report) << "\n";
    } else {
      if (docs.size() > 1) rendered << "== " << docs[i].first << "\n";
      rendered << report_to_text(report);
    }
  }
  try {
    if (options.out) write_atomic(*options.out, rendered.str());
    else out << rendered.str();
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_ab(const AbOptions& options, std::ostream& out, std::ostream& err) {
  if (options.seeds == 0) {
    err << "--seeds must be at least 1\n";
    return kExitInvalid;
  }
  try {
    const Scenario on = load_scenario(options.scenario);
    const Scenario off = interventions_off(on);
    const std::uint64_t first = options.seed.value_or(on.seed);
    std::ostringstream csv;
    csv << "seed,polarization_off,polarization_on,delta_polarization,rejected_rate_off,rejected_rate_on,"
           "delta_rejected_rate,accuracy_off,accuracy_on,delta_accuracy,sign\n";
    std::size_t reduced = 0;
    for (std::size_t k = 0; k < options.seeds; ++k) {
      const std::uint64_t seed = first + k;
      const RunResult a = run_scenario(off, seed);
      const RunResult b = run_scenario(on, seed);
      const auto& ma = a.history.steps.back().metrics;
      const auto& mb = b.history.steps.back().metrics;
      const double acc_a = label_accuracy(a, *on.world);
      const double acc_b = label_accuracy(b, *on.world);
      const double delta = mb.polarization_index - ma.polarization_index;
      reduced += delta < 0.0 ? 1 : 0;
      csv << seed << ',' << fixed6(ma.polarization_index) << ',' << fixed6(mb.polarization_index) << ','
          << fixed6(delta) << ',' << fixed6(ma.rejected_correction_rate) << ','
          << fixed6(mb.rejected_correction_rate) << ','
          << fixed6(mb.rejected_correction_rate - ma.rejected_correction_rate) << ',' << fixed6(acc_a) << ','
          << fixed6(acc_b) << ',' << fixed6(acc_b - acc_a) << ','
          << (delta < 0.0 ? "-" : delta > 0.0 ? "+" : "0") << '\n';
    }
    std::filesystem::create_directories(options.out);
    write_atomic(options.out / "ab.csv", csv.str());
    out << "interventions reduced polarization in " << reduced << " of " << options.seeds << " seeds; wrote "
        << (options.out / "ab.csv").string() << "\n";
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "invalid scenario: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "ab run failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moral-epistemic trust simulation and narrative profiling"};
  app.require_subcommand(1);

  SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write metrics and a summary");
  simulate->add_option("--scenario", sim.scenario, "Scenario JSON file")->required();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Master seed (overrides the scenario's)");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_flag("--dump-lattices", sim.dump_lattices, "Also write every agent's final lattices");

  auto* games = app.add_subcommand("games", "Evolutionary game utilities");
  games->require_subcommand(1);
  double r = 0, b = 0, c = 0, v = 0, hc = 0;
  auto* hamilton = games->add_subcommand("hamilton", "Kin selection: cooperate iff r*B > C");
  hamilton->add_option("--r", r, "Relatedness")->required();
  hamilton->add_option("--b", b, "Benefit to recipient")->required();
  hamilton->add_option("--c", c, "Cost to actor")->required();
  auto* hawkdove = games->add_subcommand("hawkdove", "ESS probability of playing Hawk");
  hawkdove->add_option("--v", v, "Resource value")->required();
  hawkdove->add_option("--c", hc, "Injury cost")->required();

  ProfileOptions prof;
  std::string lexicon_path;
  std::string prof_out;
  auto* profile = app.add_subcommand("profile", "Four-level moral-epistemic profile of documents");
  profile->add_option("documents", prof.documents, "Text files ('-' or none for stdin)");
  auto* lex_opt = profile->add_option("--lexicon", lexicon_path, "Lexicon TSV (default: bundled or $MEVIR_LEXICON)");
  profile->add_option("--format", prof.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  auto* prof_out_opt = profile->add_option("--out", prof_out, "Write the report here instead of stdout");
  profile->add_flag("--stem", prof.stem, "Strip common suffixes before matching");

  AbOptions ab;
  std::uint64_t ab_seed = 0;
  auto* abc = app.add_subcommand("ab", "Paired interventions-off/on runs over consecutive seeds");
  abc->add_option("--scenario", ab.scenario, "Scenario JSON file")->required();
  abc->add_option("--seeds", ab.seeds, "Number of seeds");
  auto* ab_seed_opt = abc->add_option("--seed", ab_seed, "First seed (default: scenario seed)");
  abc->add_option("--out", ab.out, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  }

  if (simulate->parsed()) {
    if (*sim_seed_opt) sim.seed = sim_seed;
    return cmd_simulate(sim, out, err);
  }
  if (hamilton->parsed()) return cmd_games_hamilton(r, b, c, out, err);
  if (hawkdove->parsed()) return cmd_games_hawkdove(v, hc, out, err);
  if (profile->parsed()) {
    if (*lex_opt) prof.lexicon = lexicon_path;
    if (*prof_out_opt) prof.out = prof_out;
    return cmd_profile(prof, in, out, err);
  }
  if (abc->parsed()) {
    if (*ab_seed_opt) ab.seed = ab_seed;
    return cmd_ab(ab, out, err);
  }
  return kExitInvalid;
}

}  // namespace mevir
