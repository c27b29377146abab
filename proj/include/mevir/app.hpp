#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mevir {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInvalid = 2;

struct SimulateOptions {
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "runs";
  bool dump_lattices = false;
};

struct ProfileOptions {
  std::vector<std::filesystem::path> documents;  // empty or "-" reads stdin
  std::optional<std::filesystem::path> lexicon;
  std::string format = "json";
  std::optional<std::filesystem::path> out;
  bool stem = false;
};

struct AbOptions {
  std::filesystem::path scenario;
  std::size_t seeds = 20;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "runs";
};

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_games_hamilton(double r, double b, double c, std::ostream& out, std::ostream& err);
int cmd_games_hawkdove(double v, double c, std::ostream& out, std::ostream& err);
int cmd_profile(const ProfileOptions& options, std::istream& in, std::ostream& out, std::ostream& err);
int cmd_ab(const AbOptions& options, std::ostream& out, std::ostream& err);

/// Shortest round-trip rendering that always shows a decimal point ("0.5", "1.0").
std::string format_number(double v);

/// Parses arguments (argv[0] excluded) and dispatches to a subcommand.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mevir
