#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mevir/lattice.hpp"
#include "mevir/profiles.hpp"

namespace mevir {

/// term (lowercased token or space-joined phrase) -> per-foundation contribution.
class Lexicon {
 public:
  using Contribution = std::array<double, kFoundationCount>;

  void add(const std::string& term, Foundation f, double weight);
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Contribution>& entries() const { return entries_; }
  /// Longest entry in tokens.
  std::size_t max_phrase_length() const { return max_phrase_; }

  /// TSV with columns term, foundation, weight. A header row and lines starting
  /// with '#' are skipped. Throws ValidationError naming the line on bad input.
  static Lexicon parse(std::istream& in);
  static Lexicon load(const std::filesystem::path& path);

  /// Same entries with every word passed through `stem`; colliding terms sum.
  Lexicon stemmed() const;

 private:
  std::map<std::string, Contribution> entries_;
  std::size_t max_phrase_ = 0;
};

/// Path of the bundled lexicon, honouring MEVIR_LEXICON.
std::filesystem::path default_lexicon_path();

/// Lowercased alphanumeric tokens; apostrophes inside words are kept.
std::vector<std::string> tokenize(std::string_view text);

/// Light suffix stripping ("protecting" -> "protect", "mandates" -> "mandate");
/// words of four letters or fewer are left alone.
std::string stem(std::string_view word);
std::vector<std::string> stem_all(const std::vector<std::string>& tokens);

struct LexiconHit {
  std::string term;
  std::size_t count = 0;
  Lexicon::Contribution contribution{};
};

struct FoundationScores {
  /// Unnormalized sums per foundation.
  std::array<double, kFoundationCount> raw{};
  /// Present only when some term matched.
  std::optional<EmftProfile> profile;
  std::vector<LexiconHit> hits;
};

/// Greedy longest-match over the token sequence, so a phrase entry consumes
/// its tokens before any single-token entry can. Throws on an empty lexicon.
FoundationScores score_foundations(const std::vector<std::string>& tokens, const Lexicon& lexicon);

struct TribeTemplate {
  std::string name;
  EmftProfile emft;
  MacProfile mac;
  std::vector<AnchorKind> anchor_kinds;
  std::vector<std::string> authorities;
  std::vector<std::string> emotional_strategies;
};

const std::vector<TribeTemplate>& bundled_templates();
const TribeTemplate& find_template(std::string_view name);

struct TribeMatch {
  std::string name;
  double distance = 0.0;
};

/// L1 distance between foundation profiles, ascending; ties by name.
std::vector<TribeMatch> match_tribe(const EmftProfile& profile, const std::vector<TribeTemplate>& templates);

enum class CueCategory { Anecdote, Statistic, Authority, Bias, Cooperation };

struct CueRule {
  std::string id;
  int level = 1;
  CueCategory category = CueCategory::Anecdote;
  /// Token phrases (space-joined) that fire the rule.
  std::vector<std::string> patterns;
  std::string note;
  std::optional<AnchorKind> anchor_guess;
  std::optional<MacDomain> mac_domain;
};

const std::vector<CueRule>& bundled_cue_rules();

struct FiredRule {
  std::string id;
  int level = 0;
  std::string note;
  std::vector<std::string> matched;
  std::size_t count = 0;
  std::optional<AnchorKind> anchor_guess;
  std::optional<MacDomain> mac_domain;
};

struct ProfileReport {
  // Level 1: what the text treats as real.
  std::optional<Foundation> dominant_framing;
  std::vector<FiredRule> truth_maker_cues;
  // Level 2: where the search for evidence stops.
  std::vector<FiredRule> anchor_cues;
  // Level 3: virtue failures.
  std::vector<FiredRule> bias_flags;
  // Level 4: moral mapping.
  FoundationScores foundations;
  std::vector<FiredRule> cooperation_cues;
  std::optional<MacProfile> mac;
  std::vector<TribeMatch> matches;
  bool no_signal = false;
  std::size_t token_count = 0;
};

/// With `use_stemming` the document, lexicon and cue patterns are all stemmed.
ProfileReport analyze(std::string_view document, const Lexicon& lexicon, const std::vector<TribeTemplate>& templates,
                      const std::vector<CueRule>& rules = bundled_cue_rules(), bool use_stemming = false);

std::string report_to_json(const ProfileReport& report, int indent = 2);
std::string report_to_text(const ProfileReport& report);

}  // namespace mevir
