#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mevir/profiles.hpp"

namespace mevir {

enum class Polarity { Supports, Attacks };

inline Polarity inverted(Polarity p) { return p == Polarity::Supports ? Polarity::Attacks : Polarity::Supports; }
inline double sign_of(Polarity p) { return p == Polarity::Supports ? 1.0 : -1.0; }
std::string_view to_string(Polarity p);

/// A truth bearer.
struct Claim {
  std::string id;
  std::string text_tag;
  std::string domain;
  FramingVector framing;
  /// Degree to which accepting the claim offends the foundations named in its
  /// framing. Drives moral alarm; 0 for morally neutral claims.
  double violation = 0.0;
};

/// The truth maker behind a claim, seen through an information proxy of the
/// given fidelity.
struct TruthMakerFact {
  std::string claim_id;
  bool truth_value = false;
  double proxy_fidelity = 1.0;
};

struct Source {
  std::string id;
  std::map<std::string, double> competence;
  std::string group_tag;
  double prestige = 0.0;
  std::uint64_t follower_count = 0;
  double honesty = 1.0;
  bool hypocrisy_flag = false;

  /// Competence in a topic domain; 0 for domains the source never covers.
  double competence_in(const std::string& domain) const;
};

struct EvidenceItem {
  std::string id;
  std::string author;
  /// Claim id or another evidence item id.
  std::string target;
  Polarity polarity = Polarity::Supports;
  double strength = 1.0;
  double vividness = 0.0;
  std::int64_t recency = 0;
  FramingVector framing;
  bool veracity = true;
  /// Evidence category looked up in a trust policy's evidence standard.
  std::string kind = "general";
  /// Issued as a directive (mandate-style) rather than as information.
  bool coercive = false;
  /// Set when reactance flipped the polarity on receipt.
  bool reactance_inverted = false;
};

/// Immutable ground-truth world. Construction validates referential integrity.
class World {
 public:
  World(std::vector<std::string> domains, std::vector<Claim> claims, std::vector<TruthMakerFact> facts,
        std::vector<Source> sources, std::vector<EvidenceItem> evidence);

  const std::vector<std::string>& domains() const { return domains_; }
  const std::vector<Claim>& claims() const { return claims_; }
  const std::vector<TruthMakerFact>& facts() const { return facts_; }
  const std::vector<Source>& sources() const { return sources_; }
  const std::vector<EvidenceItem>& evidence() const { return evidence_; }

  bool has_claim(std::string_view id) const { return claim_index_.contains(std::string(id)); }
  bool has_domain(std::string_view domain) const;
  const Claim& claim(std::string_view id) const;
  const TruthMakerFact& fact(std::string_view claim_id) const;
  const Source& source(std::string_view id) const;
  const Source* find_source(std::string_view id) const;
  const EvidenceItem* find_evidence(std::string_view id) const;
  bool is_statement(std::string_view id) const;

 private:
  std::vector<std::string> domains_;
  std::vector<Claim> claims_;
  std::vector<TruthMakerFact> facts_;
  std::vector<Source> sources_;
  std::vector<EvidenceItem> evidence_;
  std::map<std::string, std::size_t, std::less<>> claim_index_;
  std::map<std::string, std::size_t, std::less<>> fact_index_;
  std::map<std::string, std::size_t, std::less<>> source_index_;
  std::map<std::string, std::size_t, std::less<>> evidence_index_;
};

/// Truth value of the unique fact behind a claim; throws LookupError.
bool ground_truth(const World& world, std::string_view claim_id);

struct StreamConfig {
  std::size_t length = 0;
  double misinformation_rate = 0.0;
  double strength_min = 0.5;
  double strength_max = 1.0;
  double vividness_min = 0.0;
  double vividness_max = 1.0;
  /// Added to the vividness of false items (clamped to 1).
  double misinformation_vividness_boost = 0.0;
  /// Probability that an item targets a claim rather than a pooled evidence item.
  double claim_target_share = 1.0;
  double coercive_rate = 0.0;
  std::string kind = "general";

  void validate() const;
};

/// Synthesizes an ordered stream of evidence. False items are preferentially
/// authored by dishonest sources and true items by honest ones; the share of
/// false items follows the misinformation rate exactly in expectation.
std::vector<EvidenceItem> generate_evidence_stream(const World& world, const StreamConfig& config,
                                                   std::uint64_t seed);

/// Dot product of a framing with a normalized foundation profile.
double frame_salience(const FramingVector& framing, const EmftProfile& profile);

/// Resolves a statement id (claim or evidence item, following target links)
/// to the claim it ultimately bears on.
class StatementIndex {
 public:
  explicit StatementIndex(const World& world);
  void add(const EvidenceItem& item);
  bool contains(std::string_view id) const;
  std::string claim_of(std::string_view statement_id) const;

 private:
  std::map<std::string, std::string, std::less<>> target_of_;
  std::map<std::string, bool, std::less<>> claims_;
};

}  // namespace mevir
