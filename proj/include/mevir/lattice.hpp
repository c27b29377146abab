#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mevir/world.hpp"

namespace mevir {

// ---------------------------------------------------------------------------
// Structure
// ---------------------------------------------------------------------------

/// Why elaboration stopped at a statement. Declaration order is the
/// classification priority.
enum class AnchorKind { PreTrusted, Belief, AcceptedAuthority, EvidenceExhaustion, ResourceExhaustion };

std::string_view to_string(AnchorKind k);
std::optional<AnchorKind> parse_anchor_kind(std::string_view name);

/// The source behind an AcceptedAuthority anchor, with everything evaluation
/// needs to price it. Reliability is the agent's perceived reliability.
struct AuthorityRef {
  std::string source_id;
  double reliability = 0.0;
  bool out_group = false;
  bool hypocrite = false;
  /// Adversarial deference lets this source through out-group rejection.
  bool bypass_out_group = false;

  friend bool operator==(const AuthorityRef&, const AuthorityRef&) = default;
};

struct Anchor {
  AnchorKind kind = AnchorKind::EvidenceExhaustion;
  std::optional<AuthorityRef> authority;

  static Anchor of(AnchorKind kind) { return Anchor{kind, std::nullopt}; }
  static Anchor accepted_authority(AuthorityRef ref) { return Anchor{AnchorKind::AcceptedAuthority, std::move(ref)}; }

  friend bool operator==(const Anchor&, const Anchor&) = default;
};

enum class NodeKind { Claim, Evidence, Intuition };

struct LatticeNode {
  std::string id;
  NodeKind kind = NodeKind::Evidence;
  double base_weight = 1.0;
  std::optional<Anchor> anchor;
  std::string evidence_kind = "general";

  friend bool operator==(const LatticeNode&, const LatticeNode&) = default;
};

/// `from` bears on `to` (evidence -> target).
struct LatticeEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  Polarity polarity = Polarity::Supports;
  double weight = 1.0;

  friend bool operator==(const LatticeEdge&, const LatticeEdge&) = default;
};

/// Directed acyclic graph of statements rooted at the claim under evaluation.
/// Value type; nodes are never removed.
class TrustLattice {
 public:
  explicit TrustLattice(LatticeNode root);

  std::size_t add_node(LatticeNode node);
  /// Throws ValidationError for self-loops, duplicates and back-edges.
  void add_edge(std::size_t from, std::size_t to, Polarity polarity, double weight);
  bool would_create_cycle(std::size_t from, std::size_t to) const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t root_index() const { return 0; }
  const LatticeNode& root() const { return nodes_.front(); }
  const LatticeNode& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<LatticeNode>& nodes() const { return nodes_; }
  const std::vector<LatticeEdge>& edges() const { return edges_; }
  std::optional<std::size_t> find(std::string_view id) const;

  /// Edges whose `to` is i.
  std::vector<LatticeEdge> incoming(std::size_t i) const;
  bool is_leaf(std::size_t i) const;
  /// Shortest edge distance from node i up to the root.
  std::size_t depth_of(std::size_t i) const;
  std::vector<std::size_t> depths() const;

  void set_anchor(std::size_t i, std::optional<Anchor> anchor);

  /// Checks acyclicity, single root (every node reaches the root) and that
  /// every leaf carries an anchor.
  void validate() const;

  friend bool operator==(const TrustLattice&, const TrustLattice&) = default;

 private:
  std::vector<LatticeNode> nodes_;
  std::vector<LatticeEdge> edges_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// ---------------------------------------------------------------------------
// Policies and evaluation
// ---------------------------------------------------------------------------

struct TrustPolicy {
  double source_reliability_threshold = 0.5;
  double acceptance_threshold = 0.3;
  double attack_weight_multiplier = 1.0;
  bool out_group_rejection = false;
  /// Evidence kind -> edge weight multiplier (default 1).
  std::map<std::string, double> evidence_standard;

  void validate() const;
};

struct EvaluationBudget {
  std::size_t max_nodes = 16;
  std::size_t max_depth = 4;

  void validate() const;
};

enum class Label { Accepted, Rejected, Undecided };
std::string_view to_string(Label l);

struct AcceptanceLabel {
  Label label = Label::Undecided;
  double score = 0.0;

  friend bool operator==(const AcceptanceLabel&, const AcceptanceLabel&) = default;
};

using LabelMap = std::map<std::string, AcceptanceLabel>;

Label label_for(double score, double threshold);

/// Trust multiplier of an anchor under a policy: 1 for PreTrusted and Belief,
/// the (filtered) reliability for AcceptedAuthority, 0 for exhaustion.
double anchor_trust(const Anchor& anchor, const TrustPolicy& policy);

/// Bottom-up gradual scoring:
///   score(n) = clamp(own(n) + sum_supports w*score(c) - m * sum_attacks w*score(c), -1, 1)
/// with own(n) = base_weight * anchor_trust for anchored nodes and 0 otherwise.
/// Contributions are summed in child-id order, so the result does not depend
/// on node storage order. Throws ValidationError on cyclic input.
LabelMap evaluate(const TrustLattice& lattice, const TrustPolicy& policy);

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

/// What the agent brings to anchor classification.
struct AnchorContext {
  const World* world = nullptr;
  const std::set<std::string>* beliefs = nullptr;
  const std::set<std::string>* pre_trusted = nullptr;
  const std::set<std::string>* accepted_authorities = nullptr;
  /// Sources let through out-group rejection by adversarial deference.
  std::set<std::string> deference_bypass;
  std::string group_tag;
  std::string domain;
  double reliability_threshold = 0.5;
  /// Perceived reliability of a source in `domain`; defaults to true competence.
  std::function<double(const Source&)> perceived_reliability;

  double reliability_of(const Source& s) const;
  bool is_out_group(const Source& s) const;
  AuthorityRef authority_ref(const Source& s) const;
};

struct BudgetState {
  std::size_t nodes_used = 0;
  std::size_t depth = 0;
  bool has_further_evidence = false;
  EvaluationBudget budget;
};

/// First matching anchor kind in priority order, or nullopt when elaboration
/// should continue. `author` is null for claims.
std::optional<Anchor> classify_anchor(std::string_view statement_id, const Source* author,
                                      const AnchorContext& context, const BudgetState& state);

/// Chooses which of the candidate evidence items bearing on `node_id` the
/// agent looks at. Must be deterministic.
using EvidenceSampler =
    std::function<std::vector<const EvidenceItem*>(std::span<const EvidenceItem* const>, std::string_view node_id)>;

/// Breadth-first recursive search for evidence. Every node added consumes
/// budget; statements already on the path above a node are not re-entered.
TrustLattice elaborate(const AnchorContext& context, std::string_view claim_id,
                       std::span<const EvidenceItem> available, const EvaluationBudget& budget,
                       const EvidenceSampler& sampler = {});

// ---------------------------------------------------------------------------
// Revision
// ---------------------------------------------------------------------------

/// Non-negative integer cost with an infinite marker.
class RevisionCost {
 public:
  constexpr RevisionCost() = default;
  constexpr explicit RevisionCost(std::int64_t units) : units_(units) {}
  static constexpr RevisionCost infinite() { return RevisionCost(kInfinite); }

  constexpr bool is_infinite() const { return units_ == kInfinite; }
  constexpr std::int64_t units() const { return units_; }

  friend constexpr auto operator<=>(const RevisionCost&, const RevisionCost&) = default;

 private:
  static constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max();
  std::int64_t units_ = 0;
};

/// A statement to accommodate, already classified by the receiving agent.
struct NewStatement {
  std::string id;
  /// Node id in the lattice; unknown targets attach to the root.
  std::string target;
  Polarity polarity = Polarity::Supports;
  double weight = 1.0;
  Anchor anchor = Anchor::of(AnchorKind::EvidenceExhaustion);
  std::string evidence_kind = "general";
};

struct RevisionSettings {
  std::int64_t belief_flip_cost = 100;
  std::int64_t stickiness_threshold = 3;
  bool archive_enabled = true;
  std::size_t max_nodes = 64;
};

/// Anchors given up (re-marked EvidenceExhaustion) plus the other nodes whose
/// label changes as a result.
struct FlipSet {
  std::vector<std::string> demoted;
  std::vector<std::string> flipped;
  RevisionCost cost;
};

/// Lattice with the new statement attached under its target.
TrustLattice accommodate(const TrustLattice& lattice, const NewStatement& item);

/// Minimum-cost flip set accommodating `item`, restricted to costs <= limit.
/// Among equal-cost sets the one whose changed nodes sort first by
/// (depth descending, id ascending) wins. nullopt when nothing fits the limit.
std::optional<FlipSet> minimal_flip_set(const TrustLattice& lattice, const LabelMap& labels,
                                        const NewStatement& item, const TrustPolicy& policy,
                                        const RevisionSettings& settings,
                                        RevisionCost limit = RevisionCost::infinite());

/// Minimum number of label flips plus anchor demotions (Belief demotions cost
/// belief_flip_cost, PreTrusted ones are infinite) needed to accept `item`
/// while every surviving PreTrusted/Belief/AcceptedAuthority anchor keeps its label.
RevisionCost revision_cost(const TrustLattice& lattice, const LabelMap& labels, const NewStatement& item,
                           const TrustPolicy& policy, const RevisionSettings& settings);

struct ArchiveEntry {
  TrustLattice lattice;
  std::string defeating_item;
  LabelMap labels;
};

/// Retired lattices held in reserve, most recent on top.
class LatticeArchive {
 public:
  void push(ArchiveEntry entry) { entries_.push_back(std::move(entry)); }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const ArchiveEntry& top() const { return entries_.back(); }
  ArchiveEntry pop();
  const std::vector<ArchiveEntry>& entries() const { return entries_; }

 private:
  std::vector<ArchiveEntry> entries_;
};

struct AcceptedRevision {
  TrustLattice lattice;
  LabelMap labels;
  FlipSet flips;
};

struct RejectedCorrection {
  std::string item_id;
  RevisionCost cost;
};

struct ArchivedSwap {
  TrustLattice lattice;
  LabelMap labels;
  FlipSet flips;
};

using RevisionOutcome = std::variant<AcceptedRevision, RejectedCorrection, ArchivedSwap>;

/// Accepts the minimum-cost revision when it costs at most the stickiness
/// threshold, archiving the old lattice instead when the root's label is
/// overturned; otherwise rejects the correction.
RevisionOutcome revise(const TrustLattice& lattice, const LabelMap& labels, const NewStatement& item,
                       const TrustPolicy& policy, const RevisionSettings& settings,
                       LatticeArchive* archive = nullptr);

/// Pops and returns the top archived lattice if it was retired by `retracted_item_id`.
std::optional<TrustLattice> reinstate(LatticeArchive& archive, std::string_view retracted_item_id);

}  // namespace mevir
