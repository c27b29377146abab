#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mevir/lattice.hpp"
#include "mevir/moral_games.hpp"
#include "mevir/random.hpp"

namespace mevir {

struct VirtueProfile {
  double humility = 0.5;
  double courage = 0.5;
  double openness = 0.5;
  double attentiveness = 1.0;
  double perseverance = 0.5;

  void validate() const;
};

/// Bias dials; 0 everywhere is the bias-free baseline.
struct BiasConfig {
  double overconfidence = 0.0;
  double confirmation = 0.0;
  double availability = 0.0;
  double anchoring = 0.0;
  double bandwagon = 0.0;
  double attribution_asymmetry = 0.0;
  double reactance = 0.0;
  double halo = 0.0;
  double false_consensus = 0.0;

  void validate() const;
};

struct Interventions {
  bool stop_loss = false;
  bool adversarial_deference = false;
};

/// Fixed knobs of the agent's cognition that scenarios rarely touch.
struct CognitionSettings {
  double competence_threshold = 0.5;
  double alarm_threshold = 0.7;
  double anchoring_multiplier = 9.0;
  double recency_scale = 10.0;
  std::size_t sample_k = 8;
  std::size_t memory_capacity = 64;
};

/// Current view of one claim: the lattice and its labels.
struct ClaimView {
  TrustLattice lattice;
  LabelMap labels;
};

struct Agent {
  std::string id;
  std::string group_tag;
  MacProfile mac;
  EmftProfile emft;
  VirtueProfile virtues;
  BiasConfig biases;
  TrustPolicy policy;
  EvaluationBudget budget;
  RevisionSettings revision;
  CognitionSettings cognition;
  Interventions interventions;

  std::set<std::string> beliefs;
  std::set<std::string> pre_trusted;
  std::set<std::string> accepted_authorities;
  /// Actual competence per topic domain.
  std::map<std::string, double> competence;
  /// Observation error on each source's competence (added, then clamped).
  std::map<std::string, double> source_noise;

  std::vector<EvidenceItem> memory;
  LatticeArchive archive;
  std::map<std::string, ClaimView> views;
  std::optional<std::size_t> tribe_id;

  std::uint64_t stop_loss_events = 0;
  std::uint64_t deference_events = 0;

  void validate() const;
};

/// The virtue and bias dials as one vector (virtues first), for profile comparisons.
std::vector<double> trait_vector(const Agent& agent);
ProfileLayers profile_layers(const Agent& agent);
double profile_distance(const Agent& a, const Agent& b, const LayerWeights& weights = {});

/// Perceived competence of a source in a domain, through the agent's observation noise.
double perceived_competence(const Agent& agent, const Source& source, const std::string& domain);

/// Anchor-classification context for evaluating a claim in `domain`.
AnchorContext anchor_context(const Agent& agent, const World& world, const std::string& domain);

enum class PathKind { Direct, Defer };

struct PathChoice {
  PathKind kind = PathKind::Direct;
  /// Set iff kind == Defer.
  std::string source;
};

/// actual + overconfidence*(1 - actual); throws LookupError for unknown domains.
double perceived_self_competence(const Agent& agent, const std::string& domain);
/// threshold*(1+humility)/2 + 0.25*humility.
double deference_threshold(const Agent& agent);
/// True when the agent judges itself competent enough for direct evaluation.
bool prefers_direct(const Agent& agent, const std::string& domain);

/// Direct, or Defer to the authority select_authority picks among candidates.
/// With no candidates to defer to the agent falls back to Direct.
PathChoice choose_path(const Agent& agent, const std::string& domain, std::span<const Source* const> candidates,
                       std::string_view claim_id, const std::map<std::string, Polarity>& stance = {},
                       const std::set<std::string>& bypass = {});

/// Prior lean on a claim in [-1,1]: the stored root score if the claim was
/// evaluated before, otherwise the (negated) moral intuition.
double claim_prior(const Agent& agent, const World& world, std::string_view claim_id);

/// Authority score as used by select_authority.
double authority_score(const Agent& agent, const Source& source, const std::string& domain, double prior,
                       std::optional<Polarity> stance, double max_followers, bool bypass = false);

/// Argmax of authority_score, ties to the lowest id. `stance` maps source id
/// to the polarity of its statement on the claim (drives confirmation).
/// Throws ValidationError for an empty candidate set.
const Source& select_authority(const Agent& agent, std::span<const Source* const> candidates,
                               const std::string& domain, double prior,
                               const std::map<std::string, Polarity>& stance = {},
                               const std::set<std::string>& bypass = {});

double sampling_weight(const Agent& agent, const EvidenceItem& item, bool first);
std::size_t effective_sample_size(const Agent& agent, std::size_t k);

/// Weighted sampling without replacement (exponential keys); returns the
/// chosen items in their original order.
std::vector<const EvidenceItem*> sample_evidence(const Agent& agent, std::span<const EvidenceItem* const> available,
                                                 std::size_t k, Rng& rng);

/// Inverts coercive items from non-accepted authors with probability = reactance.
EvidenceItem reactance_filter(const Agent& agent, const EvidenceItem& item, Rng& rng);

enum class Valence { Negative, Positive };
enum class Attribution { Situational, Dispositional };

Attribution attribute_behavior(const Agent& agent, const std::string& actor_group, Valence valence, Rng& rng);

/// Suspends the intuition when the stop-loss intervention is on and alarm is
/// at or above the alarm threshold; counts the event.
double moral_stop_loss(Agent& agent, double intuition_weight, double alarm);
/// Pure variant for inspection: no event is recorded.
double stop_loss_value(const Agent& agent, double intuition_weight, double alarm);

/// Adds the most competent rival source (in the agent's eyes) to `consulted`
/// when the intervention is on and consulted holds no rival yet. The added
/// source is reported through `bypass` so out-group rejection skips it.
std::set<std::string> adversarial_deference(Agent& agent, std::span<const Source* const> rivals,
                                            const std::set<std::string>& consulted, const std::string& domain,
                                            std::set<std::string>* bypass = nullptr);

struct BeliefResult {
  AcceptanceLabel label;
  TrustLattice lattice;
  LabelMap labels;
  PathChoice path;
  double alarm = 0.0;
  double intuition = 0.0;
  bool stop_loss_fired = false;
  bool deference_applied = false;
};

inline std::string intuition_node_id(std::string_view claim_id) { return "intuition:" + std::string(claim_id); }

/// Moral alarm -> stop-loss -> path choice -> lattice -> labels. Evidence is
/// the world pool plus the agent's memory plus `received`. Accepted claims
/// enter the agent's beliefs and the view is stored in agent.views.
BeliefResult form_belief(Agent& agent, const World& world, std::string_view claim_id,
                         std::span<const EvidenceItem> received, std::uint64_t seed);

/// Classifies a newly received item from this agent's point of view.
NewStatement to_statement(const Agent& agent, const World& world, const EvidenceItem& item,
                          const std::string& domain);

/// Adds an item to the bounded memory, evicting the least accessible entry
/// (lowest vividness*decay, then oldest id) when full. Duplicate ids are ignored.
void remember(Agent& agent, const EvidenceItem& item);
/// Ages every memory entry by one step.
void age_memory(Agent& agent);

}  // namespace mevir
