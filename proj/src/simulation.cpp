#include "mevir/simulation.hpp"

#include <algorithm>

namespace mevir {
namespace {

constexpr std::uint64_t kInitialTag = 0x1a1aULL;
constexpr std::uint64_t kReformTag = 0x2b2bULL;
constexpr std::uint64_t kRewireTag = 0x3c3cULL;

bool conflicts(const EvidenceItem& item, Label target_label) {
  return (item.polarity == Polarity::Supports && target_label == Label::Rejected) ||
         (item.polarity == Polarity::Attacks && target_label == Label::Accepted);
}

CorrectionClass classify_target(const TrustLattice& lattice, std::size_t target) {
  const auto& node = lattice.node(target);
  if (node.anchor && node.anchor->kind == AnchorKind::Belief) return CorrectionClass::BeliefAnchor;
  if (lattice.is_leaf(target)) return CorrectionClass::LeafEvidence;
  return CorrectionClass::Other;
}

void sync_belief(Agent& agent, const std::string& claim_id, const LabelMap& labels) {
  if (labels.at(claim_id).label == Label::Accepted) agent.beliefs.insert(claim_id);
  else agent.beliefs.erase(claim_id);
}

}  // namespace

void SimulationConfig::validate() const {
  if (steps == 0) throw ValidationError("simulation needs at least one step");
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(reach)) throw ValidationError("reach outside [0,1]");
  if (!unit(base_attention)) throw ValidationError("base_attention outside [0,1]");
  if (!unit(homophily_rate)) throw ValidationError("homophily_rate outside [0,1]");
  if (!unit(tribes.lambda)) throw ValidationError("tribe lambda outside [0,1]");
  if (!(tribes.tau >= 0.0)) throw ValidationError("tribe tau must be non-negative");
}

std::string_view to_string(CorrectionClass c) {
  switch (c) {
    case CorrectionClass::BeliefAnchor: return "belief_anchor";
    case CorrectionClass::LeafEvidence: return "leaf_evidence";
    case CorrectionClass::Other: return "other";
  }
  return "?";
}

CorrectionTally SimHistory::total_corrections() const {
  CorrectionTally t;
  for (const auto& [_, c] : corrections) {
    t.attempted += c.attempted;
    t.rejected += c.rejected;
  }
  return t;
}

SimHistory propagate(std::vector<Agent>& population, Network& network, const World& world,
                     const std::vector<EvidenceItem>& stream, const SimulationConfig& config) {
  config.validate();
  if (network.size() != population.size()) throw ValidationError("network size does not match population");
  for (const auto& a : population) a.validate();

  std::vector<std::string> claims;
  for (const auto& c : world.claims()) claims.push_back(c.id);
  std::sort(claims.begin(), claims.end());

  StatementIndex index(world);
  for (const auto& item : stream) index.add(item);

  SimHistory history;
  for (auto c : {CorrectionClass::BeliefAnchor, CorrectionClass::LeafEvidence, CorrectionClass::Other})
    history.corrections[c] = {};

  const auto record = [&](std::size_t step) {
    StepRecord r;
    r.step = step;
    r.tribes = detect_tribes(population, claims, config.tribes);
    r.metrics = polarization_index(population, r.tribes, claims);
    r.metrics.rejected_correction_rate = history.total_corrections().rate();
    for (const auto& a : population) {
      std::map<std::string, Label> labels;
      for (const auto& c : claims) labels[c] = claim_label(a, c);
      r.labels.push_back(std::move(labels));
      r.beliefs.push_back(a.beliefs);
      r.stop_loss_events += a.stop_loss_events;
      r.deference_events += a.deference_events;
    }
    history.steps.push_back(std::move(r));
  };

  for (std::size_t i = 0; i < population.size(); ++i)
    for (const auto& c : claims)
      form_belief(population[i], world, c, {}, derive_seed(config.seed, {kInitialTag, i, hash_string(c)}));
  record(0);

  std::vector<std::set<std::string>> seen(population.size());
  std::vector<std::vector<EvidenceItem>> shares(population.size());

  for (std::size_t step = 1; step <= config.steps; ++step) {
    const std::size_t begin = std::min(stream.size(), (step - 1) * config.items_per_step);
    const std::size_t end = std::min(stream.size(), step * config.items_per_step);
    std::vector<std::vector<EvidenceItem>> next_shares(population.size());

    for (std::size_t i = 0; i < population.size(); ++i) {
      Agent& agent = population[i];
      Rng rng(derive_seed(config.seed, {step, i}));
      age_memory(agent);

      std::vector<EvidenceItem> inbox;
      for (std::size_t s = begin; s < end; ++s)
        if (rng.bernoulli(config.reach)) inbox.push_back(stream[s]);
      for (auto j : network.neighbors(i)) {
        const double w = network.weight(i, j);
        for (const auto& item : shares[j]) {
          const double salience = frame_salience(item.framing, agent.emft);
          const double p = w * (config.base_attention + (1.0 - config.base_attention) * salience);
          if (rng.bernoulli(p)) inbox.push_back(item);
        }
      }

      std::set<std::string> stale;
      std::vector<EvidenceItem> fresh;
      for (const auto& item : inbox) {
        if (!seen[i].insert(item.id).second) continue;
        fresh.push_back(reactance_filter(agent, item, rng));
      }

      for (const auto& item : fresh) {
        remember(agent, item);
        const std::string claim_id = index.claim_of(item.target);
        auto view = agent.views.find(claim_id);
        const bool decided = view != agent.views.end() &&
                             view->second.labels.at(claim_id).label != Label::Undecided;
        if (!decided) {
          stale.insert(claim_id);
          continue;
        }
        ClaimView& v = view->second;
        const std::size_t target = v.lattice.find(item.target).value_or(v.lattice.root_index());
        const bool correction = item.veracity && conflicts(item, v.labels.at(v.lattice.node(target).id).label);
        const CorrectionClass cls = classify_target(v.lattice, target);
        if (correction) ++history.corrections[cls].attempted;

        const NewStatement statement = to_statement(agent, world, item, world.claim(claim_id).domain);
        RevisionOutcome outcome =
            revise(v.lattice, v.labels, statement, agent.policy, agent.revision, &agent.archive);
        if (std::holds_alternative<RejectedCorrection>(outcome)) {
          if (correction) ++history.corrections[cls].rejected;
          continue;
        }
        std::visit(
            [&](auto& o) {
              if constexpr (!std::is_same_v<std::decay_t<decltype(o)>, RejectedCorrection>) {
                v.lattice = std::move(o.lattice);
                v.labels = std::move(o.labels);
              }
            },
            outcome);
        sync_belief(agent, claim_id, v.labels);
        if (auto it = v.labels.find(item.id); it != v.labels.end() && it->second.label == Label::Accepted)
          next_shares[i].push_back(item);
      }

      for (const auto& claim_id : stale) {
        const auto result =
            form_belief(agent, world, claim_id, {}, derive_seed(config.seed, {kReformTag, step, i, hash_string(claim_id)}));
        for (const auto& item : fresh) {
          if (index.claim_of(item.target) != claim_id) continue;
          if (auto it = result.labels.find(item.id); it != result.labels.end() && it->second.label == Label::Accepted)
            next_shares[i].push_back(item);
        }
      }
    }

    shares = std::move(next_shares);
    if (config.homophily_rate > 0.0)
      network = rewire_homophily(network, population, config.homophily_rate,
                                 derive_seed(config.seed, {kRewireTag, step}), config.tribes.layer_weights);
    record(step);
  }

  history.final_network = network;
  return history;
}

}  // namespace mevir
