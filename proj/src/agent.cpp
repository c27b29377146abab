#include "mevir/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mevir {
namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(std::string(what) + " outside [0,1]");
}

bool out_group(const Agent& agent, const Source& s) {
  return !agent.group_tag.empty() && !s.group_tag.empty() && agent.group_tag != s.group_tag;
}

double decay(const Agent& agent, const EvidenceItem& item) {
  return std::exp(-static_cast<double>(item.recency) / agent.cognition.recency_scale);
}

// Sources with a statement directly on the claim, and the polarity of each
// source's latest such statement.
struct Speakers {
  std::vector<const Source*> sources;
  std::map<std::string, Polarity> stance;
  std::map<std::string, const EvidenceItem*> latest;
};

Speakers speakers_on(const World& world, std::string_view claim_id, const std::vector<EvidenceItem>& pool) {
  Speakers out;
  for (const auto& item : pool) {
    if (item.target != claim_id) continue;
    const Source* s = world.find_source(item.author);
    if (!s) continue;
    out.stance[s->id] = item.polarity;
    out.latest[s->id] = &item;
  }
  for (const auto& [id, _] : out.stance) out.sources.push_back(world.find_source(id));
  return out;
}

}  // namespace

void VirtueProfile::validate() const {
  require_unit(humility, "humility");
  require_unit(courage, "courage");
  require_unit(openness, "openness");
  require_unit(attentiveness, "attentiveness");
  require_unit(perseverance, "perseverance");
}

void BiasConfig::validate() const {
  require_unit(overconfidence, "overconfidence");
  require_unit(confirmation, "confirmation");
  require_unit(availability, "availability");
  require_unit(anchoring, "anchoring");
  require_unit(bandwagon, "bandwagon");
  require_unit(attribution_asymmetry, "attribution_asymmetry");
  require_unit(reactance, "reactance");
  require_unit(halo, "halo");
  require_unit(false_consensus, "false_consensus");
}

void Agent::validate() const {
  if (id.empty()) throw ValidationError("agent with empty id");
  virtues.validate();
  biases.validate();
  policy.validate();
  budget.validate();
  for (const auto& [domain, c] : competence) require_unit(c, "agent competence");
  if (cognition.sample_k == 0) throw ValidationError("sample_k must be positive");
  if (cognition.memory_capacity == 0) throw ValidationError("memory_capacity must be positive");
  if (!(cognition.recency_scale > 0.0)) throw ValidationError("recency_scale must be positive");
  if (!(cognition.anchoring_multiplier >= 0.0)) throw ValidationError("anchoring_multiplier must be non-negative");
  require_unit(cognition.competence_threshold, "competence_threshold");
  require_unit(cognition.alarm_threshold, "alarm_threshold");
  if (revision.belief_flip_cost < 0 || revision.stickiness_threshold < 0)
    throw ValidationError("revision costs must be non-negative");
}

std::vector<double> trait_vector(const Agent& a) {
  const auto& v = a.virtues;
  const auto& b = a.biases;
  return {v.humility,     v.courage,      v.openness,    v.attentiveness,
          v.perseverance, b.overconfidence, b.confirmation, b.availability,
          b.anchoring,    b.bandwagon,    b.attribution_asymmetry, b.reactance,
          b.halo,         b.false_consensus};
}

ProfileLayers profile_layers(const Agent& agent) { return {agent.mac, agent.emft, trait_vector(agent)}; }

double profile_distance(const Agent& a, const Agent& b, const LayerWeights& weights) {
  return profile_distance(profile_layers(a), profile_layers(b), weights);
}

double perceived_competence(const Agent& agent, const Source& source, const std::string& domain) {
  double noise = 0.0;
  if (auto it = agent.source_noise.find(source.id); it != agent.source_noise.end()) noise = it->second;
  return std::clamp(source.competence_in(domain) + noise, 0.0, 1.0);
}

AnchorContext anchor_context(const Agent& agent, const World& world, const std::string& domain) {
  AnchorContext ctx;
  ctx.world = &world;
  ctx.beliefs = &agent.beliefs;
  ctx.pre_trusted = &agent.pre_trusted;
  ctx.accepted_authorities = &agent.accepted_authorities;
  ctx.group_tag = agent.group_tag;
  ctx.domain = domain;
  ctx.reliability_threshold = agent.policy.source_reliability_threshold;
  ctx.perceived_reliability = [&agent, domain](const Source& s) { return perceived_competence(agent, s, domain); };
  return ctx;
}

// --- Path choice and authority selection ------------------------------------

double perceived_self_competence(const Agent& agent, const std::string& domain) {
  auto it = agent.competence.find(domain);
  if (it == agent.competence.end()) throw LookupError("agent has no competence entry for domain '" + domain + "'");
  const double a = it->second;
  return a + agent.biases.overconfidence * (1.0 - a);
}

double deference_threshold(const Agent& agent) {
  const double h = agent.virtues.humility;
  return agent.cognition.competence_threshold * (1.0 + h) / 2.0 + 0.25 * h;
}

bool prefers_direct(const Agent& agent, const std::string& domain) {
  return perceived_self_competence(agent, domain) >= deference_threshold(agent);
}

PathChoice choose_path(const Agent& agent, const std::string& domain, std::span<const Source* const> candidates,
                       std::string_view claim_id, const std::map<std::string, Polarity>& stance,
                       const std::set<std::string>& bypass) {
  if (prefers_direct(agent, domain) || candidates.empty()) return {PathKind::Direct, {}};
  // Without a world we can only use the stored view as prior.
  double prior = 0.0;
  if (auto it = agent.views.find(std::string(claim_id)); it != agent.views.end())
    prior = it->second.labels.at(it->second.lattice.root().id).score;
  return {PathKind::Defer, select_authority(agent, candidates, domain, prior, stance, bypass).id};
}

double claim_prior(const Agent& agent, const World& world, std::string_view claim_id) {
  if (auto it = agent.views.find(std::string(claim_id)); it != agent.views.end())
    return it->second.labels.at(it->second.lattice.root().id).score;
  const Claim& claim = world.claim(claim_id);
  const double alarm = moral_alarm(claim.framing, agent.emft, claim.violation);
  return -stop_loss_value(agent, alarm, alarm);
}

double authority_score(const Agent& agent, const Source& source, const std::string& domain, double prior,
                       std::optional<Polarity> stance, double max_followers, bool bypass) {
  if (source.hypocrisy_flag) return 0.0;
  if (agent.policy.out_group_rejection && out_group(agent, source) && !bypass) return 0.0;
  const auto& b = agent.biases;
  const double beta = std::max({b.confirmation, b.halo, b.bandwagon});
  const double base = perceived_competence(agent, source, domain);
  if (beta <= 0.0) return base;

  const double agreement = stance ? (1.0 + std::clamp(prior, -1.0, 1.0) * sign_of(*stance)) / 2.0 : 0.5;
  const double followers =
      max_followers > 0.0 ? static_cast<double>(source.follower_count) / max_followers : 0.0;
  const double total = b.confirmation + b.halo + b.bandwagon;
  const double mix = (b.confirmation * agreement + b.halo * source.prestige + b.bandwagon * followers) / total;
  return (1.0 - beta) * base + beta * mix;
}

const Source& select_authority(const Agent& agent, std::span<const Source* const> candidates,
                               const std::string& domain, double prior,
                               const std::map<std::string, Polarity>& stance, const std::set<std::string>& bypass) {
  if (candidates.empty()) throw ValidationError("select_authority needs at least one candidate");
  double max_followers = 0.0;
  for (const Source* s : candidates) max_followers = std::max(max_followers, static_cast<double>(s->follower_count));

  const Source* best = nullptr;
  double best_score = -1.0;
  for (const Source* s : candidates) {
    std::optional<Polarity> st;
    if (auto it = stance.find(s->id); it != stance.end()) st = it->second;
    const double score = authority_score(agent, *s, domain, prior, st, max_followers, bypass.contains(s->id));
    if (!best || score > best_score || (score == best_score && s->id < best->id)) {
      best = s;
      best_score = score;
    }
  }
  return *best;
}

// --- Evidence handling -------------------------------------------------------

double sampling_weight(const Agent& agent, const EvidenceItem& item, bool first) {
  const double alpha = agent.biases.availability;
  double w = (1.0 - alpha) + alpha * item.vividness * decay(agent, item);
  if (first && agent.biases.anchoring > 0.0) w *= 1.0 + agent.cognition.anchoring_multiplier * agent.biases.anchoring;
  return w;
}

std::size_t effective_sample_size(const Agent& agent, std::size_t k) {
  if (k == 0) throw ValidationError("sample size must be positive");
  const double scaled = static_cast<double>(k) * (0.25 + 0.75 * agent.virtues.attentiveness);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(scaled - 1e-12)));
}

std::vector<const EvidenceItem*> sample_evidence(const Agent& agent, std::span<const EvidenceItem* const> available,
                                                 std::size_t k, Rng& rng) {
  const std::size_t k_eff = std::min(effective_sample_size(agent, k), available.size());
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(available.size());
  for (std::size_t i = 0; i < available.size(); ++i) {
    const double u = 1.0 - rng.uniform();  // (0,1]
    const double w = sampling_weight(agent, *available[i], i == 0);
    keys.emplace_back(w > 0.0 ? std::log(u) / w : -std::numeric_limits<double>::infinity(), i);
  }
  std::stable_sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < k_eff; ++i) chosen.push_back(keys[i].second);
  std::sort(chosen.begin(), chosen.end());
  std::vector<const EvidenceItem*> out;
  for (auto i : chosen) out.push_back(available[i]);
  return out;
}

EvidenceItem reactance_filter(const Agent& agent, const EvidenceItem& item, Rng& rng) {
  // Always draw, so the random stream does not depend on the item's attributes.
  const double draw = rng.uniform();
  EvidenceItem out = item;
  if (item.coercive && !agent.accepted_authorities.contains(item.author) && draw < agent.biases.reactance) {
    out.polarity = inverted(item.polarity);
    out.reactance_inverted = true;
  }
  return out;
}

Attribution attribute_behavior(const Agent& agent, const std::string& actor_group, Valence valence, Rng& rng) {
  if (rng.uniform() >= agent.biases.attribution_asymmetry) return Attribution::Situational;
  const bool in_group = actor_group == agent.group_tag;
  if (valence == Valence::Negative) return in_group ? Attribution::Situational : Attribution::Dispositional;
  return in_group ? Attribution::Dispositional : Attribution::Situational;
}

double stop_loss_value(const Agent& agent, double intuition_weight, double alarm) {
  require_unit(intuition_weight, "intuition weight");
  require_unit(alarm, "alarm");
  if (agent.interventions.stop_loss && alarm >= agent.cognition.alarm_threshold) return 0.0;
  return intuition_weight;
}

double moral_stop_loss(Agent& agent, double intuition_weight, double alarm) {
  const double out = stop_loss_value(agent, intuition_weight, alarm);
  if (agent.interventions.stop_loss && alarm >= agent.cognition.alarm_threshold) ++agent.stop_loss_events;
  return out;
}

std::set<std::string> adversarial_deference(Agent& agent, std::span<const Source* const> rivals,
                                            const std::set<std::string>& consulted, const std::string& domain,
                                            std::set<std::string>* bypass) {
  if (!agent.interventions.adversarial_deference || rivals.empty()) return consulted;
  for (const Source* r : rivals)
    if (consulted.contains(r->id)) return consulted;
  const Source* best = nullptr;
  double best_c = -1.0;
  for (const Source* r : rivals) {
    const double c = perceived_competence(agent, *r, domain);
    if (!best || c > best_c || (c == best_c && r->id < best->id)) {
      best = r;
      best_c = c;
    }
  }
  std::set<std::string> out = consulted;
  out.insert(best->id);
  if (bypass) bypass->insert(best->id);
  ++agent.deference_events;
  return out;
}

// --- Belief formation --------------------------------------------------------

BeliefResult form_belief(Agent& agent, const World& world, std::string_view claim_id,
                         std::span<const EvidenceItem> received, std::uint64_t seed) {
  const Claim& claim = world.claim(claim_id);
  const std::string cid(claim_id);
  BeliefResult result{{}, TrustLattice(LatticeNode{cid, NodeKind::Claim, 1.0, std::nullopt, "general"}), {}, {}};
  result.alarm = moral_alarm(claim.framing, agent.emft, claim.violation);

  if (agent.beliefs.contains(cid)) {
    result.lattice.set_anchor(0, Anchor::of(AnchorKind::Belief));
    result.labels = evaluate(result.lattice, agent.policy);
    result.label = result.labels.at(cid);
    agent.views.insert_or_assign(cid, ClaimView{result.lattice, result.labels});
    return result;
  }

  const double prior = claim_prior(agent, world, claim_id);
  const auto before = agent.stop_loss_events;
  result.intuition = moral_stop_loss(agent, result.alarm, result.alarm);
  result.stop_loss_fired = agent.stop_loss_events != before;

  // Evidence the agent can see: world pool, memory, then fresh items; first copy of an id wins.
  Rng reactance_rng(derive_seed(seed, {1}));
  std::vector<EvidenceItem> pool;
  std::set<std::string> seen;
  // Memory already went through reactance on receipt.
  const auto take = [&](std::span<const EvidenceItem> items, bool filter) {
    for (const auto& item : items)
      if (seen.insert(item.id).second) pool.push_back(filter ? reactance_filter(agent, item, reactance_rng) : item);
  };
  take(world.evidence(), true);
  take(agent.memory, false);
  take(received, true);

  const Speakers speakers = speakers_on(world, claim_id, pool);
  std::vector<const Source*> rivals;
  for (const Source* s : speakers.sources)
    if (out_group(agent, *s)) rivals.push_back(s);

  AnchorContext ctx = anchor_context(agent, world, claim.domain);
  const bool direct = prefers_direct(agent, claim.domain) || speakers.sources.empty();

  if (direct) {
    result.path = {PathKind::Direct, {}};
    // In direct evaluation the consulted set is the in-group speakers the agent trusts.
    std::set<std::string> consulted;
    for (const Source* s : speakers.sources)
      if (!out_group(agent, *s)) consulted.insert(s->id);
    const auto before_def = agent.deference_events;
    adversarial_deference(agent, rivals, consulted, claim.domain, &ctx.deference_bypass);
    result.deference_applied = agent.deference_events != before_def;

    const EvidenceSampler sampler = [&](std::span<const EvidenceItem* const> items, std::string_view node_id) {
      Rng rng(derive_seed(seed, {2, hash_string(node_id)}));
      return sample_evidence(agent, items, agent.cognition.sample_k, rng);
    };
    result.lattice = elaborate(ctx, claim_id, pool, agent.budget, sampler);
  } else {
    const Source& chosen = select_authority(agent, speakers.sources, claim.domain, prior, speakers.stance);
    result.path = {PathKind::Defer, chosen.id};
    const auto before_def = agent.deference_events;
    const std::set<std::string> consulted =
        adversarial_deference(agent, rivals, {chosen.id}, claim.domain, &ctx.deference_bypass);
    result.deference_applied = agent.deference_events != before_def;

    for (const auto& source_id : consulted) {
      const EvidenceItem* item = speakers.latest.at(source_id);
      const Source& s = world.source(source_id);
      const std::size_t n = result.lattice.add_node(
          LatticeNode{item->id, NodeKind::Evidence, 1.0, Anchor::accepted_authority(ctx.authority_ref(s)), item->kind});
      result.lattice.add_edge(n, 0, item->polarity, item->strength);
    }
    if (result.lattice.size() == 1) result.lattice.set_anchor(0, Anchor::of(AnchorKind::EvidenceExhaustion));
  }

  // Unsuspended moral alarm enters as an intuition against the claim and its supporters.
  if (result.intuition > 0.0) {
    std::vector<std::size_t> supporters;
    for (const auto& e : result.lattice.edges())
      if (e.to == 0 && e.polarity == Polarity::Supports) supporters.push_back(e.from);
    const std::size_t node = result.lattice.add_node(
        LatticeNode{intuition_node_id(claim_id), NodeKind::Intuition, 1.0, Anchor::of(AnchorKind::Belief), "intuition"});
    result.lattice.add_edge(node, 0, Polarity::Attacks, result.intuition);
    for (auto s : supporters) result.lattice.add_edge(node, s, Polarity::Attacks, result.intuition);
    // A root that had nothing under it is no longer a leaf and keeps no exhaustion anchor.
    if (result.lattice.root().anchor && result.lattice.root().anchor->kind == AnchorKind::EvidenceExhaustion)
      result.lattice.set_anchor(0, std::nullopt);
  }

  result.labels = evaluate(result.lattice, agent.policy);
  result.label = result.labels.at(cid);
  if (result.label.label == Label::Accepted) agent.beliefs.insert(cid);
  agent.views.insert_or_assign(cid, ClaimView{result.lattice, result.labels});
  return result;
}

NewStatement to_statement(const Agent& agent, const World& world, const EvidenceItem& item,
                          const std::string& domain) {
  const AnchorContext ctx = anchor_context(agent, world, domain);
  const Source* author = world.find_source(item.author);
  const BudgetState state{0, 0, false, agent.budget};
  Anchor anchor = classify_anchor(item.id, author, ctx, state).value_or(Anchor::of(AnchorKind::EvidenceExhaustion));
  return NewStatement{item.id, item.target, item.polarity, item.strength, std::move(anchor), item.kind};
}

void remember(Agent& agent, const EvidenceItem& item) {
  for (const auto& m : agent.memory)
    if (m.id == item.id) return;
  agent.memory.push_back(item);
  while (agent.memory.size() > agent.cognition.memory_capacity) {
    auto worst = agent.memory.begin();
    for (auto it = agent.memory.begin(); it != agent.memory.end(); ++it) {
      const double a = it->vividness * decay(agent, *it);
      const double b = worst->vividness * decay(agent, *worst);
      if (a < b || (a == b && (it->recency > worst->recency || (it->recency == worst->recency && it->id < worst->id))))
        worst = it;
    }
    agent.memory.erase(worst);
  }
}

void age_memory(Agent& agent) {
  for (auto& m : agent.memory) ++m.recency;
}

}  // namespace mevir
