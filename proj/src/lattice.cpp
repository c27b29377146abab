#include "mevir/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace mevir {

std::string_view to_string(AnchorKind k) {
  switch (k) {
    case AnchorKind::PreTrusted: return "pre_trusted";
    case AnchorKind::Belief: return "belief";
    case AnchorKind::AcceptedAuthority: return "accepted_authority";
    case AnchorKind::EvidenceExhaustion: return "evidence_exhaustion";
    case AnchorKind::ResourceExhaustion: return "resource_exhaustion";
  }
  return "?";
}

std::optional<AnchorKind> parse_anchor_kind(std::string_view name) {
  for (auto k : {AnchorKind::PreTrusted, AnchorKind::Belief, AnchorKind::AcceptedAuthority,
                 AnchorKind::EvidenceExhaustion, AnchorKind::ResourceExhaustion})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Accepted: return "accepted";
    case Label::Rejected: return "rejected";
    case Label::Undecided: return "undecided";
  }
  return "?";
}

// --- TrustLattice ----------------------------------------------------------

TrustLattice::TrustLattice(LatticeNode root) { add_node(std::move(root)); }

std::size_t TrustLattice::add_node(LatticeNode node) {
  if (node.id.empty()) throw ValidationError("lattice node with empty id");
  if (!(node.base_weight >= 0.0 && node.base_weight <= 1.0)) throw ValidationError("base weight outside [0,1]");
  if (index_.contains(node.id)) throw ValidationError("duplicate lattice node '" + node.id + "'");
  index_.emplace(node.id, nodes_.size());
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

bool TrustLattice::would_create_cycle(std::size_t from, std::size_t to) const {
  if (from == to) return true;
  // A cycle appears iff `from` is already reachable upward from `to`.
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<std::size_t> stack{to};
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    if (n == from) return true;
    if (seen[n]) continue;
    seen[n] = true;
    for (const auto& e : edges_)
      if (e.from == n) stack.push_back(e.to);
  }
  return false;
}

void TrustLattice::add_edge(std::size_t from, std::size_t to, Polarity polarity, double weight) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw LookupError("edge endpoint out of range");
  if (!(weight >= 0.0 && weight <= 1.0)) throw ValidationError("edge weight outside [0,1]");
  for (const auto& e : edges_)
    if (e.from == from && e.to == to) throw ValidationError("duplicate lattice edge");
  if (would_create_cycle(from, to)) throw ValidationError("lattice edge would create a cycle");
  edges_.push_back({from, to, polarity, weight});
}

std::optional<std::size_t> TrustLattice::find(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<LatticeEdge> TrustLattice::incoming(std::size_t i) const {
  std::vector<LatticeEdge> out;
  for (const auto& e : edges_)
    if (e.to == i) out.push_back(e);
  return out;
}

bool TrustLattice::is_leaf(std::size_t i) const {
  return std::none_of(edges_.begin(), edges_.end(), [i](const LatticeEdge& e) { return e.to == i; });
}

std::vector<std::size_t> TrustLattice::depths() const {
  constexpr auto unreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> depth(nodes_.size(), unreached);
  depth[0] = 0;
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    for (const auto& e : edges_) {
      if (e.to == n && depth[e.from] == unreached) {
        depth[e.from] = depth[n] + 1;
        queue.push_back(e.from);
      }
    }
  }
  return depth;
}

std::size_t TrustLattice::depth_of(std::size_t i) const { return depths().at(i); }

void TrustLattice::set_anchor(std::size_t i, std::optional<Anchor> anchor) { nodes_.at(i).anchor = std::move(anchor); }

void TrustLattice::validate() const {
  const auto depth = depths();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (depth[i] == std::numeric_limits<std::size_t>::max())
      throw ValidationError("lattice node '" + nodes_[i].id + "' does not reach the root");
    if (is_leaf(i) && !nodes_[i].anchor) throw ValidationError("leaf '" + nodes_[i].id + "' has no anchor");
  }
  for (const auto& e : edges_)
    if (e.from == 0) throw ValidationError("root has an outgoing edge");
}

// --- Policies and evaluation -----------------------------------------------

void TrustPolicy::validate() const {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(source_reliability_threshold)) throw ValidationError("source_reliability_threshold outside [0,1]");
  if (!unit(acceptance_threshold)) throw ValidationError("acceptance_threshold outside [0,1]");
  if (!(attack_weight_multiplier >= 0.0) || !std::isfinite(attack_weight_multiplier))
    throw ValidationError("attack_weight_multiplier must be non-negative");
  for (const auto& [kind, m] : evidence_standard)
    if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("evidence standard for '" + kind + "' is negative");
}

void EvaluationBudget::validate() const {
  if (max_nodes == 0) throw ValidationError("max_nodes must be positive");
}

Label label_for(double score, double threshold) {
  if (score >= threshold) return Label::Accepted;
  if (score <= -threshold) return Label::Rejected;
  return Label::Undecided;
}

double anchor_trust(const Anchor& anchor, const TrustPolicy& policy) {
  switch (anchor.kind) {
    case AnchorKind::PreTrusted:
    case AnchorKind::Belief: return 1.0;
    case AnchorKind::EvidenceExhaustion:
    case AnchorKind::ResourceExhaustion: return 0.0;
    case AnchorKind::AcceptedAuthority: {
      if (!anchor.authority) return 0.0;
      const auto& a = *anchor.authority;
      if (a.out_group && policy.out_group_rejection && !a.bypass_out_group) return 0.0;
      return std::clamp(a.reliability, 0.0, 1.0) * (a.hypocrite ? 0.0 : 1.0);
    }
  }
  return 0.0;
}

LabelMap evaluate(const TrustLattice& lattice, const TrustPolicy& policy) {
  const auto& nodes = lattice.nodes();
  const std::size_t n = nodes.size();
  std::vector<std::vector<LatticeEdge>> children(n);
  for (const auto& e : lattice.edges()) children.at(e.to).push_back(e);
  for (auto& c : children)
    std::sort(c.begin(), c.end(), [&](const LatticeEdge& a, const LatticeEdge& b) {
      return nodes[a.from].id < nodes[b.from].id;
    });

  enum class Mark { Fresh, Active, Done };
  std::vector<Mark> mark(n, Mark::Fresh);
  std::vector<double> score(n, 0.0);

  // Iterative post-order so deep chains cannot blow the stack.
  for (std::size_t start = 0; start < n; ++start) {
    if (mark[start] != Mark::Fresh) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    mark[start] = Mark::Active;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < children[node].size()) {
        std::size_t child = children[node][next++].from;
        if (mark[child] == Mark::Active) throw ValidationError("lattice contains a cycle");
        if (mark[child] == Mark::Fresh) {
          mark[child] = Mark::Active;
          stack.emplace_back(child, 0);
        }
        continue;
      }
      const LatticeNode& ln = nodes[node];
      double own = ln.anchor ? ln.base_weight * anchor_trust(*ln.anchor, policy) : 0.0;
      double support = 0.0, attack = 0.0;
      for (const auto& e : children[node]) {
        const LatticeNode& child = nodes[e.from];
        double multiplier = 1.0;
        if (auto it = policy.evidence_standard.find(child.evidence_kind); it != policy.evidence_standard.end())
          multiplier = it->second;
        const double w = std::min(1.0, e.weight * multiplier);
        (e.polarity == Polarity::Supports ? support : attack) += w * score[e.from];
      }
      score[node] = std::clamp(own + support - policy.attack_weight_multiplier * attack, -1.0, 1.0);
      mark[node] = Mark::Done;
      stack.pop_back();
    }
  }

  LabelMap labels;
  for (std::size_t i = 0; i < n; ++i)
    labels.emplace(nodes[i].id, AcceptanceLabel{label_for(score[i], policy.acceptance_threshold), score[i]});
  return labels;
}

// --- Elaboration -----------------------------------------------------------

double AnchorContext::reliability_of(const Source& s) const {
  if (perceived_reliability) return std::clamp(perceived_reliability(s), 0.0, 1.0);
  return s.competence_in(domain);
}

bool AnchorContext::is_out_group(const Source& s) const {
  return !group_tag.empty() && !s.group_tag.empty() && group_tag != s.group_tag;
}

AuthorityRef AnchorContext::authority_ref(const Source& s) const {
  return AuthorityRef{s.id, reliability_of(s), is_out_group(s), s.hypocrisy_flag, deference_bypass.contains(s.id)};
}

std::optional<Anchor> classify_anchor(std::string_view statement_id, const Source* author,
                                      const AnchorContext& context, const BudgetState& state) {
  const std::string id(statement_id);
  if (context.pre_trusted && context.pre_trusted->contains(id)) return Anchor::of(AnchorKind::PreTrusted);
  if (context.beliefs && context.beliefs->contains(id)) return Anchor::of(AnchorKind::Belief);
  if (author) {
    const bool accepted = (context.accepted_authorities && context.accepted_authorities->contains(author->id)) ||
                          context.deference_bypass.contains(author->id) ||
                          context.reliability_of(*author) >= context.reliability_threshold;
    if (accepted) return Anchor::accepted_authority(context.authority_ref(*author));
  }
  if (!state.has_further_evidence) return Anchor::of(AnchorKind::EvidenceExhaustion);
  if (state.nodes_used >= state.budget.max_nodes || state.depth >= state.budget.max_depth)
    return Anchor::of(AnchorKind::ResourceExhaustion);
  return std::nullopt;
}

TrustLattice elaborate(const AnchorContext& context, std::string_view claim_id,
                       std::span<const EvidenceItem> available, const EvaluationBudget& budget,
                       const EvidenceSampler& sampler) {
  budget.validate();
  if (context.world && !context.world->has_claim(claim_id))
    throw LookupError("unknown claim '" + std::string(claim_id) + "'");

  std::map<std::string, std::vector<const EvidenceItem*>, std::less<>> by_target;
  for (const auto& item : available) by_target[item.target].push_back(&item);
  for (auto& [target, items] : by_target)
    std::sort(items.begin(), items.end(), [](const EvidenceItem* a, const EvidenceItem* b) { return a->id < b->id; });

  TrustLattice lattice(LatticeNode{std::string(claim_id), NodeKind::Claim, 1.0, std::nullopt, "general"});
  std::map<std::size_t, const EvidenceItem*> item_of;
  std::vector<std::size_t> depth{0};
  std::deque<std::size_t> queue{0};

  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    const std::string node_id = lattice.node(n).id;

    std::vector<const EvidenceItem*> candidates;
    if (auto it = by_target.find(node_id); it != by_target.end()) candidates = it->second;
    if (sampler && !candidates.empty()) candidates = sampler(candidates, node_id);

    const Source* author = nullptr;
    if (auto it = item_of.find(n); it != item_of.end() && context.world)
      author = context.world->find_source(it->second->author);
    BudgetState state{lattice.size(), depth[n], !candidates.empty(), budget};
    if (auto anchor = classify_anchor(node_id, author, context, state)) {
      lattice.set_anchor(n, std::move(anchor));
      continue;
    }

    bool added = false;
    for (const EvidenceItem* item : candidates) {
      std::size_t child;
      if (auto existing = lattice.find(item->id)) {
        child = *existing;
        const bool duplicate = std::any_of(lattice.edges().begin(), lattice.edges().end(),
                                           [&](const LatticeEdge& e) { return e.from == child && e.to == n; });
        if (duplicate || lattice.would_create_cycle(child, n)) continue;
      } else {
        if (lattice.size() >= budget.max_nodes) continue;
        child = lattice.add_node(LatticeNode{item->id, NodeKind::Evidence, 1.0, std::nullopt, item->kind});
        item_of.emplace(child, item);
        depth.push_back(depth[n] + 1);
        queue.push_back(child);
      }
      lattice.add_edge(child, n, item->polarity, item->strength);
      added = true;
    }
    if (!added) lattice.set_anchor(n, Anchor::of(AnchorKind::ResourceExhaustion));
  }
  return lattice;
}

}  // namespace mevir
