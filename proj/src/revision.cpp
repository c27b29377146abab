#include <algorithm>

#include "mevir/lattice.hpp"

namespace mevir {
namespace {

bool is_constrained(const LatticeNode& n) {
  if (!n.anchor) return false;
  const auto k = n.anchor->kind;
  return k == AnchorKind::PreTrusted || k == AnchorKind::Belief || k == AnchorKind::AcceptedAuthority;
}

Label original_label(const LabelMap& labels, const std::string& id) {
  auto it = labels.find(id);
  return it == labels.end() ? Label::Undecided : it->second.label;
}

// Demoted lattice and its evaluation for one candidate demotion set.
struct Trial {
  TrustLattice lattice;
  LabelMap labels;
};

class FlipSearch {
 public:
  FlipSearch(const TrustLattice& lattice, const LabelMap& labels, const NewStatement& item,
             const TrustPolicy& policy, const RevisionSettings& settings)
      : base_(accommodate(lattice, item)), labels_(labels), item_id_(item.id), policy_(policy) {
    depth_ = base_.depths();
    for (std::size_t i = 0; i < base_.size(); ++i) {
      const auto& n = base_.node(i);
      if (n.id == item_id_ || !is_constrained(n)) continue;
      constrained_.push_back(i);
      // PreTrusted anchors are never given up; they constrain but cannot be demoted.
      if (n.anchor->kind == AnchorKind::PreTrusted) continue;
      demotable_.push_back(i);
      demotion_cost_.push_back(n.anchor->kind == AnchorKind::Belief ? settings.belief_flip_cost : 1);
    }
    std::sort(constrained_.begin(), constrained_.end(), [&](auto a, auto b) { return id(a) < id(b); });
    std::vector<std::size_t> order(demotable_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return id(demotable_[a]) < id(demotable_[b]); });
    std::vector<std::size_t> d;
    std::vector<std::int64_t> c;
    for (auto o : order) {
      d.push_back(demotable_[o]);
      c.push_back(demotion_cost_[o]);
    }
    demotable_ = std::move(d);
    demotion_cost_ = std::move(c);
  }

  std::optional<FlipSet> run(RevisionCost limit) {
    limit_ = limit;
    std::vector<std::size_t> chosen;
    // A set of k demotions costs at least k * cheapest, so larger sets cannot beat `best_`.
    std::int64_t cheapest = demotion_cost_.empty() ? 0 : *std::min_element(demotion_cost_.begin(), demotion_cost_.end());
    for (std::size_t k = 0; k <= demotable_.size(); ++k) {
      const std::int64_t floor = static_cast<std::int64_t>(k) * cheapest;
      if (best_ && floor > best_->cost.units()) break;
      if (!limit_.is_infinite() && floor > limit_.units()) break;
      subsets(0, k, 0, chosen);
    }
    return best_;
  }

 private:
  const std::string& id(std::size_t i) const { return base_.node(i).id; }

  void subsets(std::size_t from, std::size_t remaining, std::int64_t cost, std::vector<std::size_t>& chosen) {
    if (best_ && cost > best_->cost.units()) return;
    if (!limit_.is_infinite() && cost > limit_.units()) return;
    if (remaining == 0) {
      consider(chosen, cost);
      return;
    }
    for (std::size_t i = from; i + remaining <= demotable_.size(); ++i) {
      chosen.push_back(i);
      subsets(i + 1, remaining - 1, cost + demotion_cost_[i], chosen);
      chosen.pop_back();
    }
  }

  void consider(const std::vector<std::size_t>& chosen, std::int64_t demotion_cost) {
    TrustLattice trial = base_;
    std::set<std::size_t> demoted;
    for (auto c : chosen) {
      demoted.insert(demotable_[c]);
      trial.set_anchor(demotable_[c], Anchor::of(AnchorKind::EvidenceExhaustion));
    }
    const LabelMap after = evaluate(trial, policy_);
    for (auto i : constrained_) {
      if (demoted.contains(i)) continue;
      if (after.at(id(i)).label != original_label(labels_, id(i))) return;
    }
    FlipSet fs;
    std::int64_t flips = 0;
    for (std::size_t i = 0; i < base_.size(); ++i) {
      if (id(i) == item_id_ || demoted.contains(i)) continue;
      if (after.at(id(i)).label != original_label(labels_, id(i))) {
        fs.flipped.push_back(id(i));
        ++flips;
      }
    }
    for (auto i : demoted) fs.demoted.push_back(id(i));
    std::sort(fs.demoted.begin(), fs.demoted.end());
    fs.cost = RevisionCost(demotion_cost + flips);
    if (!limit_.is_infinite() && fs.cost > limit_) return;
    if (!best_ || fs.cost < best_->cost || (fs.cost == best_->cost && tie_key(fs) < tie_key(*best_))) best_ = fs;
  }

  std::vector<std::pair<std::int64_t, std::string>> tie_key(const FlipSet& fs) const {
    std::vector<std::pair<std::int64_t, std::string>> key;
    for (const auto* list : {&fs.demoted, &fs.flipped})
      for (const auto& s : *list) key.emplace_back(-static_cast<std::int64_t>(depth_[*base_.find(s)]), s);
    std::sort(key.begin(), key.end());
    return key;
  }

  TrustLattice base_;
  const LabelMap& labels_;
  std::string item_id_;
  const TrustPolicy& policy_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> constrained_;
  std::vector<std::size_t> demotable_;
  std::vector<std::int64_t> demotion_cost_;
  RevisionCost limit_ = RevisionCost::infinite();
  std::optional<FlipSet> best_;
};

TrustLattice apply_demotions(const TrustLattice& lattice, const FlipSet& fs) {
  TrustLattice out = lattice;
  for (const auto& id : fs.demoted) out.set_anchor(*out.find(id), Anchor::of(AnchorKind::EvidenceExhaustion));
  return out;
}

}  // namespace

TrustLattice accommodate(const TrustLattice& lattice, const NewStatement& item) {
  TrustLattice out = lattice;
  if (out.find(item.id)) return out;
  const std::size_t target = out.find(item.target).value_or(out.root_index());
  const std::size_t x = out.add_node(LatticeNode{item.id, NodeKind::Evidence, 1.0, item.anchor, item.evidence_kind});
  out.add_edge(x, target, item.polarity, std::clamp(item.weight, 0.0, 1.0));
  return out;
}

std::optional<FlipSet> minimal_flip_set(const TrustLattice& lattice, const LabelMap& labels,
                                        const NewStatement& item, const TrustPolicy& policy,
                                        const RevisionSettings& settings, RevisionCost limit) {
  if (lattice.find(item.id)) return FlipSet{};
  return FlipSearch(lattice, labels, item, policy, settings).run(limit);
}

RevisionCost revision_cost(const TrustLattice& lattice, const LabelMap& labels, const NewStatement& item,
                           const TrustPolicy& policy, const RevisionSettings& settings) {
  auto fs = minimal_flip_set(lattice, labels, item, policy, settings);
  return fs ? fs->cost : RevisionCost::infinite();
}

ArchiveEntry LatticeArchive::pop() {
  if (entries_.empty()) throw LookupError("archive is empty");
  ArchiveEntry e = std::move(entries_.back());
  entries_.pop_back();
  return e;
}

RevisionOutcome revise(const TrustLattice& lattice, const LabelMap& labels, const NewStatement& item,
                       const TrustPolicy& policy, const RevisionSettings& settings, LatticeArchive* archive) {
  if (lattice.find(item.id)) return AcceptedRevision{lattice, labels, FlipSet{}};

  auto fs = minimal_flip_set(lattice, labels, item, policy, settings, RevisionCost(settings.stickiness_threshold));
  if (!fs) {
    // Report the true cost when the search stays small; otherwise only that it exceeds the threshold.
    std::size_t demotable = 0;
    for (const auto& n : lattice.nodes()) demotable += is_constrained(n) ? 1 : 0;
    RevisionCost cost = demotable <= 12 ? revision_cost(lattice, labels, item, policy, settings)
                                        : RevisionCost::infinite();
    return RejectedCorrection{item.id, cost};
  }

  TrustLattice revised = apply_demotions(accommodate(lattice, item), *fs);
  LabelMap revised_labels = evaluate(revised, policy);
  const std::string& root = lattice.root().id;
  const bool root_overturned = revised_labels.at(root).label != original_label(labels, root);
  if (root_overturned && settings.archive_enabled && archive && lattice.size() <= settings.max_nodes) {
    archive->push(ArchiveEntry{lattice, item.id, labels});
    return ArchivedSwap{std::move(revised), std::move(revised_labels), std::move(*fs)};
  }
  return AcceptedRevision{std::move(revised), std::move(revised_labels), std::move(*fs)};
}

std::optional<TrustLattice> reinstate(LatticeArchive& archive, std::string_view retracted_item_id) {
  if (archive.empty() || archive.top().defeating_item != retracted_item_id) return std::nullopt;
  return archive.pop().lattice;
}

}  // namespace mevir
