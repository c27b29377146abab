#include "mevir/world.hpp"

#include <algorithm>

#include "mevir/random.hpp"

namespace mevir {
namespace {

void require_unit(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(what + " outside [0,1]");
}

template <typename T, typename Key>
std::map<std::string, std::size_t, std::less<>> index_by(const std::vector<T>& items, Key key,
                                                          const char* what) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string& id = key(items[i]);
    if (id.empty()) throw ValidationError(std::string(what) + " with empty id");
    if (!index.emplace(id, i).second) throw ValidationError(std::string("duplicate ") + what + " id '" + id + "'");
  }
  return index;
}

}  // namespace

std::string_view to_string(Polarity p) { return p == Polarity::Supports ? "supports" : "attacks"; }

double Source::competence_in(const std::string& domain) const {
  auto it = competence.find(domain);
  return it == competence.end() ? 0.0 : it->second;
}

World::World(std::vector<std::string> domains, std::vector<Claim> claims, std::vector<TruthMakerFact> facts,
             std::vector<Source> sources, std::vector<EvidenceItem> evidence)
    : domains_(std::move(domains)),
      claims_(std::move(claims)),
      facts_(std::move(facts)),
      sources_(std::move(sources)),
      evidence_(std::move(evidence)) {
  claim_index_ = index_by(claims_, [](const Claim& c) -> const std::string& { return c.id; }, "claim");
  fact_index_ = index_by(facts_, [](const TruthMakerFact& f) -> const std::string& { return f.claim_id; }, "fact");
  source_index_ = index_by(sources_, [](const Source& s) -> const std::string& { return s.id; }, "source");
  evidence_index_ = index_by(evidence_, [](const EvidenceItem& e) -> const std::string& { return e.id; }, "evidence");

  for (const auto& c : claims_) {
    if (!has_domain(c.domain)) throw ValidationError("claim '" + c.id + "' uses unknown domain '" + c.domain + "'");
    if (!fact_index_.contains(c.id)) throw ValidationError("claim '" + c.id + "' has no truth-maker fact");
    require_unit(c.violation, "claim violation");
  }
  for (const auto& f : facts_) {
    if (!claim_index_.contains(f.claim_id)) throw ValidationError("fact for unknown claim '" + f.claim_id + "'");
    require_unit(f.proxy_fidelity, "proxy_fidelity");
  }
  for (const auto& s : sources_) {
    require_unit(s.prestige, "source prestige");
    require_unit(s.honesty, "source honesty");
    for (const auto& [domain, value] : s.competence) {
      if (!has_domain(domain)) throw ValidationError("source '" + s.id + "' rates unknown domain '" + domain + "'");
      require_unit(value, "source competence");
    }
  }
  for (const auto& e : evidence_) {
    if (claim_index_.contains(e.id)) throw ValidationError("evidence id '" + e.id + "' collides with a claim id");
    if (!source_index_.contains(e.author)) throw ValidationError("evidence '" + e.id + "' has unknown author");
    if (!is_statement(e.target)) throw ValidationError("evidence '" + e.id + "' targets unknown statement");
    if (e.target == e.id) throw ValidationError("evidence '" + e.id + "' targets itself");
    require_unit(e.strength, "evidence strength");
    require_unit(e.vividness, "evidence vividness");
    if (e.recency < 0) throw ValidationError("evidence recency must be non-negative");
  }
  // Target links among pooled evidence must bottom out at a claim.
  for (const auto& e : evidence_) {
    std::string cursor = e.target;
    for (std::size_t hops = 0; !claim_index_.contains(cursor); ++hops) {
      if (hops > evidence_.size()) throw ValidationError("evidence target chain through '" + e.id + "' is cyclic");
      cursor = evidence_[evidence_index_.find(cursor)->second].target;
    }
  }
}

bool World::has_domain(std::string_view domain) const {
  return std::find(domains_.begin(), domains_.end(), domain) != domains_.end();
}

const Claim& World::claim(std::string_view id) const {
  auto it = claim_index_.find(id);
  if (it == claim_index_.end()) throw LookupError("unknown claim '" + std::string(id) + "'");
  return claims_[it->second];
}

const TruthMakerFact& World::fact(std::string_view claim_id) const {
  auto it = fact_index_.find(claim_id);
  if (it == fact_index_.end()) throw LookupError("unknown claim '" + std::string(claim_id) + "'");
  return facts_[it->second];
}

const Source& World::source(std::string_view id) const {
  const Source* s = find_source(id);
  if (!s) throw LookupError("unknown source '" + std::string(id) + "'");
  return *s;
}

const Source* World::find_source(std::string_view id) const {
  auto it = source_index_.find(id);
  return it == source_index_.end() ? nullptr : &sources_[it->second];
}

const EvidenceItem* World::find_evidence(std::string_view id) const {
  auto it = evidence_index_.find(id);
  return it == evidence_index_.end() ? nullptr : &evidence_[it->second];
}

bool World::is_statement(std::string_view id) const {
  return claim_index_.contains(id) || evidence_index_.contains(id);
}

bool ground_truth(const World& world, std::string_view claim_id) { return world.fact(claim_id).truth_value; }

void StreamConfig::validate() const {
  require_unit(misinformation_rate, "misinformation_rate");
  require_unit(strength_min, "strength_min");
  require_unit(strength_max, "strength_max");
  require_unit(vividness_min, "vividness_min");
  require_unit(vividness_max, "vividness_max");
  require_unit(misinformation_vividness_boost, "misinformation_vividness_boost");
  require_unit(claim_target_share, "claim_target_share");
  require_unit(coercive_rate, "coercive_rate");
  if (strength_min > strength_max || vividness_min > vividness_max)
    throw ValidationError("stream range minimum exceeds maximum");
}

std::vector<EvidenceItem> generate_evidence_stream(const World& world, const StreamConfig& config,
                                                   std::uint64_t seed) {
  config.validate();
  if (world.claims().empty() || world.sources().empty())
    throw ValidationError("evidence stream needs at least one claim and one source");

  Rng rng(derive_seed(seed, {0x5743ULL}));
  const auto& sources = world.sources();
  const auto pick_author = [&](bool truthful) -> const Source& {
    double total = 0.0;
    for (const auto& s : sources) total += truthful ? s.honesty : 1.0 - s.honesty;
    if (total <= 0.0) return sources[rng.index(sources.size())];
    double r = rng.uniform() * total;
    for (const auto& s : sources) {
      r -= truthful ? s.honesty : 1.0 - s.honesty;
      if (r < 0.0) return s;
    }
    return sources.back();
  };

  const StatementIndex index(world);
  std::vector<EvidenceItem> stream;
  stream.reserve(config.length);
  for (std::size_t i = 0; i < config.length; ++i) {
    EvidenceItem item;
    item.id = "s" + std::to_string(i);
    const bool veracity = !rng.bernoulli(config.misinformation_rate);
    item.veracity = veracity;

    bool truthful_polarity_supports;
    const Claim* claim;
    if (world.evidence().empty() || rng.bernoulli(config.claim_target_share)) {
      claim = &world.claims()[rng.index(world.claims().size())];
      item.target = claim->id;
      item.framing = claim->framing;
      truthful_polarity_supports = world.fact(claim->id).truth_value;
    } else {
      const EvidenceItem& target = world.evidence()[rng.index(world.evidence().size())];
      claim = &world.claim(index.claim_of(target.id));
      item.target = target.id;
      item.framing = target.framing;
      truthful_polarity_supports = target.veracity;
    }
    const Polarity truthful = truthful_polarity_supports ? Polarity::Supports : Polarity::Attacks;
    item.polarity = veracity ? truthful : inverted(truthful);
    item.author = pick_author(veracity).id;

    double strength = rng.uniform(config.strength_min, config.strength_max);
    if (veracity) strength *= world.fact(claim->id).proxy_fidelity;
    item.strength = strength;
    double vividness = rng.uniform(config.vividness_min, config.vividness_max);
    if (!veracity) vividness = std::min(1.0, vividness + config.misinformation_vividness_boost);
    item.vividness = vividness;
    item.coercive = rng.bernoulli(config.coercive_rate);
    item.kind = config.kind;
    stream.push_back(std::move(item));
  }
  return stream;
}

double frame_salience(const FramingVector& framing, const EmftProfile& profile) {
  double total = 0.0;
  for (std::size_t i = 0; i < kFoundationCount; ++i) total += framing.values()[i] * profile.at(i);
  return std::clamp(total, 0.0, 1.0);
}

StatementIndex::StatementIndex(const World& world) {
  for (const auto& c : world.claims()) claims_.emplace(c.id, true);
  for (const auto& e : world.evidence()) target_of_.emplace(e.id, e.target);
}

void StatementIndex::add(const EvidenceItem& item) { target_of_.emplace(item.id, item.target); }

bool StatementIndex::contains(std::string_view id) const {
  return claims_.contains(id) || target_of_.contains(id);
}

std::string StatementIndex::claim_of(std::string_view statement_id) const {
  std::string cursor(statement_id);
  for (std::size_t hops = 0; hops <= target_of_.size(); ++hops) {
    if (claims_.contains(cursor)) return cursor;
    auto it = target_of_.find(cursor);
    if (it == target_of_.end()) throw LookupError("unknown statement '" + cursor + "'");
    cursor = it->second;
  }
  throw ValidationError("statement target chain is cyclic at '" + std::string(statement_id) + "'");
}

}  // namespace mevir
