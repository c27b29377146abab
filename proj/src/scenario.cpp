#include "mevir/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mevir/profiler.hpp"

namespace mevir {
namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were asked for so that any
// other key can be reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string key(std::string_view k) const { return path_.empty() ? std::string(k) : path_ + "." + std::string(k); }

  const json* get(const std::string& k) {
    used_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& need(const std::string& k) {
    const json* v = get(k);
    if (!v) throw ConfigError(key(k), "missing required key");
    return *v;
  }

  double number(const std::string& k, double def, double lo, double hi) {
    const json* v = get(k);
    if (!v) return def;
    return as_number(*v, key(k), lo, hi);
  }
  std::size_t count(const std::string& k, std::size_t def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
      throw ConfigError(key(k), "expected a non-negative integer");
    return v->get<std::size_t>();
  }
  bool boolean(const std::string& k, bool def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_boolean()) throw ConfigError(key(k), "expected true or false");
    return v->get<bool>();
  }
  std::string string(const std::string& k, const std::string& def) {
    const json* v = get(k);
    if (!v) return def;
    if (!v->is_string()) throw ConfigError(key(k), "expected a string");
    return v->get<std::string>();
  }
  std::string required_string(const std::string& k) {
    const json& v = need(k);
    if (!v.is_string() || v.get<std::string>().empty()) throw ConfigError(key(k), "expected a non-empty string");
    return v.get<std::string>();
  }
  std::vector<std::string> strings(const std::string& k) {
    std::vector<std::string> out;
    const json* v = get(k);
    if (!v) return out;
    if (!v->is_array()) throw ConfigError(key(k), "expected an array of strings");
    for (const auto& e : *v) {
      if (!e.is_string()) throw ConfigError(key(k), "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.contains(it.key())) throw ConfigError(key(it.key()), "unknown key");
  }

  static double as_number(const json& v, const std::string& where, double lo, double hi) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double d = v.get<double>();
    if (!(d >= lo && d <= hi)) {
      std::ostringstream os;
      os << "value " << d << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(where, os.str());
    }
    return d;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& array_of(const json& root, const std::string& k) {
  static const json empty = json::array();
  auto it = root.find(k);
  if (it == root.end()) return empty;
  if (!it->is_array()) throw ConfigError(k, "expected an array");
  return *it;
}

FramingVector parse_framing(const json* v, const std::string& where) {
  if (!v) return {};
  Obj o(*v, where);
  FramingVector::Values values{};
  for (std::size_t f = 0; f < kFoundationCount; ++f)
    values[f] = o.number(std::string(to_string(static_cast<Foundation>(f))), 0.0, 0.0, 1.0);
  o.done();
  return FramingVector(values);
}

template <typename Dist, typename Index, std::size_t N>
Dist parse_distribution(const json& v, const std::string& where) {
  Obj o(v, where);
  typename Dist::Values values{};
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    values[i] = o.number(std::string(to_string(static_cast<Index>(i))), 0.0, 0.0, kInf);
    total += values[i];
  }
  o.done();
  if (total <= 0.0) throw ConfigError(where, "profile needs a positive weight");
  return Dist::normalized(values);
}

Polarity parse_polarity(const std::string& s, const std::string& where) {
  if (s == "supports") return Polarity::Supports;
  if (s == "attacks") return Polarity::Attacks;
  throw ConfigError(where, "polarity must be 'supports' or 'attacks'");
}

MacEmftMap parse_map(const json* v) {
  if (!v) return default_mac_emft_map();
  if (!v->is_array()) throw ConfigError("mac_emft_map", "expected 8 rows of 7 numbers");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < v->size(); ++r) {
    const auto& row = (*v)[r];
    if (!row.is_array()) throw ConfigError(at("mac_emft_map", r), "expected a row of 7 numbers");
    std::vector<double> values;
    for (std::size_t c = 0; c < row.size(); ++c)
      values.push_back(Obj::as_number(row[c], at(at("mac_emft_map", r), c), 0.0, kInf));
    rows.push_back(std::move(values));
  }
  try {
    return MacEmftMap::from_rows(rows);
  } catch (const ValidationError& e) {
    throw ConfigError("mac_emft_map", e.what());
  }
}

std::shared_ptr<const World> parse_world(const json& root) {
  std::vector<std::string> domains;
  for (std::size_t i = 0; i < array_of(root, "domains").size(); ++i) {
    const auto& d = array_of(root, "domains")[i];
    if (!d.is_string()) throw ConfigError(at("domains", i), "expected a string");
    domains.push_back(d.get<std::string>());
  }

  std::vector<Claim> claims;
  const auto& jc = array_of(root, "claims");
  for (std::size_t i = 0; i < jc.size(); ++i) {
    Obj o(jc[i], at("claims", i));
    Claim c;
    c.id = o.required_string("id");
    c.text_tag = o.string("text_tag", c.id);
    c.domain = o.required_string("domain");
    c.framing = parse_framing(o.get("framing"), o.key("framing"));
    c.violation = o.number("violation", 0.0, 0.0, 1.0);
    o.done();
    claims.push_back(std::move(c));
  }

  std::vector<TruthMakerFact> facts;
  const auto& jf = array_of(root, "facts");
  for (std::size_t i = 0; i < jf.size(); ++i) {
    Obj o(jf[i], at("facts", i));
    TruthMakerFact f;
    f.claim_id = o.required_string("claim");
    const json& t = o.need("truth");
    if (!t.is_boolean()) throw ConfigError(o.key("truth"), "expected true or false");
    f.truth_value = t.get<bool>();
    f.proxy_fidelity = o.number("proxy_fidelity", 1.0, 0.0, 1.0);
    o.done();
    facts.push_back(std::move(f));
  }

  std::vector<Source> sources;
  const auto& js = array_of(root, "sources");
  for (std::size_t i = 0; i < js.size(); ++i) {
    Obj o(js[i], at("sources", i));
    Source s;
    s.id = o.required_string("id");
    if (const json* comp = o.get("competence")) {
      if (!comp->is_object()) throw ConfigError(o.key("competence"), "expected an object");
      for (auto it = comp->begin(); it != comp->end(); ++it)
        s.competence[it.key()] = Obj::as_number(*it, o.key("competence") + "." + it.key(), 0.0, 1.0);
    }
    s.group_tag = o.string("group_tag", "");
    s.prestige = o.number("prestige", 0.0, 0.0, 1.0);
    s.follower_count = o.count("followers", 0);
    s.honesty = o.number("honesty", 1.0, 0.0, 1.0);
    s.hypocrisy_flag = o.boolean("hypocrite", false);
    o.done();
    sources.push_back(std::move(s));
  }

  std::vector<EvidenceItem> evidence;
  const auto& je = array_of(root, "evidence");
  for (std::size_t i = 0; i < je.size(); ++i) {
    Obj o(je[i], at("evidence", i));
    EvidenceItem e;
    e.id = o.required_string("id");
    e.author = o.required_string("author");
    e.target = o.required_string("target");
    e.polarity = parse_polarity(o.string("polarity", "supports"), o.key("polarity"));
    e.strength = o.number("strength", 1.0, 0.0, 1.0);
    e.vividness = o.number("vividness", 0.0, 0.0, 1.0);
    e.recency = static_cast<std::int64_t>(o.count("recency", 0));
    e.framing = parse_framing(o.get("framing"), o.key("framing"));
    e.veracity = o.boolean("veracity", true);
    e.kind = o.string("kind", "general");
    e.coercive = o.boolean("coercive", false);
    o.done();
    evidence.push_back(std::move(e));
  }

  try {
    return std::make_shared<const World>(std::move(domains), std::move(claims), std::move(facts), std::move(sources),
                                         std::move(evidence));
  } catch (const ValidationError& e) {
    throw ConfigError("world", e.what());
  }
}

void parse_policy(const json* v, const std::string& where, TrustPolicy& p) {
  if (!v) return;
  Obj o(*v, where);
  p.source_reliability_threshold = o.number("source_reliability_threshold", p.source_reliability_threshold, 0.0, 1.0);
  p.acceptance_threshold = o.number("acceptance_threshold", p.acceptance_threshold, 0.0, 1.0);
  p.attack_weight_multiplier = o.number("attack_weight_multiplier", p.attack_weight_multiplier, 0.0, kInf);
  p.out_group_rejection = o.boolean("out_group_rejection", p.out_group_rejection);
  if (const json* es = o.get("evidence_standard")) {
    if (!es->is_object()) throw ConfigError(o.key("evidence_standard"), "expected an object");
    for (auto it = es->begin(); it != es->end(); ++it)
      p.evidence_standard[it.key()] = Obj::as_number(*it, o.key("evidence_standard") + "." + it.key(), 0.0, kInf);
  }
  o.done();
}

void parse_virtues(const json* v, const std::string& where, VirtueProfile& x) {
  if (!v) return;
  Obj o(*v, where);
  x.humility = o.number("humility", x.humility, 0, 1);
  x.courage = o.number("courage", x.courage, 0, 1);
  x.openness = o.number("openness", x.openness, 0, 1);
  x.attentiveness = o.number("attentiveness", x.attentiveness, 0, 1);
  x.perseverance = o.number("perseverance", x.perseverance, 0, 1);
  o.done();
}

void parse_biases(const json* v, const std::string& where, BiasConfig& b) {
  if (!v) return;
  Obj o(*v, where);
  b.overconfidence = o.number("overconfidence", b.overconfidence, 0, 1);
  b.confirmation = o.number("confirmation", b.confirmation, 0, 1);
  b.availability = o.number("availability", b.availability, 0, 1);
  b.anchoring = o.number("anchoring", b.anchoring, 0, 1);
  b.bandwagon = o.number("bandwagon", b.bandwagon, 0, 1);
  b.attribution_asymmetry = o.number("attribution_asymmetry", b.attribution_asymmetry, 0, 1);
  b.reactance = o.number("reactance", b.reactance, 0, 1);
  b.halo = o.number("halo", b.halo, 0, 1);
  b.false_consensus = o.number("false_consensus", b.false_consensus, 0, 1);
  o.done();
}

CohortSpec parse_cohort(const json& v, const std::string& where, bool explicit_agent, const World& world,
                        const MacEmftMap& map) {
  Obj o(v, where);
  CohortSpec c;
  c.explicit_agent = explicit_agent;
  Agent& a = c.prototype;
  if (explicit_agent) {
    c.name = o.required_string("id");
  } else {
    c.name = o.required_string("name");
    c.count = o.count("count", 1);
    if (c.count == 0) throw ConfigError(o.key("count"), "cohort count must be positive");
  }
  a.id = c.name;

  bool have_mac = false, have_emft = false;
  const std::string tmpl = o.string("template", "");
  if (!tmpl.empty()) {
    try {
      const auto& t = find_template(tmpl);
      a.mac = t.mac;
      a.emft = t.emft;
      have_mac = have_emft = true;
    } catch (const LookupError& e) {
      throw ConfigError(o.key("template"), e.what());
    }
  }
  if (const json* m = o.get("mac")) {
    a.mac = parse_distribution<MacProfile, MacDomain, kMacDomainCount>(*m, o.key("mac"));
    have_mac = true;
  }
  if (const json* e = o.get("emft")) {
    a.emft = parse_distribution<EmftProfile, Foundation, kFoundationCount>(*e, o.key("emft"));
    have_emft = true;
  }
  if (!have_emft) a.emft = mac_to_emft(a.mac, map);
  (void)have_mac;

  a.group_tag = o.string("group_tag", "");
  parse_virtues(o.get("virtues"), o.key("virtues"), a.virtues);
  parse_biases(o.get("biases"), o.key("biases"), a.biases);
  parse_policy(o.get("policy"), o.key("policy"), a.policy);

  if (const json* b = o.get("budget")) {
    Obj bo(*b, o.key("budget"));
    a.budget.max_nodes = bo.count("max_nodes", a.budget.max_nodes);
    a.budget.max_depth = bo.count("max_depth", a.budget.max_depth);
    bo.done();
    if (a.budget.max_nodes == 0) throw ConfigError(o.key("budget.max_nodes"), "must be positive");
  }
  if (const json* r = o.get("revision")) {
    Obj ro(*r, o.key("revision"));
    a.revision.belief_flip_cost = static_cast<std::int64_t>(ro.count("belief_flip_cost", a.revision.belief_flip_cost));
    a.revision.stickiness_threshold =
        static_cast<std::int64_t>(ro.count("stickiness_threshold", a.revision.stickiness_threshold));
    a.revision.archive_enabled = ro.boolean("archive", a.revision.archive_enabled);
    a.revision.max_nodes = ro.count("max_nodes", a.revision.max_nodes);
    ro.done();
  }
  if (const json* cg = o.get("cognition")) {
    Obj co(*cg, o.key("cognition"));
    auto& k = a.cognition;
    k.competence_threshold = co.number("competence_threshold", k.competence_threshold, 0, 1);
    k.alarm_threshold = co.number("alarm_threshold", k.alarm_threshold, 0, 1);
    k.anchoring_multiplier = co.number("anchoring_multiplier", k.anchoring_multiplier, 0, kInf);
    k.recency_scale = co.number("recency_scale", k.recency_scale, 1e-9, kInf);
    k.sample_k = co.count("sample_k", k.sample_k);
    k.memory_capacity = co.count("memory_capacity", k.memory_capacity);
    co.done();
    if (k.sample_k == 0) throw ConfigError(o.key("cognition.sample_k"), "must be positive");
    if (k.memory_capacity == 0) throw ConfigError(o.key("cognition.memory_capacity"), "must be positive");
  }

  for (const auto& d : world.domains()) a.competence[d] = 0.5;
  if (const json* comp = o.get("competence")) {
    const std::string ck = o.key("competence");
    if (comp->is_number()) {
      const double value = Obj::as_number(*comp, ck, 0.0, 1.0);
      for (auto& [d, x] : a.competence) x = value;
    } else {
      if (!comp->is_object()) throw ConfigError(ck, "expected a number or an object");
      for (auto it = comp->begin(); it != comp->end(); ++it) {
        if (!world.has_domain(it.key())) throw ConfigError(ck + "." + it.key(), "unknown domain");
        a.competence[it.key()] = Obj::as_number(*it, ck + "." + it.key(), 0.0, 1.0);
      }
    }
  }

  for (const auto& s : o.strings("beliefs")) {
    if (!world.is_statement(s)) throw ConfigError(o.key("beliefs"), "unknown statement '" + s + "'");
    a.beliefs.insert(s);
  }
  for (const auto& s : o.strings("pre_trusted")) {
    if (!world.is_statement(s)) throw ConfigError(o.key("pre_trusted"), "unknown statement '" + s + "'");
    a.pre_trusted.insert(s);
  }
  for (const auto& s : o.strings("accepted_authorities")) {
    if (!world.find_source(s)) throw ConfigError(o.key("accepted_authorities"), "unknown source '" + s + "'");
    a.accepted_authorities.insert(s);
  }
  if (const json* iv = o.get("interventions")) {
    Obj io(*iv, o.key("interventions"));
    a.interventions.stop_loss = io.boolean("stop_loss", false);
    a.interventions.adversarial_deference = io.boolean("adversarial_deference", false);
    io.done();
  }
  if (const json* n = o.get("noise")) {
    Obj no(*n, o.key("noise"));
    c.competence_noise = no.number("competence", 0.0, 0.0, 1.0);
    c.source_noise = no.number("source_perception", 0.0, 0.0, 1.0);
    no.done();
  }
  o.done();
  return c;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::uint64_t config_hash(const nlohmann::json& config) { return hash_string(config.dump()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Scenario parse_scenario(const nlohmann::json& config) {
  Obj root(config, "");
  Scenario s;
  s.config = config;
  s.config_hash = config_hash(config);

  if (const json* seed = root.get("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  for (const char* k : {"domains", "claims", "facts", "sources", "evidence"}) root.get(k);
  s.world = parse_world(config);
  if (s.world->claims().empty()) throw ConfigError("claims", "scenario needs at least one claim");
  const MacEmftMap map = parse_map(root.get("mac_emft_map"));

  const auto& cohorts = array_of(config, "cohorts");
  root.get("cohorts");
  for (std::size_t i = 0; i < cohorts.size(); ++i)
    s.cohorts.push_back(parse_cohort(cohorts[i], at("cohorts", i), false, *s.world, map));
  const auto& agents = array_of(config, "agents");
  root.get("agents");
  for (std::size_t i = 0; i < agents.size(); ++i)
    s.cohorts.push_back(parse_cohort(agents[i], at("agents", i), true, *s.world, map));
  if (s.cohorts.empty()) throw ConfigError("cohorts", "scenario needs at least one cohort or agent");
  std::set<std::string> names;
  for (const auto& c : s.cohorts)
    if (!names.insert(c.name).second) throw ConfigError("cohorts", "duplicate cohort or agent name '" + c.name + "'");

  if (const json* n = root.get("network")) {
    Obj o(*n, "network");
    s.network.topology = o.string("topology", s.network.topology);
    s.network.weight = o.number("weight", s.network.weight, 0, 1);
    s.network.k = o.count("k", s.network.k);
    s.network.p = o.number("p", s.network.p, 0, 1);
    s.network.p_in = o.number("p_in", s.network.p_in, 0, 1);
    s.network.p_out = o.number("p_out", s.network.p_out, 0, 1);
    o.done();
    const std::set<std::string> known = {"complete", "ring", "erdos_renyi", "stochastic_block", "none"};
    if (!known.contains(s.network.topology)) throw ConfigError("network.topology", "unknown topology '" + s.network.topology + "'");
  }

  if (const json* st = root.get("stream")) {
    Obj o(*st, "stream");
    auto& c = s.stream;
    c.length = o.count("length", c.length);
    c.misinformation_rate = o.number("misinformation_rate", c.misinformation_rate, 0, 1);
    c.strength_min = o.number("strength_min", c.strength_min, 0, 1);
    c.strength_max = o.number("strength_max", c.strength_max, 0, 1);
    c.vividness_min = o.number("vividness_min", c.vividness_min, 0, 1);
    c.vividness_max = o.number("vividness_max", c.vividness_max, 0, 1);
    c.misinformation_vividness_boost = o.number("misinformation_vividness_boost", c.misinformation_vividness_boost, 0, 1);
    c.claim_target_share = o.number("claim_target_share", c.claim_target_share, 0, 1);
    c.coercive_rate = o.number("coercive_rate", c.coercive_rate, 0, 1);
    c.kind = o.string("kind", c.kind);
    o.done();
    try {
      c.validate();
    } catch (const ValidationError& e) {
      throw ConfigError("stream", e.what());
    }
  }

  if (const json* sim = root.get("simulation")) {
    Obj o(*sim, "simulation");
    auto& c = s.simulation;
    c.steps = o.count("steps", c.steps);
    c.items_per_step = o.count("items_per_step", c.items_per_step);
    c.reach = o.number("reach", c.reach, 0, 1);
    c.base_attention = o.number("base_attention", c.base_attention, 0, 1);
    c.homophily_rate = o.number("homophily_rate", c.homophily_rate, 0, 1);
    c.tribes.lambda = o.number("lambda", c.tribes.lambda, 0, 1);
    c.tribes.tau = o.number("tau", c.tribes.tau, 0, kInf);
    o.done();
    if (c.steps == 0) throw ConfigError("simulation.steps", "must be at least 1");
  }

  if (const json* out = root.get("outputs")) {
    Obj o(*out, "outputs");
    s.outputs.metrics = o.string("metrics", s.outputs.metrics);
    s.outputs.summary = o.string("summary", s.outputs.summary);
    s.outputs.lattices = o.boolean("lattices", s.outputs.lattices);
    o.done();
    for (const auto* name : {&s.outputs.metrics, &s.outputs.summary})
      if (name->empty() || name->find('/') != std::string::npos || *name == "." || *name == "..")
        throw ConfigError("outputs", "output names must be plain file names");
  }

  root.done();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scenario '" + path.string() + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(config);
}

std::vector<Agent> build_population(const Scenario& scenario, std::uint64_t seed) {
  std::vector<Agent> out;
  std::vector<std::string> source_ids;
  for (const auto& s : scenario.world->sources()) source_ids.push_back(s.id);
  std::sort(source_ids.begin(), source_ids.end());

  for (std::size_t c = 0; c < scenario.cohorts.size(); ++c) {
    const CohortSpec& spec = scenario.cohorts[c];
    for (std::size_t i = 0; i < spec.count; ++i) {
      Agent a = spec.prototype;
      a.id = spec.explicit_agent ? spec.name : spec.name + "_" + std::to_string(i);
      Rng rng(derive_seed(seed, {0xA6E7ULL, c, i}));
      if (spec.competence_noise > 0.0)
        for (auto& [d, v] : a.competence) v = std::clamp(v + rng.normal(0.0, spec.competence_noise), 0.0, 1.0);
      if (spec.source_noise > 0.0)
        for (const auto& id : source_ids) a.source_noise[id] = rng.normal(0.0, spec.source_noise);
      out.push_back(std::move(a));
    }
  }
  return out;
}

Network build_network(const Scenario& scenario, std::size_t n, std::uint64_t seed) {
  const auto& spec = scenario.network;
  const std::uint64_t net_seed = derive_seed(seed, {0x4E57ULL});
  if (spec.topology == "complete") return Network::complete(n, spec.weight);
  if (spec.topology == "ring") return Network::ring(n, spec.k, spec.weight);
  if (spec.topology == "erdos_renyi") return Network::erdos_renyi(n, spec.p, spec.weight, net_seed);
  if (spec.topology == "stochastic_block") {
    std::vector<std::size_t> blocks;
    for (const auto& c : scenario.cohorts) blocks.push_back(c.count);
    return Network::stochastic_block(blocks, spec.p_in, spec.p_out, spec.weight, net_seed);
  }
  return Network(n);
}

Scenario interventions_off(const Scenario& scenario) {
  Scenario out = scenario;
  for (auto& c : out.cohorts) c.prototype.interventions = Interventions{};
  return out;
}

Scenario interventions_on(const Scenario& scenario) {
  Scenario out = scenario;
  for (auto& c : out.cohorts) c.prototype.interventions = Interventions{true, true};
  return out;
}

Scenario echo_chamber_off(const Scenario& scenario) {
  Scenario out = scenario;
  for (auto& c : out.cohorts) {
    c.prototype.biases = BiasConfig{};
    c.prototype.policy.out_group_rejection = false;
  }
  out.simulation.homophily_rate = 0.0;
  return out;
}

RunResult run_scenario(const Scenario& scenario, std::uint64_t seed) {
  RunResult r;
  r.seed = seed;
  r.config_hash = scenario.config_hash;
  r.population = build_population(scenario, seed);
  r.network = build_network(scenario, r.population.size(), seed);
  r.stream = generate_evidence_stream(*scenario.world, scenario.stream, derive_seed(seed, {0x5354ULL}));
  SimulationConfig sim = scenario.simulation;
  sim.seed = derive_seed(seed, {0x5349ULL});
  r.history = propagate(r.population, r.network, *scenario.world, r.stream, sim);
  return r;
}

double label_accuracy(const RunResult& result, const World& world) {
  std::size_t correct = 0, total = 0;
  for (const auto& a : result.population)
    for (const auto& c : world.claims()) {
      const Label l = claim_label(a, c.id);
      const bool truth = ground_truth(world, c.id);
      correct += (truth && l == Label::Accepted) || (!truth && l == Label::Rejected) ? 1 : 0;
      ++total;
    }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

std::string metrics_csv(const RunResult& result) {
  std::ostringstream os;
  os << "step,tribe_count,within_agreement,cross_agreement,polarization_index,rejected_correction_rate,"
        "stop_loss_events,deference_events\n";
  for (const auto& s : result.history.steps) {
    os << s.step << ',' << s.metrics.tribe_count << ',' << format_double(s.metrics.within_agreement) << ','
       << format_double(s.metrics.cross_agreement) << ',' << format_double(s.metrics.polarization_index) << ','
       << format_double(s.metrics.rejected_correction_rate) << ',' << s.stop_loss_events << ',' << s.deference_events
       << '\n';
  }
  return os.str();
}

nlohmann::ordered_json run_summary(const RunResult& result, const Scenario& scenario) {
  nlohmann::ordered_json j;
  const auto& last = result.history.steps.back();
  j["config_hash"] = hex64(result.config_hash);
  j["seed"] = result.seed;
  j["agents"] = result.population.size();
  j["steps"] = last.step;
  j["final"] = {{"tribe_count", last.metrics.tribe_count},
                {"within_agreement", last.metrics.within_agreement},
                {"cross_agreement", last.metrics.cross_agreement},
                {"polarization_index", last.metrics.polarization_index},
                {"rejected_correction_rate", last.metrics.rejected_correction_rate}};
  j["events"] = {{"stop_loss", last.stop_loss_events}, {"deference", last.deference_events}};
  nlohmann::ordered_json corr = nlohmann::ordered_json::object();
  for (const auto& [cls, t] : result.history.corrections)
    corr[std::string(to_string(cls))] = {{"attempted", t.attempted}, {"rejected", t.rejected}, {"rate", t.rate()}};
  j["corrections"] = corr;
  j["accuracy"] = label_accuracy(result, *scenario.world);

  std::vector<std::string> claims;
  for (const auto& c : scenario.world->claims()) claims.push_back(c.id);
  std::sort(claims.begin(), claims.end());
  auto tribes = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < last.tribes.tribe_count; ++t) {
    std::vector<const Agent*> members;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < result.population.size(); ++i)
      if (last.tribes.tribe_of[i] == t) {
        members.push_back(&result.population[i]);
        ids.push_back(result.population[i].id);
      }
    tribes.push_back({{"id", t},
                      {"size", members.size()},
                      {"fitness", tribe_fitness(members, *scenario.world, claims, 0.5)},
                      {"members", ids}});
  }
  j["tribes"] = tribes;
  nlohmann::ordered_json assignment = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < result.population.size(); ++i)
    assignment[result.population[i].id] = last.tribes.tribe_of[i];
  j["assignment"] = assignment;
  return j;
}

nlohmann::ordered_json lattice_json(const Agent& agent) {
  nlohmann::ordered_json j;
  j["agent"] = agent.id;
  nlohmann::ordered_json claims = nlohmann::ordered_json::object();
  for (const auto& [claim, view] : agent.views) {
    nlohmann::ordered_json v;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& n : view.lattice.nodes()) {
      nlohmann::ordered_json nj;
      nj["id"] = n.id;
      nj["kind"] = n.kind == NodeKind::Claim ? "claim" : n.kind == NodeKind::Evidence ? "evidence" : "intuition";
      if (n.anchor) {
        nj["anchor"] = std::string(to_string(n.anchor->kind));
        if (n.anchor->authority) nj["authority"] = n.anchor->authority->source_id;
      }
      const auto& label = view.labels.at(n.id);
      nj["label"] = std::string(to_string(label.label));
      nj["score"] = label.score;
      nodes.push_back(std::move(nj));
    }
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : view.lattice.edges())
      edges.push_back({{"from", view.lattice.node(e.from).id},
                       {"to", view.lattice.node(e.to).id},
                       {"polarity", std::string(to_string(e.polarity))},
                       {"weight", e.weight}});
    v["nodes"] = nodes;
    v["edges"] = edges;
    claims[claim] = v;
  }
  j["claims"] = claims;
  j["archive_depth"] = agent.archive.size();
  return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_outputs(const RunResult& result, const Scenario& scenario, const std::filesystem::path& out_dir,
                   bool dump_lattices) {
  std::filesystem::create_directories(out_dir);
  write_atomic(out_dir / scenario.outputs.metrics, metrics_csv(result));
  write_atomic(out_dir / scenario.outputs.summary, run_summary(result, scenario).dump(2) + "\n");
  if (dump_lattices || scenario.outputs.lattices) {
    const auto dir = out_dir / "lattices";
    std::filesystem::create_directories(dir);
    for (const auto& a : result.population) write_atomic(dir / (a.id + ".json"), lattice_json(a).dump(2) + "\n");
  }
}

}  // namespace mevir
