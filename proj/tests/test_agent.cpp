#include <doctest.h>

#include <array>

#include "helpers.hpp"
#include "mevir/agent.hpp"

using namespace mevir;

namespace {

Agent make_agent(double competence = 0.9) {
  Agent a;
  a.id = "a";
  a.group_tag = "in";
  a.competence["health"] = competence;
  return a;
}

std::vector<const Source*> ptrs(const std::vector<Source>& v) {
  std::vector<const Source*> out;
  for (const auto& s : v) out.push_back(&s);
  return out;
}

}  // namespace

TEST_CASE("choose_path examples") {
  const std::vector<Source> sources = {fixture::source("lab", 0.9), fixture::source("clinic", 0.6)};
  const auto cands = ptrs(sources);

  Agent a = make_agent(0.9);
  a.virtues.humility = 0.5;
  CHECK(choose_path(a, "health", cands, "c").kind == PathKind::Direct);

  Agent b = make_agent(0.1);
  b.virtues.humility = 0.8;
  const auto defer = choose_path(b, "health", cands, "c");
  CHECK(defer.kind == PathKind::Defer);
  CHECK(defer.source == "lab");

  b.biases.overconfidence = 1.0;
  CHECK(perceived_self_competence(b, "health") == 1.0);
  CHECK(choose_path(b, "health", cands, "c").kind == PathKind::Direct);

  CHECK_THROWS_AS(perceived_self_competence(b, "astronomy"), LookupError);
  // Nobody to defer to: evaluate directly.
  Agent c = make_agent(0.1);
  CHECK(choose_path(c, "health", {}, "c").kind == PathKind::Direct);
}

TEST_CASE("choose_path is monotone in humility and overconfidence") {
  const std::vector<Source> sources = {fixture::source("lab", 0.9)};
  const auto cands = ptrs(sources);
  for (int ci = 0; ci <= 10; ++ci) {
    Agent a = make_agent(ci / 10.0);
    bool deferred = false;
    for (int h = 0; h <= 20; ++h) {
      a.virtues.humility = h / 20.0;
      const bool d = choose_path(a, "health", cands, "c").kind == PathKind::Defer;
      CHECK_FALSE((deferred && !d));
      deferred = deferred || d;
    }
    a.virtues.humility = 0.5;
    bool direct = false;
    for (int o = 0; o <= 20; ++o) {
      a.biases.overconfidence = o / 20.0;
      const bool d = choose_path(a, "health", cands, "c").kind == PathKind::Direct;
      CHECK_FALSE((direct && !d));
      direct = direct || d;
    }
  }
}

TEST_CASE("select_authority examples") {
  Agent a = make_agent();
  std::vector<Source> sources = {fixture::source("expert", 0.9), fixture::source("ally", 0.2),
                                 fixture::source("celebrity", 0.0)};
  sources[2].prestige = 1.0;
  sources[2].competence["film"] = 0.95;
  const auto cands = ptrs(sources);

  CHECK(select_authority(a, cands, "health", 0.0).id == "expert");

  // The agent leans against the claim; the ally speaks against it too.
  const std::map<std::string, Polarity> stance = {{"expert", Polarity::Supports}, {"ally", Polarity::Attacks}};
  a.biases.confirmation = 1.0;
  CHECK(select_authority(a, cands, "health", -0.8, stance).id == "ally");

  a.biases.confirmation = 0.0;
  a.biases.halo = 1.0;
  CHECK(select_authority(a, cands, "health", 0.0).id == "celebrity");

  CHECK_THROWS_AS(select_authority(a, {}, "health", 0.0), ValidationError);
}

TEST_CASE("select_authority ignores hypocrites and, under rejection, the out-group") {
  Agent a = make_agent();
  std::vector<Source> sources = {fixture::source("rival", 0.95, "out"), fixture::source("hypocrite", 0.99, "in"),
                                 fixture::source("friend", 0.5, "in")};
  sources[1].hypocrisy_flag = true;
  const auto cands = ptrs(sources);
  CHECK(select_authority(a, cands, "health", 0.0).id == "rival");
  a.policy.out_group_rejection = true;
  CHECK(select_authority(a, cands, "health", 0.0).id == "friend");
  CHECK(select_authority(a, cands, "health", 0.0, {}, {"rival"}).id == "rival");
}

TEST_CASE("confirmation bias never lowers the chosen source's agreement") {
  Agent a = make_agent();
  std::vector<Source> sources = {fixture::source("s1", 0.9), fixture::source("s2", 0.7), fixture::source("s3", 0.4),
                                 fixture::source("s4", 0.2)};
  const std::map<std::string, Polarity> stance = {
      {"s1", Polarity::Supports}, {"s2", Polarity::Attacks}, {"s3", Polarity::Supports}, {"s4", Polarity::Attacks}};
  const auto cands = ptrs(sources);
  for (double prior : {-0.9, -0.3, 0.4, 1.0}) {
    double last = -1.0;
    for (int b = 0; b <= 20; ++b) {
      a.biases.confirmation = b / 20.0;
      const Source& s = select_authority(a, cands, "health", prior, stance);
      const double agreement = (1.0 + prior * sign_of(stance.at(s.id))) / 2.0;
      CHECK(agreement >= last);
      last = agreement;
    }
  }
}

TEST_CASE("sampling weights") {
  Agent a = make_agent();
  EvidenceItem vivid = fixture::item("v", "lab", "c1", Polarity::Supports);
  vivid.vividness = 0.8;
  vivid.recency = 5;
  EvidenceItem dull = vivid;
  dull.vividness = 0.1;

  CHECK(sampling_weight(a, vivid, false) == 1.0);
  CHECK(sampling_weight(a, dull, true) == 1.0);
  a.biases.availability = 1.0;
  CHECK(sampling_weight(a, vivid, false) == doctest::Approx(0.8 * std::exp(-0.5)));
  CHECK(sampling_weight(a, vivid, false) / sampling_weight(a, dull, false) == doctest::Approx(8.0));
  a.biases.availability = 0.0;
  a.biases.anchoring = 1.0;
  CHECK(sampling_weight(a, dull, true) > sampling_weight(a, dull, false));

  CHECK(effective_sample_size(a, 8) == 8);
  a.virtues.attentiveness = 0.0;
  CHECK(effective_sample_size(a, 8) == 2);
  CHECK(effective_sample_size(a, 1) == 1);
  CHECK_THROWS_AS(effective_sample_size(a, 0), ValidationError);
}

TEST_CASE("sample_evidence: flat weights are uniform, anchoring favours the first item") {
  std::vector<EvidenceItem> items;
  for (int i = 0; i < 5; ++i) items.push_back(fixture::item("e" + std::to_string(i), "lab", "c1", Polarity::Supports));
  std::vector<const EvidenceItem*> view;
  for (const auto& e : items) view.push_back(&e);

  const auto inclusion = [&](const Agent& a) {
    std::array<int, 5> counts{};
    Rng rng(99);
    for (int t = 0; t < 4000; ++t)
      for (const auto* e : sample_evidence(a, view, 2, rng)) ++counts[e->id[1] - '0'];
    return counts;
  };

  Agent flat = make_agent();
  const auto uniform = inclusion(flat);
  for (int c : uniform) CHECK(c == doctest::Approx(1600).epsilon(0.08));  // 2/5 of 4000

  Agent anchored = make_agent();
  anchored.biases.anchoring = 1.0;
  const auto biased = inclusion(anchored);
  for (int i = 1; i < 5; ++i) CHECK(biased[0] > biased[i]);

  Rng rng(1);
  const auto all = sample_evidence(flat, view, 10, rng);
  REQUIRE(all.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(all[i] == view[i]);  // original order kept
}

TEST_CASE("reactance decision table") {
  Rng rng(3);
  EvidenceItem mandate = fixture::item("m", "agency", "c1", Polarity::Supports);
  mandate.coercive = true;
  EvidenceItem peer = fixture::item("p", "agency", "c1", Polarity::Supports);

  Agent calm = make_agent();
  CHECK(reactance_filter(calm, mandate, rng).polarity == Polarity::Supports);

  Agent rebel = make_agent();
  rebel.biases.reactance = 1.0;
  const auto flipped = reactance_filter(rebel, mandate, rng);
  CHECK(flipped.polarity == Polarity::Attacks);
  CHECK(flipped.reactance_inverted);
  CHECK(reactance_filter(rebel, peer, rng).polarity == Polarity::Supports);
  rebel.accepted_authorities.insert("agency");
  CHECK(reactance_filter(rebel, mandate, rng).polarity == Polarity::Supports);
}

TEST_CASE("attribution asymmetry") {
  Rng rng(5);
  Agent a = make_agent();
  a.biases.attribution_asymmetry = 1.0;
  CHECK(attribute_behavior(a, "in", Valence::Negative, rng) == Attribution::Situational);
  CHECK(attribute_behavior(a, "out", Valence::Negative, rng) == Attribution::Dispositional);
  CHECK(attribute_behavior(a, "in", Valence::Positive, rng) == Attribution::Dispositional);
  CHECK(attribute_behavior(a, "out", Valence::Positive, rng) == Attribution::Situational);

  a.biases.attribution_asymmetry = 0.0;
  for (auto v : {Valence::Negative, Valence::Positive})
    CHECK(attribute_behavior(a, "in", v, rng) == attribute_behavior(a, "out", v, rng));
}

TEST_CASE("moral stop-loss rule table") {
  Agent a = make_agent();
  a.interventions.stop_loss = true;
  CHECK(moral_stop_loss(a, 0.9, 0.9) == 0.0);
  CHECK(a.stop_loss_events == 1);
  CHECK(moral_stop_loss(a, 0.3, 0.3) == 0.3);
  CHECK(a.stop_loss_events == 1);
  a.interventions.stop_loss = false;
  CHECK(moral_stop_loss(a, 0.9, 0.9) == 0.9);
  CHECK(a.stop_loss_events == 1);
  CHECK_THROWS_AS(stop_loss_value(a, 1.5, 0.2), ValidationError);
}

TEST_CASE("adversarial deference") {
  std::vector<Source> rivals = {fixture::source("r1", 0.4, "out"), fixture::source("r2", 0.8, "out")};
  const auto cands = ptrs(rivals);
  Agent a = make_agent();
  const std::set<std::string> consulted = {"lab"};

  CHECK(adversarial_deference(a, cands, consulted, "health") == consulted);
  a.interventions.adversarial_deference = true;
  std::set<std::string> bypass;
  CHECK(adversarial_deference(a, cands, consulted, "health", &bypass) == std::set<std::string>{"lab", "r2"});
  CHECK(bypass == std::set<std::string>{"r2"});
  CHECK(a.deference_events == 1);
  CHECK(adversarial_deference(a, {}, consulted, "health") == consulted);
  CHECK(adversarial_deference(a, cands, {"lab", "r1"}, "health") == std::set<std::string>{"lab", "r1"});
  CHECK(a.deference_events == 1);
}

TEST_CASE("form_belief: competent unbiased agent tracks the truth") {
  const World w = fixture::three_claims();
  for (const auto& claim : w.claims()) {
    Agent a = make_agent();
    a.accepted_authorities = {"lab", "clinic"};
    const auto r = form_belief(a, w, claim.id, {}, 17);
    CHECK(r.path.kind == PathKind::Direct);
    const Label want = w.fact(claim.id).truth_value ? Label::Accepted : Label::Rejected;
    CHECK(r.label.label == want);
    CHECK(a.views.contains(claim.id));
    CHECK(a.beliefs.contains(claim.id) == (want == Label::Accepted));
  }
}

TEST_CASE("form_belief: a believed claim short-circuits") {
  const World w = fixture::three_claims();
  Agent a = make_agent();
  a.beliefs.insert("c2");
  const auto r = form_belief(a, w, "c2", {}, 1);
  CHECK(r.label.label == Label::Accepted);
  CHECK(r.lattice.size() == 1);
  CHECK(r.lattice.root().anchor->kind == AnchorKind::Belief);
}

TEST_CASE("form_belief: strong alarm overrides evidence unless stop-loss is on") {
  std::vector<Claim> claims = {{"c", "c", "health", fixture::framing({{Foundation::Purity, 1.0}}), 0.9}};
  std::vector<Source> sources = {fixture::source("lab", 0.9)};
  std::vector<EvidenceItem> evidence = {fixture::item("e", "lab", "c", Polarity::Supports, 0.9)};
  const World w({"health"}, claims, {{"c", true, 1.0}}, sources, evidence);

  Agent a = make_agent();
  a.emft = EmftProfile::pure(Foundation::Purity);
  a.accepted_authorities = {"lab"};
  const auto r = form_belief(a, w, "c", {}, 4);
  CHECK(r.alarm == doctest::Approx(0.9));
  CHECK(r.lattice.find(intuition_node_id("c")));
  CHECK(r.label.label == Label::Rejected);

  Agent b = a;
  b.beliefs.clear();
  b.views.clear();
  b.interventions.stop_loss = true;
  const auto s = form_belief(b, w, "c", {}, 4);
  CHECK(s.stop_loss_fired);
  CHECK_FALSE(s.lattice.find(intuition_node_id("c")));
  CHECK(s.label.label == Label::Accepted);
}

TEST_CASE("form_belief: an incompetent agent defers") {
  const World w = fixture::three_claims();
  Agent a = make_agent(0.1);
  a.virtues.humility = 0.9;
  const auto r = form_belief(a, w, "c1", {}, 2);
  CHECK(r.path.kind == PathKind::Defer);
  CHECK(r.path.source == "lab");
  CHECK(r.label.label == Label::Accepted);
}

TEST_CASE("memory stays bounded and evicts the least accessible item") {
  Agent a = make_agent();
  a.cognition.memory_capacity = 2;
  EvidenceItem x = fixture::item("x", "lab", "c1", Polarity::Supports);
  x.vividness = 0.9;
  EvidenceItem y = x, z = x;
  y.id = "y";
  y.vividness = 0.1;
  z.id = "z";
  z.vividness = 0.5;
  remember(a, x);
  remember(a, y);
  remember(a, x);
  CHECK(a.memory.size() == 2);
  remember(a, z);
  REQUIRE(a.memory.size() == 2);
  CHECK(a.memory[0].id == "x");
  CHECK(a.memory[1].id == "z");
  age_memory(a);
  CHECK(a.memory[0].recency == 1);
}

TEST_CASE("profile validation") {
  Agent a = make_agent();
  CHECK_NOTHROW(a.validate());
  a.biases.halo = 1.2;
  CHECK_THROWS_AS(a.validate(), ValidationError);
  a.biases.halo = 0.0;
  a.virtues.courage = -0.1;
  CHECK_THROWS_AS(a.validate(), ValidationError);
}
