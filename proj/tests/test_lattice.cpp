#include <doctest.h>

#include <deque>

#include "helpers.hpp"
#include "mevir/lattice.hpp"
#include "oracles.hpp"

using namespace mevir;

namespace {

LatticeNode claim(std::string id) { return {std::move(id), NodeKind::Claim, 1.0, std::nullopt, "general"}; }
LatticeNode anchored(std::string id, AnchorKind k, double base = 1.0) {
  return {std::move(id), NodeKind::Evidence, base, Anchor::of(k), "general"};
}

}  // namespace

TEST_CASE("lattice structure rejects cycles, duplicates and self-loops") {
  TrustLattice lat(claim("c"));
  const auto a = lat.add_node(anchored("a", AnchorKind::Belief));
  const auto b = lat.add_node(anchored("b", AnchorKind::Belief));
  lat.add_edge(a, 0, Polarity::Supports, 1.0);
  lat.add_edge(b, a, Polarity::Attacks, 0.5);
  CHECK_THROWS_AS(lat.add_edge(a, b, Polarity::Supports, 1.0), ValidationError);
  CHECK_THROWS_AS(lat.add_edge(a, 0, Polarity::Supports, 1.0), ValidationError);
  CHECK_THROWS_AS(lat.add_edge(a, a, Polarity::Supports, 1.0), ValidationError);
  CHECK_THROWS_AS(lat.add_edge(b, 0, Polarity::Supports, 1.5), ValidationError);
  CHECK_THROWS_AS(lat.add_node(anchored("a", AnchorKind::Belief)), ValidationError);
  CHECK_THROWS_AS(lat.add_edge(9, 0, Polarity::Supports, 1.0), LookupError);
  CHECK(lat.depth_of(b) == 2);
  CHECK(lat.is_leaf(b));
  CHECK_FALSE(lat.is_leaf(a));
  CHECK_NOTHROW(lat.validate());

  lat.add_node(claim("orphan"));
  CHECK_THROWS_AS(lat.validate(), ValidationError);
}

TEST_CASE("anchor kinds round-trip through their names") {
  for (auto k : {AnchorKind::PreTrusted, AnchorKind::Belief, AnchorKind::AcceptedAuthority,
                 AnchorKind::EvidenceExhaustion, AnchorKind::ResourceExhaustion})
    CHECK(parse_anchor_kind(to_string(k)) == k);
  CHECK_FALSE(parse_anchor_kind("dogma"));
}

TEST_CASE("evaluate: single belief support") {
  TrustLattice lat(claim("c"));
  lat.add_edge(lat.add_node(anchored("b", AnchorKind::Belief)), 0, Polarity::Supports, 1.0);
  TrustPolicy p;
  p.acceptance_threshold = 0.5;
  const auto labels = evaluate(lat, p);
  CHECK(labels.at("c").label == Label::Accepted);
  CHECK(labels.at("c").score == 1.0);
}

TEST_CASE("evaluate: support 0.6 against attack 0.9") {
  TrustLattice lat(claim("c"));
  lat.add_edge(lat.add_node(anchored("s", AnchorKind::Belief)), 0, Polarity::Supports, 0.6);
  lat.add_edge(lat.add_node(anchored("t", AnchorKind::Belief)), 0, Polarity::Attacks, 0.9);
  TrustPolicy p;
  p.acceptance_threshold = 0.5;
  const auto labels = evaluate(lat, p);
  CHECK(labels.at("c").score == doctest::Approx(-0.3));
  CHECK(labels.at("c").label == Label::Undecided);
}

TEST_CASE("evaluate: out-group authority is ignored under rejection") {
  TrustLattice lat(claim("c"));
  AuthorityRef ref{"rival", 0.9, true, false, false};
  lat.add_edge(lat.add_node({"e", NodeKind::Evidence, 1.0, Anchor::accepted_authority(ref), "general"}), 0,
               Polarity::Supports, 1.0);
  TrustPolicy p;
  CHECK(evaluate(lat, p).at("c").label == Label::Accepted);
  p.out_group_rejection = true;
  CHECK(evaluate(lat, p).at("c").score == 0.0);
  CHECK(evaluate(lat, p).at("c").label == Label::Undecided);

  // Adversarial deference lets the same source through.
  ref.bypass_out_group = true;
  lat.set_anchor(1, Anchor::accepted_authority(ref));
  CHECK(evaluate(lat, p).at("c").score == doctest::Approx(0.9));
}

TEST_CASE("anchor trust") {
  TrustPolicy p;
  CHECK(anchor_trust(Anchor::of(AnchorKind::PreTrusted), p) == 1.0);
  CHECK(anchor_trust(Anchor::of(AnchorKind::Belief), p) == 1.0);
  CHECK(anchor_trust(Anchor::of(AnchorKind::EvidenceExhaustion), p) == 0.0);
  CHECK(anchor_trust(Anchor::of(AnchorKind::ResourceExhaustion), p) == 0.0);
  CHECK(anchor_trust(Anchor::accepted_authority({"s", 0.7, false, false, false}), p) == 0.7);
  CHECK(anchor_trust(Anchor::accepted_authority({"s", 0.7, false, true, false}), p) == 0.0);
}

TEST_CASE("evaluate: evidence standards scale edges and the attack multiplier scales attacks") {
  TrustLattice lat(claim("c"));
  lat.add_edge(lat.add_node({"anec", NodeKind::Evidence, 1.0, Anchor::of(AnchorKind::Belief), "anecdote"}), 0,
               Polarity::Supports, 0.8);
  lat.add_edge(lat.add_node(anchored("t", AnchorKind::Belief)), 0, Polarity::Attacks, 0.2);
  TrustPolicy p;
  p.evidence_standard["anecdote"] = 0.5;
  p.attack_weight_multiplier = 2.0;
  CHECK(evaluate(lat, p).at("c").score == doctest::Approx(0.4 - 0.4));
}

TEST_CASE("evaluate agrees with the recursive oracle on random lattices") {
  for (std::uint64_t t = 0; t < 300; ++t) {
    const auto c = oracle::random_revision_case(t);
    const auto got = evaluate(c.lattice, c.policy);
    const auto want = oracle::scores(c.lattice, c.policy);
    for (const auto& [id, s] : want) {
      CHECK(got.at(id).score == s);
      CHECK(got.at(id).label == oracle::label_of(s, c.policy.acceptance_threshold));
    }
  }
}

TEST_CASE("scores stay in [-1, 1] and labels are order-independent") {
  TrustLattice a(claim("c")), b(claim("c"));
  for (int i = 0; i < 5; ++i) a.add_edge(a.add_node(anchored("s" + std::to_string(i), AnchorKind::Belief)), 0,
                                         Polarity::Supports, 1.0);
  for (int i = 4; i >= 0; --i) b.add_edge(b.add_node(anchored("s" + std::to_string(i), AnchorKind::Belief)), 0,
                                          Polarity::Supports, 1.0);
  CHECK(evaluate(a, {}).at("c").score == 1.0);
  CHECK(evaluate(a, {}) == evaluate(b, {}));
}

TEST_CASE("classify_anchor priority") {
  const World w = fixture::three_claims();
  std::set<std::string> beliefs{"e1", "e3"}, pre{"e1"}, accepted{"blog"};
  AnchorContext ctx;
  ctx.world = &w;
  ctx.beliefs = &beliefs;
  ctx.pre_trusted = &pre;
  ctx.accepted_authorities = &accepted;
  ctx.domain = "health";
  ctx.reliability_threshold = 0.95;
  const EvaluationBudget budget{4, 3};
  const BudgetState open{1, 1, true, budget};

  CHECK(classify_anchor("e1", &w.source("lab"), ctx, open)->kind == AnchorKind::PreTrusted);
  CHECK(classify_anchor("e3", &w.source("lab"), ctx, open)->kind == AnchorKind::Belief);
  const auto auth = classify_anchor("e9", &w.source("blog"), ctx, open);
  REQUIRE(auth);
  CHECK(auth->kind == AnchorKind::AcceptedAuthority);
  CHECK(auth->authority->source_id == "blog");
  CHECK(auth->authority->reliability == doctest::Approx(0.3));
  CHECK_FALSE(classify_anchor("e4", &w.source("clinic"), ctx, open));
  CHECK(classify_anchor("e4", &w.source("clinic"), ctx, {1, 1, false, budget})->kind ==
        AnchorKind::EvidenceExhaustion);
  CHECK(classify_anchor("e4", &w.source("clinic"), ctx, {4, 1, true, budget})->kind ==
        AnchorKind::ResourceExhaustion);
  CHECK(classify_anchor("e4", &w.source("clinic"), ctx, {1, 3, true, budget})->kind ==
        AnchorKind::ResourceExhaustion);

  ctx.reliability_threshold = 0.5;  // reliable enough without being on the list
  CHECK(classify_anchor("e4", &w.source("clinic"), ctx, open)->kind == AnchorKind::AcceptedAuthority);
}

TEST_CASE("elaborate: tiny budget and believed claim") {
  const World w = fixture::three_claims();
  std::set<std::string> beliefs;
  AnchorContext ctx;
  ctx.world = &w;
  ctx.beliefs = &beliefs;
  ctx.domain = "health";

  const auto root_only = elaborate(ctx, "c1", w.evidence(), {1, 4});
  CHECK(root_only.size() == 1);
  CHECK(root_only.root().anchor->kind == AnchorKind::ResourceExhaustion);

  beliefs.insert("c1");
  const auto believed = elaborate(ctx, "c1", w.evidence(), {16, 4});
  CHECK(believed.size() == 1);
  CHECK(believed.root().anchor->kind == AnchorKind::Belief);

  CHECK_THROWS_AS(elaborate(ctx, "nope", w.evidence(), {16, 4}), LookupError);
  CHECK_THROWS_AS(elaborate(ctx, "c1", w.evidence(), {0, 4}), ValidationError);
}

TEST_CASE("elaborate: leaves are the reachable evidence closure") {
  const World w = fixture::three_claims();
  AnchorContext ctx;
  ctx.world = &w;
  ctx.domain = "health";
  ctx.reliability_threshold = 0.95;  // nobody is trusted on sight, so elaboration goes all the way down

  const auto lat = elaborate(ctx, "c1", w.evidence(), {16, 4});
  CHECK_NOTHROW(lat.validate());
  CHECK(lat.depth_of(*lat.find("e2")) == 2);

  // Independent closure: walk target links downward from the claim.
  std::set<std::string> reachable, leaves;
  std::deque<std::string> frontier{"c1"};
  while (!frontier.empty()) {
    const std::string id = frontier.front();
    frontier.pop_front();
    bool has_child = false;
    for (const auto& e : w.evidence())
      if (e.target == id) {
        has_child = true;
        if (reachable.insert(e.id).second) frontier.push_back(e.id);
      }
    if (!has_child && id != "c1") leaves.insert(id);
  }
  std::set<std::string> got_nodes, got_leaves;
  for (std::size_t i = 1; i < lat.size(); ++i) {
    got_nodes.insert(lat.node(i).id);
    if (lat.is_leaf(i)) got_leaves.insert(lat.node(i).id);
  }
  CHECK(got_nodes == reachable);
  CHECK(got_leaves == leaves);
  CHECK(lat.node(*lat.find("e2")).anchor->kind == AnchorKind::EvidenceExhaustion);
}

TEST_CASE("elaborate: trusted authorities end the search early") {
  const World w = fixture::three_claims();
  AnchorContext ctx;
  ctx.world = &w;
  ctx.domain = "health";
  const auto lat = elaborate(ctx, "c1", w.evidence(), {16, 4});
  CHECK(lat.size() == 2);
  CHECK(lat.node(1).anchor->kind == AnchorKind::AcceptedAuthority);
  CHECK(evaluate(lat, {}).at("c1").score == doctest::Approx(0.9 * 0.9));
}

TEST_CASE("elaborate: the sampler decides what is looked at") {
  const World w = fixture::three_claims();
  AnchorContext ctx;
  ctx.world = &w;
  ctx.domain = "health";
  const EvidenceSampler nothing = [](std::span<const EvidenceItem* const>, std::string_view) {
    return std::vector<const EvidenceItem*>{};
  };
  const auto lat = elaborate(ctx, "c1", w.evidence(), {16, 4}, nothing);
  CHECK(lat.size() == 1);
  CHECK(lat.root().anchor->kind == AnchorKind::EvidenceExhaustion);
}
