#include <doctest.h>

#include "helpers.hpp"
#include "mevir/world.hpp"

using namespace mevir;

TEST_CASE("ground truth lookups") {
  const World w = fixture::three_claims();
  CHECK(ground_truth(w, "c1"));
  CHECK_FALSE(ground_truth(w, "c2"));
  CHECK_THROWS_AS(ground_truth(w, "c9"), LookupError);
}

TEST_CASE("world construction checks referential integrity") {
  std::vector<Claim> claims = {{"c1", "c1", "health", {}, 0.0}};
  std::vector<TruthMakerFact> facts = {{"c1", true, 1.0}};
  std::vector<Source> sources = {fixture::source("lab", 0.9)};
  CHECK_NOTHROW(World({"health"}, claims, facts, sources, {}));
  CHECK_THROWS_AS(World({"health"}, claims, {}, sources, {}), ValidationError);  // claim without fact
  CHECK_THROWS_AS(World({"health"}, claims, {{"c1", true, 1.0}, {"c1", false, 1.0}}, sources, {}),
                  ValidationError);  // duplicate fact
  CHECK_THROWS_AS(World({"other"}, claims, facts, sources, {}), ValidationError);  // unknown domain
  CHECK_THROWS_AS(
      World({"health"}, claims, facts, sources, {fixture::item("e1", "ghost", "c1", Polarity::Supports)}),
      ValidationError);  // unknown author
  CHECK_THROWS_AS(World({"health"}, claims, facts, sources, {fixture::item("e1", "lab", "zz", Polarity::Supports)}),
                  ValidationError);  // dangling target
}

TEST_CASE("statement index follows target chains to the claim") {
  const World w = fixture::three_claims();
  StatementIndex index(w);
  CHECK(index.claim_of("c1") == "c1");
  CHECK(index.claim_of("e2") == "c1");
  index.add(fixture::item("s0", "lab", "e2", Polarity::Attacks));
  CHECK(index.claim_of("s0") == "c1");
  CHECK_THROWS_AS(index.claim_of("nope"), LookupError);
}

TEST_CASE("evidence stream respects the misinformation rate") {
  const World w = fixture::three_claims();
  StreamConfig cfg;
  cfg.length = 200;
  cfg.misinformation_rate = 0.0;
  for (const auto& e : generate_evidence_stream(w, cfg, 42)) CHECK(e.veracity);
  cfg.misinformation_rate = 1.0;
  for (const auto& e : generate_evidence_stream(w, cfg, 42)) CHECK_FALSE(e.veracity);

  cfg.misinformation_rate = 0.3;
  const auto a = generate_evidence_stream(w, cfg, 42);
  const auto b = generate_evidence_stream(w, cfg, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].target == b[i].target);
    CHECK(a[i].polarity == b[i].polarity);
    CHECK(a[i].strength == b[i].strength);
    CHECK(a[i].author == b[i].author);
  }
  CHECK(generate_evidence_stream(w, cfg, 43)[0].strength != a[0].strength);
}

TEST_CASE("true stream items point the way the truth maker does") {
  const World w = fixture::three_claims();
  StreamConfig cfg;
  cfg.length = 100;
  cfg.claim_target_share = 1.0;
  for (const auto& e : generate_evidence_stream(w, cfg, 1)) {
    const bool truth = ground_truth(w, e.target);
    CHECK(e.polarity == (truth ? Polarity::Supports : Polarity::Attacks));
  }
}

TEST_CASE("stream generation needs a populated world and a sane config") {
  const World empty({}, {}, {}, {}, {});
  CHECK_THROWS_AS(generate_evidence_stream(empty, StreamConfig{}, 1), ValidationError);
  StreamConfig bad;
  bad.strength_min = 0.9;
  bad.strength_max = 0.1;
  CHECK_THROWS_AS(generate_evidence_stream(fixture::three_claims(), bad, 1), ValidationError);
}

TEST_CASE("frame salience") {
  using F = Foundation;
  CHECK(frame_salience(FramingVector{}, EmftProfile::uniform()) == 0.0);
  CHECK(frame_salience(fixture::framing({{F::Liberty, 1.0}}), EmftProfile::uniform()) == doctest::Approx(1.0 / 7));
  EmftProfile::Values p{};
  p[static_cast<std::size_t>(F::Liberty)] = 0.5;
  p[static_cast<std::size_t>(F::Purity)] = 0.3;
  p[static_cast<std::size_t>(F::Care)] = 0.2;
  // 0.5*1.0 + 0.3*0.8 by hand
  CHECK(frame_salience(fixture::framing({{F::Liberty, 1.0}, {F::Purity, 0.8}}), EmftProfile::from_weights(p)) ==
        doctest::Approx(0.74));
}
