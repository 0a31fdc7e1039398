#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>

#include "germfib/config.hpp"
#include "germfib/report.hpp"

using namespace germfib;

TEST(ConditionIds, NamesRoundTrip) {
  for (auto c : all_conditions()) EXPECT_EQ(condition_from_string(to_string(c)), c);
  EXPECT_THROW(condition_from_string("bogus"), InputError);
}

TEST(ConditionReports, JsonRoundTrip) {
  ConditionReport r;
  r.condition = ConditionId::cond_main;
  r.verdict = Verdict::pass;
  r.evidence = {{"min_ratio", 0.9}};
  r.implied_by = {"tube-existence-from-condition-main"};
  r.tolerances = {{"ratio_floor", 0.05}};
  r.seed = 42;
  r.scope = "arc 1";
  const Json j = to_json(r);
  for (const char* k : {"condition", "verdict", "evidence", "implied_by", "tolerances", "seed"}) EXPECT_TRUE(j.contains(k)) << k;
  const auto back = report_from_json(j);
  EXPECT_EQ(to_json(back), j);
}

TEST(ConditionReports, MalformedJsonIsInputError) {
  EXPECT_THROW(report_from_json(Json{{"condition", "nice"}}), InputError);
}

TEST(ImplicationEdges, EveryEdgeHasHypothesesOrFlags) {
  for (const auto& e : implication_edges()) {
    EXPECT_FALSE(e.conclusions.empty()) << e.name;
    EXPECT_TRUE(!e.hypotheses.empty() || !e.declared_flags.empty()) << e.name;
    EXPECT_EQ(find_edge(e.name), &e);
  }
}

TEST(ImplicationEdges, NoConditionImpliesItself) {
  for (const auto& e : implication_edges()) {
    for (auto h : e.hypotheses) {
      EXPECT_EQ(std::count(e.conclusions.begin(), e.conclusions.end(), h), 0) << e.name;
    }
  }
}

TEST(VerdictTable, FailDominatesScopedReports) {
  VerdictTable t;
  t.set(ConditionId::equivalence_evidence, Verdict::pass);
  t.set(ConditionId::equivalence_evidence, Verdict::inconclusive);
  EXPECT_EQ(t.get(ConditionId::equivalence_evidence), Verdict::inconclusive);
  t.set(ConditionId::equivalence_evidence, Verdict::fail);
  t.set(ConditionId::equivalence_evidence, Verdict::pass);
  EXPECT_EQ(t.get(ConditionId::equivalence_evidence), Verdict::fail);
  EXPECT_FALSE(t.get(ConditionId::nice));
}

TEST(VerdictTable, SphereCriterionNeedsAllHypotheses) {
  VerdictTable t;
  ConditionReport r;
  r.condition = ConditionId::sphere_exists;
  for (auto c : {ConditionId::nice, ConditionId::radial_disc, ConditionId::cond_main}) t.set(c, Verdict::pass);
  apply_implications(r, t);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_TRUE(r.evidence.contains("unsatisfied_implications"));
  t.set(ConditionId::rho_regular_psi, Verdict::pass);
  ConditionReport s;
  s.condition = ConditionId::sphere_exists;
  apply_implications(s, t);
  EXPECT_EQ(s.verdict, Verdict::pass);
  EXPECT_EQ(s.implied_by, std::vector<std::string>{"sphere-fibration-criterion"});
}

TEST(VerdictTable, SphereEdgesNeedSphereSetting) {
  VerdictTable t({}, false);
  for (auto c : {ConditionId::nice, ConditionId::radial_disc, ConditionId::cond_main, ConditionId::rho_regular_psi}) {
    t.set(c, Verdict::pass);
  }
  ConditionReport s;
  s.condition = ConditionId::sphere_exists;
  apply_implications(s, t);
  EXPECT_EQ(s.verdict, Verdict::inconclusive);
}

TEST(VerdictTable, NumericalFailIsNeverOverridden) {
  VerdictTable t;
  t.set(ConditionId::radial_homogeneous, Verdict::pass);
  ConditionReport r;
  r.condition = ConditionId::radial_disc;
  r.verdict = Verdict::fail;
  apply_implications(r, t);
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_TRUE(r.implied_by.empty());
  EXPECT_TRUE(r.evidence.contains("conflicting_implications"));
}

TEST(VerdictTable, DeclaredFlagsEnableEdges) {
  VerdictTable t({"icis"});
  ConditionReport r;
  r.condition = ConditionId::cond_main;
  apply_implications(r, t);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.implied_by, std::vector<std::string>{"icis-pair-regularity"});
}

TEST(VerdictTable, EvidenceKeyGatesEdge) {
  VerdictTable t;
  for (auto c : {ConditionId::nice, ConditionId::radial_disc, ConditionId::tube_exists, ConditionId::sphere_exists}) {
    t.set(c, Verdict::pass);
  }
  ConditionReport without;
  without.condition = ConditionId::mvf_exists;
  apply_implications(without, t);
  EXPECT_EQ(without.verdict, Verdict::inconclusive);
  ConditionReport with;
  with.condition = ConditionId::mvf_exists;
  with.evidence["component_fiber_criterion"] = true;
  apply_implications(with, t);
  EXPECT_EQ(with.verdict, Verdict::pass);
}

TEST(Config, ParsesKeyValueText) {
  Config c;
  c.apply_text("# comment\neps = 0.25\nrungs=3\n\nscale_sweep = yes  # trailing\nseed = 9\n");
  EXPECT_EQ(c.eps, 0.25);
  EXPECT_EQ(c.rungs, 3);
  EXPECT_TRUE(c.scale_sweep);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.effective_eta(), 0.0025);
  EXPECT_EQ(c.ladder(), (std::vector<double>{0.5, 0.25, 0.125}));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  Config c;
  try {
    c.apply_text("eps = 0.5\nwibble = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(c.apply_text("eps = half\n"), ParseError);
  EXPECT_THROW(c.apply_text("just words\n"), ParseError);
  EXPECT_THROW(c.apply("seed", "-1"), InputError);
}

TEST(Config, ValidationCatchesInconsistentRadii) {
  Config c;
  c.eta = 0.6;
  EXPECT_THROW(c.validate(), InputError);
  Config d;
  d.rungs = 1;
  EXPECT_THROW(d.validate(), InputError);
}

TEST(Config, TextRoundTrip) {
  Config c;
  c.eps = 0.3;
  c.seed = 77;
  c.scale_sweep = true;
  Config d;
  d.apply_text(c.to_text());
  EXPECT_EQ(d.to_text(), c.to_text());
}

TEST(Config, SeedFromEnvironment) {
  ::setenv("GERMFIB_SEED", "123", 1);
  EXPECT_EQ(seed_from_environment(1), 123u);
  ::setenv("GERMFIB_SEED", "12x", 1);
  EXPECT_THROW(seed_from_environment(1), InputError);
  ::unsetenv("GERMFIB_SEED");
  EXPECT_EQ(seed_from_environment(5), 5u);
}
