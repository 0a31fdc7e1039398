#include <gtest/gtest.h>

#include <cmath>

#include "germfib/analysis.hpp"
#include "germfib/catalog.hpp"
#include "germfib/conditions.hpp"

using namespace germfib;

namespace {

Config quick() {
  Config c;
  c.milnor_seeds = 400;
  c.psi_seeds = 200;
  c.sing_seeds = 200;
  c.rungs = 3;
  return c;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

bool has_direction(const DiscriminantSample& ds, const Eigen::VectorXd& d, double tol) {
  for (const auto& r : ds.rays) {
    if (angle_between(r.direction, d) < tol) return true;
  }
  return false;
}

Verdict verdict_of(const MapGerm& g, ConditionId c, const Config& cfg = quick()) {
  const auto an = analyze(g, cfg, c);
  return *an.verdict(c);
}

}  // namespace

TEST(Discriminant, ProductAndSquareHasThreeRays) {
  const auto ds = sample_discriminant(catalog_germ("xy_z2"), {0.5, 0.25}, 1);
  EXPECT_EQ(ds.rays.size(), 3u);
  EXPECT_TRUE(has_direction(ds, vec({0, 1}), 1e-2));
  EXPECT_TRUE(has_direction(ds, vec({1, 0}), 1e-2));
  EXPECT_TRUE(has_direction(ds, vec({-1, 0}), 1e-2));
  EXPECT_FALSE(ds.origin_only);
}

TEST(Discriminant, ConeWithLinearComponentHasTwoRays) {
  const auto ds = sample_discriminant(catalog_germ("ex31_n4"), {0.5, 0.25}, 1);
  EXPECT_EQ(ds.rays.size(), 2u);
  EXPECT_TRUE(has_direction(ds, vec({1, 0}), 1e-2));
  EXPECT_TRUE(has_direction(ds, vec({-1, 0}), 1e-2));
}

TEST(Discriminant, PolarMixedFunctionIsOriginOnly) {
  for (const char* name : {"polar_z1_conj_z2", "polar_brieskorn"}) {
    const auto ds = sample_discriminant(catalog_germ(name), {0.5, 0.25}, 1);
    EXPECT_TRUE(ds.origin_only) << name;
    EXPECT_TRUE(ds.rays.empty()) << name;
  }
}

TEST(Discriminant, SubmersionIsEmpty) {
  const auto ds = sample_discriminant(catalog_germ("linear_r3"), {0.5}, 1);
  EXPECT_TRUE(ds.empty());
}

TEST(RadialDiscriminant, PassesForProductAndSquare) {
  const auto ds = sample_discriminant(catalog_germ("xy_z2"), {0.5, 0.25}, 1);
  EXPECT_EQ(check_radial_discriminant(ds).verdict, Verdict::pass);
}

TEST(RadialDiscriminant, OriginOnlyPasses) {
  DiscriminantSample ds;
  ds.p = 2;
  ds.origin_only = true;
  EXPECT_EQ(check_radial_discriminant(ds).verdict, Verdict::pass);
}

TEST(RadialDiscriminant, RotatingDirectionsFail) {
  DiscriminantSample ds;
  ds.p = 2;
  ds.ladder = {0.5, 0.25, 0.125};
  for (int k = 0; k < 3; ++k) {
    const double t = 0.5 * k;
    const Eigen::VectorXd d = vec({std::cos(t), std::sin(t)});
    ds.rung_directions.push_back({d});
    ds.rays.push_back({d, {0.1}, {k}});
  }
  EXPECT_EQ(check_radial_discriminant(ds).verdict, Verdict::fail);
}

TEST(RadialDiscriminant, CurvedDiscriminantFails) {
  EXPECT_EQ(verdict_of(catalog_germ("xy_z2_cubic"), ConditionId::radial_disc), Verdict::fail);
}

TEST(Niceness, RadialWeightsSuffice) {
  const auto an = analyze(catalog_germ("xy_z2"), quick(), ConditionId::nice);
  const auto* r = an.reports_for(ConditionId::nice).front();
  EXPECT_EQ(r->verdict, Verdict::pass);
  EXPECT_TRUE(r->evidence["criteria"]["radial_weights"].get<bool>());
}

TEST(Niceness, ZeroSetPointOffSingularLocus) {
  const auto an = analyze(catalog_germ("ex31_n4"), quick(), ConditionId::nice);
  const auto* r = an.reports_for(ConditionId::nice).front();
  EXPECT_EQ(r->verdict, Verdict::pass);
  EXPECT_TRUE(r->evidence["criteria"]["zero_set_point_off_sing"].get<bool>());
}

TEST(Niceness, NonGermImageStaysInconclusive) {
  const auto an = analyze(catalog_germ("nonnice_x_xy"), quick(), ConditionId::nice);
  const auto* r = an.reports_for(ConditionId::nice).front();
  EXPECT_EQ(r->verdict, Verdict::inconclusive);
  EXPECT_TRUE(r->evidence.contains("note"));
}

TEST(ConditionMain, PassesOnCatalogExamples) {
  for (const char* name : {"xy_z2", "ex31_n4", "linear_r3"}) {
    EXPECT_EQ(verdict_of(catalog_germ(name), ConditionId::cond_main), Verdict::pass) << name;
  }
}

TEST(ConditionMain, SubmersionMilnorSetIsTheComplementaryPlane) {
  // For (x1, x2) on R^3 the Milnor set is {x3 = 0}, which meets V_G = x3-axis only at 0.
  const auto sys = milnor_set_system(catalog_germ("linear_r3"));
  const auto ws = witness_sample(sys, Region::sphere(0.5), 100, 3);
  ASSERT_FALSE(ws.points.empty());
  for (const auto& w : ws.points) EXPECT_LT(std::abs(w.x[2]), 1e-9);
}

TEST(RhoRegularity, ConeWithLinearComponent) {
  const auto an = analyze(catalog_germ("ex31_n4"), quick(), ConditionId::rho_regular_psi);
  const auto* r = an.reports_for(ConditionId::rho_regular_psi).front();
  EXPECT_EQ(r->verdict, Verdict::pass);
  EXPECT_EQ(r->evidence["violations"].get<int>(), 0);
}

TEST(RhoRegularity, ProductAndSquare) {
  EXPECT_EQ(verdict_of(catalog_germ("xy_z2"), ConditionId::rho_regular_psi), Verdict::pass);
}

TEST(RhoRegularity, RankDefectVanishesOnPsiMilnorWitnesses) {
  const auto g = catalog_germ("ex31_n4");
  const auto ws = witness_sample(psi_milnor_set_system(g), Region::sphere(0.3), 100, 12);
  std::size_t checked = 0;
  for (const auto& w : ws.points) {
    if (g.eval(w.x).norm() < 1e-7) continue;
    ++checked;
    EXPECT_LT(psi_rank_defect(g, w.x), 1e-8);
  }
  EXPECT_GT(checked, 0u);
  EXPECT_GT(psi_rank_defect(g, vec({0.1, 0.2, 0.3, 0.1})), 1e-3);
}

TEST(MilnorImageCoverage, MinimizerOnFibreIsInMilnorSet) {
  const auto g = catalog_germ("xy_z2");
  const Config cfg = quick();
  const auto ds = sample_discriminant(g, cfg.ladder(), 1);
  const double eta = cfg.effective_eta();
  const auto pr = milnor_image_probe(g, ds, vec({0.06 * eta / 0.1, 0.08 * eta / 0.1}), cfg.eps, 4, cfg);
  ASSERT_TRUE(pr.fiber_found);
  EXPECT_TRUE(pr.minimized);
  EXPECT_LT(pr.milnor_residual, 1e-8);
}

TEST(MilnorImageCoverage, ValueOnRayIsRejected) {
  const auto g = catalog_germ("xy_z2");
  const Config cfg = quick();
  const auto ds = sample_discriminant(g, cfg.ladder(), 1);
  EXPECT_THROW(milnor_image_probe(g, ds, vec({0, 0.001}), cfg.eps, 4, cfg), InputError);
}

TEST(MilnorImageCoverage, PassesForProductAndSquare) {
  EXPECT_EQ(verdict_of(catalog_germ("xy_z2"), ConditionId::milnor_image_coverage), Verdict::pass);
}

TEST(MvfExists, ProductAndSquareHasPositiveCoefficient) {
  const auto an = analyze(catalog_germ("xy_z2"), quick(), ConditionId::mvf_exists);
  const auto* r = an.reports_for(ConditionId::mvf_exists).front();
  EXPECT_EQ(r->verdict, Verdict::pass);
  EXPECT_GT(r->evidence["min_a"].get<double>(), 0.0);
  EXPECT_GE(r->evidence["witnesses"].get<int>(), 100);
}

TEST(MvfExists, EmptyWitnessSetPassesVacuously) {
  const auto g = catalog_germ("xy_z2");
  WitnessSet empty;
  empty.nvars = 3;
  const auto r = check_mvf_exists(g, empty, empty, quick());
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_TRUE(r.evidence["vacuous"].get<bool>());
}

TEST(MvfExists, NeedsSphereSetting) {
  WitnessSet empty;
  const auto r = check_mvf_exists(parse_germ("vars: x y\nG1 = x*y\n"), empty, empty, quick());
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  EXPECT_FALSE(r.evidence["applicable"].get<bool>());
}

TEST(MvfExists, SubmersionMilnorPointHasUnitCoefficient) {
  // On {x3 = 0} for (x1, x2) on R^3, grad rho = grad ||G||^2, so a = 1 exactly.
  const auto g = catalog_germ("linear_r3");
  WitnessSet ws;
  ws.nvars = 3;
  WitnessPoint w;
  w.x = vec({0.2, 0.1, 0.0});
  w.radius = w.x.norm();
  ws.points.push_back(w);
  EXPECT_EQ(check_mvf_exists(g, ws, ws, quick()).verdict, Verdict::pass);
  const auto fe = field_eval(g, w.x);
  EXPECT_NEAR(fe.a, 1.0, 1e-12);
  EXPECT_NEAR(fe.a_closed, 1.0, 1e-12);
}
