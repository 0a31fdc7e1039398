#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <algorithm>
#include <map>
#include <set>
#include <tuple>
#include <sstream>

#include "germfib/catalog.hpp"
#include "germfib/discriminant.hpp"
#include "germfib/variety.hpp"
#include "oracles.hpp"

using namespace germfib;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

std::string csv(const WitnessSet& ws) {
  std::ostringstream os;
  write_witness_csv(os, ws);
  return os.str();
}

}  // namespace

TEST(MilnorSet, ProductAndSquareDeterminant) {
  const auto g = catalog_germ("xy_z2");
  const auto sys = milnor_set_system(g);
  ASSERT_EQ(sys.equations().size(), 1u);
  const auto target = parse_polynomial("z*(x^2 - y^2)", g.var_names());
  const auto& det = sys.equations()[0];
  // det = c * target for some nonzero rational c: read c off one coefficient and compare exactly.
  const Rational c = det.coefficient({2, 0, 1});
  EXPECT_NE(c, 0);
  EXPECT_EQ(det, c * target);
}

TEST(MilnorSet, NeedsMoreSourceThanTargetDimensions) {
  EXPECT_THROW(milnor_set_system(parse_germ("vars: x y\nG1 = x\nG2 = y\n")), UnsupportedError);
}

TEST(MilnorSet, MinorsAgreeWithRankTest) {
  const auto g = catalog_germ("ex31_n4");
  const auto sys = milnor_set_system(g);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto x = oracle::random_point(rng, 4);
    const double brute = oracle::max_abs_minor(sys.rank_matrix(x), 3);
    EXPECT_NEAR(sys.residuals(x).cwiseAbs().maxCoeff(), brute, 1e-12 * std::max(1.0, brute));
  }
}

TEST(PsiMilnorSet, NeedsTwoComponents) {
  EXPECT_THROW(psi_milnor_set_system(parse_germ("vars: x y\nG1 = x*y\n")), UnsupportedError);
}

TEST(PsiMilnorSet, VanishesOnSingularAxisOfCone) {
  const auto sys = psi_milnor_set_system(catalog_germ("ex31_n4"));
  EXPECT_EQ(sys.max_residual(vec({0.3, 0, 0, 0})), 0.0);
  EXPECT_GT(sys.max_residual(vec({0.3, 0.2, 0.1, 0.05})), 1e-4);
}

TEST(PsiMilnorSet, RespectsEquationLimit) {
  EXPECT_THROW(psi_milnor_set_system(catalog_germ("nonnice_x_xy"), 10), UnsupportedError);
}

TEST(NewtonProject, LandsOnNearestBranchOfMilnorSet) {
  const auto sys = milnor_set_system(catalog_germ("xy_z2"));
  const auto res = newton_project(sys, vec({0.30, 0.31, 0.5}));
  ASSERT_TRUE(res.converged());
  EXPECT_NEAR(std::abs(res.x[0]), std::abs(res.x[1]), 1e-10);
  EXPECT_NEAR(res.x[2], 0.5, 1e-2);
  // The nearest point of {x = y} is the midpoint projection.
  EXPECT_NEAR(res.x[0], 0.305, 1e-3);
}

TEST(NewtonProject, FixedPointTakesNoIterations) {
  const auto sys = milnor_set_system(catalog_germ("xy_z2"));
  const auto x0 = vec({0.2, 0.2, 0.4});
  const auto res = newton_project(sys, x0);
  ASSERT_TRUE(res.converged());
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.x, x0);
}

TEST(NewtonProject, InfeasibleSystemFailsWithoutThrowing) {
  const DeterminantalSystem sys("empty", 2, {parse_polynomial("x^2 + y^2 + 1", {"x", "y"})});
  const auto res = newton_project(sys, vec({0.1, 0.2}));
  EXPECT_FALSE(res.converged());
}

TEST(WitnessSample, MilnorWitnessesSatisfyDeterminant) {
  const auto g = catalog_germ("xy_z2");
  const auto ws = witness_sample(milnor_set_system(g), Region::sphere(0.5), 400, 17);
  ASSERT_GT(ws.points.size(), 300u);
  const auto det = parse_polynomial("4*z*(x^2 - y^2)", g.var_names());
  for (const auto& w : ws.points) {
    EXPECT_LT(std::abs(det.eval(w.x)), 1e-10);
    EXPECT_NEAR(w.radius, 0.5, 1e-10);
  }
}

TEST(WitnessSample, SubmersionHasNoSingularWitnesses) {
  const auto ws = witness_sample(singular_set_system(catalog_germ("linear_r3")), Region::sphere(0.5), 50, 1);
  EXPECT_TRUE(ws.points.empty());
  EXPECT_TRUE(ws.diagnostics.trivially_empty);
}

TEST(WitnessSample, AnnulusKeepsRadiiInRange) {
  const auto ws = witness_sample(milnor_set_system(catalog_germ("xy_z2")), Region::annulus(0.2, 0.4), 200, 5);
  ASSERT_FALSE(ws.points.empty());
  for (const auto& w : ws.points) {
    EXPECT_GE(w.radius, 0.2);
    EXPECT_LE(w.radius, 0.4);
  }
}

TEST(WitnessSample, SameSeedSameBits) {
  const auto sys = milnor_set_system(catalog_germ("xy_z2"));
  EXPECT_EQ(csv(witness_sample(sys, Region::sphere(0.25), 100, 99)), csv(witness_sample(sys, Region::sphere(0.25), 100, 99)));
  EXPECT_NE(csv(witness_sample(sys, Region::sphere(0.25), 100, 99)), csv(witness_sample(sys, Region::sphere(0.25), 100, 98)));
}

TEST(WitnessSample, RejectsBadRegion) {
  const auto sys = milnor_set_system(catalog_germ("xy_z2"));
  EXPECT_THROW(witness_sample(sys, Region::annulus(0.5, 0.2), 10, 1), InputError);
  EXPECT_THROW(witness_sample(sys, Region::sphere(0.5), 0, 1), InputError);
}

TEST(ClusterComponents, EightOctantsOffTheDiscriminantPreimage) {
  const auto g = catalog_germ("xy_z2");
  const auto ds = sample_discriminant(g, {0.5, 0.25}, 3);
  const PreimageOracle oracle(g, ds);
  const auto ws = witness_sample(milnor_set_system(g), Region::sphere(0.5), 600, 8, {}, oracle.exclusion(0.2));
  const auto clustered = cluster_components(ws, 0.2);
  EXPECT_EQ(component_count(clustered), 8u);
  // Each component sits in one sign pattern of (x, y, z) with |x| = |y|.
  std::map<int, std::set<std::tuple<int, int, int>>> signs;
  for (const auto& w : clustered.points) {
    if (w.excluded) {
      EXPECT_EQ(w.component, -1);
      continue;
    }
    EXPECT_GT(std::abs(w.x[2]), 1e-3);
    signs[w.component].insert({w.x[0] > 0, w.x[1] > 0, w.x[2] > 0});
  }
  for (const auto& [id, s] : signs) EXPECT_EQ(s.size(), 1u) << "component " << id;
}

TEST(ClusterComponents, SingleClusterAndEmptySet) {
  WitnessSet one;
  one.nvars = 2;
  for (int i = 0; i < 5; ++i) {
    WitnessPoint w;
    w.x = vec({0.5 * std::cos(0.01 * i), 0.5 * std::sin(0.01 * i)});
    w.radius = 0.5;
    one.points.push_back(w);
  }
  EXPECT_EQ(component_count(cluster_components(one, 0.2)), 1u);
  WitnessSet empty;
  empty.nvars = 2;
  const auto c = cluster_components(empty, 0.2);
  EXPECT_TRUE(c.points.empty());
  EXPECT_EQ(component_count(c), 0u);
}

TEST(ClusterComponents, LabelsIgnorePointOrder) {
  const auto sys = milnor_set_system(catalog_germ("xy_z2"));
  auto ws = witness_sample(sys, Region::sphere(0.5), 200, 4);
  const auto a = cluster_components(ws, 0.2);
  std::reverse(ws.points.begin(), ws.points.end());
  auto b = cluster_components(ws, 0.2);
  std::reverse(b.points.begin(), b.points.end());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].component, b.points[i].component);
}

TEST(WitnessCsv, HeaderEvenWhenEmpty) {
  WitnessSet ws;
  ws.nvars = 3;
  EXPECT_EQ(csv(ws), "x1,x2,x3,residual,radius,component,excluded\n");
}
