#include <gtest/gtest.h>

#include <random>

#include "germfib/catalog.hpp"
#include "germfib/germ.hpp"
#include "germfib/germ_io.hpp"
#include "oracles.hpp"

using namespace germfib;

namespace {

MapGerm germ(const std::string& vars, const std::vector<std::string>& comps) {
  std::string text = "vars: " + vars + "\n";
  for (std::size_t i = 0; i < comps.size(); ++i) text += "G" + std::to_string(i + 1) + " = " + comps[i] + "\n";
  return parse_germ(text, "t");
}

Polynomial poly(const MapGerm& g, const std::string& s) { return parse_polynomial(s, g.var_names()); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

}  // namespace

TEST(GermParse, ReadsComponentsAndFlags) {
  const auto g = parse_germ("name: demo\nvars: x y z   # coordinates\nG1 = x*y\nG2 = z^2\nflags: nice \"checked by hand\"\n");
  EXPECT_EQ(g.name(), "demo");
  EXPECT_EQ(g.m(), 3u);
  EXPECT_EQ(g.p(), 2u);
  ASSERT_EQ(g.flags().size(), 1u);
  EXPECT_EQ(g.flags()[0].name, "nice");
  EXPECT_EQ(g.flags()[0].justification, "checked by hand");
}

TEST(GermParse, MixedPairBuildsProductWithConjugate) {
  const auto g = catalog_germ("fgbar_quadric");
  ASSERT_TRUE(g.origin());
  EXPECT_TRUE(g.origin()->f.has_value());
  EXPECT_EQ(g.m(), 4u);
  EXPECT_EQ(g.p(), 2u);
  EXPECT_EQ(g.var_names(), (std::vector<std::string>{"x1", "y1", "x2", "y2"}));
}

TEST(GermParse, MissingComponentIsReportedWithLine) {
  try {
    parse_germ("vars: x y\nG1 = x\nG3 = y\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(GermParse, ExpressionErrorPointsIntoTheLine) {
  try {
    parse_germ("vars: x y\nG1 = x + + \n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 5u);
  }
}

TEST(GermParse, RejectsNonvanishingComponent) { EXPECT_THROW(parse_germ("vars: x\nG1 = x + 1\n"), InputError); }

TEST(GermParse, RejectsNonholomorphicPairMember) {
  EXPECT_THROW(parse_germ("cvars: z w\nf = conj(z)\ng = w\n"), ParseError);
}

TEST(GermParse, RejectsUnknownHeader) { EXPECT_THROW(parse_germ("vars: x\ncolour: red\nG1 = x\n"), ParseError); }

TEST(GermParse, SerializationRoundTrips) {
  for (const auto& e : catalog()) {
    const auto g = parse_germ(e.text, e.name);
    const auto h = parse_germ(to_germ_file(g), e.name);
    EXPECT_EQ(h.components(), g.components()) << e.name;
    EXPECT_EQ(h.flags().size(), g.flags().size()) << e.name;
  }
}

TEST(GermJacobian, ProductAndSquare) {
  const auto g = germ("x y z", {"x*y", "z^2"});
  const auto& j = jacobian(g);
  EXPECT_EQ(j[0], PolyVector({poly(g, "y"), poly(g, "x"), poly(g, "0")}));
  EXPECT_EQ(j[1], PolyVector({poly(g, "0"), poly(g, "0"), poly(g, "2*z")}));
}

TEST(GermJacobian, LinearProjectionRowsAreUnitVectors) {
  const auto g = germ("x1 x2 x3", {"x1", "x2"});
  EXPECT_EQ(g.jacobian_at(vec({0.3, -1, 2})), (Eigen::MatrixXd(2, 3) << 1, 0, 0, 0, 1, 0).finished());
}

TEST(GermJacobian, ConeComponent) {
  const auto g = catalog_germ("ex31_n4");
  EXPECT_EQ(jacobian(g)[1], PolyVector({poly(g, "0"), poly(g, "2*x2"), poly(g, "2*x3"), poly(g, "-2*x4")}));
}

TEST(SingularSet, ProductAndSquareMinors) {
  const auto g = germ("x y z", {"x*y", "z^2"});
  const auto sys = singular_set_system(g);
  ASSERT_EQ(sys.equations().size(), 3u);
  std::vector<Polynomial> nonzero;
  for (const auto& e : sys.equations()) {
    if (!e.is_zero()) nonzero.push_back(e);
  }
  ASSERT_EQ(nonzero.size(), 2u);
  // Up to sign: 2yz and 2xz.
  auto matches = [&](const std::string& s) {
    const auto p = poly(g, s);
    for (const auto& e : nonzero) {
      if (e == p || e == -p) return true;
    }
    return false;
  };
  EXPECT_TRUE(matches("2*y*z"));
  EXPECT_TRUE(matches("2*x*z"));
}

TEST(SingularSet, ConeSingularLocusIsAxis) {
  const auto g = catalog_germ("ex31_n4");
  const auto sys = singular_set_system(g);
  EXPECT_EQ(sys.max_residual(vec({0.7, 0, 0, 0})), 0.0);
  EXPECT_GT(sys.max_residual(vec({0.7, 0.1, 0, 0})), 0.1);
}

TEST(SingularSet, SubmersionHasConstantMinors) {
  const auto sys = singular_set_system(germ("x1 x2 x3", {"x1", "x2"}));
  bool some_nonzero = false;
  for (const auto& e : sys.equations()) {
    EXPECT_TRUE(e.is_constant());
    some_nonzero = some_nonzero || !e.is_zero();
  }
  EXPECT_TRUE(some_nonzero);
  EXPECT_TRUE(sys.trivially_empty());
}

TEST(SingularSet, MinorsAgreeWithRankTest) {
  const auto g = catalog_germ("xy_z2_cubic");
  const auto sys = singular_set_system(g);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto x = oracle::random_point(rng, 3);
    const auto j = g.jacobian_at(x);
    EXPECT_NEAR(sys.residuals(x).cwiseAbs().maxCoeff(), oracle::max_abs_minor(j, 2), 1e-12);
  }
}

TEST(NormalFields, ProductAndSquare) {
  const auto g = germ("x y z", {"x*y", "z^2"});
  const auto nf = omega_fields(g);
  ASSERT_EQ(nf.omegas.size(), 1u);
  EXPECT_EQ(nf.omegas[0], PolyVector({poly(g, "-y*z^2"), poly(g, "-x*z^2"), poly(g, "2*x*y*z")}));
}

TEST(NormalFields, ConeWithLinearComponent) {
  const auto g = catalog_germ("ex31_n4");
  const auto nf = omega_fields(g);
  EXPECT_EQ(nf.omegas[0], PolyVector({poly(g, "-(x2^2 + x3^2 - x4^2)"), poly(g, "2*x1*x2"), poly(g, "2*x1*x3"),
                                      poly(g, "-2*x1*x4")}));
}

TEST(NormalFields, ZeroSecondComponentGivesZeroField) {
  const auto g = germ("x y", {"x", "0"});
  const auto nf = omega_fields(g);
  ASSERT_EQ(nf.omegas.size(), 1u);
  for (const auto& e : nf.omegas[0]) EXPECT_TRUE(e.is_zero());
}

TEST(NormalFields, NeedTwoComponents) { EXPECT_THROW(omega_fields(germ("x y", {"x*y"})), UnsupportedError); }

TEST(NormSquared, Examples) {
  const auto g = germ("x y z", {"x*y", "z^2"});
  EXPECT_EQ(norm_squared(g), poly(g, "x^2*y^2 + z^4"));
  const auto h = germ("x1 x2", {"x1", "x2"});
  EXPECT_EQ(norm_squared(h), poly(h, "x1^2 + x2^2"));
  const auto s = parse_germ("cvars: z\nF = z^2\n");
  EXPECT_EQ(norm_squared(s), poly(s, "(x1^2 + y1^2)^2"));
}

TEST(Catalog, ListsRequiredEntries) {
  EXPECT_NE(find_catalog_entry("xy_z2"), nullptr);
  EXPECT_NE(find_catalog_entry("fgbar_quadric"), nullptr);
  EXPECT_NE(find_catalog_entry("ex31_n3"), nullptr);
  EXPECT_NE(find_catalog_entry("ex31_n4"), nullptr);
  EXPECT_THROW(catalog_germ("no_such_germ"), InputError);
  for (const auto& e : catalog()) EXPECT_NO_THROW(parse_germ(e.text, e.name)) << e.name;
}
