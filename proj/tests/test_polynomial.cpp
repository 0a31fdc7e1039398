#include <gtest/gtest.h>

#include <complex>
#include <random>
#include <vector>

#include "germfib/mixed.hpp"
#include "germfib/parser.hpp"
#include "germfib/polynomial.hpp"
#include "oracles.hpp"

using namespace germfib;

namespace {

const std::vector<std::string> xyz = {"x", "y", "z"};

double at(const Polynomial& p, std::initializer_list<double> x) { return p.eval(std::vector<double>(x)); }

double at(const Polynomial& p, const Eigen::VectorXd& x) {
  return p.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

}  // namespace

TEST(PolynomialEval, MonomialProduct) {
  EXPECT_EQ(at(parse_polynomial("x*y", {"x", "y"}), {2, 3}), 6.0);
}

TEST(PolynomialEval, DifferenceOfSquaresOnDiagonal) {
  EXPECT_EQ(at(parse_polynomial("x^2 - y^2", {"x", "y"}), {1, 1}), 0.0);
}

TEST(PolynomialEval, ScaledMilnorDeterminant) {
  EXPECT_EQ(at(parse_polynomial("4*z*(x^2 - y^2)", xyz), {1, 2, 1}), -12.0);
}

TEST(PolynomialEval, DimensionMismatchIsInputError) {
  const auto p = parse_polynomial("x*y", {"x", "y"});
  EXPECT_THROW(at(p, {1, 2, 3}), InputError);
}

TEST(PolynomialGradient, DistanceSquared) {
  const auto g = gradient(distance_squared(4));
  ASSERT_EQ(g.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g[i], Rational(2) * Polynomial::variable(4, i));
}

TEST(PolynomialGradient, ProductAndSquare) {
  const auto g = gradient(parse_polynomial("x*y", xyz));
  EXPECT_EQ(g[0], parse_polynomial("y", xyz));
  EXPECT_EQ(g[1], parse_polynomial("x", xyz));
  EXPECT_TRUE(g[2].is_zero());
  const auto h = gradient(parse_polynomial("z^2", xyz));
  EXPECT_TRUE(h[0].is_zero());
  EXPECT_TRUE(h[1].is_zero());
  EXPECT_EQ(h[2], parse_polynomial("2*z", xyz));
}

TEST(PolynomialGradient, MatchesFiniteDifferences) {
  const auto p = parse_polynomial("x^3*y - 2/3*y*z^2 + x*y*z + 5*z^4 - x", xyz);
  const auto g = gradient(p);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto x = oracle::random_point(rng, 3);
    const auto fd = oracle::fd_gradient([&](const oracle::Vec& v) { return at(p, v); }, x);
    const Eigen::VectorXd exact = g.eval(x);
    EXPECT_LT((exact - fd).norm(), 1e-6 * std::max(1.0, exact.norm()));
  }
}

TEST(PolynomialArithmetic, ExactRationalCoefficients) {
  const auto p = parse_polynomial("(x + 1/3)^3 - x^3 - x^2 - x/3", {"x"});
  EXPECT_TRUE(p.is_constant());
  EXPECT_EQ(p.coefficient({0}), Rational(1, 27));
}

TEST(PolynomialArithmetic, DeterminantOfSymbolicMatrix) {
  const std::vector<std::string> v = {"a", "b", "c", "d"};
  const auto det = determinant({{parse_polynomial("a", v), parse_polynomial("b", v)},
                                {parse_polynomial("c", v), parse_polynomial("d", v)}});
  EXPECT_EQ(det, parse_polynomial("a*d - b*c", v));
}

TEST(PolynomialArithmetic, MaximalMinorsMatchBruteForce) {
  const std::vector<PolyVector> rows = {gradient(distance_squared(3)), gradient(parse_polynomial("x*y", xyz)),
                                        gradient(parse_polynomial("z^2", xyz))};
  const auto minors = maximal_minors(rows);
  ASSERT_EQ(minors.size(), 1u);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_point(rng, 3);
    oracle::Mat a(3, 3);
    for (int i = 0; i < 3; ++i) a.row(i) = rows[static_cast<std::size_t>(i)].eval(x).transpose();
    EXPECT_NEAR(std::abs(at(minors[0], x)), std::abs(oracle::gauss_det(a)), 1e-12);
  }
}

TEST(PolynomialParser, ReportsLineAndColumn) {
  try {
    parse_polynomial("x + * y", {"x", "y"}, 7, 10);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_EQ(e.column(), 14u);
  }
}

TEST(PolynomialParser, RejectsUnknownVariable) { EXPECT_THROW(parse_polynomial("x + w", {"x"}), ParseError); }

TEST(PolynomialParser, RejectsNegativeExponent) { EXPECT_THROW(parse_polynomial("x^-1", {"x"}), ParseError); }

TEST(PolynomialParser, RoundTripsThroughText) {
  const auto p = parse_polynomial("3/2*x^2*y - y*z + 7", xyz);
  const auto names = xyz;
  EXPECT_EQ(parse_polynomial(p.to_string(names), xyz), p);
}

TEST(Realify, ModulusSquaredIsReal) {
  const auto [re, im] = realify(parse_mixed("z*conj(z)", {"z"}));
  EXPECT_EQ(re, parse_polynomial("x^2 + y^2", {"x", "y"}));
  EXPECT_TRUE(im.is_zero());
}

TEST(Realify, ProductWithConjugate) {
  const std::vector<std::string> r = {"x1", "y1", "x2", "y2"};
  const auto [re, im] = realify(parse_mixed("z1*conj(z2)", {"z1", "z2"}));
  EXPECT_EQ(re, parse_polynomial("x1*x2 + y1*y2", r));
  EXPECT_EQ(im, parse_polynomial("x2*y1 - x1*y2", r));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto x = oracle::random_point(rng, 4);
    const auto z = oracle::to_complex(x);
    const auto w = z[0] * std::conj(z[1]);
    EXPECT_NEAR(at(re, x), w.real(), 1e-14);
    EXPECT_NEAR(at(im, x), w.imag(), 1e-14);
  }
}

TEST(Realify, FgbarRealPartIsDifferenceOfFourthPowers) {
  const auto F = parse_mixed("(z1^2 + z2^2)*conj(z1^2 - z2^2)", {"z1", "z2"});
  const auto [re, im] = realify(F);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto x = oracle::random_point(rng, 4);
    const auto z = oracle::to_complex(x);
    const auto f = z[0] * z[0] + z[1] * z[1];
    const auto g = z[0] * z[0] - z[1] * z[1];
    const auto w = f * std::conj(g);
    EXPECT_NEAR(at(re, x), std::pow(std::abs(z[0]), 4) - std::pow(std::abs(z[1]), 4), 1e-13);
    EXPECT_NEAR(at(re, x), w.real(), 1e-13);
    EXPECT_NEAR(at(im, x), w.imag(), 1e-13);
  }
}

TEST(MixedFunction, ImaginaryUnitAndConjugation) {
  const auto F = parse_mixed("i*z + conj(i*z)", {"z"});
  const auto [re, im] = realify(F);
  EXPECT_EQ(re, parse_polynomial("-2*y", {"x", "y"}));
  EXPECT_TRUE(im.is_zero());
}

TEST(MixedFunction, HolomorphyDetection) {
  EXPECT_TRUE(parse_mixed("z1^2 + 3*z2", {"z1", "z2"}).is_holomorphic());
  EXPECT_FALSE(parse_mixed("z1*conj(z2)", {"z1", "z2"}).is_holomorphic());
}
