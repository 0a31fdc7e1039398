#pragma once

// Radial weighted-homogeneity G(t.x) = t^d G(x), t.x = (t^q1 x1, ..., t^qm xm), and polar
// weighted-homogeneity of mixed functions, sum_j p_j (nu_j - mu_j) = k on every monomial.
//
// Detection is a bounded enumeration over integer weights. Canonical choices:
//   radial: smallest d, then lexicographically smallest q;
//   polar:  smallest k, then smallest max|p_j|, then fewest negative weights, then
//           lexicographically smallest p.

#include <complex>
#include <functional>
#include <tuple>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "germfib/germ.hpp"
#include "germfib/mixed.hpp"
#include "germfib/variety.hpp"

namespace germfib {

struct RadialWeights {
  std::vector<int> q;
  int d = 0;
  friend bool operator==(const RadialWeights&, const RadialWeights&) = default;
};

struct PolarWeights {
  std::vector<int> p;
  int k = 0;
  friend bool operator==(const PolarWeights&, const PolarWeights&) = default;
};

namespace detail {

inline int gcd_all(const std::vector<int>& v) {
  int g = 0;
  for (int x : v) g = std::gcd(g, std::abs(x));
  return g;
}

/// Distinct exponent vectors (as signed ints) across a set of polynomials.
inline std::vector<std::vector<int>> monomial_exponents(const std::vector<Polynomial>& polys) {
  std::set<std::vector<int>> out;
  for (const auto& p : polys) {
    for (const auto& [e, c] : p.terms()) out.insert(std::vector<int>(e.begin(), e.end()));
  }
  return {out.begin(), out.end()};
}

/// Depth-first enumeration of weight vectors with values in `candidates`, pruning as soon as a
/// fully assigned monomial disagrees with the degree fixed by earlier monomials.
template <class Visit>
void enumerate_weights(const std::vector<std::vector<int>>& monos, std::size_t n, const std::vector<int>& candidates,
                       Visit&& visit) {
  // last_var[i]: largest variable index appearing in monomial i (-1 for a constant).
  std::vector<int> last_var(monos.size(), -1);
  for (std::size_t i = 0; i < monos.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (monos[i][j] != 0) last_var[i] = static_cast<int>(j);
    }
  }
  std::vector<int> w(n, 0);
  std::function<void(std::size_t, std::optional<long>)> rec = [&](std::size_t j, std::optional<long> deg) {
    if (j == n) {
      if (deg) visit(w, *deg);
      return;
    }
    for (int c : candidates) {
      w[j] = c;
      std::optional<long> d = deg;
      bool ok = true;
      for (std::size_t i = 0; i < monos.size() && ok; ++i) {
        if (last_var[i] != static_cast<int>(j)) continue;
        long s = 0;
        for (std::size_t t = 0; t <= j; ++t) s += static_cast<long>(monos[i][t]) * w[t];
        if (!d) {
          d = s;
        } else if (*d != s) {
          ok = false;
        }
      }
      if (ok) rec(j + 1, d);
    }
  };
  // A monomial with all-zero exponents forces degree 0.
  std::optional<long> start;
  for (std::size_t i = 0; i < monos.size(); ++i) {
    if (last_var[i] < 0) start = 0;
  }
  rec(0, start);
}

}  // namespace detail

inline std::optional<RadialWeights> detect_radial_weights(const MapGerm& g, int bound = 12) {
  if (bound < 1) throw InputError("weight bound must be >= 1");
  const auto monos = detail::monomial_exponents(g.components());
  std::vector<int> candidates(static_cast<std::size_t>(bound));
  std::iota(candidates.begin(), candidates.end(), 1);
  std::optional<RadialWeights> best;
  detail::enumerate_weights(monos, g.m(), candidates, [&](const std::vector<int>& q, long d) {
    if (d <= 0 || detail::gcd_all(q) != 1) return;
    RadialWeights cand{q, static_cast<int>(d)};
    if (!best || cand.d < best->d || (cand.d == best->d && cand.q < best->q)) best = cand;
  });
  return best;
}

inline std::optional<PolarWeights> detect_polar_weights(const MixedFunction& f, int bound = 12) {
  if (bound < 1) throw InputError("weight bound must be >= 1");
  const std::size_t n = f.nvars_complex();
  std::set<std::vector<int>> diffs;
  for (const auto& [k, c] : f.terms()) {
    std::vector<int> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = static_cast<int>(k.first[j]) - static_cast<int>(k.second[j]);
    diffs.insert(d);
  }
  const std::vector<std::vector<int>> monos(diffs.begin(), diffs.end());
  std::vector<int> candidates;
  for (int v = -bound; v <= bound; ++v) {
    if (v != 0) candidates.push_back(v);
  }
  auto key = [](const PolarWeights& w) {
    int mx = 0, neg = 0;
    for (int x : w.p) {
      mx = std::max(mx, std::abs(x));
      neg += x < 0;
    }
    return std::make_tuple(w.k, mx, neg, w.p);
  };
  std::optional<PolarWeights> best;
  detail::enumerate_weights(monos, n, candidates, [&](const std::vector<int>& p, long k) {
    if (k <= 0 || detail::gcd_all(p) != 1) return;
    PolarWeights cand{p, static_cast<int>(k)};
    if (!best || key(cand) < key(*best)) best = cand;
  });
  return best;
}

/// Checks ||G(t.x) - t^d G(x)|| < 1e-10 (1 + ||G(t.x)||) on random t in [0.1, 2], x in [-1, 1]^m.
inline bool verify_radial_action(const MapGerm& g, const RadialWeights& w, int trials, std::uint64_t seed = 7,
                                 double tol = 1e-10) {
  if (w.q.size() != g.m()) return false;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.1, 2.0), ux(-1.0, 1.0);
  const auto m = static_cast<Eigen::Index>(g.m());
  for (int t = 0; t < trials; ++t) {
    const double s = ut(rng);
    Vector x(m), tx(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      x[i] = ux(rng);
      tx[i] = std::pow(s, w.q[static_cast<std::size_t>(i)]) * x[i];
    }
    const Vector gtx = g.eval(tx);
    const Vector scaled = std::pow(s, w.d) * g.eval(x);
    if (!((gtx - scaled).norm() < tol * (1.0 + gtx.norm()))) return false;
  }
  return true;
}

/// Checks |F(lambda.z) - lambda^k F(z)| < 1e-10 (1 + |F(z)|) for random lambda on S^1.
inline bool verify_polar_action(const MixedFunction& f, const PolarWeights& w, int trials, std::uint64_t seed = 11,
                                double tol = 1e-10) {
  const std::size_t n = f.nvars_complex();
  if (w.p.size() != n) return false;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI), ur(0.0, 1.0);
  std::vector<std::complex<double>> z(n), lz(n);
  for (int t = 0; t < trials; ++t) {
    const std::complex<double> lambda = std::polar(1.0, angle(rng));
    for (std::size_t j = 0; j < n; ++j) {
      z[j] = std::polar(ur(rng), angle(rng));
      lz[j] = std::pow(lambda, w.p[j]) * z[j];
    }
    const auto fz = f.eval(z);
    const auto flz = f.eval(lz);
    if (!(std::abs(flz - std::pow(lambda, w.k) * fz) < tol * (1.0 + std::abs(fz)))) return false;
  }
  return true;
}

/// The Euler field gamma(x) = (q1 x1, ..., qm xm).
inline PolyVector euler_field(const RadialWeights& w) {
  const std::size_t m = w.q.size();
  std::vector<Polynomial> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(Rational(w.q[i]) * Polynomial::variable(m, i));
  return PolyVector(std::move(out));
}

}  // namespace germfib
