#pragma once

// Numerical machinery on determinantal varieties: the Milnor-set systems,
// Gauss-Newton projection, seeded witness sampling on spheres and annuli,
// and single-linkage clustering of witness points.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <algorithm>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "germfib/germ.hpp"
#include "germfib/linalg.hpp"
#include "germfib/system.hpp"

namespace germfib {

/// Rank-deficiency locus of (grad rho, grad G_1, ..., grad G_p): the rho-nonregular points.
inline DeterminantalSystem milnor_set_system(const MapGerm& g) {
  if (g.m() < g.p() + 1) throw UnsupportedError("the Milnor set needs m >= p + 1");
  std::vector<PolyVector> rows;
  rows.push_back(gradient(distance_squared(g.m())));
  for (const auto& r : g.jacobian()) rows.push_back(r);
  auto minors = maximal_minors(rows);
  return DeterminantalSystem("milnor", g.m(), std::move(minors), RankSpec{rows, g.p()});
}

/// Points where grad rho lies in the span of the normal fields Omega_{jk}: the rho-nonregular
/// locus of Psi_G = G/||G|| once {G = 0} is removed. Equations are the p x p minors of the
/// stacked rows (grad rho, Omega_12, ...); the rank test compares against p - 1.
inline DeterminantalSystem psi_milnor_set_system(const MapGerm& g, std::size_t max_equations = 20000) {
  if (g.p() < 2) throw UnsupportedError("M(Psi_G) needs p >= 2");
  std::vector<PolyVector> rows;
  rows.push_back(gradient(distance_squared(g.m())));
  for (const auto& w : g.normal_fields().omegas) rows.push_back(w);
  const std::size_t p = g.p();
  std::size_t count = combinations(rows.size(), p).size() * combinations(g.m(), p).size();
  if (count > max_equations) {
    throw UnsupportedError("M(Psi_G) minor count " + std::to_string(count) + " exceeds the configured limit");
  }
  auto minors = minors_of_size(rows, p);
  return DeterminantalSystem("psi_milnor", g.m(), std::move(minors), RankSpec{rows, p - 1});
}

// --------------------------------------------------------------------------------------------
// Newton projection

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 50;
  double trust_radius = std::numeric_limits<double>::infinity();
  int polish_steps = 2;
  double svd_threshold = 1e-12;
};

enum class NewtonStatus { converged, max_iterations, stalled, left_trust_region, not_finite };

inline const char* to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::converged: return "converged";
    case NewtonStatus::max_iterations: return "max_iterations";
    case NewtonStatus::stalled: return "stalled";
    case NewtonStatus::left_trust_region: return "left_trust_region";
    case NewtonStatus::not_finite: return "not_finite";
  }
  return "unknown";
}

struct NewtonResult {
  NewtonStatus status = NewtonStatus::max_iterations;
  Vector x;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;

  bool converged() const noexcept { return status == NewtonStatus::converged; }
};

/// Gauss-Newton with minimum-norm steps: for underdetermined systems each step moves to the
/// nearest point of the linearized variety. Failure is reported through the status, never thrown.
inline NewtonResult newton_project(const DeterminantalSystem& system, const Vector& x0, const NewtonOptions& opts = {}) {
  if (static_cast<std::size_t>(x0.size()) != system.nvars()) throw InputError("starting point has wrong dimension");
  NewtonResult out;
  out.x = x0;
  if (!x0.allFinite()) {
    out.status = NewtonStatus::not_finite;
    return out;
  }
  Vector r = system.residuals(out.x);
  out.residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  if (out.residual < opts.tol) {
    out.status = NewtonStatus::converged;
    return out;
  }

  // Rows are equilibrated by their gradient norms at the current point, so equations of very
  // different degree (minors against the sphere) carry comparable weight near the origin.
  auto row_weights = [&](const Matrix& j) {
    Vector w(j.rows());
    for (Eigen::Index i = 0; i < j.rows(); ++i) {
      const double n = j.row(i).norm();
      w[i] = n > 0.0 ? 1.0 / n : 1.0;
    }
    return w;
  };
  auto step = [&](const Matrix& j, const Vector& w, const Vector& res) -> Vector {
    const Matrix jw = w.asDiagonal() * j;
    Eigen::JacobiSVD<Matrix> svd(jw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(opts.svd_threshold);
    return svd.solve(-(w.asDiagonal() * res));
  };

  for (int it = 1; it <= opts.max_iter; ++it) {
    const Matrix j = system.jacobian(out.x);
    const Vector w = row_weights(j);
    const Vector dx = step(j, w, r);
    const double merit = (w.asDiagonal() * r).norm();
    double t = 1.0;
    Vector trial = out.x + dx;
    Vector rt = system.residuals(trial);
    while (!((w.asDiagonal() * rt).norm() < merit) && t > 1.0 / 1024.0) {
      t *= 0.5;
      trial = out.x + t * dx;
      rt = system.residuals(trial);
    }
    out.iterations = it;
    if (!trial.allFinite()) {
      out.status = NewtonStatus::not_finite;
      return out;
    }
    if (!((w.asDiagonal() * rt).norm() < merit)) {
      out.status = NewtonStatus::stalled;
      return out;
    }
    out.x = trial;
    r = rt;
    out.residual = r.cwiseAbs().maxCoeff();
    if ((out.x - x0).norm() > opts.trust_radius) {
      out.status = NewtonStatus::left_trust_region;
      return out;
    }
    if (out.residual < opts.tol) {
      for (int k = 0; k < opts.polish_steps; ++k) {
        const Matrix jp = system.jacobian(out.x);
        const Vector wp = row_weights(jp);
        const Vector y = out.x + step(jp, wp, r);
        const Vector ry = system.residuals(y);
        if (!((wp.asDiagonal() * ry).norm() < (wp.asDiagonal() * r).norm()) || (y - x0).norm() > opts.trust_radius) break;
        out.x = y;
        r = ry;
      }
      out.residual = r.cwiseAbs().maxCoeff();
      out.status = NewtonStatus::converged;
      return out;
    }
  }
  out.status = NewtonStatus::max_iterations;
  return out;
}

// --------------------------------------------------------------------------------------------
// Witness sampling

/// Deterministic per-task seed from a base seed and a task index.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return splitmix(seed ^ splitmix(stream));
}

inline Vector random_unit_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vector v(dim);
  do {
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = n01(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

struct Region {
  double inner = 0.0;
  double outer = 0.0;

  static Region sphere(double r) { return {r, r}; }
  static Region annulus(double a, double b) { return {a, b}; }
  bool is_sphere() const noexcept { return inner == outer; }
};

struct WitnessPoint {
  Vector x;
  double residual = 0.0;
  double radius = 0.0;
  int component = -1;
  bool excluded = false;
  /// Distance to G^{-1}(Disc G) relative to radius, when an exclusion oracle was supplied.
  double disc_distance = std::numeric_limits<double>::infinity();
};

struct SamplingDiagnostics {
  std::size_t attempted = 0;
  std::size_t converged = 0;
  std::size_t outside_region = 0;
  bool trivially_empty = false;
};

struct WitnessSet {
  std::size_t nvars = 0;
  std::vector<WitnessPoint> points;
  SamplingDiagnostics diagnostics;

  std::size_t retained_count() const {
    return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const WitnessPoint& w) { return !w.excluded; }));
  }
};

/// Relative distance to the excluded set plus the margin below which a point is excluded.
struct Exclusion {
  std::function<double(const Vector&)> relative_distance;
  double margin = 0.0;
};

/// n Newton projections from seeded random points: on a sphere region the sphere equation is
/// added to the system; on an annulus converged points are filtered by radius.
inline WitnessSet witness_sample(const DeterminantalSystem& system, Region region, std::size_t n, std::uint64_t seed,
                                 NewtonOptions opts = {}, const std::optional<Exclusion>& exclusion = std::nullopt) {
  if (n < 1) throw InputError("witness_sample needs n >= 1");
  if (!(region.outer > 0.0) || region.inner > region.outer || region.inner < 0.0) throw InputError("invalid sampling region");
  WitnessSet ws;
  ws.nvars = system.nvars();
  if (system.trivially_empty()) {
    ws.diagnostics.trivially_empty = true;
    return ws;
  }
  const auto dim = static_cast<Eigen::Index>(system.nvars());
  const DeterminantalSystem target =
      region.is_sphere() ? system.with_equations({sphere_equation(system.nvars(), region.outer)}, "@sphere") : system;
  if (!std::isfinite(opts.trust_radius)) opts.trust_radius = 2.0 * region.outer;

  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    double rad = region.outer;
    if (!region.is_sphere()) rad = std::uniform_real_distribution<double>(region.inner, region.outer)(rng);
    const Vector x0 = rad * random_unit_vector(rng, dim);
    ++ws.diagnostics.attempted;
    const auto res = newton_project(target, x0, opts);
    if (!res.converged()) continue;
    ++ws.diagnostics.converged;
    const double radius = res.x.norm();
    if (!region.is_sphere() && (radius < region.inner || radius > region.outer)) {
      ++ws.diagnostics.outside_region;
      continue;
    }
    WitnessPoint w;
    w.x = res.x;
    w.residual = system.max_residual(res.x);
    w.radius = radius;
    if (exclusion) {
      w.disc_distance = exclusion->relative_distance(res.x);
      w.excluded = w.disc_distance < exclusion->margin;
    }
    ws.points.push_back(std::move(w));
  }
  return ws;
}

/// Single-linkage clustering of the non-excluded points: an edge joins two points closer than
/// link_scale times the band radius. Ids are ordered by each component's lexicographically
/// smallest point, so the labelling does not depend on point order.
inline WitnessSet cluster_components(WitnessSet ws, double link_scale) {
  std::vector<std::size_t> idx;
  double band = 0.0;
  for (std::size_t i = 0; i < ws.points.size(); ++i) {
    ws.points[i].component = -1;
    if (!ws.points[i].excluded) {
      idx.push_back(i);
      band = std::max(band, ws.points[i].radius);
    }
  }
  if (idx.empty()) return ws;
  const double link = link_scale * band;

  std::vector<std::size_t> parent(idx.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if ((ws.points[idx[a]].x - ws.points[idx[b]].x).norm() < link) parent[find(a)] = find(b);
    }
  }

  auto lex_less = [](const Vector& u, const Vector& v) {
    return std::lexicographical_compare(u.data(), u.data() + u.size(), v.data(), v.data() + v.size());
  };
  std::map<std::size_t, std::size_t> rep;  // root -> index (into idx) of smallest point
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const auto root = find(a);
    auto it = rep.find(root);
    if (it == rep.end() || lex_less(ws.points[idx[a]].x, ws.points[idx[it->second]].x)) rep[root] = a;
  }
  std::vector<std::pair<std::size_t, std::size_t>> order(rep.begin(), rep.end());
  std::sort(order.begin(), order.end(), [&](const auto& u, const auto& v) {
    return lex_less(ws.points[idx[u.second]].x, ws.points[idx[v.second]].x);
  });
  std::map<std::size_t, int> id;
  for (std::size_t k = 0; k < order.size(); ++k) id[order[k].first] = static_cast<int>(k);
  for (std::size_t a = 0; a < idx.size(); ++a) ws.points[idx[a]].component = id[find(a)];
  return ws;
}

inline std::size_t component_count(const WitnessSet& ws) {
  int top = -1;
  for (const auto& w : ws.points) top = std::max(top, w.component);
  return static_cast<std::size_t>(top + 1);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with header x1,...,xm,residual,radius,component,excluded.
inline void write_witness_csv(std::ostream& os, const WitnessSet& ws) {
  for (std::size_t i = 0; i < ws.nvars; ++i) os << "x" << i + 1 << ",";
  os << "residual,radius,component,excluded\n";
  for (const auto& w : ws.points) {
    for (Eigen::Index i = 0; i < w.x.size(); ++i) os << format_double(w.x[i]) << ",";
    os << format_double(w.residual) << "," << format_double(w.radius) << "," << w.component << ","
       << (w.excluded ? 1 : 0) << "\n";
  }
}

}  // namespace germfib
