#pragma once

// The Milnor vector field and its flow.
//
// On the fibre X_y = Psi_G^{-1}(y) the tangent space is the orthogonal complement of the
// normal fields Omega_{jk}. With v1, v2 the tangential parts of grad ||G||^2 and grad rho,
// the bisector nu = v1/|v1| + v2/|v2| is tangent to X_y and increases both ||G||^2 and rho
// wherever v1 and v2 do not point in opposite directions. Integrating nu carries the tube
// fibre {G = eta y} out to the sphere fibre {Psi_G = y, |x| = eps}.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "germfib/discriminant.hpp"
#include "germfib/germ.hpp"
#include "germfib/linalg.hpp"
#include "germfib/report.hpp"
#include "germfib/variety.hpp"

namespace germfib {

/// w minus its orthogonal projection onto span(normals).
inline Vector tangent_project(const Vector& w, const std::vector<Vector>& normals, double rel_tol = 1e-10) {
  if (normals.empty()) return w;
  const Matrix q = orthonormal_basis(normals, w.size(), rel_tol);
  Vector out = w;
  // Project twice; the second pass removes the rounding left by the first.
  for (int pass = 0; pass < 2; ++pass) out -= q * (q.transpose() * out);
  return out;
}

struct FieldFlags {
  bool on_zero_set = false;
  bool v1_zero = false;
  bool v2_zero = false;
  bool omega_rank_drop = false;

  bool any() const noexcept { return on_zero_set || v1_zero || v2_zero || omega_rank_drop; }
};

struct FieldEval {
  Vector x, v1, v2, nu;
  double a = std::numeric_limits<double>::quiet_NaN();        // least-squares coefficient
  double a_closed = std::numeric_limits<double>::quiet_NaN(); // <grad rho, v1> / |v1|^2
  std::vector<double> b;
  double residual_rho = std::numeric_limits<double>::quiet_NaN();  // relative defect of the decomposition
  std::size_t omega_rank = 0;
  FieldFlags flags;

  /// |v1|^2 |v2|^2 - <v1, v2>^2, zero iff v1 and v2 are linearly dependent.
  double gram() const { return v1.squaredNorm() * v2.squaredNorm() - std::pow(v1.dot(v2), 2); }
  /// Cosine of the angle between grad rho and v1, the scale-free sign of a(x).
  double a_cosine() const {
    const Vector grad_rho = 2.0 * x;
    const double d = grad_rho.norm() * v1.norm();
    return d > 0.0 ? grad_rho.dot(v1) / d : std::numeric_limits<double>::quiet_NaN();
  }
};

struct FieldOptions {
  double tol_zero = 1e-9;
  double rank_tol = 1e-10;   // relative threshold for the Omega span and the vanishing of v1, v2
};

inline FieldEval field_eval(const MapGerm& g, const Vector& x, const FieldOptions& opts = {}) {
  if (static_cast<std::size_t>(x.size()) != g.m()) throw InputError("field_eval: point has wrong dimension");
  FieldEval fe;
  fe.x = x;
  const Vector gx = g.eval(x);
  fe.flags.on_zero_set = !(gx.norm() > opts.tol_zero);

  const auto omegas = g.p() >= 2 ? g.omegas_at(x) : std::vector<Vector>{};
  const Vector grad_g2 = g.norm_squared_gradient_at(x);
  const Vector grad_rho = 2.0 * x;
  const Matrix q = orthonormal_basis(omegas, x.size(), opts.rank_tol);
  fe.omega_rank = static_cast<std::size_t>(q.cols());
  if (g.p() >= 2 && fe.omega_rank < g.p() - 1) fe.flags.omega_rank_drop = true;

  fe.v1 = tangent_project(grad_g2, omegas, opts.rank_tol);
  fe.v2 = tangent_project(grad_rho, omegas, opts.rank_tol);
  fe.flags.v1_zero = !(fe.v1.norm() > opts.rank_tol * grad_g2.norm()) || grad_g2.norm() == 0.0;
  fe.flags.v2_zero = !(fe.v2.norm() > opts.rank_tol * grad_rho.norm()) || grad_rho.norm() == 0.0;
  if (!fe.flags.v1_zero && !fe.flags.v2_zero) {
    fe.nu = fe.v1 / fe.v1.norm() + fe.v2 / fe.v2.norm();
  } else {
    fe.nu = Vector::Zero(x.size());
  }
  if (!fe.flags.v1_zero) fe.a_closed = grad_rho.dot(fe.v1) / fe.v1.squaredNorm();

  // grad rho = a grad ||G||^2 + sum_j b_j Omega_j, minimum-norm least squares.
  Matrix a(x.size(), static_cast<Eigen::Index>(1 + omegas.size()));
  a.col(0) = grad_g2;
  for (std::size_t j = 0; j < omegas.size(); ++j) a.col(static_cast<Eigen::Index>(j + 1)) = omegas[j];
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(opts.rank_tol);
  const Vector c = svd.solve(grad_rho);
  fe.a = c[0];
  fe.b.assign(c.data() + 1, c.data() + c.size());
  const double scale = grad_rho.norm();
  fe.residual_rho = scale > 0.0 ? (a * c - grad_rho).norm() / scale : 0.0;
  return fe;
}

// --------------------------------------------------------------------------------------------
// Fibre samples

enum class FiberKind { tube, sphere };

inline const char* to_string(FiberKind k) { return k == FiberKind::tube ? "tube" : "sphere"; }

inline FiberKind fiber_kind_from_string(const std::string& s) {
  if (s == "tube") return FiberKind::tube;
  if (s == "sphere") return FiberKind::sphere;
  throw InputError("unknown fibre kind '" + s + "' (expected tube or sphere)");
}

struct FiberPoint {
  Vector x;
  double residual = 0.0;
};

struct FiberSample {
  FiberKind kind = FiberKind::tube;
  Vector y;
  double eps = 0.0;
  double eta = 0.0;
  std::size_t nvars = 0;
  std::vector<FiberPoint> points;
  std::size_t attempts = 0;
  std::size_t converged = 0;
};

/// Cross equations y_j G_k - y_k G_j = 0 (j < k): G parallel to y.
inline std::vector<Polynomial> parallel_equations(const MapGerm& g, const Vector& y) {
  std::vector<Polynomial> eqs;
  for (std::size_t j = 0; j < g.p(); ++j) {
    for (std::size_t k = j + 1; k < g.p(); ++k) {
      eqs.push_back(Rational(y[static_cast<Eigen::Index>(j)]) * g.component(k) -
                    Rational(y[static_cast<Eigen::Index>(k)]) * g.component(j));
    }
  }
  return eqs;
}

/// {G = eta y} for the tube, {G parallel to y, |x|^2 = eps^2} for the sphere.
inline DeterminantalSystem fiber_system(const MapGerm& g, FiberKind kind, const Vector& y, double eps, double eta) {
  std::vector<Polynomial> eqs;
  if (kind == FiberKind::tube) {
    for (std::size_t i = 0; i < g.p(); ++i) {
      const Rational target = Rational(eta) * Rational(y[static_cast<Eigen::Index>(i)]);
      eqs.push_back(g.component(i) - Polynomial::constant(g.m(), target));
    }
    return DeterminantalSystem("tube_fiber", g.m(), std::move(eqs));
  }
  eqs = parallel_equations(g, y);
  eqs.push_back(sphere_equation(g.m(), eps));
  return DeterminantalSystem("sphere_fiber", g.m(), std::move(eqs));
}

/// Rejects a direction within angular_tol of a Disc ray, or a zero direction; returns y / |y|.
inline Vector checked_direction(const Vector& y, std::size_t p, const std::vector<DiscriminantRay>& rays,
                                double angular_tol) {
  if (static_cast<std::size_t>(y.size()) != p) throw InputError("target direction has wrong dimension");
  if (!(y.norm() > 0.0) || !y.allFinite()) throw InputError("target direction must be a nonzero finite vector");
  const Vector u = y / y.norm();
  const double ang = angle_to_rays(u, rays);
  if (ang <= angular_tol) {
    throw InputError("target direction lies on a discriminant ray (angle " + std::to_string(ang) + " rad)");
  }
  return u;
}

struct FiberOptions {
  double tol_zero = 1e-9;
  double angular_tol = 1e-2;
  std::size_t max_attempts_factor = 20;
  NewtonOptions newton;
};

inline FiberSample sample_fiber(const MapGerm& g, FiberKind kind, const Vector& y, double eps, double eta,
                                std::size_t n, std::uint64_t seed, const std::vector<DiscriminantRay>& rays,
                                const FiberOptions& opts = {}) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (kind == FiberKind::tube && !(eta > 0.0 && eta < eps)) throw InputError("eta must satisfy 0 < eta < eps");
  if (n < 1) throw InputError("sample_fiber needs n >= 1");
  FiberSample fs;
  fs.kind = kind;
  fs.y = checked_direction(y, g.p(), rays, opts.angular_tol);
  fs.eps = eps;
  fs.eta = eta;
  fs.nvars = g.m();
  const auto system = fiber_system(g, kind, fs.y, eps, eta);
  NewtonOptions nopts = opts.newton;
  nopts.trust_radius = std::numeric_limits<double>::infinity();
  const auto dim = static_cast<Eigen::Index>(g.m());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t max_attempts = opts.max_attempts_factor * n;
  while (fs.points.size() < n && fs.attempts < max_attempts) {
    std::mt19937_64 rng(derive_seed(seed, fs.attempts));
    ++fs.attempts;
    const Vector dir = random_unit_vector(rng, dim);
    const double r = kind == FiberKind::tube ? eps * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) : eps;
    const auto res = newton_project(system, r * dir, nopts);
    if (!res.converged()) continue;
    ++fs.converged;
    const Vector gx = g.eval(res.x);
    if (kind == FiberKind::tube) {
      if (!(res.x.norm() < eps)) continue;
    } else {
      if (!(gx.norm() > opts.tol_zero) || !(gx.dot(fs.y) > 0.0)) continue;
    }
    fs.points.push_back({res.x, system.max_residual(res.x)});
  }
  return fs;
}

// --------------------------------------------------------------------------------------------
// Blow-away flow

enum class Termination { reached_sphere, reached_max_steps, degeneracy, left_domain };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::reached_sphere: return "reached_sphere";
    case Termination::reached_max_steps: return "reached_max_steps";
    case Termination::degeneracy: return "degeneracy";
    case Termination::left_domain: return "left_domain";
  }
  return "unknown";
}

struct TrajectorySample {
  double t = 0.0;
  Vector x;
  double rho = 0.0;
  double gnorm2 = 0.0;
  Vector psi;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  Termination termination = Termination::reached_max_steps;
  std::size_t rejected_steps = 0;
  double max_drift = 0.0;  // max angle between Psi_G(x(t)) and Psi_G(x(0))
  std::string note;

  std::size_t steps() const noexcept { return samples.empty() ? 0 : samples.size() - 1; }
  bool monotone() const {
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (!(samples[i].rho > samples[i - 1].rho) || !(samples[i].gnorm2 > samples[i - 1].gnorm2)) return false;
    }
    return true;
  }
};

struct FlowOptions {
  double h0 = 0.0;          // 0 means eps / 100
  double h_max = 0.0;       // 0 means eps / 20
  double h_min = 1e-14;
  double step_drift = 1e-9; // per-step angular drift of Psi_G
  double sphere_tol = 1e-10;
  std::size_t max_steps = 20000;
  FieldOptions field;
};

namespace detail {

inline TrajectorySample trajectory_sample(const MapGerm& g, double t, const Vector& x) {
  const Vector gx = g.eval(x);
  return {t, x, x.squaredNorm(), gx.squaredNorm(), g.psi(x)};
}

/// One classical RK4 step of dx/dt = nu / |nu|; empty optional when a stage hits a degeneracy.
inline std::optional<Vector> rk4_step(const MapGerm& g, const Vector& x, double h, const FieldOptions& fo) {
  auto f = [&](const Vector& p) -> std::optional<Vector> {
    const auto fe = field_eval(g, p, fo);
    if (fe.flags.any() || !fe.nu.allFinite() || !(fe.nu.norm() > 0.0)) return std::nullopt;
    return Vector(fe.nu / fe.nu.norm());
  };
  const auto k1 = f(x);
  if (!k1) return std::nullopt;
  const auto k2 = f(x + 0.5 * h * *k1);
  if (!k2) return std::nullopt;
  const auto k3 = f(x + 0.5 * h * *k2);
  if (!k3) return std::nullopt;
  const auto k4 = f(x + h * *k3);
  if (!k4) return std::nullopt;
  return Vector(x + (h / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4));
}

}  // namespace detail

/// Integrates the normalized bisector field from x0 until |x| = eps. A step is accepted only
/// when rho and ||G||^2 both increase and Psi_G moves by less than the per-step budget.
inline Trajectory blow_away(const MapGerm& g, const Vector& x0, double eps, const FlowOptions& opts = {}) {
  if (static_cast<std::size_t>(x0.size()) != g.m()) throw InputError("blow_away: start point has wrong dimension");
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (x0.norm() > eps + opts.sphere_tol) throw InputError("blow_away: start point lies outside the ball");
  Trajectory tr;
  tr.samples.push_back(detail::trajectory_sample(g, 0.0, x0));
  if (std::abs(x0.norm() - eps) <= opts.sphere_tol) {
    tr.termination = Termination::reached_sphere;
    return tr;
  }
  const auto fe0 = field_eval(g, x0, opts.field);
  if (fe0.flags.any()) {
    tr.termination = Termination::degeneracy;
    tr.note = "start point is degenerate";
    return tr;
  }
  const Vector psi0 = tr.samples.front().psi;
  const double h_max = opts.h_max > 0.0 ? opts.h_max : eps / 20.0;
  double h = opts.h0 > 0.0 ? opts.h0 : eps / 100.0;
  Vector x = x0;
  double t = 0.0;

  for (std::size_t step = 0; step < opts.max_steps;) {
    const auto& cur = tr.samples.back();
    const auto next = detail::rk4_step(g, x, h, opts.field);
    bool ok = next.has_value() && next->allFinite();
    TrajectorySample s;
    if (ok) {
      s = detail::trajectory_sample(g, t + h, *next);
      ok = s.rho > cur.rho && s.gnorm2 > cur.gnorm2 && angle_between(s.psi, cur.psi) < opts.step_drift;
    }
    if (!ok) {
      ++tr.rejected_steps;
      h *= 0.5;
      if (h < opts.h_min) {
        tr.termination = Termination::degeneracy;
        tr.note = next ? "step size underflow" : "degenerate field along the step";
        return tr;
      }
      continue;
    }
    ++step;
    if (s.x.norm() >= eps) {
      // Bisect the step length so the endpoint lands on the sphere.
      double lo = 0.0, hi = h;
      TrajectorySample best = s;
      for (int it = 0; it < 200 && std::abs(best.x.norm() - eps) > opts.sphere_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto xm = detail::rk4_step(g, x, mid, opts.field);
        if (!xm) break;
        const auto sm = detail::trajectory_sample(g, t + mid, *xm);
        if (sm.x.norm() < eps) {
          lo = mid;
          if (eps - sm.x.norm() < std::abs(best.x.norm() - eps)) best = sm;
        } else {
          hi = mid;
          best = sm;
        }
        if (hi - lo < 1e-18) break;
      }
      if (!(best.rho > cur.rho && best.gnorm2 > cur.gnorm2)) {
        tr.termination = Termination::degeneracy;
        tr.note = "monotonicity lost while landing on the sphere";
        return tr;
      }
      tr.samples.push_back(best);
      tr.max_drift = std::max(tr.max_drift, angle_between(best.psi, psi0));
      tr.termination = std::abs(best.x.norm() - eps) <= opts.sphere_tol ? Termination::reached_sphere
                                                                          : Termination::degeneracy;
      if (tr.termination == Termination::degeneracy) tr.note = "sphere crossing could not be resolved";
      return tr;
    }
    tr.samples.push_back(s);
    tr.max_drift = std::max(tr.max_drift, angle_between(s.psi, psi0));
    x = s.x;
    t = s.t;
    h = std::min(h * 1.5, h_max);
  }
  tr.termination = Termination::reached_max_steps;
  return tr;
}

// --------------------------------------------------------------------------------------------
// Export

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, std::size_t m, std::size_t p) {
  os << "t";
  for (std::size_t i = 0; i < m; ++i) os << ",x" << i + 1;
  os << ",rho,gnorm2";
  for (std::size_t i = 0; i < p; ++i) os << ",psi_" << i + 1;
  os << "\n";
  for (const auto& s : tr.samples) {
    os << format_double(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) os << "," << format_double(s.x[i]);
    os << "," << format_double(s.rho) << "," << format_double(s.gnorm2);
    for (Eigen::Index i = 0; i < s.psi.size(); ++i) os << "," << format_double(s.psi[i]);
    os << "\n";
  }
}

inline void write_fiber_csv(std::ostream& os, const FiberSample& fs) {
  for (std::size_t i = 0; i < fs.nvars; ++i) os << "x" << i + 1 << ",";
  os << "residual\n";
  for (const auto& pt : fs.points) {
    for (Eigen::Index i = 0; i < pt.x.size(); ++i) os << format_double(pt.x[i]) << ",";
    os << format_double(pt.residual) << "\n";
  }
}

/// ASCII PLY point cloud; only meaningful for m = 3.
inline void write_fiber_ply(std::ostream& os, const FiberSample& fs) {
  if (fs.nvars != 3) throw UnsupportedError("PLY export needs m = 3 (got m = " + std::to_string(fs.nvars) + ")");
  os << "ply\nformat ascii 1.0\n";
  os << "comment " << to_string(fs.kind) << " fibre\n";
  os << "element vertex " << fs.points.size() << "\n";
  os << "property double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& pt : fs.points) {
    os << format_double(pt.x[0]) << " " << format_double(pt.x[1]) << " " << format_double(pt.x[2]) << "\n";
  }
}

// --------------------------------------------------------------------------------------------
// Tube-to-sphere evidence

struct EquivalenceOptions {
  double drift_tol = 1e-6;
  double sphere_residual_tol = 1e-6;
  FiberOptions fiber;
  FlowOptions flow;
};

struct EquivalenceRun {
  ConditionReport report;
  FiberSample tube;
  std::vector<Trajectory> trajectories;
};

/// Blows n tube-fibre points over y out to the sphere and checks that each lands on the
/// sphere fibre over the same y.
inline EquivalenceRun equivalence_evidence(const MapGerm& g, const Vector& y, double eps, double eta, std::size_t n,
                                           std::uint64_t seed, const DiscriminantSample& ds,
                                           const EquivalenceOptions& opts = {}) {
  EquivalenceRun run;
  auto& rep = run.report;
  rep.condition = ConditionId::equivalence_evidence;
  rep.seed = seed;
  rep.tolerances = {{"drift_tol", opts.drift_tol},
                    {"sphere_residual_tol", opts.sphere_residual_tol},
                    {"angular_tol", opts.fiber.angular_tol},
                    {"step_drift", opts.flow.step_drift}};
  const Vector u = checked_direction(y, g.p(), ds.rays, opts.fiber.angular_tol);
  const int arc = arc_of(ds, u);
  rep.scope = "arc " + std::to_string(arc);
  rep.evidence["y"] = std::vector<double>(u.data(), u.data() + u.size());
  rep.evidence["arc"] = arc;
  rep.evidence["eps"] = eps;
  rep.evidence["eta"] = eta;

  run.tube = sample_fiber(g, FiberKind::tube, u, eps, eta, n, derive_seed(seed, 1), ds.rays, opts.fiber);
  rep.evidence["tube_points"] = run.tube.points.size();
  if (run.tube.points.empty()) {
    const auto sphere =
        sample_fiber(g, FiberKind::sphere, u, eps, eta, std::max<std::size_t>(n / 5, 5), derive_seed(seed, 2), ds.rays,
                     opts.fiber);
    rep.evidence["sphere_points"] = sphere.points.size();
    if (sphere.points.empty()) {
      rep.verdict = Verdict::pass;
      rep.evidence["vacuous"] = true;
      rep.evidence["note"] = "tube and sphere fibres over y are both empty: y lies outside the image near 0";
    } else {
      rep.verdict = Verdict::inconclusive;
      rep.evidence["note"] = "no tube-fibre point found although the sphere fibre is nonempty";
    }
    return run;
  }

  const auto sphere_sys = fiber_system(g, FiberKind::sphere, u, eps, eta);
  std::size_t reached = 0, degenerate = 0, monotone = 0;
  double max_drift = 0.0, max_res = 0.0, max_norm_gap = 0.0;
  std::size_t total_steps = 0;
  Json dumps = Json::array();
  for (const auto& pt : run.tube.points) {
    auto tr = blow_away(g, pt.x, eps, opts.flow);
    total_steps += tr.steps();
    if (tr.monotone()) ++monotone;
    if (tr.termination == Termination::reached_sphere) {
      ++reached;
      const Vector& xe = tr.samples.back().x;
      max_res = std::max(max_res, sphere_sys.max_residual(xe));
      max_norm_gap = std::max(max_norm_gap, std::abs(xe.norm() - eps));
      max_drift = std::max(max_drift, tr.max_drift);
      if (!(g.eval(xe).dot(u) > 0.0)) max_res = std::max(max_res, 1.0);
    } else {
      ++degenerate;
      if (dumps.size() < 3) {
        Json d;
        d["termination"] = to_string(tr.termination);
        d["note"] = tr.note;
        d["steps"] = tr.steps();
        d["last_x"] = std::vector<double>(tr.samples.back().x.data(), tr.samples.back().x.data() + g.m());
        dumps.push_back(d);
      }
    }
    run.trajectories.push_back(std::move(tr));
  }
  rep.evidence["trajectories"] = run.tube.points.size();
  rep.evidence["reached_sphere"] = reached;
  rep.evidence["monotone"] = monotone;
  rep.evidence["max_drift"] = max_drift;
  rep.evidence["max_sphere_residual"] = max_res;
  rep.evidence["max_radius_gap"] = max_norm_gap;
  rep.evidence["mean_steps"] = static_cast<double>(total_steps) / static_cast<double>(run.tube.points.size());
  if (!dumps.empty()) rep.evidence["degenerate_trajectories"] = dumps;

  if (monotone != run.trajectories.size()) {
    throw InvariantViolation("accepted flow steps must increase rho and ||G||^2");
  }
  const bool robust_bad = max_drift > 10.0 * opts.drift_tol || max_res > 10.0 * opts.sphere_residual_tol;
  const bool within = max_drift < opts.drift_tol && max_res < opts.sphere_residual_tol;
  if (robust_bad && reached > 0) {
    rep.verdict = Verdict::fail;
  } else if (degenerate > 0 || !within) {
    rep.verdict = Verdict::inconclusive;
  } else {
    rep.verdict = Verdict::pass;
  }
  return run;
}

}  // namespace germfib
