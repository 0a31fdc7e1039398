#pragma once

// Numerical checks of the fibration hypotheses. Each check returns a ConditionReport whose
// verdict is "fail" only on a robust counterexample and "inconclusive" on anything marginal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "germfib/config.hpp"
#include "germfib/discriminant.hpp"
#include "germfib/germ.hpp"
#include "germfib/homogeneity.hpp"
#include "germfib/mvf.hpp"
#include "germfib/report.hpp"
#include "germfib/variety.hpp"

namespace germfib {

inline Json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Json to_json(const RadialWeights& w) { return Json{{"q", w.q}, {"d", w.d}}; }
inline Json to_json(const PolarWeights& w) { return Json{{"p", w.p}, {"k", w.k}}; }

inline ConditionReport not_applicable(ConditionId c, const std::string& reason, std::uint64_t seed = 0) {
  ConditionReport r;
  r.condition = c;
  r.verdict = Verdict::inconclusive;
  r.seed = seed;
  r.evidence = {{"applicable", false}, {"reason", reason}};
  return r;
}

inline NewtonOptions newton_options(const Config& cfg) {
  NewtonOptions o;
  o.tol = cfg.tol_variety;
  return o;
}

inline DiscriminantOptions discriminant_options(const Config& cfg) {
  DiscriminantOptions o;
  o.sing_seeds = static_cast<std::size_t>(cfg.sing_seeds);
  o.zero_seeds = static_cast<std::size_t>(cfg.zero_seeds);
  o.tol_zero = cfg.tol_zero;
  o.bin_tol = cfg.disc_bin_tol;
  o.newton = newton_options(cfg);
  return o;
}

// --------------------------------------------------------------------------------------------
// Witnesses on a radius ladder

struct RungWitnesses {
  double radius = 0.0;
  WitnessSet ws;
};

/// Witness sets of `system` on the spheres of the ladder, each point tagged with its relative
/// distance to G^-1(Disc G) and excluded below `margin`.
inline std::vector<RungWitnesses> sample_ladder(const DeterminantalSystem& system, const std::vector<double>& ladder,
                                                std::size_t n, std::uint64_t seed, const NewtonOptions& opts,
                                                const PreimageOracle& oracle, double margin) {
  std::vector<RungWitnesses> out;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    out.push_back({ladder[k], witness_sample(system, Region::sphere(ladder[k]), n, derive_seed(seed, k), opts,
                                             oracle.exclusion(margin))});
  }
  return out;
}

/// The same witnesses with exclusion recomputed for another margin.
inline WitnessSet with_margin(WitnessSet ws, double margin) {
  for (auto& w : ws.points) w.excluded = w.disc_distance < margin;
  return ws;
}

// --------------------------------------------------------------------------------------------
// Weighted homogeneity

inline ConditionReport check_radial_homogeneity(const MapGerm& g, const Config& cfg,
                                                std::optional<RadialWeights>* out = nullptr) {
  ConditionReport r;
  r.condition = ConditionId::radial_homogeneous;
  r.tolerances = {{"weight_bound", cfg.weight_bound}, {"trials", cfg.weight_trials}, {"action_tol", 1e-10}};
  const auto w = detect_radial_weights(g, cfg.weight_bound);
  if (out) *out = w;
  if (!w) {
    r.evidence["weights"] = nullptr;
    r.evidence["note"] = "no positive integer weights up to the search bound";
    return r;
  }
  const bool ok = verify_radial_action(g, *w, cfg.weight_trials);
  r.evidence["weights"] = to_json(*w);
  r.evidence["action_verified"] = ok;
  if (g.origin()) r.evidence["note"] = "detected on the realified components";
  // Exact detection plus a failed numeric action check means a bug, not a property of G.
  if (!ok) throw InvariantViolation("detected radial weights fail the action check");
  r.verdict = Verdict::pass;
  return r;
}

inline ConditionReport check_polar_homogeneity(const MapGerm& g, const Config& cfg,
                                               std::optional<PolarWeights>* out = nullptr) {
  if (!g.origin()) return not_applicable(ConditionId::polar_homogeneous, "germ has no mixed-function form");
  ConditionReport r;
  r.condition = ConditionId::polar_homogeneous;
  r.tolerances = {{"weight_bound", cfg.weight_bound}, {"trials", cfg.weight_trials}, {"action_tol", 1e-10}};
  const auto& F = g.origin()->F;
  const auto w = detect_polar_weights(F, cfg.weight_bound);
  if (out) *out = w;
  if (!w) {
    r.evidence["weights"] = nullptr;
    r.evidence["note"] = "no polar weights with k > 0 up to the search bound";
    return r;
  }
  const bool ok = verify_polar_action(F, *w, cfg.weight_trials);
  if (!ok) throw InvariantViolation("detected polar weights fail the action check");
  r.evidence["weights"] = to_json(*w);
  r.evidence["action_verified"] = ok;
  r.verdict = Verdict::pass;
  return r;
}

// --------------------------------------------------------------------------------------------
// Niceness and the discriminant

/// Sufficient criteria only; never fails.
inline ConditionReport check_niceness(const MapGerm& g, const DiscriminantSample& ds,
                                      const std::optional<RadialWeights>& radial, std::uint64_t seed = 0) {
  ConditionReport r;
  r.condition = ConditionId::nice;
  r.seed = seed;
  Json criteria = Json::object();
  criteria["zero_set_point_off_sing"] = ds.submersive_zero_point;
  const bool coprime_pair = g.origin() && g.origin()->f && g.has_flag("coprime");
  criteria["declared_coprime_pair"] = coprime_pair;
  criteria["radial_weights"] = radial.has_value();
  r.evidence["criteria"] = criteria;
  if (ds.submersive_zero_point || coprime_pair || radial) {
    r.verdict = Verdict::pass;
  } else {
    r.evidence["note"] = "no sufficient criterion verified; niceness is not decided here";
  }
  return r;
}

/// Hausdorff distance between two finite sets of unit vectors, in radians (pi if one is empty
/// and the other is not, 0 if both are empty).
inline double angular_hausdorff(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return M_PI;
  auto directed = [](const std::vector<Vector>& u, const std::vector<Vector>& v) {
    double worst = 0.0;
    for (const auto& x : u) {
      double best = M_PI;
      for (const auto& y : v) best = std::min(best, angle_between(x, y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

inline Json to_json(const DiscriminantSample& ds) {
  Json rays = Json::array();
  for (const auto& ray : ds.rays) {
    const auto [lo, hi] = std::minmax_element(ray.radii.begin(), ray.radii.end());
    rays.push_back({{"direction", to_json(ray.direction)},
                    {"count", ray.radii.size()},
                    {"radius_min", *lo},
                    {"radius_max", *hi},
                    {"rungs", ray.rungs}});
  }
  return Json{{"rays", rays},
              {"origin_only", ds.origin_only},
              {"origin_singular", ds.origin_singular},
              {"empty", ds.empty()},
              {"boundary_status", to_string(ds.boundary_status)},
              {"sing_witnesses", ds.sing_witnesses},
              {"zero_images", ds.zero_images},
              {"ladder", ds.ladder}};
}

inline ConditionReport check_radial_discriminant(const DiscriminantSample& ds, double angular_tol = 1e-2,
                                                 std::uint64_t seed = 0) {
  ConditionReport r;
  r.condition = ConditionId::radial_disc;
  r.seed = seed;
  r.tolerances = {{"angular_tol", angular_tol}};
  r.evidence["discriminant"] = to_json(ds);
  if (ds.boundary_status == BoundaryStatus::not_computed) {
    r.evidence["caveat"] = "boundary of the image not computed; radiality judged on G(Sing G) only";
  }
  if (ds.origin_only) {
    r.verdict = Verdict::pass;
    r.evidence["note"] = "Disc G is the origin";
    return r;
  }
  if (ds.empty()) {
    r.verdict = Verdict::pass;
    r.evidence["note"] = "Disc G is empty near the origin";
    return r;
  }
  if (ds.rung_directions.size() < 2) {
    r.evidence["note"] = "radiality needs at least two rungs";
    return r;
  }
  double worst = 0.0;
  Json per_pair = Json::array();
  for (std::size_t k = 0; k + 1 < ds.rung_directions.size(); ++k) {
    const double h = angular_hausdorff(ds.rung_directions[k], ds.rung_directions[k + 1]);
    per_pair.push_back(h);
    worst = std::max(worst, h);
  }
  r.evidence["hausdorff_by_rung_pair"] = per_pair;
  r.evidence["hausdorff_max"] = worst;
  bool rays_repeat = true;
  for (const auto& ray : ds.rays) rays_repeat = rays_repeat && ray.radii.size() >= 2;
  if (worst < angular_tol && rays_repeat) {
    r.verdict = Verdict::pass;
  } else if (worst > 10.0 * angular_tol) {
    r.verdict = Verdict::fail;
  }
  return r;
}

// --------------------------------------------------------------------------------------------
// The main condition: closure(M(G) \ G^-1(Disc G)) meets V_G only at the origin

inline ConditionReport check_condition_main(const MapGerm& g, const std::vector<RungWitnesses>& milnor,
                                            const Config& cfg, std::uint64_t seed = 0) {
  ConditionReport r;
  r.condition = ConditionId::cond_main;
  r.seed = seed;
  r.tolerances = {{"ratio_floor", cfg.cond_main_ratio}, {"exclusion_margin", cfg.strict_margin},
                  {"tol_variety", cfg.tol_variety}};
  const auto zero = zero_set_system(g);
  NewtonOptions opts = newton_options(cfg);
  opts.trust_radius = std::numeric_limits<double>::infinity();

  const std::size_t min_witnesses = 10;
  Json rungs = Json::array();
  std::size_t total = 0, retained_total = 0, informative = 0, robust_small = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  bool all_above = true;
  for (const auto& rw : milnor) {
    double delta = std::numeric_limits<double>::infinity();
    std::size_t retained = 0;
    for (const auto& w : rw.ws.points) {
      if (w.excluded) continue;
      ++retained;
      const auto res = newton_project(zero, w.x, opts);
      if (res.converged()) delta = std::min(delta, (res.x - w.x).norm());
    }
    total += rw.ws.points.size();
    retained_total += retained;
    const double ratio = delta / rw.radius;
    rungs.push_back({{"radius", rw.radius},
                     {"witnesses", rw.ws.points.size()},
                     {"retained", retained},
                     {"delta", std::isfinite(delta) ? Json(delta) : Json(nullptr)},
                     {"ratio", std::isfinite(ratio) ? Json(ratio) : Json(nullptr)}});
    if (retained >= min_witnesses) {
      ++informative;
      min_ratio = std::min(min_ratio, ratio);
      if (!(ratio >= cfg.cond_main_ratio)) all_above = false;
      if (ratio < 0.1 * cfg.cond_main_ratio) ++robust_small;
    }
  }
  r.evidence["rungs"] = rungs;
  r.evidence["closure_note"] = "closure approximated by sampling at shrinking radii; evidence, not proof";
  if (std::isfinite(min_ratio)) r.evidence["min_ratio"] = min_ratio;
  if (retained_total == 0) {
    r.verdict = Verdict::pass;
    r.evidence["vacuous"] = true;
    r.evidence["note"] = total == 0 ? "no Milnor-set witnesses near the origin"
                                    : "every Milnor-set witness lies on G^-1(Disc G)";
    return r;
  }
  if (robust_small >= 2) {
    r.verdict = Verdict::fail;
  } else if (informative == milnor.size() && all_above) {
    r.verdict = Verdict::pass;
  } else if (informative < milnor.size()) {
    r.evidence["note"] = "too few retained witnesses at some rungs";
  }
  return r;
}

// --------------------------------------------------------------------------------------------
// rho-regularity of Psi_G: M(Psi_G) inside G^-1(Disc G)

/// p-th over largest singular value of (grad rho / |grad rho|, Omega_jk / (|G| ||dG||)), a
/// scale-free measure of how far x is from M(Psi_G). Omega is scaled jointly rather than row by
/// row, so points where Omega vanishes count as members instead of amplifying rounding noise.
inline double psi_rank_defect(const MapGerm& g, const Vector& x) {
  std::vector<Vector> rows;
  const Vector gr = 2.0 * x;
  if (gr.norm() > 0) rows.push_back(gr / gr.norm());
  const double scale = g.eval(x).norm() * g.jacobian_at(x).norm();
  if (scale > 0.0) {
    for (const auto& w : g.omegas_at(x)) rows.push_back(w / scale);
  }
  const auto k = static_cast<Eigen::Index>(g.p()) - 1;  // index of the p-th singular value
  if (static_cast<Eigen::Index>(rows.size()) <= k) return 0.0;
  const Vector s = singular_values(stack_rows(rows, x.size()));
  if (s.size() <= k || s[0] == 0.0) return 0.0;
  return s[k] / s[0];
}

inline ConditionReport check_rho_regularity_psi(const MapGerm& g, const std::vector<RungWitnesses>& psi_witnesses,
                                                const DiscriminantSample& ds, const Config& cfg,
                                                std::uint64_t seed = 0) {
  ConditionReport r;
  r.condition = ConditionId::rho_regular_psi;
  r.seed = seed;
  r.tolerances = {{"angular_tol", cfg.angular_tol}, {"zero_guard", cfg.rho_guard},
                  {"tol_variety", cfg.tol_variety}, {"rank_defect", 1e-8}};
  std::size_t total = 0, guarded = 0, nonrobust = 0, checked = 0, marginal = 0, violations = 0;
  double worst = 0.0;
  Json examples = Json::array();
  Json rungs = Json::array();
  for (const auto& rw : psi_witnesses) {
    std::size_t rung_checked = 0;
    for (const auto& w : rw.ws.points) {
      ++total;
      const Vector gx = g.eval(w.x);
      if (!(gx.norm() > cfg.rho_guard)) {
        ++guarded;
        continue;
      }
      if (!(w.residual < cfg.tol_variety) || psi_rank_defect(g, w.x) > 1e-8) {
        ++nonrobust;
        continue;
      }
      ++checked;
      ++rung_checked;
      const double ang = angle_to_rays(gx / gx.norm(), ds.rays);
      if (ang <= cfg.angular_tol) {
        worst = std::max(worst, ang);
        continue;
      }
      worst = std::max(worst, ang);
      if (ang > 10.0 * cfg.angular_tol) {
        ++violations;
        if (examples.size() < 5) examples.push_back({{"x", to_json(w.x)}, {"psi", to_json(gx / gx.norm())}, {"angle", ang}});
      } else {
        ++marginal;
      }
    }
    rungs.push_back({{"radius", rw.radius}, {"witnesses", rw.ws.points.size()}, {"checked", rung_checked}});
  }
  r.evidence = {{"witnesses", total},      {"on_zero_set", guarded}, {"not_robust", nonrobust},
                {"checked", checked},      {"marginal", marginal},   {"violations", violations},
                {"max_angle_to_disc", worst}, {"rungs", rungs}};
  if (!examples.empty()) r.evidence["violating_witnesses"] = examples;
  if (violations > 0) {
    r.verdict = Verdict::fail;
  } else if (marginal > 0) {
    r.verdict = Verdict::inconclusive;
  } else {
    r.verdict = Verdict::pass;
    if (checked == 0) r.evidence["note"] = "M(Psi_G) has no witnesses off V_G: nothing to map into Disc G";
  }
  return r;
}

// --------------------------------------------------------------------------------------------
// Milnor-set image coverage: minima of rho on fibres lie in M(G)

struct CoverageProbe {
  Vector y;
  bool fiber_found = false;
  bool minimized = false;
  Vector x;
  double milnor_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

/// Minimizes rho on {G = y} by projected gradient steps, each followed by a Newton return to
/// the fibre, starting from the smallest of a few fibre points found inside B_eps.
inline CoverageProbe minimize_on_fiber(const MapGerm& g, const DeterminantalSystem& milnor, const Vector& y, double eps,
                                       std::uint64_t seed, const NewtonOptions& nopts, std::size_t seeds = 12) {
  CoverageProbe pr;
  pr.y = y;
  std::vector<Polynomial> eqs;
  for (std::size_t i = 0; i < g.p(); ++i) {
    eqs.push_back(g.component(i) - Polynomial::constant(g.m(), Rational(y[static_cast<Eigen::Index>(i)])));
  }
  const DeterminantalSystem fiber("fiber", g.m(), std::move(eqs));
  NewtonOptions o = nopts;
  o.trust_radius = std::numeric_limits<double>::infinity();
  const auto dim = static_cast<Eigen::Index>(g.m());
  std::optional<Vector> start;
  for (std::size_t i = 0; i < seeds; ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    const double rad = eps * std::pow(std::uniform_real_distribution<double>(0.0, 1.0)(rng), 1.0 / static_cast<double>(dim));
    const auto res = newton_project(fiber, rad * random_unit_vector(rng, dim), o);
    if (!res.converged() || !(res.x.norm() < eps)) continue;
    if (!start || res.x.norm() < start->norm()) start = res.x;
  }
  if (!start) return pr;
  pr.fiber_found = true;
  Vector x = *start;
  double step = 1.0;
  for (int it = 0; it < 2000; ++it) {
    pr.iterations = it;
    std::vector<Vector> normals;
    const Matrix j = g.jacobian_at(x);
    for (Eigen::Index i = 0; i < j.rows(); ++i) normals.push_back(j.row(i).transpose());
    const Vector d = tangent_project(x, normals);
    if (d.norm() <= 1e-13 * std::max(1.0, x.norm())) {
      pr.minimized = true;
      break;
    }
    bool moved = false;
    for (step = std::min(1.0, 2.0 * step); step > 1e-6; step *= 0.5) {
      const auto res = newton_project(fiber, x - step * d, o);
      if (res.converged() && res.x.squaredNorm() < x.squaredNorm()) {
        x = res.x;
        moved = true;
        break;
      }
    }
    // Descent stalls once the decrease of rho drops below rounding; finish with Newton.
    if (!moved || d.norm() < 1e-4 * x.norm()) break;
  }
  if (!pr.minimized) {
    // Polish onto fibre n M(G): accept a nearby critical point that does not raise rho.
    auto eqs2 = fiber.equations();
    const auto& me = milnor.equations();
    eqs2.insert(eqs2.end(), me.begin(), me.end());
    const DeterminantalSystem crit("fiber_milnor", g.m(), std::move(eqs2));
    const auto res = newton_project(crit, x, o);
    if (res.converged() && (res.x - x).norm() < 1e-2 * x.norm() &&
        res.x.squaredNorm() <= x.squaredNorm() * (1.0 + 1e-8)) {
      x = res.x;
      pr.minimized = true;
    }
  }
  pr.x = x;
  pr.milnor_residual = milnor.max_residual(x);
  return pr;
}

inline ConditionReport check_milnor_image_coverage(const MapGerm& g, const DiscriminantSample& ds, double eps,
                                                   double eta, std::size_t n, std::uint64_t seed, const Config& cfg) {
  if (g.m() < g.p() + 1) return not_applicable(ConditionId::milnor_image_coverage, "needs m > p", seed);
  ConditionReport r;
  r.condition = ConditionId::milnor_image_coverage;
  r.seed = seed;
  r.tolerances = {{"milnor_residual", 1e-8}, {"angular_tol", cfg.angular_tol}};
  const auto milnor = milnor_set_system(g);
  const auto nopts = newton_options(cfg);
  const auto p = static_cast<Eigen::Index>(g.p());
  std::size_t with_fiber = 0, ok = 0, unresolved = 0, bad = 0, probes = 0;
  double worst = 0.0;
  Json samples = Json::array();
  for (std::size_t i = 0; probes < n && i < 20 * n; ++i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    const Vector dir = random_unit_vector(rng, p);
    if (angle_to_rays(dir, ds.rays) <= 5.0 * cfg.angular_tol) continue;
    ++probes;
    const double mag = eta * std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    const auto pr = minimize_on_fiber(g, milnor, Vector(mag * dir), eps, derive_seed(seed, 1000 + i), nopts);
    if (!pr.fiber_found) continue;
    ++with_fiber;
    if (!pr.minimized) {
      ++unresolved;
    } else if (pr.milnor_residual < 1e-8) {
      ++ok;
      worst = std::max(worst, pr.milnor_residual);
    } else {
      ++bad;
    }
    if (samples.size() < 8) {
      samples.push_back({{"y", to_json(pr.y)},
                         {"minimizer", to_json(pr.x)},
                         {"milnor_residual", pr.milnor_residual},
                         {"minimized", pr.minimized}});
    }
  }
  r.evidence = {{"probes", probes},   {"with_fiber", with_fiber}, {"in_milnor_set", ok},
                {"unresolved", unresolved}, {"off_milnor_set", bad}, {"max_residual", worst},
                {"eta", eta},         {"eps", eps},               {"samples", samples}};
  if (bad > 0) {
    r.verdict = Verdict::fail;
  } else if (with_fiber > 0 && unresolved == 0) {
    r.verdict = Verdict::pass;
  } else if (with_fiber == 0) {
    r.evidence["note"] = "no sampled regular value had a nonempty fibre";
  }
  return r;
}

/// A single explicit probe; y must avoid the discriminant rays.
inline CoverageProbe milnor_image_probe(const MapGerm& g, const DiscriminantSample& ds, const Vector& y, double eps,
                                        std::uint64_t seed, const Config& cfg) {
  if (g.m() < g.p() + 1) throw UnsupportedError("the Milnor set needs m >= p + 1");
  if (static_cast<std::size_t>(y.size()) != g.p()) throw InputError("target value has wrong dimension");
  if (!(y.norm() > 0.0)) throw InputError("target value must be nonzero");
  checked_direction(y, g.p(), ds.rays, cfg.angular_tol);
  return minimize_on_fiber(g, milnor_set_system(g), y, eps, seed, newton_options(cfg));
}

// --------------------------------------------------------------------------------------------
// Existence of a Milnor vector field: a(x) > 0 on M(G) \ G^-1(Disc G)

/// Looks for a second point of M(G) on the Psi_G-fibre through w, near 0.9 w. Finding one
/// indicates that the component meets that fibre in positive dimension.
inline bool fiber_meets_component_in_curve(const MapGerm& g, const DeterminantalSystem& milnor, const Vector& w,
                                           double link, const NewtonOptions& nopts) {
  const Vector gw = g.eval(w);
  if (!(gw.norm() > 0.0)) return false;
  const Vector y = gw / gw.norm();
  auto eqs = milnor.equations();
  const auto par = parallel_equations(g, y);
  eqs.insert(eqs.end(), par.begin(), par.end());
  const DeterminantalSystem sys("milnor_on_fibre", g.m(), std::move(eqs));
  NewtonOptions o = nopts;
  o.trust_radius = link;
  const auto res = newton_project(sys, 0.9 * w, o);
  if (!res.converged()) return false;
  const Vector gx = g.eval(res.x);
  if (!(gx.norm() > 0.0) || angle_between(gx, y) > 1e-6) return false;
  return (res.x - w).norm() > 10.0 * nopts.tol && (res.x - w).norm() < link;
}

inline ConditionReport check_mvf_exists(const MapGerm& g, const WitnessSet& ws, const WitnessSet& clustered,
                                        const Config& cfg, std::uint64_t seed = 0) {
  if (g.p() < 2 || g.m() <= g.p()) return not_applicable(ConditionId::mvf_exists, "needs m > p >= 2", seed);
  ConditionReport r;
  r.condition = ConditionId::mvf_exists;
  r.seed = seed;
  const double cos_tol = 1e-6;
  r.tolerances = {{"cosine_tol", cos_tol}, {"exclusion_margin", cfg.strict_margin}, {"tol_zero", cfg.tol_zero}};
  FieldOptions fo;
  fo.tol_zero = cfg.tol_zero;
  std::size_t used = 0, flagged = 0, negative = 0, marginal = 0;
  double min_a = std::numeric_limits<double>::infinity(), min_cos = std::numeric_limits<double>::infinity();
  double max_res = 0.0, max_a_gap = 0.0;
  for (const auto& w : ws.points) {
    if (w.excluded) continue;
    const auto fe = field_eval(g, w.x, fo);
    if (fe.flags.v1_zero || fe.flags.on_zero_set || fe.flags.omega_rank_drop) {
      ++flagged;
      continue;
    }
    ++used;
    const double c = fe.a_cosine();
    min_cos = std::min(min_cos, c);
    min_a = std::min(min_a, fe.a);
    max_res = std::max(max_res, fe.residual_rho);
    max_a_gap = std::max(max_a_gap, std::abs(fe.a - fe.a_closed) / std::max(std::abs(fe.a_closed), 1e-300));
    if (c < -10.0 * cos_tol) {
      ++negative;
    } else if (!(c > cos_tol)) {
      ++marginal;
    }
  }
  r.evidence = {{"witnesses", used}, {"flagged", flagged}, {"negative", negative}, {"marginal", marginal}};
  if (used > 0) {
    r.evidence["min_a"] = min_a;
    r.evidence["min_cosine"] = min_cos;
    r.evidence["max_residual_rho"] = max_res;
    r.evidence["max_a_relative_gap"] = max_a_gap;
  }

  // Shortcut: the Milnor set off G^-1(Disc G) is connected, or each component meets some
  // Psi_G-fibre in a curve.
  const std::size_t ncomp = component_count(clustered);
  r.evidence["components"] = ncomp;
  bool per_component = ncomp > 0;
  if (ncomp > 0) {
    const auto milnor = milnor_set_system(g);
    double band = 0.0;
    for (const auto& w : clustered.points) band = std::max(band, w.radius);
    std::vector<bool> found(ncomp, false);
    for (const auto& w : clustered.points) {
      if (w.component < 0 || found[static_cast<std::size_t>(w.component)]) continue;
      if (fiber_meets_component_in_curve(g, milnor, w.x, cfg.link_scale * band, newton_options(cfg))) {
        found[static_cast<std::size_t>(w.component)] = true;
      }
    }
    for (bool f : found) per_component = per_component && f;
  }
  r.evidence["connected"] = ncomp == 1;
  r.evidence["component_fiber_curves"] = per_component;
  r.evidence["component_fiber_criterion"] = ncomp == 1 || per_component;
  r.evidence["component_fiber_note"] = "positive-dimensional fibre intersection detected heuristically";

  if (used == 0 && flagged == 0) {
    r.verdict = Verdict::pass;
    r.evidence["vacuous"] = true;
    r.evidence["note"] = "no witnesses of M(G) off G^-1(Disc G): nu is a Milnor vector field off the Milnor set";
  } else if (negative > 0) {
    r.verdict = Verdict::fail;
  } else if (flagged > 0 || marginal > 0) {
    r.verdict = Verdict::inconclusive;
  } else {
    r.verdict = Verdict::pass;
  }
  return r;
}

}  // namespace germfib
