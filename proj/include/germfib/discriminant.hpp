#pragma once

// Sampling of Disc G = closure G(Sing G) u boundary of the closure of Im G, distances to its
// preimage G^-1(Disc G), and the arcs of the unit target circle cut out by its rays.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "germfib/germ.hpp"
#include "germfib/linalg.hpp"
#include "germfib/variety.hpp"

namespace germfib {

enum class BoundaryStatus { not_computed, empty_by_criterion, user_declared };

inline const char* to_string(BoundaryStatus b) {
  switch (b) {
    case BoundaryStatus::not_computed: return "not_computed";
    case BoundaryStatus::empty_by_criterion: return "empty_by_criterion";
    case BoundaryStatus::user_declared: return "user_declared";
  }
  return "unknown";
}

struct DiscriminantRay {
  Vector direction;
  std::vector<double> radii;    // |G(x)| of the images binned into this ray
  std::vector<int> rungs;       // ladder rungs (indices) at which the ray was seen
};

struct DiscriminantSample {
  std::size_t p = 0;
  std::vector<double> ladder;
  std::vector<DiscriminantRay> rays;
  /// Image directions seen at each rung, before merging across rungs.
  std::vector<std::vector<Vector>> rung_directions;
  bool origin_only = false;
  bool origin_singular = false;
  BoundaryStatus boundary_status = BoundaryStatus::not_computed;
  /// A point of V_G off Sing G was found at every rung (so G is open near the origin).
  bool submersive_zero_point = false;
  std::size_t sing_witnesses = 0;
  std::size_t zero_images = 0;

  bool empty() const noexcept { return rays.empty() && !origin_only; }
};

/// Greedy binning of unit vectors: a vector joins the first bin whose running mean is within
/// `tol` radians, otherwise opens a new bin. Means are renormalized.
inline std::vector<Vector> bin_directions(const std::vector<Vector>& dirs, double tol,
                                          std::vector<std::size_t>* assignment = nullptr) {
  std::vector<Vector> sums, means;
  if (assignment) assignment->clear();
  for (const auto& d : dirs) {
    std::size_t k = 0;
    for (; k < means.size(); ++k) {
      if (angle_between(means[k], d) < tol) break;
    }
    if (k == means.size()) {
      sums.push_back(d);
      means.push_back(d);
    } else {
      sums[k] += d;
      means[k] = sums[k] / sums[k].norm();
    }
    if (assignment) assignment->push_back(k);
  }
  return means;
}

/// Looks for a point of V_G at radius r where dG has full rank (sigma_min / sigma_max > 1e-3).
inline bool submersive_zero_point_at(const MapGerm& g, double r, std::size_t seeds, std::uint64_t seed,
                                     const NewtonOptions& opts) {
  const auto ws = witness_sample(zero_set_system(g), Region::sphere(r), seeds, seed, opts);
  for (const auto& w : ws.points) {
    const Vector s = singular_values(g.jacobian_at(w.x));
    if (s.size() == static_cast<Eigen::Index>(g.p()) && s[0] > 0.0 && s[s.size() - 1] > 1e-3 * s[0]) return true;
  }
  return false;
}

struct DiscriminantOptions {
  std::size_t sing_seeds = 300;
  std::size_t zero_seeds = 60;
  double tol_zero = 1e-9;
  double bin_tol = 1e-3;
  NewtonOptions newton;
};

/// Maps Sing G witnesses at each ladder radius through G and bins the image directions.
inline DiscriminantSample sample_discriminant(const MapGerm& g, const std::vector<double>& ladder, std::uint64_t seed,
                                              const DiscriminantOptions& opts = {}) {
  if (ladder.empty()) throw InputError("the radius ladder is empty");
  DiscriminantSample ds;
  ds.p = g.p();
  ds.ladder = ladder;
  ds.origin_singular = origin_is_singular(g);
  const auto sing = singular_set_system(g);

  std::vector<Vector> all_dirs;
  std::vector<double> all_radii;
  std::vector<int> all_rungs;
  bool submersive_everywhere = true;
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const auto ws = witness_sample(sing, Region::sphere(ladder[k]), opts.sing_seeds, derive_seed(seed, 100 + k), opts.newton);
    ds.sing_witnesses += ws.points.size();
    std::vector<Vector> dirs;
    for (const auto& w : ws.points) {
      const Vector y = g.eval(w.x);
      const double n = y.norm();
      // Near a non-reduced equation a residual r only places x within about sqrt(r) of
      // Sing G, so images below |dG| sqrt(r) are indistinguishable from 0.
      const double noise = 10.0 * g.jacobian_at(w.x).norm() * std::sqrt(w.residual);
      if (n < std::max(opts.tol_zero, noise)) {
        ++ds.zero_images;
        continue;
      }
      dirs.push_back(y / n);
      all_dirs.push_back(y / n);
      all_radii.push_back(n);
      all_rungs.push_back(static_cast<int>(k));
    }
    ds.rung_directions.push_back(bin_directions(dirs, opts.bin_tol));
    if (submersive_everywhere) {
      submersive_everywhere =
          submersive_zero_point_at(g, ladder[k], opts.zero_seeds, derive_seed(seed, 200 + k), opts.newton);
    }
  }

  std::vector<std::size_t> assign;
  const auto means = bin_directions(all_dirs, opts.bin_tol, &assign);
  ds.rays.resize(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) ds.rays[i].direction = means[i];
  for (std::size_t i = 0; i < assign.size(); ++i) {
    auto& ray = ds.rays[assign[i]];
    ray.radii.push_back(all_radii[i]);
    if (std::find(ray.rungs.begin(), ray.rungs.end(), all_rungs[i]) == ray.rungs.end()) ray.rungs.push_back(all_rungs[i]);
  }
  // Canonical order: by angle for p = 2, lexicographic otherwise.
  std::sort(ds.rays.begin(), ds.rays.end(), [](const DiscriminantRay& a, const DiscriminantRay& b) {
    const auto& u = a.direction;
    const auto& v = b.direction;
    if (u.size() == 2) {
      auto ang = [](const Vector& d) {
        const double t = std::atan2(d[1], d[0]);
        return t < 0 ? t + 2.0 * M_PI : t;
      };
      return ang(u) < ang(v);
    }
    return std::lexicographical_compare(u.data(), u.data() + u.size(), v.data(), v.data() + v.size());
  });

  ds.origin_only = ds.rays.empty() && ds.origin_singular;
  ds.submersive_zero_point = submersive_everywhere;
  if (submersive_everywhere) {
    ds.boundary_status = BoundaryStatus::empty_by_criterion;
  } else if (g.has_flag("image_boundary_in_sing")) {
    ds.boundary_status = BoundaryStatus::user_declared;
  }
  return ds;
}

/// Angular distance from a unit vector to the nearest ray (pi when there are none).
inline double angle_to_rays(const Vector& y, const std::vector<DiscriminantRay>& rays) {
  double best = M_PI;
  for (const auto& r : rays) best = std::min(best, angle_between(y, r.direction));
  return best;
}

// --------------------------------------------------------------------------------------------
// Distance to G^-1(Disc G)

/// Nearest-point estimates to G^-1(Disc G): Gauss-Newton projections onto V_G and onto the
/// preimage of each ray, {d_j G_k - d_k G_j = 0 for all j < k, <G, d> >= 0}.
class PreimageOracle {
 public:
  PreimageOracle(const MapGerm& g, const DiscriminantSample& ds, NewtonOptions opts = {})
      : g_(&g), opts_(opts), empty_(ds.empty()), zero_(zero_set_system(g)) {
    opts_.trust_radius = std::numeric_limits<double>::infinity();
    for (const auto& r : ds.rays) {
      std::vector<Polynomial> eqs;
      for (std::size_t j = 0; j < g.p(); ++j) {
        for (std::size_t k = j + 1; k < g.p(); ++k) {
          const Rational dj(r.direction[static_cast<Eigen::Index>(j)]);
          const Rational dk(r.direction[static_cast<Eigen::Index>(k)]);
          eqs.push_back(dj * g.component(k) - dk * g.component(j));
        }
      }
      // For p = 1 the preimage of a half-line is a half-space; only V_G matters at the boundary.
      if (eqs.empty()) continue;
      rays_.push_back({DeterminantalSystem("ray", g.m(), std::move(eqs)), r.direction});
    }
  }

  /// Estimated Euclidean distance from x to G^-1(Disc G); infinity when Disc G is empty.
  double distance(const Vector& x) const {
    if (empty_) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    const auto z = newton_project(zero_, x, opts_);
    if (z.converged()) best = (z.x - x).norm();
    for (const auto& ray : rays_) {
      const auto res = newton_project(ray.system, x, opts_);
      if (!res.converged()) continue;
      const Vector gx = g_->eval(res.x);
      if (gx.dot(ray.direction) < -1e-12 * (1.0 + gx.norm())) continue;
      best = std::min(best, (res.x - x).norm());
    }
    return best;
  }

  double relative_distance(const Vector& x) const {
    const double n = x.norm();
    return n > 0.0 ? distance(x) / n : 0.0;
  }

  Exclusion exclusion(double margin) const {
    return Exclusion{[this](const Vector& x) { return relative_distance(x); }, margin};
  }

 private:
  struct RaySystem {
    DeterminantalSystem system;
    Vector direction;
  };
  const MapGerm* g_;
  NewtonOptions opts_;
  bool empty_;
  DeterminantalSystem zero_;
  std::vector<RaySystem> rays_;
};

// --------------------------------------------------------------------------------------------
// Components of the unit target sphere minus the rays

struct TargetArc {
  int id = 0;
  double start = 0.0;  // angles in [0, 2 pi); the arc runs counterclockwise from start to end
  double end = 0.0;
  Vector midpoint;
};

/// For p = 2 the arcs of S^1 between consecutive rays (the whole circle when there are none).
/// For p = 1 the points +1 (id 0) and -1 (id 1) that are not rays. For p > 2 the sphere minus
/// finitely many points is connected: a single component.
inline std::vector<TargetArc> target_arcs(const DiscriminantSample& ds) {
  std::vector<TargetArc> out;
  if (ds.p == 1) {
    for (int id = 0; id < 2; ++id) {
      TargetArc a;
      a.id = id;
      a.midpoint = Vector::Constant(1, id == 0 ? 1.0 : -1.0);
      if (angle_to_rays(a.midpoint, ds.rays) > 0.1) out.push_back(a);
    }
    return out;
  }
  if (ds.p != 2) {
    TargetArc a;
    a.midpoint = Vector::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(ds.p, 1)));
    a.midpoint[0] = 1.0;
    // Move away from rays if the default sits on one.
    if (angle_to_rays(a.midpoint, ds.rays) < 0.1 && ds.p > 1) {
      a.midpoint = Vector::Ones(static_cast<Eigen::Index>(ds.p)) / std::sqrt(static_cast<double>(ds.p));
    }
    out.push_back(a);
    return out;
  }
  std::vector<double> angles;
  for (const auto& r : ds.rays) {
    double t = std::atan2(r.direction[1], r.direction[0]);
    if (t < 0) t += 2.0 * M_PI;
    angles.push_back(t);
  }
  std::sort(angles.begin(), angles.end());
  if (angles.empty()) {
    TargetArc a;
    a.start = 0.0;
    a.end = 2.0 * M_PI;
    a.midpoint = Vector(2);
    a.midpoint << 1.0, 0.0;
    out.push_back(a);
    return out;
  }
  for (std::size_t i = 0; i < angles.size(); ++i) {
    TargetArc a;
    a.id = static_cast<int>(i);
    a.start = angles[i];
    a.end = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2.0 * M_PI;
    const double mid = 0.5 * (a.start + a.end);
    a.midpoint = Vector(2);
    a.midpoint << std::cos(mid), std::sin(mid);
    out.push_back(a);
  }
  return out;
}

/// Id of the arc containing the unit vector y.
inline int arc_of(const DiscriminantSample& ds, const Vector& y) {
  if (ds.p == 1) return y[0] > 0.0 ? 0 : 1;
  if (ds.p != 2) return 0;
  const auto arcs = target_arcs(ds);
  double t = std::atan2(y[1], y[0]);
  if (t < 0) t += 2.0 * M_PI;
  for (const auto& a : arcs) {
    if ((t >= a.start && t < a.end) || (t + 2.0 * M_PI >= a.start && t + 2.0 * M_PI < a.end)) return a.id;
  }
  return 0;
}

}  // namespace germfib
