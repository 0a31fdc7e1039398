#pragma once

// The map germ G : (R^m, 0) -> (R^p, 0) and the symbolic objects derived from it.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germfib/linalg.hpp"
#include "germfib/mixed.hpp"
#include "germfib/polynomial.hpp"
#include "germfib/system.hpp"

namespace germfib {

struct DeclaredFlag {
  std::string name;
  std::string justification;
};

/// Where a realified germ came from: F, or F = f * conj(g) when f and g were given.
struct MixedOrigin {
  std::vector<std::string> cvars;
  MixedFunction F;
  std::optional<MixedFunction> f;
  std::optional<MixedFunction> g;
};

/// Normal fields Omega_{jk} = G_j grad G_k - G_k grad G_j for all j < k.
struct NormalFields {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<PolyVector> omegas;
};

class MapGerm {
 public:
  MapGerm(std::vector<std::string> var_names, std::vector<Polynomial> components,
          std::vector<DeclaredFlag> flags = {}, std::optional<MixedOrigin> origin = std::nullopt,
          std::string name = {})
      : var_names_(std::move(var_names)),
        components_(std::move(components)),
        flags_(std::move(flags)),
        origin_(std::move(origin)),
        name_(std::move(name)) {
    if (var_names_.empty()) throw InputError("a germ needs at least one source variable");
    if (components_.empty()) throw InputError("a germ needs at least one component");
    const std::size_t m = var_names_.size();
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (components_[i].nvars() != m) throw InputError("component G" + std::to_string(i + 1) + " has wrong arity");
      if (components_[i].constant_term() != 0) {
        throw InputError("component G" + std::to_string(i + 1) + " does not vanish at the origin");
      }
    }
    bool nonconstant = false;
    for (const auto& c : components_) nonconstant = nonconstant || !c.is_zero();
    if (!nonconstant) throw InputError("the germ is identically zero");

    for (const auto& c : components_) jacobian_.push_back(gradient(c));
    norm_squared_ = Polynomial(m);
    for (const auto& c : components_) norm_squared_ = norm_squared_ + c * c;
    norm_squared_gradient_ = gradient(norm_squared_);
    for (std::size_t j = 0; j < components_.size(); ++j) {
      for (std::size_t k = j + 1; k < components_.size(); ++k) {
        normals_.pairs.emplace_back(j, k);
        normals_.omegas.push_back(components_[j] * jacobian_[k] - components_[k] * jacobian_[j]);
      }
    }
  }

  std::size_t m() const noexcept { return var_names_.size(); }
  std::size_t p() const noexcept { return components_.size(); }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& var_names() const noexcept { return var_names_; }
  const std::vector<Polynomial>& components() const noexcept { return components_; }
  const Polynomial& component(std::size_t i) const { return components_.at(i); }
  const std::vector<DeclaredFlag>& flags() const noexcept { return flags_; }
  const std::optional<MixedOrigin>& origin() const noexcept { return origin_; }

  bool has_flag(const std::string& f) const {
    return std::any_of(flags_.begin(), flags_.end(), [&](const DeclaredFlag& d) { return d.name == f; });
  }

  const std::vector<PolyVector>& jacobian() const noexcept { return jacobian_; }
  const Polynomial& norm_squared() const noexcept { return norm_squared_; }
  const PolyVector& norm_squared_gradient() const noexcept { return norm_squared_gradient_; }
  const NormalFields& normal_fields() const noexcept { return normals_; }

  Vector eval(const Vector& x) const {
    Vector out(static_cast<Eigen::Index>(p()));
    for (std::size_t i = 0; i < p(); ++i) out[static_cast<Eigen::Index>(i)] = components_[i].eval(x);
    return out;
  }

  /// Psi_G(x) = G(x) / ||G(x)||; undefined (returns zero) on V_G.
  Vector psi(const Vector& x) const {
    const Vector g = eval(x);
    const double n = g.norm();
    return n > 0.0 ? Vector(g / n) : Vector(Vector::Zero(g.size()));
  }

  Matrix jacobian_at(const Vector& x) const {
    Matrix j(static_cast<Eigen::Index>(p()), static_cast<Eigen::Index>(m()));
    for (std::size_t i = 0; i < p(); ++i) j.row(static_cast<Eigen::Index>(i)) = jacobian_[i].eval(x);
    return j;
  }

  /// Omega_{jk}(x) for all pairs, one per row.
  std::vector<Vector> omegas_at(const Vector& x) const {
    std::vector<Vector> out;
    out.reserve(normals_.omegas.size());
    for (const auto& w : normals_.omegas) out.push_back(w.eval(x));
    return out;
  }

  Vector norm_squared_gradient_at(const Vector& x) const { return norm_squared_gradient_.eval(x); }

 private:
  std::vector<std::string> var_names_;
  std::vector<Polynomial> components_;
  std::vector<DeclaredFlag> flags_;
  std::optional<MixedOrigin> origin_;
  std::string name_;

  std::vector<PolyVector> jacobian_;
  Polynomial norm_squared_;
  PolyVector norm_squared_gradient_;
  NormalFields normals_;
};

/// p x m matrix of partial derivatives; row i is grad G_i.
inline const std::vector<PolyVector>& jacobian(const MapGerm& g) { return g.jacobian(); }

/// All p x p minors of the Jacobian; their common zero set is Sing G. For p = 1 these are
/// the partial derivatives, i.e. the critical locus.
inline DeterminantalSystem singular_set_system(const MapGerm& g) {
  auto minors = maximal_minors(g.jacobian());
  RankSpec spec{g.jacobian(), g.p() - 1};
  return DeterminantalSystem("sing", g.m(), std::move(minors), std::move(spec));
}

inline NormalFields omega_fields(const MapGerm& g) {
  if (g.p() < 2) throw UnsupportedError("normal fields Omega need p >= 2");
  return g.normal_fields();
}

inline const Polynomial& norm_squared(const MapGerm& g) { return g.norm_squared(); }

/// The system {G = 0} whose zero set is V_G.
inline DeterminantalSystem zero_set_system(const MapGerm& g) {
  return DeterminantalSystem("zero", g.m(), g.components());
}

/// True when the symbolic Jacobian drops rank at the origin (0 in Sing G).
inline bool origin_is_singular(const MapGerm& g) {
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(g.m()));
  for (const auto& minor : maximal_minors(g.jacobian())) {
    if (minor.eval(zero) != 0.0) return false;
  }
  return true;
}

}  // namespace germfib
