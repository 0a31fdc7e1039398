#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germfib/linalg.hpp"
#include "germfib/polynomial.hpp"

namespace germfib {

/// A rank condition: the zero set is where rank(rows(x)) <= target_rank.
struct RankSpec {
  std::vector<PolyVector> rows;
  std::size_t target_rank = 0;
};

/// A finite set of polynomial equations whose common zero set is a variety of interest,
/// optionally paired with an equivalent numerical rank test.
class DeterminantalSystem {
 public:
  DeterminantalSystem() = default;

  DeterminantalSystem(std::string name, std::size_t nvars, std::vector<Polynomial> equations,
                      std::optional<RankSpec> rank_spec = std::nullopt)
      : name_(std::move(name)), nvars_(nvars), equations_(std::move(equations)), rank_spec_(std::move(rank_spec)) {
    gradients_.reserve(equations_.size());
    for (const auto& e : equations_) {
      if (e.nvars() != nvars_) throw InputError("system equation lives in the wrong ring");
      gradients_.push_back(gradient(e));
    }
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t nvars() const noexcept { return nvars_; }
  const std::vector<Polynomial>& equations() const noexcept { return equations_; }
  const std::optional<RankSpec>& rank_spec() const noexcept { return rank_spec_; }

  /// A nonzero constant equation makes the zero set empty.
  bool trivially_empty() const {
    for (const auto& e : equations_) {
      if (e.is_constant() && !e.is_zero()) return true;
    }
    return false;
  }

  Vector residuals(const Vector& x) const {
    Vector r(static_cast<Eigen::Index>(equations_.size()));
    for (std::size_t i = 0; i < equations_.size(); ++i) r[static_cast<Eigen::Index>(i)] = equations_[i].eval(x);
    return r;
  }

  double max_residual(const Vector& x) const {
    double m = 0.0;
    for (const auto& e : equations_) m = std::max(m, std::abs(e.eval(x)));
    return m;
  }

  Matrix jacobian(const Vector& x) const {
    Matrix j(static_cast<Eigen::Index>(equations_.size()), static_cast<Eigen::Index>(nvars_));
    for (std::size_t i = 0; i < gradients_.size(); ++i) j.row(static_cast<Eigen::Index>(i)) = gradients_[i].eval(x);
    return j;
  }

  /// Rows of the rank specification evaluated at x.
  Matrix rank_matrix(const Vector& x) const {
    if (!rank_spec_) throw InputError("system '" + name_ + "' has no rank specification");
    std::vector<Vector> rows;
    for (const auto& r : rank_spec_->rows) rows.push_back(r.eval(x));
    return stack_rows(rows, static_cast<Eigen::Index>(nvars_));
  }

  bool rank_condition_holds(const Vector& x, double rel_gap) const {
    return numerical_rank(rank_matrix(x), rel_gap) <= rank_spec_->target_rank;
  }

  /// The same system with extra equations appended (e.g. a sphere constraint).
  DeterminantalSystem with_equations(const std::vector<Polynomial>& extra, const std::string& suffix) const {
    auto eqs = equations_;
    eqs.insert(eqs.end(), extra.begin(), extra.end());
    return DeterminantalSystem(name_ + suffix, nvars_, std::move(eqs), rank_spec_);
  }

 private:
  std::string name_;
  std::size_t nvars_ = 0;
  std::vector<Polynomial> equations_;
  std::optional<RankSpec> rank_spec_;
  std::vector<PolyVector> gradients_;
};

/// ||x||^2 - r^2, with r^2 taken exactly from the double r.
inline Polynomial sphere_equation(std::size_t nvars, double r) {
  return distance_squared(nvars) - Polynomial::constant(nvars, Rational(r) * Rational(r));
}

}  // namespace germfib
