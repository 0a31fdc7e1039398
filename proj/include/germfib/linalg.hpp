#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace germfib {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Eigen::Map<const Vector> as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Rows stacked into a matrix.
inline Matrix stack_rows(const std::vector<Vector>& rows, Eigen::Index cols) {
  Matrix a(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return a;
}

inline Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

/// Number of singular values above rel_gap * sigma_max.
inline std::size_t numerical_rank(const Matrix& a, double rel_gap) {
  const Vector s = singular_values(a);
  if (s.size() == 0 || s[0] == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_gap * s[0]) ++r;
  }
  return r;
}

/// Orthonormal basis (as columns) of the span of `vectors`, dropping directions whose
/// Gram-Schmidt remainder falls below rel_tol times the largest input norm.
inline Matrix orthonormal_basis(const std::vector<Vector>& vectors, Eigen::Index dim, double rel_tol = 1e-10) {
  double scale = 0.0;
  for (const auto& v : vectors) scale = std::max(scale, v.norm());
  std::vector<Vector> basis;
  if (scale > 0.0) {
    for (const auto& v : vectors) {
      Vector w = v;
      // Two passes of modified Gram-Schmidt keep the basis orthogonal to machine precision.
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) w -= q.dot(w) * q;
      }
      const double n = w.norm();
      if (n > rel_tol * scale) basis.push_back(w / n);
    }
  }
  Matrix q(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) q.col(static_cast<Eigen::Index>(i)) = basis[i];
  return q;
}

/// Angle in radians between two nonzero vectors.
inline double angle_between(const Vector& a, const Vector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return M_PI;
  const double c = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  // atan2 form keeps precision for nearly parallel vectors.
  const double s = std::sqrt(std::max(0.0, (a / na - b / nb).squaredNorm() * (a / na + b / nb).squaredNorm())) / 2.0;
  return std::atan2(s, c);
}

}  // namespace germfib
