#pragma once

// Sparse multivariate polynomials with exact rational coefficients.
//
// Coefficients are kept as arbitrary-precision rationals so that derived
// objects (Jacobian minors, normal fields) are formed without rounding.
// Floating point only enters at evaluation, through a compiled copy of the
// terms built once at construction.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "germfib/errors.hpp"

namespace germfib {

using Rational = boost::multiprecision::cpp_rational;
using Exponent = std::vector<std::uint32_t>;

inline std::uint64_t total_degree(const Exponent& e) {
  return std::accumulate(e.begin(), e.end(), std::uint64_t{0});
}

/// Graded lexicographic order: total degree first, then lexicographic.
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const auto da = total_degree(a);
    const auto db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

inline std::string default_variable_name(std::size_t i) { return "x" + std::to_string(i + 1); }

class Polynomial {
 public:
  using TermMap = std::map<Exponent, Rational, GrlexLess>;

  /// Zero polynomial in zero variables; only useful as a placeholder.
  Polynomial() = default;

  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  Polynomial(std::size_t nvars, TermMap terms) : nvars_(nvars), terms_(std::move(terms)) { normalize(); }

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    TermMap t;
    t.emplace(Exponent(nvars, 0), c);
    return Polynomial(nvars, std::move(t));
  }

  static Polynomial variable(std::size_t nvars, std::size_t i) {
    if (i >= nvars) throw InputError("variable index out of range");
    Exponent e(nvars, 0);
    e[i] = 1;
    TermMap t;
    t.emplace(std::move(e), Rational(1));
    return Polynomial(nvars, std::move(t));
  }

  static Polynomial monomial(Exponent e, const Rational& c) {
    const auto n = e.size();
    TermMap t;
    t.emplace(std::move(e), c);
    return Polynomial(n, std::move(t));
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
  }

  Rational coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational constant_term() const { return coefficient(Exponent(nvars_, 0)); }

  std::uint64_t degree() const { return terms_.empty() ? 0 : total_degree(terms_.rbegin()->first); }

  double eval(std::span<const double> x) const {
    if (x.size() != nvars_) {
      throw InputError("evaluation point has " + std::to_string(x.size()) + " coordinates, polynomial has " +
                       std::to_string(nvars_) + " variables");
    }
    double total = 0.0;
    const std::uint32_t* e = exps_.data();
    for (double c : coeffs_) {
      double v = c;
      for (std::size_t i = 0; i < nvars_; ++i, ++e) {
        for (std::uint32_t k = 0; k < *e; ++k) v *= x[i];
      }
      total += v;
    }
    return total;
  }

  double eval(const Eigen::VectorXd& x) const { return eval(std::span<const double>(x.data(), x.size())); }

  Polynomial derivative(std::size_t i) const {
    if (i >= nvars_) throw InputError("derivative index out of range");
    TermMap out;
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      Exponent d = e;
      d[i] -= 1;
      out[d] += c * e[i];
    }
    return Polynomial(nvars_, std::move(out));
  }

  Polynomial pow(unsigned n) const {
    Polynomial result = constant(nvars_, 1);
    Polynomial base = *this;
    while (n > 0) {
      if (n & 1u) result = result * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return result;
  }

  /// Canonical text form: terms in decreasing grlex order, variables named by `names`.
  std::string to_string(std::span<const std::string> names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      Rational mag = c < 0 ? Rational(-c) : c;
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      const bool is_const = total_degree(e) == 0;
      bool need_star = false;
      if (is_const || mag != 1) {
        os << mag;
        need_star = true;
      }
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (need_star) os << "*";
        os << (i < names.size() ? names[i] : default_variable_name(i));
        if (e[i] > 1) os << "^" << e[i];
        need_star = true;
      }
    }
    return os.str();
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    TermMap out = a.terms_;
    for (const auto& [e, c] : b.terms_) out[e] += c;
    return Polynomial(a.nvars_, std::move(out));
  }

  friend Polynomial operator-(const Polynomial& a) {
    TermMap out = a.terms_;
    for (auto& [e, c] : out) c = -c;
    return Polynomial(a.nvars_, std::move(out));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    TermMap out = a.terms_;
    for (const auto& [e, c] : b.terms_) out[e] -= c;
    return Polynomial(a.nvars_, std::move(out));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    check_same(a, b);
    TermMap out;
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out[e] += ca * cb;
      }
    }
    return Polynomial(a.nvars_, std::move(out));
  }

  friend Polynomial operator*(const Rational& s, const Polynomial& a) {
    if (s == 0) return Polynomial(a.nvars_);
    TermMap out = a.terms_;
    for (auto& [e, c] : out) c *= s;
    return Polynomial(a.nvars_, std::move(out));
  }

 private:
  static void check_same(const Polynomial& a, const Polynomial& b) {
    if (a.nvars_ != b.nvars_) {
      throw InputError("polynomials live in different rings (" + std::to_string(a.nvars_) + " vs " +
                       std::to_string(b.nvars_) + " variables)");
    }
  }

  void normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first.size() != nvars_) throw InputError("exponent vector length does not match variable count");
      if (it->second == 0) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    coeffs_.clear();
    exps_.clear();
    coeffs_.reserve(terms_.size());
    exps_.reserve(terms_.size() * nvars_);
    for (const auto& [e, c] : terms_) {
      coeffs_.push_back(c.convert_to<double>());
      exps_.insert(exps_.end(), e.begin(), e.end());
    }
  }

  std::size_t nvars_ = 0;
  TermMap terms_;
  std::vector<double> coeffs_;
  std::vector<std::uint32_t> exps_;
};

/// A vector of polynomials over a common ring (gradients, normal fields, Jacobian rows).
class PolyVector {
 public:
  PolyVector() = default;

  explicit PolyVector(std::vector<Polynomial> entries) : entries_(std::move(entries)) {
    for (const auto& p : entries_) {
      if (p.nvars() != entries_.front().nvars()) throw InputError("PolyVector entries must share a ring");
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t nvars() const noexcept { return entries_.empty() ? 0 : entries_.front().nvars(); }
  const Polynomial& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const std::vector<Polynomial>& entries() const noexcept { return entries_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(entries_.size()));
    for (std::size_t i = 0; i < entries_.size(); ++i) out[static_cast<Eigen::Index>(i)] = entries_[i].eval(x);
    return out;
  }

  friend bool operator==(const PolyVector& a, const PolyVector& b) { return a.entries_ == b.entries_; }

  friend PolyVector operator-(const PolyVector& a, const PolyVector& b) {
    if (a.size() != b.size()) throw InputError("PolyVector length mismatch");
    std::vector<Polynomial> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
    return PolyVector(std::move(out));
  }

  friend PolyVector operator*(const Polynomial& s, const PolyVector& v) {
    std::vector<Polynomial> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(s * e);
    return PolyVector(std::move(out));
  }

 private:
  std::vector<Polynomial> entries_;
};

inline PolyVector gradient(const Polynomial& p) {
  std::vector<Polynomial> out;
  out.reserve(p.nvars());
  for (std::size_t i = 0; i < p.nvars(); ++i) out.push_back(p.derivative(i));
  return PolyVector(std::move(out));
}

inline double eval(const Polynomial& p, std::span<const double> x) { return p.eval(x); }

/// Sum of squares of the coordinates, the distance function used throughout.
inline Polynomial distance_squared(std::size_t nvars) {
  Polynomial rho(nvars);
  for (std::size_t i = 0; i < nvars; ++i) {
    const auto xi = Polynomial::variable(nvars, i);
    rho = rho + xi * xi;
  }
  return rho;
}

/// Determinant by cofactor expansion; intended for the small matrices of minors.
inline Polynomial determinant(const std::vector<std::vector<Polynomial>>& a) {
  const std::size_t n = a.size();
  if (n == 0) throw InputError("determinant of an empty matrix");
  if (n == 1) return a[0][0];
  if (n == 2) return a[0][0] * a[1][1] - a[0][1] * a[1][0];
  Polynomial total(a[0][0].nvars());
  for (std::size_t j = 0; j < n; ++j) {
    if (a[0][j].is_zero()) continue;
    std::vector<std::vector<Polynomial>> sub;
    sub.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Polynomial> row;
      row.reserve(n - 1);
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(a[i][k]);
      }
      sub.push_back(std::move(row));
    }
    const Polynomial term = a[0][j] * determinant(sub);
    total = (j % 2 == 0) ? total + term : total - term;
  }
  return total;
}

/// All k-element index subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// All maximal (rows.size() x rows.size()) minors of a polynomial matrix given by rows.
inline std::vector<Polynomial> maximal_minors(const std::vector<PolyVector>& rows) {
  std::vector<Polynomial> out;
  if (rows.empty()) return out;
  const std::size_t k = rows.size();
  const std::size_t n = rows.front().size();
  for (const auto& cols : combinations(n, k)) {
    std::vector<std::vector<Polynomial>> sub(k);
    for (std::size_t i = 0; i < k; ++i) {
      for (auto c : cols) sub[i].push_back(rows[i][c]);
    }
    out.push_back(determinant(sub));
  }
  return out;
}

/// All k x k minors of a matrix with possibly more than k rows.
inline std::vector<Polynomial> minors_of_size(const std::vector<PolyVector>& rows, std::size_t k) {
  std::vector<Polynomial> out;
  for (const auto& ridx : combinations(rows.size(), k)) {
    std::vector<PolyVector> sub;
    sub.reserve(k);
    for (auto r : ridx) sub.push_back(rows[r]);
    auto m = maximal_minors(sub);
    out.insert(out.end(), std::make_move_iterator(m.begin()), std::make_move_iterator(m.end()));
  }
  return out;
}

}  // namespace germfib
