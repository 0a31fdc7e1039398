#pragma once

// Mixed polynomials F(z, conj(z)) = sum c_{nu,mu} z^nu conj(z)^mu and their
// realification over R^{2n} with variables ordered (x1, y1, ..., xn, yn).

#include <complex>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "germfib/polynomial.hpp"

namespace germfib {

struct ComplexRational {
  Rational re{0};
  Rational im{0};

  bool is_zero() const { return re == 0 && im == 0; }
  ComplexRational conj() const { return {re, -im}; }
  std::complex<double> to_complex() const { return {re.convert_to<double>(), im.convert_to<double>()}; }

  friend ComplexRational operator+(const ComplexRational& a, const ComplexRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a, const ComplexRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) = default;
};

class MixedFunction {
 public:
  /// (nu, mu): exponents of z and of conj(z).
  using Key = std::pair<Exponent, Exponent>;

  struct KeyLess {
    bool operator()(const Key& a, const Key& b) const {
      GrlexLess less;
      if (less(a.first, b.first)) return true;
      if (less(b.first, a.first)) return false;
      return less(a.second, b.second);
    }
  };

  using TermMap = std::map<Key, ComplexRational, KeyLess>;

  MixedFunction() = default;
  explicit MixedFunction(std::size_t n) : n_(n) {}
  MixedFunction(std::size_t n, TermMap terms) : n_(n), terms_(std::move(terms)) { normalize(); }

  static MixedFunction constant(std::size_t n, const ComplexRational& c) {
    TermMap t;
    t.emplace(Key{Exponent(n, 0), Exponent(n, 0)}, c);
    return MixedFunction(n, std::move(t));
  }

  static MixedFunction variable(std::size_t n, std::size_t j) {
    Exponent nu(n, 0);
    nu.at(j) = 1;
    TermMap t;
    t.emplace(Key{std::move(nu), Exponent(n, 0)}, ComplexRational{1, 0});
    return MixedFunction(n, std::move(t));
  }

  std::size_t nvars_complex() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && total_degree(terms_.begin()->first.first) == 0 &&
            total_degree(terms_.begin()->first.second) == 0);
  }

  ComplexRational constant_term() const {
    auto it = terms_.find(Key{Exponent(n_, 0), Exponent(n_, 0)});
    return it == terms_.end() ? ComplexRational{} : it->second;
  }

  /// True when no conj(z) appears.
  bool is_holomorphic() const {
    for (const auto& [k, c] : terms_) {
      if (total_degree(k.second) != 0) return false;
    }
    return true;
  }

  /// Complex conjugate of the whole function: swaps nu and mu and conjugates coefficients.
  MixedFunction conj() const {
    TermMap out;
    for (const auto& [k, c] : terms_) out.emplace(Key{k.second, k.first}, c.conj());
    return MixedFunction(n_, std::move(out));
  }

  std::complex<double> eval(std::span<const std::complex<double>> z) const {
    if (z.size() != n_) throw InputError("complex evaluation point has wrong dimension");
    std::complex<double> total = 0.0;
    for (const auto& [k, c] : terms_) {
      std::complex<double> v = c.to_complex();
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::uint32_t e = 0; e < k.first[j]; ++e) v *= z[j];
        for (std::uint32_t e = 0; e < k.second[j]; ++e) v *= std::conj(z[j]);
      }
      total += v;
    }
    return total;
  }

  MixedFunction pow(unsigned n) const {
    MixedFunction result = constant(n_, {1, 0});
    for (unsigned i = 0; i < n; ++i) result = result * *this;
    return result;
  }

  std::string to_string(std::span<const std::string> names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      const auto& [k, c] = *it;
      os << "(" << c.re;
      if (c.im != 0) os << (c.im < 0 ? "-" : "+") << (c.im < 0 ? Rational(-c.im) : c.im) << "i";
      os << ")";
      for (std::size_t j = 0; j < n_; ++j) {
        const std::string name = j < names.size() ? names[j] : "z" + std::to_string(j + 1);
        if (k.first[j]) os << "*" << name << (k.first[j] > 1 ? "^" + std::to_string(k.first[j]) : "");
        if (k.second[j]) os << "*conj(" << name << ")" << (k.second[j] > 1 ? "^" + std::to_string(k.second[j]) : "");
      }
    }
    return os.str();
  }

  friend bool operator==(const MixedFunction& a, const MixedFunction& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  friend MixedFunction operator+(const MixedFunction& a, const MixedFunction& b) {
    check_same(a, b);
    TermMap out = a.terms_;
    for (const auto& [k, c] : b.terms_) out[k] = out[k] + c;
    return MixedFunction(a.n_, std::move(out));
  }

  friend MixedFunction operator-(const MixedFunction& a) {
    TermMap out = a.terms_;
    for (auto& [k, c] : out) c = ComplexRational{} - c;
    return MixedFunction(a.n_, std::move(out));
  }

  friend MixedFunction operator-(const MixedFunction& a, const MixedFunction& b) { return a + (-b); }

  friend MixedFunction operator*(const MixedFunction& a, const MixedFunction& b) {
    check_same(a, b);
    TermMap out;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        Key k{Exponent(a.n_), Exponent(a.n_)};
        for (std::size_t j = 0; j < a.n_; ++j) {
          k.first[j] = ka.first[j] + kb.first[j];
          k.second[j] = ka.second[j] + kb.second[j];
        }
        out[k] = out[k] + ca * cb;
      }
    }
    return MixedFunction(a.n_, std::move(out));
  }

  friend MixedFunction operator*(const Rational& s, const MixedFunction& a) {
    return constant(a.n_, {s, 0}) * a;
  }

 private:
  static void check_same(const MixedFunction& a, const MixedFunction& b) {
    if (a.n_ != b.n_) throw InputError("mixed functions in different numbers of complex variables");
  }

  void normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (it->first.first.size() != n_ || it->first.second.size() != n_) {
        throw InputError("mixed exponent length does not match variable count");
      }
      it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
    }
  }

  std::size_t n_ = 0;
  TermMap terms_;
};

/// Real and imaginary parts of F over R^{2n}, variables ordered (x1, y1, ..., xn, yn)
/// with z_j = x_j + i y_j.
inline std::pair<Polynomial, Polynomial> realify(const MixedFunction& f) {
  const std::size_t n = f.nvars_complex();
  const std::size_t m = 2 * n;
  using CPoly = std::pair<Polynomial, Polynomial>;
  auto mul = [](const CPoly& a, const CPoly& b) -> CPoly {
    return {a.first * b.first - a.second * b.second, a.first * b.second + a.second * b.first};
  };
  const CPoly one{Polynomial::constant(m, 1), Polynomial(m)};

  // Cached powers of z_j and conj(z_j).
  std::vector<std::vector<CPoly>> zpow(n, {one}), zbpow(n, {one});
  auto power = [&](std::vector<CPoly>& cache, std::size_t j, std::uint32_t e, bool conjugate) -> const CPoly& {
    const CPoly base{Polynomial::variable(m, 2 * j),
                     conjugate ? -Polynomial::variable(m, 2 * j + 1) : Polynomial::variable(m, 2 * j + 1)};
    while (cache.size() <= e) cache.push_back(mul(cache.back(), base));
    return cache[e];
  };

  Polynomial re(m), im(m);
  for (const auto& [k, c] : f.terms()) {
    CPoly term = one;
    for (std::size_t j = 0; j < n; ++j) {
      if (k.first[j]) term = mul(term, power(zpow[j], j, k.first[j], false));
      if (k.second[j]) term = mul(term, power(zbpow[j], j, k.second[j], true));
    }
    re = re + (c.re * term.first - c.im * term.second);
    im = im + (c.re * term.second + c.im * term.first);
  }
  return {re, im};
}

}  // namespace germfib
