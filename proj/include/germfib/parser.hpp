#pragma once

// Recursive-descent parser for polynomial expressions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' integer)?
//   primary := number | name | name '(' expr ')' | '(' expr ')'
//
// Division is only allowed by a nonzero constant. Decimal literals are read
// exactly (0.25 == 1/4). The parser is generic over the ring it builds.

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "germfib/errors.hpp"
#include "germfib/mixed.hpp"
#include "germfib/polynomial.hpp"

namespace germfib {

template <class Ring>
struct ParseContext {
  std::function<Ring(const Rational&)> constant;
  std::function<std::optional<Rational>(const Ring&)> as_constant;
  std::function<std::optional<Ring>(std::string_view)> variable;
  /// Optional unary function calls such as conj(...). Returns nullopt for unknown names.
  std::function<std::optional<Ring>(std::string_view, const Ring&)> call;
};

namespace detail {

template <class Ring>
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const ParseContext<Ring>& ctx, std::size_t line, std::size_t column0)
      : text_(text), ctx_(ctx), line_(line), column0_(column0) {}

  Ring parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression");
    Ring r = expr();
    skip_ws();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, column0_ + pos_, what); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Ring expr() {
    Ring acc = term();
    while (true) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  Ring term() {
    Ring acc = unary();
    while (true) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Ring d = unary();
        auto c = ctx_.as_constant(d);
        if (!c) {
          pos_ = at;
          fail("division is only allowed by a constant");
        }
        if (*c == 0) {
          pos_ = at;
          fail("division by zero");
        }
        acc = acc * ctx_.constant(Rational(1) / *c);
      } else {
        return acc;
      }
    }
  }

  Ring unary() {
    if (accept('-')) return ctx_.constant(Rational(-1)) * unary();
    if (accept('+')) return unary();
    return power();
  }

  Ring power() {
    Ring base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("exponent must be a nonnegative integer literal");
      if (pos_ - start > 4) {
        pos_ = start;
        fail("exponent too large");
      }
      const unsigned e = static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start))));
      return base.pow(e);
    }
    return base;
  }

  Ring primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Ring r = expr();
      if (!accept(')')) fail("expected ')'");
      return r;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ctx_.constant(number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        ++pos_;
        Ring arg = expr();
        if (!accept(')')) fail("expected ')'");
        std::optional<Ring> r;
        if (ctx_.call) r = ctx_.call(name, arg);
        if (!r) {
          pos_ = start;
          fail("unknown function '" + std::string(name) + "'");
        }
        return *r;
      }
      auto v = ctx_.variable(name);
      if (!v) {
        pos_ = start;
        fail("unknown variable '" + std::string(name) + "'");
      }
      return *v;
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Rational number() {
    const std::size_t start = pos_;
    Rational value(0);
    bool digits = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
      digits = true;
    }
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      Rational scale(1);
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        scale /= 10;
        value += scale * (text_[pos_] - '0');
        ++pos_;
        digits = true;
      }
    }
    if (!digits) {
      pos_ = start;
      fail("malformed number");
    }
    return value;
  }

  std::string_view text_;
  const ParseContext<Ring>& ctx_;
  std::size_t line_;
  std::size_t column0_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`; error columns are reported relative to `column0` (1-based column of text[0]).
template <class Ring>
Ring parse_expression(std::string_view text, const ParseContext<Ring>& ctx, std::size_t line = 1,
                      std::size_t column0 = 1) {
  return detail::ExpressionParser<Ring>(text, ctx, line, column0).parse();
}

inline ParseContext<Polynomial> polynomial_context(const std::vector<std::string>& names) {
  const std::size_t n = names.size();
  ParseContext<Polynomial> ctx;
  ctx.constant = [n](const Rational& c) { return Polynomial::constant(n, c); };
  ctx.as_constant = [](const Polynomial& p) -> std::optional<Rational> {
    if (!p.is_constant()) return std::nullopt;
    return p.constant_term();
  };
  ctx.variable = [&names, n](std::string_view s) -> std::optional<Polynomial> {
    for (std::size_t i = 0; i < n; ++i) {
      if (names[i] == s) return Polynomial::variable(n, i);
    }
    return std::nullopt;
  };
  return ctx;
}

inline ParseContext<MixedFunction> mixed_context(const std::vector<std::string>& names) {
  const std::size_t n = names.size();
  ParseContext<MixedFunction> ctx;
  ctx.constant = [n](const Rational& c) { return MixedFunction::constant(n, {c, 0}); };
  ctx.as_constant = [](const MixedFunction& f) -> std::optional<Rational> {
    if (!f.is_constant()) return std::nullopt;
    const auto c = f.constant_term();
    if (c.im != 0) return std::nullopt;
    return c.re;
  };
  ctx.variable = [&names, n](std::string_view s) -> std::optional<MixedFunction> {
    if (s == "i" || s == "I") {
      bool shadowed = false;
      for (const auto& nm : names) shadowed = shadowed || nm == s;
      if (!shadowed) return MixedFunction::constant(n, {0, 1});
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (names[j] == s) return MixedFunction::variable(n, j);
    }
    return std::nullopt;
  };
  ctx.call = [](std::string_view fn, const MixedFunction& arg) -> std::optional<MixedFunction> {
    if (fn == "conj") return arg.conj();
    return std::nullopt;
  };
  return ctx;
}

/// Real polynomial in the named variables.
inline Polynomial parse_polynomial(std::string_view text, const std::vector<std::string>& names,
                                   std::size_t line = 1, std::size_t column0 = 1) {
  const auto ctx = polynomial_context(names);
  return parse_expression<Polynomial>(text, ctx, line, column0);
}

/// Mixed polynomial in complex variables; `conj(...)` conjugates any subexpression and `i` is
/// the imaginary unit unless a variable of that name exists.
inline MixedFunction parse_mixed(std::string_view text, const std::vector<std::string>& names,
                                 std::size_t line = 1, std::size_t column0 = 1) {
  const auto ctx = mixed_context(names);
  return parse_expression<MixedFunction>(text, ctx, line, column0);
}

}  // namespace germfib
