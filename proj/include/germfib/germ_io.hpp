#pragma once

// Germ definition files.
//
//   # comment
//   name: xy_z2
//   vars: x y z
//   G1 = x*y
//   G2 = z^2
//   flags: thom_regular "reason" coprime
//
// Mixed germs declare complex variables and either F or the pair f, g
// (then F = f * conj(g)):
//
//   cvars: z1 z2
//   f = z1^2 + z2^2
//   g = z1^2 - z2^2
//
// Realified variables are named x1 y1 x2 y2 ... in that order.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "germfib/germ.hpp"
#include "germfib/parser.hpp"

namespace germfib {

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

/// Whitespace-separated words; a double-quoted string attaches to the preceding word.
inline std::vector<DeclaredFlag> parse_flag_list(const std::string& text, std::size_t line, std::size_t col0) {
  std::vector<DeclaredFlag> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] == '"') {
      const auto close = text.find('"', i + 1);
      if (close == std::string::npos) throw ParseError(line, col0 + i, "unterminated justification string");
      if (out.empty()) throw ParseError(line, col0 + i, "justification without a flag name");
      out.back().justification = text.substr(i + 1, close - i - 1);
      i = close + 1;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '"') ++j;
    std::string word = text.substr(i, j - i);
    if (!is_identifier(word)) throw ParseError(line, col0 + i, "invalid flag name '" + word + "'");
    out.push_back({word, {}});
    i = j;
  }
  return out;
}

}  // namespace detail

inline MapGerm parse_germ(const std::string& text, std::string default_name = {}) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::string name = std::move(default_name);
  std::vector<std::string> vars, cvars;
  std::map<std::size_t, std::pair<std::string, std::pair<std::size_t, std::size_t>>> comps;  // index -> text, pos
  std::map<std::string, std::pair<std::string, std::pair<std::size_t, std::size_t>>> mixed;   // F/f/g
  std::vector<DeclaredFlag> flags;
  std::size_t vars_line = 0;

  auto split_words = [](const std::string& s) {
    std::istringstream ws(s);
    std::vector<std::string> out;
    std::string w;
    while (ws >> w) out.push_back(w);
    return out;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    if (detail::trim(line).empty()) continue;
    const std::size_t indent = line.find_first_not_of(" \t");

    const auto colon = line.find(':');
    const auto eq = line.find('=');
    if (colon != std::string::npos && (eq == std::string::npos || colon < eq)) {
      const std::string key = detail::trim(line.substr(0, colon));
      const std::string value = line.substr(colon + 1);
      const std::size_t vcol = colon + 2;
      if (key == "name") {
        name = detail::trim(value);
      } else if (key == "vars" || key == "cvars") {
        auto words = split_words(value);
        if (words.empty()) throw ParseError(line_no, vcol, "empty variable list");
        std::size_t search = 0;
        for (const auto& w : words) {
          const auto at = value.find(w, search);
          search = at + w.size();
          if (!detail::is_identifier(w) || w == "conj") {
            throw ParseError(line_no, vcol + at, "invalid variable name '" + w + "'");
          }
        }
        auto sorted = words;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
          throw ParseError(line_no, vcol, "duplicate variable name");
        }
        if (!vars.empty() || !cvars.empty()) throw ParseError(line_no, indent + 1, "variables declared twice");
        (key == "vars" ? vars : cvars) = std::move(words);
        vars_line = line_no;
      } else if (key == "flags" || key == "flag") {
        auto f = detail::parse_flag_list(value, line_no, vcol);
        flags.insert(flags.end(), f.begin(), f.end());
      } else {
        throw ParseError(line_no, indent + 1, "unknown header '" + key + "'");
      }
      continue;
    }
    if (eq == std::string::npos) throw ParseError(line_no, indent + 1, "expected 'key: value' or 'NAME = expression'");
    const std::string lhs = detail::trim(line.substr(0, eq));
    const std::string rhs = line.substr(eq + 1);
    const auto pos = std::make_pair(line_no, eq + 2);
    if (lhs == "F" || lhs == "f" || lhs == "g") {
      if (mixed.count(lhs)) throw ParseError(line_no, indent + 1, "'" + lhs + "' defined twice");
      mixed[lhs] = {rhs, pos};
    } else if (lhs.size() >= 2 && lhs[0] == 'G' &&
               std::all_of(lhs.begin() + 1, lhs.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const std::size_t idx = std::stoul(lhs.substr(1));
      if (idx == 0) throw ParseError(line_no, indent + 1, "components are numbered from G1");
      if (comps.count(idx)) throw ParseError(line_no, indent + 1, "'" + lhs + "' defined twice");
      comps[idx] = {rhs, pos};
    } else {
      throw ParseError(line_no, indent + 1, "unknown definition '" + lhs + "' (expected G1.., F, f or g)");
    }
  }

  if (vars.empty() && cvars.empty()) throw ParseError(line_no + 1, 1, "missing 'vars:' or 'cvars:' header");

  if (!vars.empty()) {
    if (!mixed.empty()) throw ParseError(vars_line, 1, "F/f/g definitions need 'cvars:'");
    if (comps.empty()) throw ParseError(line_no + 1, 1, "no components G1, G2, ... defined");
    std::vector<Polynomial> components;
    std::size_t expect = 1;
    for (const auto& [idx, def] : comps) {
      if (idx != expect) throw ParseError(def.second.first, 1, "component G" + std::to_string(expect) + " is missing");
      components.push_back(parse_polynomial(def.first, vars, def.second.first, def.second.second));
      ++expect;
    }
    return MapGerm(vars, std::move(components), std::move(flags), std::nullopt, name);
  }

  if (!comps.empty()) throw ParseError(comps.begin()->second.second.first, 1, "G components need 'vars:'");
  MixedOrigin origin;
  origin.cvars = cvars;
  auto parse_def = [&](const std::string& key) {
    const auto& d = mixed.at(key);
    return parse_mixed(d.first, cvars, d.second.first, d.second.second);
  };
  if (mixed.count("F")) {
    if (mixed.count("f") || mixed.count("g")) throw ParseError(mixed.at("F").second.first, 1, "give either F or f and g");
    origin.F = parse_def("F");
  } else if (mixed.count("f") && mixed.count("g")) {
    origin.f = parse_def("f");
    origin.g = parse_def("g");
    for (const char* k : {"f", "g"}) {
      const auto& fn = std::string(k) == "f" ? *origin.f : *origin.g;
      if (!fn.is_holomorphic()) throw ParseError(mixed.at(k).second.first, 1, std::string(k) + " must be holomorphic");
    }
    origin.F = *origin.f * origin.g->conj();
  } else {
    throw ParseError(line_no + 1, 1, "mixed germ needs F, or both f and g");
  }
  auto [re, im] = realify(origin.F);
  std::vector<std::string> real_vars;
  for (std::size_t j = 0; j < cvars.size(); ++j) {
    real_vars.push_back("x" + std::to_string(j + 1));
    real_vars.push_back("y" + std::to_string(j + 1));
  }
  return MapGerm(std::move(real_vars), {re, im}, std::move(flags), std::move(origin), name);
}

inline MapGerm load_germ(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open germ file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  return parse_germ(ss.str(), stem);
}

/// Canonical germ-file text (real components; the mixed origin is kept as a comment).
inline std::string to_germ_file(const MapGerm& g) {
  std::ostringstream os;
  if (!g.name().empty()) os << "name: " << g.name() << "\n";
  if (g.origin()) {
    const auto& o = *g.origin();
    os << "# realified from F = " << o.F.to_string(o.cvars) << "\n";
  }
  os << "vars:";
  for (const auto& v : g.var_names()) os << " " << v;
  os << "\n";
  for (std::size_t i = 0; i < g.p(); ++i) os << "G" << i + 1 << " = " << g.component(i).to_string(g.var_names()) << "\n";
  for (const auto& f : g.flags()) {
    os << "flags: " << f.name;
    if (!f.justification.empty()) os << " \"" << f.justification << "\"";
    os << "\n";
  }
  return os.str();
}

}  // namespace germfib
