#pragma once

// One table of tolerances and sampling sizes, read from `key = value` files and
// overridable from the command line.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "germfib/errors.hpp"
#include "germfib/report.hpp"

namespace germfib {

struct Config {
  // variety numerics
  double tol_variety = 1e-10;
  double rank_gap = 1e-8;
  double tol_zero = 1e-9;
  double r0 = 0.5;
  int rungs = 4;
  double link_scale = 0.2;
  // exclusion of points near G^-1(Disc G), relative to |x|
  double cluster_margin = 0.2;
  double strict_margin = 1e-3;
  // discriminant
  double angular_tol = 1e-2;
  double disc_bin_tol = 1e-3;
  // conditions
  double cond_main_ratio = 0.05;
  double rho_guard = 1e-7;
  int weight_bound = 12;
  int weight_trials = 1000;
  // flow
  double eps = 0.5;
  double eta = 0.0;  // 0 means eps / 100
  double drift_tol = 1e-6;
  double sphere_residual_tol = 1e-6;
  int max_flow_steps = 20000;
  bool scale_sweep = false;
  // sampling sizes
  int sing_seeds = 300;
  int zero_seeds = 60;
  int milnor_seeds = 1500;
  int psi_seeds = 400;
  int fiber_points = 50;
  int coverage_samples = 12;
  int max_psi_equations = 20000;
  std::uint64_t seed = 1;

  double effective_eta() const { return eta > 0.0 ? eta : eps / 100.0; }

  std::vector<double> ladder() const {
    std::vector<double> out;
    double r = r0;
    for (int i = 0; i < rungs; ++i, r /= 2.0) out.push_back(r);
    return out;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) throw InputError(std::string(name) + " must be positive");
    };
    positive(tol_variety, "tol_variety");
    positive(rank_gap, "rank_gap");
    positive(tol_zero, "tol_zero");
    positive(r0, "r0");
    positive(link_scale, "link_scale");
    positive(angular_tol, "angular_tol");
    positive(disc_bin_tol, "disc_bin_tol");
    positive(eps, "eps");
    positive(drift_tol, "drift_tol");
    positive(sphere_residual_tol, "sphere_residual_tol");
    if (eta < 0.0) throw InputError("eta must be >= 0");
    if (effective_eta() >= eps) throw InputError("eta must be smaller than eps");
    if (rungs < 2) throw InputError("rungs must be >= 2");
    if (weight_bound < 1) throw InputError("weight_bound must be >= 1");
    for (int v : {sing_seeds, zero_seeds, milnor_seeds, psi_seeds, fiber_points, coverage_samples, weight_trials,
                  max_flow_steps, max_psi_equations}) {
      if (v < 1) throw InputError("sample counts must be >= 1");
    }
  }

  Json to_json() const {
    return Json{{"tol_variety", tol_variety},
                {"rank_gap", rank_gap},
                {"tol_zero", tol_zero},
                {"r0", r0},
                {"rungs", rungs},
                {"link_scale", link_scale},
                {"cluster_margin", cluster_margin},
                {"strict_margin", strict_margin},
                {"angular_tol", angular_tol},
                {"disc_bin_tol", disc_bin_tol},
                {"cond_main_ratio", cond_main_ratio},
                {"rho_guard", rho_guard},
                {"weight_bound", weight_bound},
                {"weight_trials", weight_trials},
                {"eps", eps},
                {"eta", effective_eta()},
                {"drift_tol", drift_tol},
                {"sphere_residual_tol", sphere_residual_tol},
                {"max_flow_steps", max_flow_steps},
                {"scale_sweep", scale_sweep},
                {"sing_seeds", sing_seeds},
                {"zero_seeds", zero_seeds},
                {"milnor_seeds", milnor_seeds},
                {"psi_seeds", psi_seeds},
                {"fiber_points", fiber_points},
                {"coverage_samples", coverage_samples},
                {"max_psi_equations", max_psi_equations},
                {"seed", seed}};
  }

  /// key = value lines, '#' comments. Unknown keys and malformed values are input errors.
  void apply(const std::string& key, const std::string& value) {
    auto as_double = [&]() {
      double v = 0.0;
      const auto* b = value.data();
      const auto* e = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e) throw InputError("config key '" + key + "': '" + value + "' is not a number");
      return v;
    };
    auto as_int = [&]() {
      long long v = 0;
      const auto* b = value.data();
      const auto* e = value.data() + value.size();
      auto [ptr, ec] = std::from_chars(b, e, v);
      if (ec != std::errc() || ptr != e) throw InputError("config key '" + key + "': '" + value + "' is not an integer");
      return v;
    };
    auto as_bool = [&]() {
      if (value == "true" || value == "1" || value == "yes") return true;
      if (value == "false" || value == "0" || value == "no") return false;
      throw InputError("config key '" + key + "': '" + value + "' is not a boolean");
    };
    const std::map<std::string, std::function<void()>> table = {
        {"tol_variety", [&] { tol_variety = as_double(); }},
        {"rank_gap", [&] { rank_gap = as_double(); }},
        {"tol_zero", [&] { tol_zero = as_double(); }},
        {"r0", [&] { r0 = as_double(); }},
        {"rungs", [&] { rungs = static_cast<int>(as_int()); }},
        {"link_scale", [&] { link_scale = as_double(); }},
        {"cluster_margin", [&] { cluster_margin = as_double(); }},
        {"strict_margin", [&] { strict_margin = as_double(); }},
        {"angular_tol", [&] { angular_tol = as_double(); }},
        {"disc_bin_tol", [&] { disc_bin_tol = as_double(); }},
        {"cond_main_ratio", [&] { cond_main_ratio = as_double(); }},
        {"rho_guard", [&] { rho_guard = as_double(); }},
        {"weight_bound", [&] { weight_bound = static_cast<int>(as_int()); }},
        {"weight_trials", [&] { weight_trials = static_cast<int>(as_int()); }},
        {"eps", [&] { eps = as_double(); }},
        {"eta", [&] { eta = as_double(); }},
        {"drift_tol", [&] { drift_tol = as_double(); }},
        {"sphere_residual_tol", [&] { sphere_residual_tol = as_double(); }},
        {"max_flow_steps", [&] { max_flow_steps = static_cast<int>(as_int()); }},
        {"scale_sweep", [&] { scale_sweep = as_bool(); }},
        {"sing_seeds", [&] { sing_seeds = static_cast<int>(as_int()); }},
        {"zero_seeds", [&] { zero_seeds = static_cast<int>(as_int()); }},
        {"milnor_seeds", [&] { milnor_seeds = static_cast<int>(as_int()); }},
        {"psi_seeds", [&] { psi_seeds = static_cast<int>(as_int()); }},
        {"fiber_points", [&] { fiber_points = static_cast<int>(as_int()); }},
        {"coverage_samples", [&] { coverage_samples = static_cast<int>(as_int()); }},
        {"max_psi_equations", [&] { max_psi_equations = static_cast<int>(as_int()); }},
        {"seed",
         [&] {
           const auto v = as_int();
           if (v < 0) throw InputError("seed must be >= 0");
           seed = static_cast<std::uint64_t>(v);
         }},
    };
    auto it = table.find(key);
    if (it == table.end()) throw InputError("unknown config key '" + key + "'");
    it->second();
  }

  void apply_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
      };
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(n, 1, "expected 'key = value'");
      try {
        apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
      } catch (const ParseError&) {
        throw;
      } catch (const InputError& e) {
        throw ParseError(n, 1, e.what());
      }
    }
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    apply_text(ss.str());
  }

  /// Canonical key = value text of the whole table.
  std::string to_text() const {
    std::ostringstream os;
    const Json table = to_json();
    for (const auto& [k, v] : table.items()) os << k << " = " << (v.is_boolean() ? (v.get<bool>() ? "true" : "false") : v.dump()) << "\n";
    return os.str();
  }
};

/// Seed fallback: GERMFIB_SEED when set, otherwise `fallback`.
inline std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* s = std::getenv("GERMFIB_SEED");
  if (s == nullptr || *s == '\0') return fallback;
  std::uint64_t v = 0;
  const std::string str(s);
  auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), v);
  if (ec != std::errc() || ptr != str.data() + str.size()) throw InputError("GERMFIB_SEED must be a nonnegative integer");
  return v;
}

}  // namespace germfib
