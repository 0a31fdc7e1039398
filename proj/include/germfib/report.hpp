#pragma once

// Condition reports and the implication graph between conditions.
//
// A report carries a numerical verdict plus the names of implication edges whose
// hypotheses all passed in the same bundle. Edges are keyed by what they assert, e.g.
// "sphere-fibration-criterion", not by where the result was first proved.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "germfib/errors.hpp"

namespace germfib {

using Json = nlohmann::json;

enum class ConditionId {
  nice,
  radial_disc,
  cond_main,
  rho_regular_psi,
  mvf_exists,
  tube_exists,
  sphere_exists,
  equivalence_evidence,
  radial_homogeneous,
  polar_homogeneous,
  milnor_image_coverage,
};

enum class Verdict { pass, fail, inconclusive };

inline const std::vector<ConditionId>& all_conditions() {
  static const std::vector<ConditionId> ids = {
      ConditionId::nice,          ConditionId::radial_disc,          ConditionId::cond_main,
      ConditionId::rho_regular_psi, ConditionId::mvf_exists,         ConditionId::tube_exists,
      ConditionId::sphere_exists, ConditionId::equivalence_evidence, ConditionId::radial_homogeneous,
      ConditionId::polar_homogeneous, ConditionId::milnor_image_coverage,
  };
  return ids;
}

inline const char* to_string(ConditionId c) {
  switch (c) {
    case ConditionId::nice: return "nice";
    case ConditionId::radial_disc: return "radial_disc";
    case ConditionId::cond_main: return "cond_main";
    case ConditionId::rho_regular_psi: return "rho_regular_psi";
    case ConditionId::mvf_exists: return "mvf_exists";
    case ConditionId::tube_exists: return "tube_exists";
    case ConditionId::sphere_exists: return "sphere_exists";
    case ConditionId::equivalence_evidence: return "equivalence_evidence";
    case ConditionId::radial_homogeneous: return "radial_homogeneous";
    case ConditionId::polar_homogeneous: return "polar_homogeneous";
    case ConditionId::milnor_image_coverage: return "milnor_image_coverage";
  }
  return "unknown";
}

inline ConditionId condition_from_string(const std::string& s) {
  for (auto c : all_conditions()) {
    if (s == to_string(c)) return c;
  }
  throw InputError("unknown condition '" + s + "'");
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw InputError("unknown verdict '" + s + "'");
}

struct ConditionReport {
  ConditionId condition = ConditionId::nice;
  Verdict verdict = Verdict::inconclusive;
  Json evidence = Json::object();
  std::vector<std::string> implied_by;
  Json tolerances = Json::object();
  std::uint64_t seed = 0;
  /// Distinguishes several reports of one condition, e.g. one per arc of the target circle.
  std::string scope;
};

inline Json to_json(const ConditionReport& r) {
  Json j;
  j["condition"] = to_string(r.condition);
  j["verdict"] = to_string(r.verdict);
  j["evidence"] = r.evidence;
  j["implied_by"] = r.implied_by;
  j["tolerances"] = r.tolerances;
  j["seed"] = r.seed;
  if (!r.scope.empty()) j["scope"] = r.scope;
  return j;
}

inline ConditionReport report_from_json(const Json& j) {
  ConditionReport r;
  try {
    r.condition = condition_from_string(j.at("condition").get<std::string>());
    r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    r.evidence = j.at("evidence");
    r.implied_by = j.at("implied_by").get<std::vector<std::string>>();
    r.tolerances = j.at("tolerances");
    r.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scope")) r.scope = j.at("scope").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed condition report: ") + e.what());
  }
  return r;
}

// --------------------------------------------------------------------------------------------
// Implication edges

struct ImplicationEdge {
  std::string name;
  std::vector<ConditionId> hypotheses;
  /// Facts the germ file must declare (e.g. "icis"); they are taken on trust.
  std::vector<std::string> declared_flags;
  std::vector<ConditionId> conclusions;
  /// The edge needs a genuine sphere fibration setting, m > p >= 2.
  bool needs_sphere_setting = false;
  /// When set, the concluding report's evidence must hold `true` under this key.
  std::string evidence_key;
};

inline const std::vector<ImplicationEdge>& implication_edges() {
  using C = ConditionId;
  static const std::vector<ImplicationEdge> edges = {
      {"radial-homogeneous-structure", {C::radial_homogeneous}, {}, {C::nice, C::radial_disc}, false, {}},
      {"euler-field-transversality", {C::radial_homogeneous}, {}, {C::rho_regular_psi}, true, {}},
      {"radial-homogeneous-fibrations",
       {C::radial_homogeneous, C::cond_main},
       {},
       {C::tube_exists, C::sphere_exists, C::mvf_exists, C::equivalence_evidence},
       true, {}},
      {"polar-homogeneous-fibrations",
       {C::polar_homogeneous},
       {},
       {C::nice, C::radial_disc, C::tube_exists, C::sphere_exists, C::mvf_exists, C::equivalence_evidence},
       true, {}},
      // Declared facts about a pair (f, g) behind G = f * conj(g).
      {"thom-regular-pair-condition-main", {}, {"thom_regular", "coprime"}, {C::cond_main}, false, {}},
      {"icis-pair-regularity", {}, {"icis"}, {C::nice, C::cond_main, C::tube_exists}, false, {}},
      {"tube-existence-from-condition-main", {C::nice, C::cond_main}, {}, {C::tube_exists}, false, {}},
      {"sphere-fibration-criterion",
       {C::nice, C::radial_disc, C::cond_main, C::rho_regular_psi},
       {},
       {C::sphere_exists},
       true, {}},
      {"milnor-component-fiber-criterion",
       {C::nice, C::radial_disc, C::tube_exists, C::sphere_exists},
       {},
       {C::mvf_exists},
       true,
       "component_fiber_criterion"},
      {"blow-away-equivalence",
       {C::nice, C::radial_disc, C::tube_exists, C::sphere_exists, C::mvf_exists},
       {},
       {C::equivalence_evidence},
       true, {}},
  };
  return edges;
}

inline const ImplicationEdge* find_edge(const std::string& name) {
  for (const auto& e : implication_edges()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

/// Tracks the best-known verdict of each condition while a bundle is assembled.
class VerdictTable {
 public:
  explicit VerdictTable(std::vector<std::string> flags = {}, bool sphere_setting = true)
      : flags_(std::move(flags)), sphere_setting_(sphere_setting) {}

  void set(ConditionId c, Verdict v) {
    auto it = verdicts_.find(c);
    if (it == verdicts_.end()) {
      verdicts_[c] = v;
      return;
    }
    // Several scoped reports of one condition: any fail dominates, then inconclusive.
    if (v == Verdict::fail || (v == Verdict::inconclusive && it->second == Verdict::pass)) it->second = v;
  }

  std::optional<Verdict> get(ConditionId c) const {
    auto it = verdicts_.find(c);
    if (it == verdicts_.end()) return std::nullopt;
    return it->second;
  }

  bool passed(ConditionId c) const { return get(c) == Verdict::pass; }

  bool edge_holds(const ImplicationEdge& e, const Json* evidence = nullptr) const {
    if (e.needs_sphere_setting && !sphere_setting_) return false;
    if (!e.evidence_key.empty()) {
      if (evidence == nullptr || !evidence->contains(e.evidence_key) || evidence->at(e.evidence_key) != true) return false;
    }
    for (auto h : e.hypotheses) {
      if (!passed(h)) return false;
    }
    for (const auto& f : e.declared_flags) {
      if (std::find(flags_.begin(), flags_.end(), f) == flags_.end()) return false;
    }
    return true;
  }

  /// Names of edges concluding c whose hypotheses currently all pass.
  std::vector<std::string> sound_edges_for(ConditionId c, const Json* evidence = nullptr) const {
    std::vector<std::string> out;
    for (const auto& e : implication_edges()) {
      if (std::find(e.conclusions.begin(), e.conclusions.end(), c) == e.conclusions.end()) continue;
      if (edge_holds(e, evidence)) out.push_back(e.name);
    }
    return out;
  }

  /// Edges concluding c that do not hold yet, with the hypotheses still missing.
  Json unsatisfied_edges_for(ConditionId c, const Json* evidence = nullptr) const {
    Json out = Json::array();
    for (const auto& e : implication_edges()) {
      if (std::find(e.conclusions.begin(), e.conclusions.end(), c) == e.conclusions.end()) continue;
      if (edge_holds(e, evidence)) continue;
      Json missing = Json::array();
      if (e.needs_sphere_setting && !sphere_setting_) missing.push_back("m > p >= 2");
      if (!e.evidence_key.empty() && !(evidence && evidence->contains(e.evidence_key) && evidence->at(e.evidence_key) == true)) {
        missing.push_back("evidence:" + e.evidence_key);
      }
      for (auto h : e.hypotheses) {
        if (!passed(h)) missing.push_back(to_string(h));
      }
      for (const auto& f : e.declared_flags) {
        if (std::find(flags_.begin(), flags_.end(), f) == flags_.end()) missing.push_back("flag:" + f);
      }
      out.push_back({{"edge", e.name}, {"missing", missing}});
    }
    return out;
  }

  const std::vector<std::string>& flags() const noexcept { return flags_; }
  bool sphere_setting() const noexcept { return sphere_setting_; }

 private:
  std::map<ConditionId, Verdict> verdicts_;
  std::vector<std::string> flags_;
  bool sphere_setting_ = true;
};

/// Merges a numerical verdict with the implication edges that currently hold. A numerical
/// fail is never overridden; a conflicting edge is recorded in the evidence instead.
inline void apply_implications(ConditionReport& r, const VerdictTable& table) {
  const auto edges = table.sound_edges_for(r.condition, &r.evidence);
  const Json open = table.unsatisfied_edges_for(r.condition, &r.evidence);
  if (!open.empty()) r.evidence["unsatisfied_implications"] = open;
  if (edges.empty()) return;
  if (r.verdict == Verdict::fail) {
    r.evidence["conflicting_implications"] = edges;
    return;
  }
  r.verdict = Verdict::pass;
  r.implied_by = edges;
}

}  // namespace germfib
