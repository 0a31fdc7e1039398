#pragma once

// The full pipeline behind `analyze`: every check in dependency order, implication edges applied
// as verdicts arrive, and the reproducible output bundle.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "germfib/conditions.hpp"
#include "germfib/config.hpp"
#include "germfib/discriminant.hpp"
#include "germfib/germ_io.hpp"
#include "germfib/mvf.hpp"
#include "germfib/report.hpp"
#include "germfib/variety.hpp"

namespace germfib {

inline constexpr const char* tool_version = "germfib 0.3.1";

/// Flags that only make sense for a pair (f, g) of complex germs behind F = f conj(g).
inline bool is_pair_flag(const std::string& f) { return f == "icis" || f == "thom_regular" || f == "coprime"; }

struct NamedWitnessSet {
  std::string name;
  WitnessSet ws;
};

struct NamedFiber {
  std::string name;
  FiberSample fs;
};

struct NamedTrajectory {
  std::string name;
  Trajectory tr;
};

struct Analysis {
  Config config;
  std::string germ_name;
  std::string germ_source;
  std::size_t m = 0;
  std::size_t p = 0;
  std::vector<std::string> trusted_flags;
  Json ignored_flags = Json::array();
  std::optional<RadialWeights> radial;
  std::optional<PolarWeights> polar;
  std::optional<DiscriminantSample> disc;
  std::vector<ConditionReport> reports;
  std::vector<NamedWitnessSet> witness_sets;
  std::vector<NamedFiber> fibers;
  std::vector<NamedTrajectory> trajectories;

  std::vector<const ConditionReport*> reports_for(ConditionId c) const {
    std::vector<const ConditionReport*> out;
    for (const auto& r : reports) {
      if (r.condition == c) out.push_back(&r);
    }
    return out;
  }

  /// Fail dominates, then inconclusive; nullopt when the condition was not evaluated.
  std::optional<Verdict> verdict(ConditionId c) const {
    std::optional<Verdict> v;
    for (const auto* r : reports_for(c)) {
      if (!v || r->verdict == Verdict::fail || (r->verdict == Verdict::inconclusive && *v == Verdict::pass)) {
        v = r->verdict;
      }
    }
    return v;
  }
};

namespace detail {

inline std::string rung_name(const std::string& stem, std::size_t k) { return stem + "_r" + std::to_string(k); }

inline EquivalenceOptions equivalence_options(const Config& cfg) {
  EquivalenceOptions o;
  o.drift_tol = cfg.drift_tol;
  o.sphere_residual_tol = cfg.sphere_residual_tol;
  o.fiber.tol_zero = cfg.tol_zero;
  o.fiber.angular_tol = cfg.angular_tol;
  o.fiber.newton = newton_options(cfg);
  o.flow.max_steps = static_cast<std::size_t>(cfg.max_flow_steps);
  o.flow.field.tol_zero = cfg.tol_zero;
  return o;
}

}  // namespace detail

/// Runs the checks in dependency order. With stop_after set, returns right after the reports
/// of that condition are in.
inline Analysis analyze(const MapGerm& g, const Config& cfg, std::optional<ConditionId> stop_after = std::nullopt,
                        std::string source = {}) {
  cfg.validate();
  Analysis an;
  an.config = cfg;
  an.germ_name = g.name();
  an.germ_source = source.empty() ? to_germ_file(g) : std::move(source);
  an.m = g.m();
  an.p = g.p();
  const bool pair = g.origin() && g.origin()->f && g.origin()->g;
  for (const auto& f : g.flags()) {
    if (is_pair_flag(f.name) && !pair) {
      an.ignored_flags.push_back({{"flag", f.name}, {"reason", "declared pair properties need a germ given as f and g"}});
    } else {
      an.trusted_flags.push_back(f.name);
    }
  }
  const bool sphere_setting = g.m() > g.p() && g.p() >= 2;
  VerdictTable table(an.trusted_flags, sphere_setting);
  const auto ladder = cfg.ladder();
  const auto nopts = newton_options(cfg);

  auto record = [&](ConditionReport r) {
    if (g.p() == 1) r.evidence["extension"] = "p = 1: only the tube side of the theory applies; the target sphere is two points";
    apply_implications(r, table);
    r.seed = cfg.seed;
    table.set(r.condition, r.verdict);
    an.reports.push_back(std::move(r));
  };
  auto done = [&](ConditionId c) { return stop_after && *stop_after == c; };

  record(check_radial_homogeneity(g, cfg, &an.radial));
  if (done(ConditionId::radial_homogeneous)) return an;
  record(check_polar_homogeneity(g, cfg, &an.polar));
  if (done(ConditionId::polar_homogeneous)) return an;

  an.disc = sample_discriminant(g, ladder, derive_seed(cfg.seed, 1), discriminant_options(cfg));
  const auto& ds = *an.disc;
  record(check_niceness(g, ds, an.radial));
  if (done(ConditionId::nice)) return an;
  record(check_radial_discriminant(ds, cfg.angular_tol));
  if (done(ConditionId::radial_disc)) return an;

  const PreimageOracle oracle(g, ds, nopts);
  std::vector<RungWitnesses> milnor;
  if (g.m() >= g.p() + 1) {
    milnor = sample_ladder(milnor_set_system(g), ladder, static_cast<std::size_t>(cfg.milnor_seeds),
                           derive_seed(cfg.seed, 3), nopts, oracle, cfg.strict_margin);
    for (std::size_t k = 0; k < milnor.size(); ++k) {
      an.witness_sets.push_back({detail::rung_name("milnor", k),
                                 cluster_components(with_margin(milnor[k].ws, cfg.cluster_margin), cfg.link_scale)});
    }
    record(check_condition_main(g, milnor, cfg));
  } else {
    record(not_applicable(ConditionId::cond_main, "the Milnor set needs m >= p + 1"));
  }
  if (done(ConditionId::cond_main)) return an;

  if (sphere_setting) {
    try {
      const auto psi = sample_ladder(psi_milnor_set_system(g, static_cast<std::size_t>(cfg.max_psi_equations)), ladder,
                                     static_cast<std::size_t>(cfg.psi_seeds), derive_seed(cfg.seed, 4), nopts, oracle,
                                     cfg.strict_margin);
      for (std::size_t k = 0; k < psi.size(); ++k) an.witness_sets.push_back({detail::rung_name("psi_milnor", k), psi[k].ws});
      record(check_rho_regularity_psi(g, psi, ds, cfg));
    } catch (const UnsupportedError& e) {
      record(not_applicable(ConditionId::rho_regular_psi, e.what()));
    }
  } else {
    record(not_applicable(ConditionId::rho_regular_psi, "needs m > p >= 2"));
  }
  if (done(ConditionId::rho_regular_psi)) return an;

  // Tube and sphere fibrations are established by implication only.
  for (auto c : {ConditionId::tube_exists, ConditionId::sphere_exists}) {
    ConditionReport r;
    r.condition = c;
    r.evidence["note"] = "decided by implication from the verified hypotheses";
    if (g.m() <= g.p()) r = not_applicable(c, "needs m > p");
    record(std::move(r));
    if (done(c)) return an;
  }

  if (sphere_setting && !milnor.empty()) {
    record(check_mvf_exists(g, milnor.front().ws, an.witness_sets.front().ws, cfg));
  } else {
    record(not_applicable(ConditionId::mvf_exists, "needs m > p >= 2"));
  }
  if (done(ConditionId::mvf_exists)) return an;

  record(check_milnor_image_coverage(g, ds, cfg.eps, cfg.effective_eta(), static_cast<std::size_t>(cfg.coverage_samples),
                                     derive_seed(cfg.seed, 6), cfg));
  if (done(ConditionId::milnor_image_coverage)) return an;

  if (g.m() > g.p()) {
    const auto eopts = detail::equivalence_options(cfg);
    std::vector<double> scales = {cfg.eps};
    if (cfg.scale_sweep) scales.push_back(cfg.eps / 2.0);
    for (std::size_t si = 0; si < scales.size(); ++si) {
      const double eps = scales[si];
      const double eta = cfg.effective_eta() * eps / cfg.eps;
      for (const auto& arc : target_arcs(ds)) {
        auto run = equivalence_evidence(g, arc.midpoint, eps, eta, static_cast<std::size_t>(cfg.fiber_points),
                                        derive_seed(cfg.seed, 10 + 100 * si + static_cast<std::uint64_t>(arc.id)), ds,
                                        eopts);
        const std::string tag = "arc" + std::to_string(arc.id) + (si == 0 ? "" : "_eps" + std::to_string(si));
        if (si > 0) run.report.scope += ", eps " + format_double(eps);
        if (si == 0) {
          an.fibers.push_back({"tube_" + tag, run.tube});
          an.fibers.push_back({"sphere_" + tag,
                               sample_fiber(g, FiberKind::sphere, arc.midpoint, eps, eta,
                                            static_cast<std::size_t>(cfg.fiber_points),
                                            derive_seed(cfg.seed, 20 + static_cast<std::uint64_t>(arc.id)), ds.rays,
                                            eopts.fiber)});
          for (std::size_t j = 0; j < run.trajectories.size() && j < 3; ++j) {
            an.trajectories.push_back({tag + "_t" + std::to_string(j), std::move(run.trajectories[j])});
          }
        }
        record(std::move(run.report));
      }
    }
  } else {
    record(not_applicable(ConditionId::equivalence_evidence, "needs m > p"));
  }
  return an;
}

// --------------------------------------------------------------------------------------------
// Soundness of implied verdicts

/// Every implied_by entry must name a known edge concluding that condition, whose hypotheses
/// all pass in the bundle and whose declared flags were trusted. Violations are internal bugs.
inline void validate_reports(const Json& bundle) {
  if (!bundle.contains("reports") || !bundle["reports"].is_array()) throw InputError("bundle report has no reports array");
  std::vector<ConditionReport> reports;
  for (const auto& j : bundle["reports"]) reports.push_back(report_from_json(j));
  std::vector<std::string> flags;
  if (bundle.contains("flags")) {
    for (const auto& f : bundle["flags"].at("trusted")) flags.push_back(f.get<std::string>());
  }
  const bool sphere_setting = bundle.at("germ").at("m").get<std::size_t>() > bundle.at("germ").at("p").get<std::size_t>() &&
                              bundle.at("germ").at("p").get<std::size_t>() >= 2;
  VerdictTable table(flags, sphere_setting);
  for (const auto& r : reports) table.set(r.condition, r.verdict);
  for (const auto& r : reports) {
    if (!r.implied_by.empty() && r.verdict != Verdict::pass) {
      throw InvariantViolation(std::string(to_string(r.condition)) + " lists implications but is not a pass");
    }
    for (const auto& name : r.implied_by) {
      const auto* e = find_edge(name);
      if (!e) throw InvariantViolation("unknown implication edge '" + name + "'");
      if (std::find(e->conclusions.begin(), e->conclusions.end(), r.condition) == e->conclusions.end()) {
        throw InvariantViolation("edge '" + name + "' does not conclude " + to_string(r.condition));
      }
      if (!table.edge_holds(*e, &r.evidence)) {
        throw InvariantViolation("edge '" + name + "' used for " + std::string(to_string(r.condition)) +
                                 " but its hypotheses do not all pass");
      }
    }
  }
}

// --------------------------------------------------------------------------------------------
// Bundle output

inline Json germ_json(const Analysis& an) {
  return Json{{"name", an.germ_name}, {"m", an.m}, {"p", an.p}, {"source", an.germ_source}};
}

inline Json bundle_json(const Analysis& an, const std::vector<std::string>& artifacts) {
  Json j;
  j["tool"] = tool_version;
  j["germ"] = germ_json(an);
  j["seed"] = an.config.seed;
  j["config"] = an.config.to_json();
  j["flags"] = {{"trusted", an.trusted_flags}, {"ignored", an.ignored_flags}};
  j["weights"] = {{"radial", an.radial ? to_json(*an.radial) : Json(nullptr)},
                  {"polar", an.polar ? to_json(*an.polar) : Json(nullptr)}};
  if (an.disc) j["discriminant"] = to_json(*an.disc);
  Json reps = Json::array();
  for (const auto& r : an.reports) reps.push_back(to_json(r));
  j["reports"] = reps;
  Json summary = Json::object();
  for (auto c : all_conditions()) {
    if (auto v = an.verdict(c)) summary[to_string(c)] = to_string(*v);
  }
  j["summary"] = summary;
  j["artifacts"] = artifacts;
  return j;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace detail

/// Writes the bundle into dir. Everything except meta.json is a function of the germ and the
/// configuration, so reruns reproduce it byte for byte.
inline std::vector<std::string> write_bundle(const Analysis& an, const std::filesystem::path& dir,
                                             const std::string& command_line = {}) {
  std::vector<std::string> artifacts;
  auto emit = [&](const std::string& rel, const std::string& text) {
    detail::write_text(dir / rel, text);
    artifacts.push_back(rel);
  };
  emit("germ.gm", an.germ_source);
  emit("config.txt", an.config.to_text());
  for (const auto& w : an.witness_sets) {
    std::ostringstream os;
    write_witness_csv(os, w.ws);
    emit("witness/" + w.name + ".csv", os.str());
  }
  for (const auto& f : an.fibers) {
    std::ostringstream os;
    write_fiber_csv(os, f.fs);
    emit("fibers/" + f.name + ".csv", os.str());
    if (f.fs.nvars == 3) {
      std::ostringstream ply;
      write_fiber_ply(ply, f.fs);
      emit("fibers/" + f.name + ".ply", ply.str());
    }
  }
  for (const auto& t : an.trajectories) {
    std::ostringstream os;
    write_trajectory_csv(os, t.tr, an.m, an.p);
    emit("trajectories/" + t.name + ".csv", os.str());
  }
  std::sort(artifacts.begin(), artifacts.end());
  const Json report = bundle_json(an, artifacts);
  validate_reports(report);
  detail::write_text(dir / "report.json", report.dump(2) + "\n");
  const Json meta = {{"created_utc", detail::utc_timestamp()}, {"tool", tool_version}, {"command", command_line}};
  detail::write_text(dir / "meta.json", meta.dump(2) + "\n");
  artifacts.push_back("report.json");
  return artifacts;
}

inline Json load_bundle_report(const std::filesystem::path& dir) {
  std::ifstream in(dir / "report.json");
  if (!in) throw InputError("no report.json in bundle '" + dir.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("report.json is not valid JSON: ") + e.what());
  }
}

// --------------------------------------------------------------------------------------------
// Export

namespace detail {

/// Rows of a numeric CSV with header; all cells parsed as doubles.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) throw InputError("empty CSV '" + path.string() + "'");
  header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : split(line)) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw InputError("non-numeric cell '" + c + "' in '" + path.string() + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return {header, rows};
}

inline FiberSample fiber_from_csv(const std::filesystem::path& path) {
  const auto [header, rows] = read_numeric_csv(path);
  if (header.size() < 2 || header.back() != "residual") throw InputError("'" + path.string() + "' is not a fibre sample");
  FiberSample fs;
  fs.nvars = header.size() - 1;
  fs.kind = path.filename().string().rfind("sphere", 0) == 0 ? FiberKind::sphere : FiberKind::tube;
  for (const auto& r : rows) {
    FiberPoint pt;
    pt.x = Vector(static_cast<Eigen::Index>(fs.nvars));
    for (std::size_t i = 0; i < fs.nvars; ++i) pt.x[static_cast<Eigen::Index>(i)] = r.at(i);
    pt.residual = r.back();
    fs.points.push_back(std::move(pt));
  }
  return fs;
}

}  // namespace detail

/// Copies or converts artifacts of an existing bundle. what: fibers, trajectories, milnor_set,
/// psi_milnor_set, report; format: csv, ply (fibres with m = 3 only) or json (report only).
inline std::vector<std::filesystem::path> export_bundle(const std::filesystem::path& bundle, const std::string& what,
                                                        const std::string& format, const std::filesystem::path& out) {
  const Json report = load_bundle_report(bundle);
  validate_reports(report);
  static const std::map<std::string, std::string> prefixes = {{"fibers", "fibers/"},
                                                              {"trajectories", "trajectories/"},
                                                              {"milnor_set", "witness/milnor_r"},
                                                              {"psi_milnor_set", "witness/psi_milnor_r"},
                                                              {"report", ""}};
  const auto kind = prefixes.find(what);
  if (kind == prefixes.end()) throw InputError("unknown export kind '" + what + "'");
  if (format != "csv" && format != "ply" && format != "json") throw InputError("unknown export format '" + format + "'");
  std::vector<std::filesystem::path> written;
  if (what == "report") {
    if (format != "json") throw UnsupportedError("the report exports as json only");
    detail::write_text(out / "report.json", report.dump(2) + "\n");
    written.push_back(out / "report.json");
    return written;
  }
  if (format == "json") throw UnsupportedError("json export is only available for the report");
  if (format == "ply" && what != "fibers") throw UnsupportedError("ply export is only available for fibre samples");
  const auto m = report.at("germ").at("m").get<std::size_t>();
  if (format == "ply" && m != 3) throw UnsupportedError("PLY export needs m = 3 (got m = " + std::to_string(m) + ")");
  for (const auto& a : report.at("artifacts")) {
    const std::string rel = a.get<std::string>();
    if (rel.rfind(kind->second, 0) != 0 || std::filesystem::path(rel).extension() != ".csv") continue;
    const auto src = bundle / rel;
    if (format == "csv") {
      std::ifstream in(src, std::ios::binary);
      if (!in) throw InputError("bundle artifact '" + rel + "' is missing");
      std::stringstream ss;
      ss << in.rdbuf();
      detail::write_text(out / rel, ss.str());
      written.push_back(out / rel);
    } else {
      std::ostringstream ply;
      write_fiber_ply(ply, detail::fiber_from_csv(src));
      auto dst = out / rel;
      dst.replace_extension(".ply");
      detail::write_text(dst, ply.str());
      written.push_back(dst);
    }
  }
  return written;
}

}  // namespace germfib
