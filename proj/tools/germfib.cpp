// germfib command-line driver.
//
// Exit codes: 0 the command completed (whatever the verdicts), 2 bad input or unsupported
// request, 3 an internal invariant failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "germfib/germfib.hpp"

namespace fs = std::filesystem;
using namespace germfib;

namespace {

struct LoadedGerm {
  MapGerm germ;
  std::string source;
};

/// A path to a germ file, or the name of a catalog entry when no such file exists.
LoadedGerm load_germ_arg(const std::string& arg) {
  if (fs::exists(arg)) {
    std::ifstream in(arg);
    if (!in) throw InputError("cannot open germ file '" + arg + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return {parse_germ(ss.str(), fs::path(arg).stem().string()), ss.str()};
  }
  if (const auto* e = find_catalog_entry(arg)) return {parse_germ(e->text, e->name), e->text};
  throw InputError("'" + arg + "' is neither a germ file nor a catalog name");
}

Vector parse_vector(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InputError("'" + s + "' is not a comma-separated list of numbers");
    }
  }
  if (v.empty()) throw InputError("empty target value");
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Shared numeric options. Precedence: command-line flag, then config file, then GERMFIB_SEED
/// (seed only), then built-in defaults.
struct CommonOptions {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps;
  std::optional<double> eta;
  std::optional<int> rungs;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value configuration file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "random seed (falls back to GERMFIB_SEED)");
    app->add_option("--eps", eps, "source radius eps");
    app->add_option("--eta", eta, "tube radius eta (default eps/100)");
    app->add_option("--rungs", rungs, "number of radii r0, r0/2, ...");
    app->add_option("--set", sets, "extra configuration entries key=value");
  }

  Config resolve() const {
    Config cfg;
    cfg.seed = seed_from_environment(cfg.seed);
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
      cfg.apply(s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (eps) cfg.eps = *eps;
    if (eta) cfg.eta = *eta;
    if (rungs) cfg.rungs = *rungs;
    cfg.validate();
    return cfg;
  }
};

void print_summary(const Analysis& an, std::ostream& os) {
  os << "germ " << an.germ_name << "  m=" << an.m << " p=" << an.p << "  seed " << an.config.seed << "\n";
  for (const auto& r : an.reports) {
    std::string name = to_string(r.condition);
    if (!r.scope.empty()) name += " [" + r.scope + "]";
    os << "  " << std::left << std::setw(34) << name << " " << std::setw(12) << to_string(r.verdict);
    if (!r.implied_by.empty()) {
      os << " via";
      for (const auto& e : r.implied_by) os << " " << e;
    }
    if (r.evidence.contains("applicable") && r.evidence["applicable"] == false) os << " (not applicable)";
    os << "\n";
  }
  for (const auto& f : an.ignored_flags) os << "  ignored flag " << f["flag"].get<std::string>() << ": " << f["reason"].get<std::string>() << "\n";
}

std::string joined_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical evidence for Milnor fibrations of real and mixed map germs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "run every check and write a result bundle");
  std::string germ_arg, out_dir;
  bool scale_sweep = false;
  CommonOptions analyze_opts;
  analyze_cmd->add_option("germ", germ_arg, "germ file or catalog name")->required();
  analyze_cmd->add_option("--out", out_dir, "bundle directory (default: <name>.bundle)");
  analyze_cmd->add_flag("--scale-sweep", scale_sweep, "repeat the blow-away evidence at eps/2");
  analyze_opts.attach(analyze_cmd);

  // check
  auto* check_cmd = app.add_subcommand("check", "evaluate one condition and print its report");
  std::string condition_arg, check_germ;
  CommonOptions check_opts;
  check_cmd->add_option("condition", condition_arg, "condition id")->required();
  check_cmd->add_option("germ", check_germ, "germ file or catalog name")->required();
  check_opts.attach(check_cmd);

  // weights
  auto* weights_cmd = app.add_subcommand("weights", "detect radial and polar weights");
  std::string weights_germ;
  CommonOptions weights_opts;
  weights_cmd->add_option("germ", weights_germ, "germ file or catalog name")->required();
  weights_opts.attach(weights_cmd);

  // fiber
  auto* fiber_cmd = app.add_subcommand("fiber", "sample a tube or sphere fibre over a direction y");
  std::string fiber_germ, fiber_kind = "tube", fiber_y, fiber_format = "csv", fiber_out;
  std::size_t fiber_n = 50;
  CommonOptions fiber_opts;
  fiber_cmd->add_option("germ", fiber_germ, "germ file or catalog name")->required();
  fiber_cmd->add_option("--kind", fiber_kind, "tube or sphere");
  fiber_cmd->add_option("--y", fiber_y, "target direction, comma separated")->required();
  fiber_cmd->add_option("-n", fiber_n, "number of points");
  fiber_cmd->add_option("--format", fiber_format, "csv or ply (ply needs m = 3)");
  fiber_cmd->add_option("--out", fiber_out, "output file (default: stdout)");
  fiber_opts.attach(fiber_cmd);

  // blowaway
  auto* blow_cmd = app.add_subcommand("blowaway", "flow tube-fibre points over y out to the sphere");
  std::string blow_germ, blow_y, blow_out;
  std::size_t blow_n = 50;
  CommonOptions blow_opts;
  blow_cmd->add_option("germ", blow_germ, "germ file or catalog name")->required();
  blow_cmd->add_option("--y", blow_y, "target direction, comma separated")->required();
  blow_cmd->add_option("-n", blow_n, "number of trajectories");
  blow_cmd->add_option("--out", blow_out, "directory for trajectory CSVs");
  blow_opts.attach(blow_cmd);

  // catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "list built-in germs, or print one");
  std::string catalog_name;
  catalog_cmd->add_option("name", catalog_name, "entry to print");

  // export
  auto* export_cmd = app.add_subcommand("export", "export artifacts of an existing bundle");
  std::string export_bundle_dir, export_what = "fibers", export_format = "csv", export_out;
  export_cmd->add_option("bundle", export_bundle_dir, "bundle directory")->required();
  export_cmd->add_option("--what", export_what, "fibers, trajectories, milnor_set, psi_milnor_set or report");
  export_cmd->add_option("--format", export_format, "csv, ply or json");
  export_cmd->add_option("--out", export_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (analyze_cmd->parsed()) {
      auto [g, source] = load_germ_arg(germ_arg);
      Config cfg = analyze_opts.resolve();
      if (scale_sweep) cfg.scale_sweep = true;
      const Analysis an = analyze(g, cfg, std::nullopt, source);
      const fs::path dir = out_dir.empty() ? fs::path(an.germ_name + ".bundle") : fs::path(out_dir);
      write_bundle(an, dir, joined_args(argc, argv));
      print_summary(an, std::cout);
      std::cout << "bundle written to " << dir.string() << "\n";
    } else if (check_cmd->parsed()) {
      const ConditionId c = condition_from_string(condition_arg);
      auto [g, source] = load_germ_arg(check_germ);
      const Analysis an = analyze(g, check_opts.resolve(), c, source);
      Json out = Json::array();
      for (const auto* r : an.reports_for(c)) out.push_back(to_json(*r));
      std::cout << (out.size() == 1 ? out[0] : out).dump(2) << "\n";
    } else if (weights_cmd->parsed()) {
      auto [g, source] = load_germ_arg(weights_germ);
      const Config cfg = weights_opts.resolve();
      Json out;
      const auto rw = detect_radial_weights(g, cfg.weight_bound);
      out["radial"] = rw ? to_json(*rw) : Json(nullptr);
      if (g.origin()) {
        const auto pw = detect_polar_weights(g.origin()->F, cfg.weight_bound);
        out["polar"] = pw ? to_json(*pw) : Json(nullptr);
      } else {
        out["polar"] = nullptr;
      }
      std::cout << out.dump() << "\n";
    } else if (fiber_cmd->parsed()) {
      auto [g, source] = load_germ_arg(fiber_germ);
      const Config cfg = fiber_opts.resolve();
      const FiberKind kind = fiber_kind_from_string(fiber_kind);
      if (fiber_format != "csv" && fiber_format != "ply") throw InputError("unknown fibre format '" + fiber_format + "'");
      if (fiber_format == "ply" && g.m() != 3) {
        throw UnsupportedError("PLY export needs m = 3 (got m = " + std::to_string(g.m()) + ")");
      }
      const auto ds = sample_discriminant(g, cfg.ladder(), derive_seed(cfg.seed, 1), discriminant_options(cfg));
      FiberOptions fo;
      fo.tol_zero = cfg.tol_zero;
      fo.angular_tol = cfg.angular_tol;
      fo.newton = newton_options(cfg);
      const auto sample = sample_fiber(g, kind, parse_vector(fiber_y), cfg.eps, cfg.effective_eta(), fiber_n,
                                       derive_seed(cfg.seed, 30), ds.rays, fo);
      std::ostringstream os;
      if (fiber_format == "ply") {
        write_fiber_ply(os, sample);
      } else {
        write_fiber_csv(os, sample);
      }
      if (fiber_out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream out(fiber_out, std::ios::binary);
        if (!out) throw InputError("cannot write '" + fiber_out + "'");
        out << os.str();
      }
      std::cerr << sample.points.size() << " of " << fiber_n << " points (" << sample.attempts << " attempts)\n";
    } else if (blow_cmd->parsed()) {
      auto [g, source] = load_germ_arg(blow_germ);
      const Config cfg = blow_opts.resolve();
      if (g.m() <= g.p()) throw UnsupportedError("the blow-away flow needs m > p");
      const auto ds = sample_discriminant(g, cfg.ladder(), derive_seed(cfg.seed, 1), discriminant_options(cfg));
      auto opts = detail::equivalence_options(cfg);
      const auto run = equivalence_evidence(g, parse_vector(blow_y), cfg.eps, cfg.effective_eta(), blow_n,
                                            derive_seed(cfg.seed, 40), ds, opts);
      if (!blow_out.empty()) {
        for (std::size_t j = 0; j < run.trajectories.size(); ++j) {
          std::ostringstream os;
          write_trajectory_csv(os, run.trajectories[j], g.m(), g.p());
          detail::write_text(fs::path(blow_out) / ("trajectory_" + std::to_string(j) + ".csv"), os.str());
        }
      }
      ConditionReport rep = run.report;
      rep.seed = cfg.seed;
      std::cout << to_json(rep).dump(2) << "\n";
    } else if (catalog_cmd->parsed()) {
      if (catalog_name.empty()) {
        for (const auto& e : catalog()) std::cout << std::left << std::setw(20) << e.name << " " << e.note << "\n";
      } else {
        const auto* e = find_catalog_entry(catalog_name);
        if (!e) throw InputError("no catalog germ named '" + catalog_name + "'");
        std::cout << e->text;
      }
    } else if (export_cmd->parsed()) {
      for (const auto& p : export_bundle(export_bundle_dir, export_what, export_format, export_out)) {
        std::cout << p.string() << "\n";
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
