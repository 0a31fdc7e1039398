#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "germfib/analysis.hpp"
#include "germfib/catalog.hpp"

using namespace germfib;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("germfib_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool applicable(const ConditionReport& r) {
  return !(r.evidence.contains("applicable") && r.evidence["applicable"] == false);
}

const Analysis& xy_z2_analysis() {
  static const Analysis an = analyze(catalog_germ("xy_z2"), Config{});
  return an;
}

}  // namespace

TEST(Analyze, ProductAndSquareAllApplicableConditionsPass) {
  const auto& an = xy_z2_analysis();
  for (const auto& r : an.reports) {
    if (applicable(r)) {
      EXPECT_EQ(r.verdict, Verdict::pass) << to_string(r.condition) << " " << r.scope;
    }
  }
  EXPECT_EQ(an.reports_for(ConditionId::equivalence_evidence).size(), 3u);
  EXPECT_EQ(an.verdict(ConditionId::sphere_exists), Verdict::pass);
}

TEST(Analyze, ConeWithLinearComponentReachesSphereFibration) {
  const auto an = analyze(catalog_germ("ex31_n4"), Config{});
  for (const auto& r : an.reports) {
    if (applicable(r)) {
      EXPECT_EQ(r.verdict, Verdict::pass) << to_string(r.condition) << " " << r.scope;
    }
  }
  const auto* sphere = an.reports_for(ConditionId::sphere_exists).front();
  EXPECT_NE(std::find(sphere->implied_by.begin(), sphere->implied_by.end(), "sphere-fibration-criterion"),
            sphere->implied_by.end());
}

TEST(Analyze, PairFlagsNeedPairForm) {
  const auto g = parse_germ("vars: x y z\nG1 = x*y\nG2 = z^2\nflags: icis \"claimed\"\n", "claimed_icis");
  Config cfg;
  const auto an = analyze(g, cfg, ConditionId::cond_main);
  ASSERT_EQ(an.ignored_flags.size(), 1u);
  EXPECT_EQ(an.ignored_flags[0]["flag"], "icis");
  for (const auto& r : an.reports) {
    for (const auto& e : r.implied_by) EXPECT_NE(e, "icis-pair-regularity");
  }
}

TEST(Analyze, SingleComponentGermIsMarkedAsExtension) {
  const auto an = analyze(parse_germ("vars: x y\nG1 = x^2 - y^2\n", "saddle"), Config{});
  for (const auto& r : an.reports) EXPECT_TRUE(r.evidence.contains("extension"));
  EXPECT_FALSE(an.verdict(ConditionId::equivalence_evidence) == Verdict::fail);
}

TEST(Analyze, EverySeedIsTheConfiguredSeed) {
  Config cfg;
  cfg.seed = 31;
  cfg.rungs = 2;
  const auto an = analyze(catalog_germ("ex31_n3"), cfg);
  for (const auto& r : an.reports) EXPECT_EQ(r.seed, 31u);
}

TEST(Bundle, RerunIsByteIdenticalApartFromMetadata) {
  const auto a = scratch("rerun_a");
  const auto b = scratch("rerun_b");
  write_bundle(xy_z2_analysis(), a);
  write_bundle(analyze(catalog_germ("xy_z2"), Config{}), b);
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "meta.json") continue;
    const auto rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
    ++compared;
  }
  EXPECT_GT(compared, 10u);
  EXPECT_TRUE(fs::exists(a / "meta.json"));
}

TEST(Bundle, ReportCarriesRequiredFields) {
  const auto dir = scratch("fields");
  write_bundle(xy_z2_analysis(), dir);
  const auto report = load_bundle_report(dir);
  for (const auto& r : report["reports"]) {
    for (const char* k : {"condition", "verdict", "evidence", "implied_by", "tolerances", "seed"}) {
      EXPECT_TRUE(r.contains(k)) << k;
    }
  }
  EXPECT_EQ(report["weights"]["radial"], (Json{{"q", {1, 1, 1}}, {"d", 2}}));
  EXPECT_NO_THROW(validate_reports(report));
}

TEST(Bundle, UnsoundImplicationIsAnInvariantViolation) {
  const auto dir = scratch("unsound");
  write_bundle(xy_z2_analysis(), dir);
  auto report = load_bundle_report(dir);
  for (auto& r : report["reports"]) {
    if (r["condition"] == "radial_homogeneous") r["verdict"] = "inconclusive";
  }
  EXPECT_THROW(validate_reports(report), InvariantViolation);
}

TEST(Export, ProductAndSquareFibresAsPly) {
  const auto dir = scratch("ply_src");
  const auto out = scratch("ply_out");
  write_bundle(xy_z2_analysis(), dir);
  const auto files = export_bundle(dir, "fibers", "ply", out);
  std::size_t tube = 0, sphere = 0;
  for (const auto& f : files) {
    EXPECT_EQ(f.extension(), ".ply");
    EXPECT_TRUE(fs::exists(f));
    const auto name = f.filename().string();
    tube += name.rfind("tube_", 0) == 0;
    sphere += name.rfind("sphere_", 0) == 0;
    // Vertex count matches the CSV it came from.
    auto csv = dir / fs::relative(f, out);
    csv.replace_extension(".csv");
    const auto text = slurp(csv);
    const auto rows = std::count(text.begin(), text.end(), '\n') - 1;
    EXPECT_NE(slurp(f).find("element vertex " + std::to_string(rows) + "\n"), std::string::npos);
  }
  EXPECT_GE(tube, 1u);
  EXPECT_GE(sphere, 1u);
}

TEST(Export, PlyNeedsThreeVariables) {
  const auto dir = scratch("ply_m4");
  Config cfg;
  cfg.rungs = 2;
  write_bundle(analyze(catalog_germ("ex31_n4"), cfg), dir);
  EXPECT_THROW(export_bundle(dir, "fibers", "ply", scratch("ply_m4_out")), UnsupportedError);
  EXPECT_FALSE(export_bundle(dir, "fibers", "csv", scratch("csv_m4_out")).empty());
}

TEST(Export, EmptyWitnessSetStillHasHeader) {
  auto an = xy_z2_analysis();
  WitnessSet empty;
  empty.nvars = 3;
  an.witness_sets = {{"milnor_r0", empty}};
  const auto dir = scratch("empty_ws");
  write_bundle(an, dir);
  const auto files = export_bundle(dir, "milnor_set", "csv", scratch("empty_ws_out"));
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(slurp(files[0]), "x1,x2,x3,residual,radius,component,excluded\n");
}

TEST(Export, UnknownKindIsInputError) {
  const auto dir = scratch("kind");
  write_bundle(xy_z2_analysis(), dir);
  EXPECT_THROW(export_bundle(dir, "photos", "csv", scratch("kind_out")), InputError);
  EXPECT_THROW(export_bundle(scratch("missing"), "fibers", "csv", scratch("missing_out")), InputError);
}
