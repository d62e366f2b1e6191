#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gamma2/report.hpp"
#include "gamma2/zoo.hpp"

using gamma2::FullReport;
using Json = nlohmann::ordered_json;

namespace {

gamma2::Problem small_problem() {
  gamma2::Problem p = gamma2::build_zoo_entry("ball").problem;
  p.plan = {4, 8, 5, 1};
  p.rule = {24, 64};
  return p;
}

const FullReport& shared_report() {
  static const FullReport r = [] {
    const std::vector<double> K = {0.0, 1.0};
    const std::vector<double> N = {2.0};
    return gamma2::run_full_report(small_problem(), K, N);
  }();
  return r;
}

/// Replaces values by their JSON type names; arrays keep one copy of each
/// distinct element shape.
Json skeleton(const Json& j) {
  switch (j.type()) {
    case Json::value_t::object: {
      Json out = Json::object();
      for (const auto& [k, v] : j.items()) out[k] = skeleton(v);
      return out;
    }
    case Json::value_t::array: {
      Json out = Json::array();
      for (const auto& v : j) {
        const Json s = skeleton(v);
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      }
      return out;
    }
    case Json::value_t::string:
      return "string";
    case Json::value_t::boolean:
      return "boolean";
    case Json::value_t::null:
      return "null";
    default:
      return "number";
  }
}

std::string golden_path() { return std::string(GAMMA2_GOLDEN_DIR) + "/report_schema.json"; }

}  // namespace

TEST(ReportJson, KeyStructureMatchesGolden) {
  const Json shape = skeleton(Json::parse(gamma2::to_json(shared_report(), false).dump()));
  if (std::getenv("GAMMA2_UPDATE_GOLDEN")) {
    std::ofstream(golden_path()) << shape.dump(2) << "\n";
  }
  std::ifstream in(golden_path());
  ASSERT_TRUE(in) << "missing " << golden_path();
  const Json golden = Json::parse(in);
  EXPECT_EQ(shape, golden) << shape.dump(2);
}

TEST(ReportJson, TopLevelFields) {
  const auto j = gamma2::to_json(shared_report(), true);
  EXPECT_EQ(j["schema_version"], gamma2::kReportSchemaVersion);
  ASSERT_EQ(j["checks"].size(), 7u);
  const std::vector<std::string> names = {"bochner",     "green",          "mv_laplacian", "ricci_decomposition",
                                          "ii_identity", "dimension_term", "flatness"};
  for (std::size_t k = 0; k < names.size(); ++k) EXPECT_EQ(j["checks"][k]["name"], names[k]);
  EXPECT_EQ(j["certificate"]["rcd_infinity"].size(), 2u);
  EXPECT_TRUE(j["certificate"]["rcd_infinity"][0]["holds"].get<bool>());
  EXPECT_FALSE(j["certificate"]["rcd_infinity"][1]["holds"].get<bool>());
  EXPECT_TRUE(j["certificate"]["rcd_star"][0]["holds"].get<bool>());
  EXPECT_EQ(j["timing_seconds"].size(), 8u);
  EXPECT_FALSE(gamma2::to_json(shared_report(), false).contains("timing_seconds"));
  EXPECT_EQ(j["space"]["metric"]["g11"], "1");
}

TEST(ReportJson, NonFiniteValuesBecomeNull) {
  gamma2::CheckResult r;
  r.name = "x";
  r.residual = std::nan("");
  r.meta("inf", std::numeric_limits<double>::infinity());
  r.meta("count", std::int64_t{3});
  r.meta("flag", true);
  const auto j = gamma2::to_json(r);
  EXPECT_TRUE(j["residual"].is_null());
  EXPECT_TRUE(j["metadata"]["inf"].is_null());
  EXPECT_EQ(j["metadata"]["count"], 3);
  EXPECT_EQ(j["metadata"]["flag"], true);
}

TEST(ReportJson, DeterministicAcrossRunsAndThreads) {
  const std::vector<double> K = {0.0};
  auto dump = [&](const char* threads) {
    setenv("GAMMA2_THREADS", threads, 1);
    const auto r = gamma2::run_full_report(small_problem(), K, {});
    unsetenv("GAMMA2_THREADS");
    return gamma2::to_json(r, false).dump(2);
  };
  const std::string a = dump("1");
  EXPECT_EQ(dump("1"), a);
  EXPECT_EQ(dump("4"), a);
}

TEST(ReportText, ContainsEveryCheckAndVerdict) {
  const std::string text = gamma2::to_text(shared_report(), false);
  for (const char* needle : {"space: ball(R=1)", "bochner: ", "green: ", "mv_laplacian: ", "ricci_decomposition: ",
                             "ii_identity: ", "dimension_term: ", "flatness: ", "RCD(0, inf): true",
                             "RCD(1, inf): false", "all checks pass: "}) {
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
  }
  EXPECT_EQ(text.find("timing"), std::string::npos);
  EXPECT_NE(gamma2::to_text(shared_report(), true).find("timing (seconds):"), std::string::npos);
}

TEST(ReportCsv, HeaderAndRowCounts) {
  const FullReport& r = shared_report();
  const std::string csv = gamma2::to_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,name,x1,x2,lambda_min,lambda_max,trace_II,residual,tolerance,pass");
  std::size_t interior = 0, boundary = 0, checks = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9) << line;
    if (line.rfind("interior_sample,", 0) == 0) ++interior;
    if (line.rfind("boundary_sample,", 0) == 0) ++boundary;
    if (line.rfind("check,", 0) == 0) ++checks;
  }
  EXPECT_EQ(interior, r.certificate.interior.size());
  EXPECT_EQ(boundary, r.certificate.boundary.size());
  std::size_t want = 0;
  for (const auto& c : r.checks) want += 1 + c.parts.size();
  EXPECT_EQ(checks, want);
  EXPECT_NE(csv.find("check,green/1,"), std::string::npos);
}
