#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gamma2/config.hpp"
#include "gamma2/zoo.hpp"

using gamma2::ConfigError;
using gamma2::Point;
using gamma2::Problem;

namespace {

const std::string kDisk = R"ini([space]
dim = 2

[domain]
phi = "x^2 + y^2 - 1"

[chart]
x = -1.5, 1.5
y = -1.5, 1.5

[boundary.circle]
params = s
s = 0, 2*pi
x = "cos(s)"
y = "sin(s)"
)ini";

Problem from(const std::string& text) { return gamma2::problem_from_ini(gamma2::parse_ini_string(text)); }

/// Message of the ConfigError raised by text, or "" when none is raised.
std::string error_of(const std::string& text) {
  try {
    from(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string with(const std::string& extra) { return kDisk + "\n" + extra; }

std::string config_path(const std::string& name) { return std::string(GAMMA2_CONFIG_DIR) + "/" + name; }

}  // namespace

TEST(IniReader, SectionsEntriesAndLines) {
  const auto doc = gamma2::parse_ini_string("# comment\n[a]\n  k = v  \n; other\n[b.c]\nx=\"1, 2\"\n");
  ASSERT_EQ(doc.sections.size(), 2u);
  EXPECT_EQ(doc.sections[0].name, "a");
  EXPECT_EQ(doc.sections[0].line, 2);
  const auto* k = doc.sections[0].find("k");
  ASSERT_NE(k, nullptr);
  EXPECT_EQ(k->value, "v");
  EXPECT_EQ(k->line, 3);
  ASSERT_NE(doc.find("b.c"), nullptr);
  EXPECT_EQ(doc.find("b.c")->find("x")->value, "\"1, 2\"");
  EXPECT_EQ(doc.find("missing"), nullptr);
}

TEST(IniReader, SyntaxErrorsCarryLineNumbers) {
  const std::pair<std::string, std::string> cases[] = {
      {"[space\ndim = 2\n", "line 1:"},
      {"[space]\ndim 2\n", "line 2:"},
      {"dim = 2\n", "line 1:"},
      {"[a]\n[a]\n", "line 2:"},
      {"[a]\nk = 1\n\nk = 2\n", "line 4:"},
      {"[]\n", "line 1:"},
      {"[a]\n = 3\n", "line 2:"},
  };
  for (const auto& [text, where] : cases) {
    try {
      gamma2::parse_ini_string(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(std::string(e.what()).rfind(where, 0), 0u) << e.what();
    }
  }
}

TEST(ConfigProblem, MinimalFileUsesDefaults) {
  const Problem p = from(kDisk);
  EXPECT_EQ(p.space.dim, 2);
  EXPECT_EQ(p.space.g(0, 0).value(Point{0.3, 0.1}), 1.0);
  EXPECT_EQ(p.space.g(0, 1).value(Point{0.3, 0.1}), 0.0);
  EXPECT_EQ(p.space.weight.value(Point{0.3, 0.1}), 0.0);
  EXPECT_TRUE(p.space.interior.empty());
  ASSERT_EQ(p.space.boundary.size(), 1u);
  EXPECT_EQ(p.space.boundary[0].label, "boundary.circle");
  EXPECT_EQ(p.plan.interior, gamma2::SamplePlan{}.interior);
  EXPECT_EQ(p.rule.boundary, gamma2::QuadratureRule{}.boundary);
  EXPECT_FALSE(p.suite.cutoff.has_box());
  EXPECT_EQ(p.suite.fields.size(), gamma2::planar_test_suite().fields.size());
  EXPECT_NO_THROW(gamma2::validate_space(p.space));
}

TEST(ConfigProblem, OptionalSectionsAreRead) {
  const Problem p = from(with(R"ini([weight]
V = "x^2/2"
[samples]
interior = 5
boundary = 7
random = 9
seed = 3
[quadrature]
interior = 12
boundary = 40
[cutoff]
regularization = 0.5
[tests]
fields = "x*y", "sin(x)"
)ini"));
  EXPECT_DOUBLE_EQ(p.space.weight.value(Point{2.0, 0.0}), 2.0);
  EXPECT_EQ(p.plan.interior, 5);
  EXPECT_EQ(p.plan.boundary, 7);
  EXPECT_EQ(p.plan.random, 9);
  EXPECT_EQ(p.plan.seed, 3u);
  EXPECT_EQ(p.rule.interior, 12);
  EXPECT_EQ(p.rule.boundary, 40);
  EXPECT_EQ(p.suite.cutoff.regularization, 0.5);
  EXPECT_EQ(p.suite.fields.size(), 2u);
}

TEST(ConfigProblem, SemanticErrorsCarryLineNumbers) {
  const std::pair<std::string, std::string> cases[] = {
      {"[domain]\nphi = \"x\"\n", "line 1: missing [space]"},
      {"[space]\ndim = 7\n", "line 2:"},
      {"[space]\ndim = two\n", "line 2:"},
      {"[space]\ndim = 2\ncolour = red\n", "line 3:"},
      {"[space]\ndim = 2\n[domain]\nphi = \"x +\"\n", "line 4:"},
      {"[space]\ndim = 2\n[domain]\nphi = \"z\"\n", "line 4:"},
      {"[space]\ndim = 2\n[domain]\nphi = \"x\"\n[chart]\nx = 1, 0\n", "line 6:"},
      {"[space]\ndim = 2\n[domain]\nphi = \"x\"\n[chart]\nx = 0, 1\ny = 0, 1\n", "line 1: at least one"},
      {"[space]\ndim = 2\n[domain]\nphi = \"x\"\n[chart]\nx = 0, 1\ny = 0, \"1\n", "line 7:"},
  };
  for (const auto& [text, where] : cases) {
    const std::string msg = error_of(text);
    EXPECT_EQ(msg.rfind(where, 0), 0u) << "got '" << msg << "' for\n" << text;
  }
}

TEST(ConfigProblem, PatchAndCutoffErrors) {
  // kDisk occupies lines 1-15 and with() adds a blank line 16
  EXPECT_EQ(error_of(with("[boundary.bad]\nparams = a, b\na = 0, 1\nb = 0, 1\n")).rfind("line 18:", 0), 0u);
  EXPECT_EQ(error_of(with("[boundary.bad]\nparams = x\nx = 0, 1\ny = \"x\"\n")).rfind("line 18:", 0), 0u);
  EXPECT_EQ(error_of(with("[boundary.o]\nparams = t\nt = 0, 1\nx = \"t\"\ny = \"0\"\norientation = 2\n"))
                .rfind("line 22:", 0),
            0u);
  EXPECT_EQ(error_of(with("[boundary.m]\nparams = t\nt = 0, 1\nx = \"t\"\n")).rfind("line 17:", 0), 0u);
  EXPECT_EQ(error_of(with("[cutoff]\ninner.x = -1, 1\ninner.y = -1, 1\nouter.x = -2, 2\nouter.y = -2, 2\n"))
                .rfind("line 17:", 0),
            0u);
  EXPECT_EQ(error_of(with("[cutoff]\ninner.x = -1, 1\n")).rfind("line 17:", 0), 0u);
  EXPECT_EQ(error_of(with("[cutoff]\nregularization = -1\n")).rfind("line 17:", 0), 0u);
  EXPECT_EQ(error_of(with("[samples]\nrandom = 0\n")).rfind("line 18:", 0), 0u);
  EXPECT_EQ(error_of(with("[quadrature]\ninterior = 5000\n")).rfind("line 18:", 0), 0u);
  EXPECT_EQ(error_of(with("[tests]\nfields = \"x^\"\n")).rfind("line 18:", 0), 0u);
}

TEST(ConfigProblem, WrongOrientationFailsValidation) {
  const Problem p = from(kDisk + "orientation = -1\n");
  EXPECT_THROW(gamma2::validate_space(p.space), gamma2::GeometryError);
}

TEST(ConfigProblem, MissingFile) {
  EXPECT_THROW(gamma2::load_config("/nonexistent/space.ini"), ConfigError);
}

TEST(SampleConfigs, AllLoadAndPassQuickChecks) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(GAMMA2_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    ++count;
    Problem p = gamma2::load_config(entry.path().string());
    p.plan.random = 10;
    const auto r = gamma2::run_bochner(p);
    EXPECT_TRUE(r.pass) << entry.path() << " " << r.residual;
    EXPECT_TRUE(gamma2::run_ii(p).pass) << entry.path();
  }
  EXPECT_GE(count, 4);
}

TEST(SampleConfigs, MatchZooCertificates) {
  const std::pair<const char*, const char*> pairs[] = {{"ball.ini", "ball"},
                                                       {"gaussian_half_plane.ini", "gaussian_half_space"},
                                                       {"hemisphere.ini", "hemisphere"},
                                                       {"poincare_cap.ini", "poincare_cap"}};
  const gamma2::SamplePlan plan{8, 32, 10, 1};
  for (const auto& [file, name] : pairs) {
    const Problem cfg = gamma2::load_config(config_path(file));
    const auto zoo = gamma2::build_zoo_entry(name);
    const auto a = gamma2::certify(cfg.space, {}, {}, plan);
    const auto b = gamma2::certify(zoo.problem.space, {}, {}, plan);
    EXPECT_NEAR(a.K_interior, b.K_interior, 1e-9) << file;
    EXPECT_NEAR(a.lambda_min_II, b.lambda_min_II, 1e-9) << file;
    EXPECT_NEAR(a.trace_II_max, b.trace_II_max, 1e-9) << file;
  }
}

TEST(SampleConfigs, CustomCoordinateNames) {
  const Problem p = gamma2::load_config(config_path("hemisphere.ini"));
  EXPECT_EQ(p.space.label, "hemisphere");
  EXPECT_NEAR(p.space.g(1, 1).value(Point{0.5, 0.0}), std::sin(0.5) * std::sin(0.5), 1e-15);
  EXPECT_TRUE(p.suite.cutoff.has_box());
  EXPECT_EQ(p.suite.neumann_bases.size(), 5u);
}
