#include <gtest/gtest.h>

#include <cmath>

#include "gamma2/zoo.hpp"

using gamma2::SamplePlan;
using gamma2::ZooEntry;

namespace {

const SamplePlan kPlan{8, 24, 10, 5};

gamma2::CurvatureReport quick_certificate(const ZooEntry& e) { return gamma2::certify(e.space(), {}, {}, kPlan); }

}  // namespace

TEST(Zoo, NamesAreStable) {
  const std::vector<std::string> want = {"half_space", "gaussian_half_space", "ball",  "annulus",
                                         "hemisphere", "poincare_cap",        "ball3"};
  EXPECT_EQ(gamma2::zoo_names(), want);
}

TEST(Zoo, EveryEntryLoadsAndValidates) {
  for (const auto& name : gamma2::zoo_names()) {
    const ZooEntry e = gamma2::load_zoo(name);
    EXPECT_EQ(e.name, name);
    EXPECT_FALSE(e.space().label.empty());
    EXPECT_FALSE(e.space().boundary.empty()) << name;
    EXPECT_FALSE(e.expected.empty()) << name;
    EXPECT_NO_THROW(gamma2::validate_space(e.space())) << name;
    EXPECT_GE(gamma2::pair_count(e.problem), 5u) << name;
  }
}

TEST(Zoo, ExpectedValuesMatchCertificate) {
  for (const auto& name : gamma2::zoo_names()) {
    const ZooEntry e = gamma2::build_zoo_entry(name);
    const auto rep = quick_certificate(e);
    if (auto k = e.expect("K_interior")) {
      EXPECT_NEAR(rep.K_interior, *k, 1e-6) << name;
    }
    if (auto l = e.expect("lambda_min_II")) {
      EXPECT_NEAR(rep.lambda_min_II, *l, 1e-6) << name;
    }
    if (auto l = e.expect("lambda_max_II")) {
      EXPECT_NEAR(rep.lambda_max_II, *l, 1e-6) << name;
    }
    if (auto t = e.expect("trace_II")) {
      EXPECT_NEAR(rep.trace_II_min, *t, 1e-6) << name;
      EXPECT_NEAR(rep.trace_II_max, *t, 1e-6) << name;
    }
    for (const auto& ev : e.expected) EXPECT_FALSE(ev.source.empty()) << name << " " << ev.quantity;
  }
}

TEST(Zoo, FlatnessFlagsMatchCertificate) {
  for (const auto& name : gamma2::zoo_names()) {
    const ZooEntry e = gamma2::build_zoo_entry(name);
    const auto f = gamma2::flatness_from(quick_certificate(e));
    EXPECT_EQ(f.interior_flat, e.interior_flat) << name;
    EXPECT_EQ(f.boundary_minimal, e.boundary_minimal) << name;
    EXPECT_EQ(f.boundary_totally_geodesic, e.boundary_totally_geodesic) << name;
  }
}

TEST(Zoo, ParametersChangeTheGeometry) {
  const auto rep = quick_certificate(gamma2::build_zoo_entry("ball", {{"R", 2.0}}));
  EXPECT_NEAR(rep.lambda_min_II, 0.5, 1e-9);
  const auto ann = quick_certificate(gamma2::build_zoo_entry("annulus", {{"r", 0.25}, {"R", 2.0}}));
  EXPECT_NEAR(ann.lambda_min_II, -4.0, 1e-9);
  EXPECT_NEAR(ann.lambda_max_II, 0.5, 1e-9);
  const auto hemi = quick_certificate(gamma2::build_zoo_entry("hemisphere", {{"r", 2.0}}));
  EXPECT_NEAR(hemi.K_interior, 0.25, 1e-9);
  const auto cap = quick_certificate(gamma2::build_zoo_entry("poincare_cap", {{"rho", 0.5}}));
  EXPECT_NEAR(cap.lambda_min_II, 1.25, 1e-9);
  const auto b3 = quick_certificate(gamma2::build_zoo_entry("ball3", {{"R", 0.5}}));
  EXPECT_NEAR(b3.lambda_min_II, 2.0, 1e-9);
  EXPECT_NEAR(b3.trace_II_max, 4.0, 1e-9);
}

TEST(Zoo, RejectsBadNamesAndParameters) {
  EXPECT_THROW(gamma2::build_zoo_entry("torus"), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("ball", {{"r", 1.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("ball", {{"R", 0.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("ball", {{"R", -1.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("ball", {{"R", std::nan("")}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("annulus", {{"r", 1.0}, {"R", 1.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("annulus", {{"r", 2.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("poincare_cap", {{"rho", 1.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("half_space", {{"R", 1.0}}), std::invalid_argument);
  EXPECT_THROW(gamma2::build_zoo_entry("hemisphere", {{"r", -2.0}}), std::invalid_argument);
}

TEST(ZooSpec, ParsesNameAndParameters) {
  const ZooEntry e = gamma2::load_zoo_spec("annulus, r=0.3, R=2");
  EXPECT_EQ(e.name, "annulus");
  EXPECT_EQ(e.params.at("r"), 0.3);
  EXPECT_EQ(e.params.at("R"), 2.0);
  EXPECT_NE(e.space().label.find("r=0.3"), std::string::npos);
  EXPECT_EQ(gamma2::load_zoo_spec("ball").params.at("R"), 1.0);
}

TEST(ZooSpec, RejectsMalformedSpecs) {
  for (const char* bad : {"ball,R", "ball,R=abc", "ball,R=1,R=2", "ball,=3", "ball,R=1x", "", "ball,R=1,"}) {
    EXPECT_THROW(gamma2::load_zoo_spec(bad), std::invalid_argument) << bad;
  }
}
