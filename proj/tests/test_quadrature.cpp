#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>

#include "gamma2/boundary.hpp"
#include "gamma2/quadrature.hpp"
#include "gamma2/zoo.hpp"
#include "spaces.hpp"

using gamma2::Point;
using gamma2::QuadratureRule;
using gamma2::WeightedSpace;

namespace {

constexpr double kPi = std::numbers::pi;

WeightedSpace zoo_space(const std::string& name, const std::map<std::string, double>& params = {}) {
  return gamma2::build_zoo_entry(name, params).problem.space;
}

double one(const Point&) { return 1.0; }

/// Sets GAMMA2_THREADS for the lifetime of the guard.
class ThreadEnv {
 public:
  explicit ThreadEnv(int n) {
    if (const char* old = std::getenv("GAMMA2_THREADS")) saved_ = old;
    setenv("GAMMA2_THREADS", std::to_string(n).c_str(), 1);
  }
  ~ThreadEnv() {
    if (saved_) {
      setenv("GAMMA2_THREADS", saved_->c_str(), 1);
    } else {
      unsetenv("GAMMA2_THREADS");
    }
  }

 private:
  std::optional<std::string> saved_;
};

}  // namespace

TEST(GaussLegendre, WeightsPositiveAndSumToTwo) {
  for (int m : {1, 2, 3, 7, 16, 64, 256}) {
    const auto& r = gamma2::gauss_legendre(m);
    ASSERT_EQ(r.nodes.size(), static_cast<std::size_t>(m));
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
      EXPECT_GT(r.weights[k], 0.0);
      EXPECT_GT(r.nodes[k], -1.0);
      EXPECT_LT(r.nodes[k], 1.0);
      EXPECT_NEAR(r.nodes[k], -r.nodes[m - 1 - k], 1e-15);
      sum += r.weights[k];
    }
    EXPECT_NEAR(sum, 2.0, 1e-13) << m;
  }
}

TEST(GaussLegendre, TwoPointRule) {
  const auto& r = gamma2::gauss_legendre(2);
  EXPECT_NEAR(std::abs(r.nodes[0]), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-15);
}

TEST(GaussLegendre, ExactForDegreeTwoMMinusOne) {
  for (int m : {1, 2, 4, 9, 20}) {
    const auto& r = gamma2::gauss_legendre(m);
    for (int k = 0; k <= 2 * m; ++k) {
      double q = 0.0;
      for (int i = 0; i < m; ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      if (k <= 2 * m - 1) {
        EXPECT_NEAR(q, exact, 1e-13) << "m=" << m << " k=" << k;
      } else if (m <= 9) {
        EXPECT_GT(std::abs(q - exact), 1e-6) << "m=" << m << " k=" << k;
      }
    }
  }
}

TEST(GaussLegendre, RejectsEmptyRule) { EXPECT_THROW(gamma2::gauss_legendre(0), std::invalid_argument); }

TEST(InteriorQuadrature, UnitSquare) {
  const WeightedSpace s = testspace::make(2, {"1", "0", "1"}, "0", "-1", {{0, 1}, {0, 1}});
  EXPECT_NEAR(gamma2::integrate_interior(s, one), 1.0, 1e-14);
  EXPECT_NEAR(gamma2::integrate_interior(s, [](const Point& x) { return x[0] * x[1] * x[1]; }), 1.0 / 6.0, 1e-14);
}

TEST(InteriorQuadrature, GaussianMass) {
  const WeightedSpace s = testspace::make(2, {"1", "0", "1"}, "(x^2 + y^2)/2", "-1", {{-8, 8}, {-8, 8}});
  EXPECT_NEAR(gamma2::integrate_interior(s, one), 2.0 * kPi, 1e-6);
  EXPECT_NEAR(gamma2::integrate_interior(s, [](const Point& x) { return x[0] * x[0]; }), 2.0 * kPi, 1e-6);
}

TEST(InteriorQuadrature, DiskAreaThroughPolarPatch) {
  for (double R : {0.5, 1.0, 2.0}) {
    const WeightedSpace s = zoo_space("ball", {{"R", R}});
    EXPECT_NEAR(gamma2::integrate_interior(s, one), kPi * R * R, 1e-12 * R * R);
    EXPECT_NEAR(gamma2::integrate_interior(s, [](const Point& x) { return x[0] * x[0] + x[1] * x[1]; }),
                kPi * std::pow(R, 4) / 2.0, 1e-12 * std::pow(R, 4));
  }
  EXPECT_NEAR(gamma2::integrate_interior(zoo_space("annulus"), one), kPi * 0.75, 1e-12);
}

TEST(InteriorQuadrature, SphereCapAndHyperbolicDisk) {
  for (double r : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(gamma2::integrate_interior(zoo_space("hemisphere", {{"r", r}}), one), 2.0 * kPi * r * r, 1e-10 * r * r);
  }
  const double rho = 0.7;
  EXPECT_NEAR(gamma2::integrate_interior(zoo_space("poincare_cap", {{"rho", rho}}), one),
              4.0 * kPi * rho * rho / (1.0 - rho * rho), 1e-9);
  EXPECT_NEAR(gamma2::integrate_interior(zoo_space("ball3"), one), 4.0 * kPi / 3.0, 1e-10);
}

TEST(InteriorQuadrature, ChartModeKeepsOnlyNegativePhi) {
  WeightedSpace s = testspace::make(2, {"1", "0", "1"}, "0", "x + y - 1", {{0, 1}, {0, 1}});
  const double area = gamma2::integrate_interior(s, one, {200, 0});
  EXPECT_NEAR(area, 0.5, 1e-2);
}

TEST(BoundaryQuadrature, CirclePerimeter) {
  for (double R : {0.5, 1.0, 2.0}) {
    const WeightedSpace s = zoo_space("ball", {{"R", R}});
    EXPECT_NEAR(gamma2::integrate_boundary(s, one), 2.0 * kPi * R, 1e-10);
  }
  const WeightedSpace a = zoo_space("annulus");
  EXPECT_NEAR(gamma2::integrate_boundary(a, one, a.boundary[0]), kPi, 1e-10);
  EXPECT_NEAR(gamma2::integrate_boundary(a, one), 3.0 * kPi, 1e-10);
}

TEST(BoundaryQuadrature, EquatorAndHyperbolicCircle) {
  for (double r : {0.5, 1.0, 3.0}) {
    EXPECT_NEAR(gamma2::integrate_boundary(zoo_space("hemisphere", {{"r", r}}), one), 2.0 * kPi * r, 1e-10);
  }
  const double rho = 0.7;
  EXPECT_NEAR(gamma2::integrate_boundary(zoo_space("poincare_cap"), one), 4.0 * kPi * rho / (1.0 - rho * rho), 1e-9);
  EXPECT_NEAR(gamma2::integrate_boundary(zoo_space("ball3"), one, QuadratureRule{16, 48}), 4.0 * kPi, 1e-10);
}

TEST(BoundaryQuadrature, WeightedLine) {
  const WeightedSpace s = zoo_space("gaussian_half_space");
  EXPECT_NEAR(gamma2::integrate_boundary(s, one), std::sqrt(2.0 * kPi), 1e-10);
}

TEST(BoundaryQuadrature, DivergenceTheoremOnDisk) {
  // f = x^2 + x y^3: Laplacian 2 + 6 x y, outward derivative on the unit circle x f_x + y f_y
  const WeightedSpace s = zoo_space("ball");
  const double inside = gamma2::integrate_interior(s, [](const Point& p) { return 2.0 + 6.0 * p[0] * p[1]; });
  const double flux = gamma2::integrate_boundary(s, [](const Point& p) {
    const double x = p[0], y = p[1];
    return x * (2.0 * x + y * y * y) + y * (3.0 * x * y * y);
  });
  EXPECT_NEAR(inside, 2.0 * kPi, 1e-12);
  EXPECT_NEAR(flux, inside, 1e-12);
}

TEST(BoundaryQuadrature, NeumannFluxVanishes) {
  for (const auto& name : {"ball", "annulus", "poincare_cap", "hemisphere"}) {
    const auto entry = gamma2::build_zoo_entry(name);
    const WeightedSpace& s = entry.problem.space;
    for (const auto& w : entry.problem.suite.neumann_bases) {
      const auto g = gamma2::make_neumann(s, w, entry.problem.suite.cutoff);
      const double flux =
          gamma2::integrate_boundary(s, [&](const Point& x) { return gamma2::neumann_residual(s, g.field, x); });
      EXPECT_LE(std::abs(flux), 1e-8) << name << " " << g.label();
    }
  }
}

TEST(Quadrature, DoubledRule) {
  const QuadratureRule r{};
  EXPECT_EQ(r.interior, 64);
  EXPECT_EQ(r.boundary, 256);
  EXPECT_EQ(r.doubled().interior, 128);
  EXPECT_EQ(r.doubled().boundary, 512);
}

TEST(Quadrature, BitwiseIndependentOfThreadCount) {
  const auto entry = gamma2::build_zoo_entry("poincare_cap");
  const WeightedSpace& s = entry.problem.space;
  const auto g = gamma2::make_neumann(s, entry.problem.suite.neumann_bases[1], entry.problem.suite.cutoff);
  auto run = [&](int threads) {
    ThreadEnv env(threads);
    const double a = gamma2::integrate_interior(s, [&](const Point& x) { return g.field.value(x) * std::sin(x[0]); });
    const double b = gamma2::integrate_boundary(s, [&](const Point& x) { return g.field.value(x); });
    return std::pair{a, b};
  };
  const auto ref = run(1);
  for (int t : {2, 3, 4, 7}) {
    const auto got = run(t);
    EXPECT_EQ(got.first, ref.first) << t;
    EXPECT_EQ(got.second, ref.second) << t;
  }
}

TEST(Quadrature, ParallelForVisitsEveryIndexOnce) {
  ThreadEnv env(4);
  std::vector<int> hits(1000, 0);
  gamma2::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Quadrature, ParallelForRethrowsLowestFailure) {
  ThreadEnv env(4);
  try {
    gamma2::parallel_for(1000, [](std::size_t i) {
      if (i == 300 || i == 900) throw std::runtime_error("bad " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "bad 300");
  }
}

TEST(Quadrature, PairwiseSumIsAccurate) {
  std::vector<double> v(1 << 20, 0.1);
  EXPECT_NEAR(gamma2::pairwise_sum(v), 0.1 * (1 << 20), 1e-9);
}

TEST(QuadratureErrors, NonFiniteIntegrand) {
  const WeightedSpace s = zoo_space("ball");
  EXPECT_THROW(gamma2::integrate_interior(s, [](const Point&) { return std::nan(""); }), gamma2::QuadratureError);
}

TEST(QuadratureErrors, DegenerateMetricAtNode) {
  const WeightedSpace s = testspace::make(2, {"x^2", "0", "1"}, "0", "-1", {{-1, 1}, {-1, 1}});
  EXPECT_THROW(gamma2::integrate_interior(s, one, QuadratureRule{3, 3}), gamma2::GeometryError);
  EXPECT_NO_THROW(gamma2::integrate_interior(s, one, QuadratureRule{4, 4}));
}

TEST(QuadratureErrors, BoundaryPatchDimension) {
  WeightedSpace s = zoo_space("ball");
  EXPECT_THROW(gamma2::boundary_nodes(s, s.interior[0], 8), gamma2::QuadratureError);
}

TEST(QuadratureErrors, DegenerateBoundaryParametrization) {
  WeightedSpace s = zoo_space("ball");
  s.boundary = {gamma2::zoo_detail::patch("stuck", {"t"}, {{0.0, 1.0}}, {"1", "0"})};
  EXPECT_THROW(gamma2::integrate_boundary(s, one), gamma2::QuadratureError);
}
