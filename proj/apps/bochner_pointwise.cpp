// Evaluates both sides of the weighted Bochner identity for one field at a
// few points of the unit hemisphere (polar angle x, longitude y) carrying
// the weight x^2/2.

#include <cstdio>

#include "gamma2/geometry.hpp"
#include "gamma2/zoo.hpp"

int main() {
  gamma2::WeightedSpace s = gamma2::build_zoo_entry("hemisphere").problem.space;
  s.weight = gamma2::ScalarField::parse("0.5*x^2", 2);
  const auto f = gamma2::ScalarField::parse("cos(x)*sin(2*y) + x^3", 2);

  std::printf("%-22s %16s %16s %12s\n", "point", "Gamma2(f)", "Bochner rhs", "difference");
  for (const gamma2::Point x : {gamma2::Point{0.3, 0.1}, gamma2::Point{0.9, 2.0}, gamma2::Point{1.4, 4.0}}) {
    const gamma2::LocalGeometry geo(s, x);
    const gamma2::Jet fj = f(x);
    const gamma2::Vector df = geo.gradient(fj);
    const double lhs = geo.gamma2(fj);
    const double rhs = geo.bakry_emery_ricci()(df, df) + geo.hs_norm_sq(geo.hessian(fj));
    std::printf("%-22s %16.10f %16.10f %12.2e\n", x.to_string().c_str(), lhs, rhs, lhs - rhs);
  }
}
