// Builds a Neumann test function on the unit disk from a raw field, confirms
// the boundary condition, and prints the integrated curvature decomposition
// for it against a positive weight.

#include <cstdio>

#include "gamma2/verify.hpp"
#include "gamma2/zoo.hpp"

int main() {
  const gamma2::ZooEntry ball = gamma2::build_zoo_entry("ball");
  const gamma2::WeightedSpace& s = ball.space();

  gamma2::CutoffSpec cutoff;
  cutoff.regularization = 1.0;
  const auto w = gamma2::ScalarField::parse("x^2*y + sin(x + 2*y)", 2);
  const auto g = gamma2::make_neumann(s, w, cutoff);
  const auto h = gamma2::ScalarField::parse("1 + 0.5*x^2", 2);

  const auto gate = gamma2::neumann_gate(s, g, gamma2::boundary_samples(s, 64));
  std::printf("max |g(N, grad g)| on 64 boundary points: %.3e\n", gate.max_residual);

  const gamma2::CheckResult r = gamma2::check_ricci_decomposition(s, g, h);
  for (const char* key : {"lhs", "rhs", "interior_part", "boundary_part", "doubling_change"}) {
    std::printf("%-16s % .12e\n", key, r.number(key));
  }
  std::printf("relative residual %.3e (%s)\n", r.residual, r.pass ? "pass" : "fail");
  return r.pass ? 0 : 1;
}
