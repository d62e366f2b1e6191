#include <cstdio>
#include <cstdlib>
#include <exception>
#include <vector>

#include "gamma2/config.hpp"
#include "gamma2/suite.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: ini_certify <space.ini> [K ...]\n");
    return 2;
  }
  std::vector<double> K;
  for (int i = 2; i < argc; ++i) K.push_back(std::atof(argv[i]));
  if (K.empty()) K = {-1.0, 0.0, 1.0};

  try {
    const gamma2::Problem p = gamma2::load_config(argv[1]);
    gamma2::validate_space(p.space);
    const gamma2::CurvatureReport rep = gamma2::run_certify(p, K, {});
    std::printf("%s\n", p.space.label.c_str());
    std::printf("  inf Ricci_V on samples : %.9f\n", rep.K_interior);
    std::printf("  II eigenvalues         : [%.9f, %.9f]\n", rep.lambda_min_II, rep.lambda_max_II);
    for (const auto& v : rep.rcd_infinity) std::printf("  RCD(%g, inf) holds     : %s\n", v.K, v.holds ? "yes" : "no");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
