// gamma2: load a weighted space with boundary, run the identity checks,
// certify curvature-dimension conditions and write reports.
//
// Exit codes: 0 success, 1 a check failed or a requested certification is
// false, 2 usage, configuration or parse error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gamma2/config.hpp"
#include "gamma2/report.hpp"
#include "gamma2/zoo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct SpaceOptions {
  std::string zoo;
  std::string config;
};

void add_space_options(CLI::App* cmd, SpaceOptions& opts) {
  auto* zoo = cmd->add_option("--zoo", opts.zoo, "zoo entry, e.g. ball or annulus,r=0.5,R=1");
  auto* cfg = cmd->add_option("--config", opts.config, "space configuration file");
  zoo->excludes(cfg);
}

/// Loading failures are configuration errors, so GeometryError raised while
/// validating a loaded space maps to exit code 2 as well.
gamma2::Problem load_problem(const SpaceOptions& opts) {
  if (opts.zoo.empty() && opts.config.empty()) throw CLI::ValidationError("one of --zoo or --config is required");
  try {
    if (!opts.zoo.empty()) return gamma2::load_zoo_spec(opts.zoo).problem;
    return gamma2::load_config(opts.config);
  } catch (const gamma2::GeometryError& e) {
    throw gamma2::ConfigError(std::string("invalid space: ") + e.what());
  } catch (const gamma2::ParseError& e) {
    throw gamma2::ConfigError(std::string("expression error: ") + e.what());
  }
}

std::vector<double> parse_list(const std::string& src, const char* what) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    const std::string s = gamma2::config_detail::trim(cur);
    if (s.empty()) throw CLI::ValidationError(std::string(what) + " list has an empty entry");
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
      throw CLI::ValidationError(std::string(what) + " value '" + s + "' is not a number");
    }
    out.push_back(v);
    cur.clear();
  };
  for (char c : src) {
    if (c == ',') {
      flush();
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

int print_check(const gamma2::CheckResult& r, bool json) {
  if (json) {
    std::cout << gamma2::to_json(r).dump(2) << "\n";
  } else {
    std::cout << gamma2::to_text(r);
  }
  return r.pass ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gamma-calculus checks and curvature certificates on weighted manifolds with boundary"};
  app.require_subcommand(1);

  app.add_subcommand("list-zoo", "list the built-in spaces");

  SpaceOptions describe_opts;
  auto* describe = app.add_subcommand("describe", "print a space and its test families");
  add_space_options(describe, describe_opts);

  SpaceOptions check_opts;
  std::string check_name;
  bool check_json = false;
  double check_n = 0.0;
  auto* check = app.add_subcommand("check", "run one check");
  check->add_option("name", check_name, "bochner | green | laplacian | theorem | ii | dimension")
      ->required()
      ->check(CLI::IsMember({"bochner", "green", "laplacian", "theorem", "ii", "dimension"}));
  check->add_option("--N", check_n, "dimension parameter for the dimension check (default: n)");
  check->add_flag("--json", check_json, "print the result as JSON");
  add_space_options(check, check_opts);

  SpaceOptions cert_opts;
  std::string cert_k, cert_n;
  bool cert_json = false;
  auto* cert = app.add_subcommand("certify", "sampled RCD(K, inf) and RCD*(K, N) verdicts");
  cert->add_option("--K", cert_k, "comma-separated K values")->required();
  cert->add_option("--N", cert_n, "comma-separated N values");
  cert->add_flag("--json", cert_json, "print the report as JSON");
  add_space_options(cert, cert_opts);

  SpaceOptions flat_opts;
  bool flat_json = false;
  auto* flat = app.add_subcommand("flatness", "interior Ricci flatness and boundary minimality");
  flat->add_flag("--json", flat_json, "print the result as JSON");
  add_space_options(flat, flat_opts);

  SpaceOptions report_opts;
  std::string report_format = "text", report_out, report_k = "0", report_n;
  bool no_timing = false;
  auto* report = app.add_subcommand("report", "run the full suite and write a report");
  report->add_option("--format", report_format, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
  report->add_option("--out", report_out, "output file (default: standard output)");
  report->add_option("--K", report_k, "comma-separated K values for the certificate");
  report->add_option("--N", report_n, "comma-separated N values for the certificate");
  report->add_flag("--no-timing", no_timing, "omit timing fields (for byte-identical comparison)");
  add_space_options(report, report_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("list-zoo")) {
      for (const auto& name : gamma2::zoo_names()) {
        const gamma2::ZooEntry e = gamma2::build_zoo_entry(name);
        std::cout << name;
        for (const auto& [k, v] : e.params) std::cout << " " << k << "=" << gamma2::format_double(v);
        std::cout << "\n";
      }
      return kExitOk;
    }
    if (describe->parsed()) {
      std::cout << gamma2::describe(load_problem(describe_opts));
      return kExitOk;
    }
    if (check->parsed()) {
      const gamma2::Problem p = load_problem(check_opts);
      if (check_name == "bochner") return print_check(gamma2::run_bochner(p), check_json);
      if (check_name == "green") return print_check(gamma2::run_green(p), check_json);
      if (check_name == "laplacian") return print_check(gamma2::run_laplacian(p), check_json);
      if (check_name == "theorem") return print_check(gamma2::run_theorem(p), check_json);
      if (check_name == "ii") return print_check(gamma2::run_ii(p), check_json);
      const double n = check->count("--N") ? check_n : static_cast<double>(p.space.dim);
      return print_check(gamma2::run_dimension(p, n), check_json);
    }
    if (cert->parsed()) {
      const gamma2::Problem p = load_problem(cert_opts);
      const auto K = parse_list(cert_k, "K");
      const auto N = cert_n.empty() ? std::vector<double>{} : parse_list(cert_n, "N");
      const gamma2::CurvatureReport r = gamma2::run_certify(p, K, N);
      if (cert_json) {
        std::cout << gamma2::to_json(r).dump(2) << "\n";
      } else {
        std::cout << gamma2::to_text(r);
      }
      return r.all_requested_hold() ? kExitOk : kExitFailed;
    }
    if (flat->parsed()) {
      const gamma2::CheckResult r = gamma2::run_flatness(load_problem(flat_opts));
      print_check(r, flat_json);
      return kExitOk;
    }
    if (report->parsed()) {
      const gamma2::Problem p = load_problem(report_opts);
      const auto K = parse_list(report_k, "K");
      const auto N = report_n.empty() ? std::vector<double>{} : parse_list(report_n, "N");
      const gamma2::FullReport r = gamma2::run_full_report(p, K, N);
      std::string text;
      if (report_format == "json") {
        text = gamma2::to_json(r, !no_timing).dump(2) + "\n";
      } else if (report_format == "csv") {
        text = gamma2::to_csv(r);
      } else {
        text = gamma2::to_text(r, !no_timing);
      }
      if (report_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(report_out, std::ios::binary);
        if (!out) throw gamma2::ConfigError("cannot write '" + report_out + "'");
        out << text;
      }
      return r.all_pass() ? kExitOk : kExitFailed;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gamma2::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gamma2::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gamma2::HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}
