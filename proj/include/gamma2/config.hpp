#pragma once

/// \file
/// INI-style space configuration files.
///
///     [space]       dim = 2, optional label and coords (variable names)
///     [metric]      g11 = "expr", g12 = ... (upper triangle; missing entries are Kronecker delta)
///     [weight]      V = "expr" (default 0)
///     [domain]      phi = "expr"
///     [chart]       <coord> = lo, hi for every coordinate
///     [interior.k]  params = r, t; <param> = lo, hi; <coord> = "map expr"
///     [boundary.k]  params = t; <param> = lo, hi; <coord> = "map expr"; orientation = 1 | -1
///     [cutoff]      inner.<coord> = lo, hi; outer.<coord> = lo, hi; regularization = c
///     [samples]     interior, boundary, random, seed
///     [quadrature]  interior, boundary
///     [tests]       fields, neumann, weights = comma-separated quoted expressions
///
/// Bounds may be constant expressions such as 2*pi. Lines starting with # or ;
/// are comments.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gamma2/errors.hpp"
#include "gamma2/suite.hpp"

namespace gamma2 {

struct IniEntry {
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, IniEntry>> entries;

  const IniEntry* find(std::string_view key) const {
    for (const auto& [k, e] : entries) {
      if (k == key) return &e;
    }
    return nullptr;
  }
};

struct IniDocument {
  std::vector<IniSection> sections;

  const IniSection* find(std::string_view name) const {
    for (const auto& s : sections) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

/// Splits on commas outside double quotes and strips one level of quotes.
inline std::vector<std::string> split_list(const std::string& v, int line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false, was_quoted = false;
  for (char c : v) {
    if (c == '"') {
      quoted = !quoted;
      was_quoted = true;
    } else if (c == ',' && !quoted) {
      out.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else if (quoted || !(was_quoted && (c == ' ' || c == '\t'))) {
      cur += c;
    }
  }
  if (quoted) fail(line, "unterminated string");
  out.push_back(was_quoted ? cur : trim(cur));
  return out;
}

inline std::string unquote(const IniEntry& e) {
  const auto parts = split_list(e.value, e.line);
  if (parts.size() != 1) fail(e.line, "expected a single value, found a list");
  return parts[0];
}

inline double constant(const std::string& src, int line) {
  try {
    const Expr e = parse(src, std::vector<std::string>{});
    const double v = e.evaluate_value({});
    if (!std::isfinite(v)) fail(line, "value '" + src + "' is not finite");
    return v;
  } catch (const ParseError& err) {
    fail(line, "in '" + src + "': " + err.what());
  } catch (const DomainError& err) {
    fail(line, "in '" + src + "': " + err.what());
  }
}

inline long integer(const IniEntry& e, const std::string& key) {
  const std::string s = unquote(e);
  long v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) fail(e.line, key + " must be an integer, found '" + s + "'");
  return v;
}

inline Interval interval(const IniEntry& e, const std::string& key) {
  const auto parts = split_list(e.value, e.line);
  if (parts.size() != 2) fail(e.line, key + " must be 'lo, hi'");
  const Interval iv{constant(parts[0], e.line), constant(parts[1], e.line)};
  if (!(iv.lo < iv.hi)) fail(e.line, key + " must satisfy lo < hi");
  return iv;
}

inline Expr expression(const std::string& src, const std::vector<std::string>& names, int line,
                       const std::string& key) {
  try {
    return parse(src, names);
  } catch (const ParseError& err) {
    fail(line, key + " = \"" + src + "\": " + err.what());
  }
}

inline ScalarField field(const std::string& src, const std::vector<std::string>& names, int line,
                         const std::string& key) {
  return ScalarField::expression(expression(src, names, line, key));
}

}  // namespace config_detail

inline IniDocument parse_ini(std::istream& in) {
  using namespace config_detail;
  IniDocument doc;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "section header missing ']'");
      const std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
      if (name.empty()) fail(line, "empty section name");
      if (doc.find(name)) fail(line, "duplicate section [" + name + "]");
      doc.sections.push_back({name, line, {}});
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    if (doc.sections.empty()) fail(line, "entry outside of any section");
    const std::string key = trim(std::string_view(s).substr(0, eq));
    if (key.empty()) fail(line, "missing key");
    IniSection& sec = doc.sections.back();
    if (sec.find(key)) fail(line, "duplicate key '" + key + "' in [" + sec.name + "]");
    sec.entries.push_back({key, {trim(std::string_view(s).substr(eq + 1)), line}});
  }
  return doc;
}

inline IniDocument parse_ini_string(const std::string& text) {
  std::istringstream in(text);
  return parse_ini(in);
}

namespace config_detail {

inline const IniEntry& require(const IniSection& sec, const std::string& key) {
  const IniEntry* e = sec.find(key);
  if (!e) fail(sec.line, "section [" + sec.name + "] needs '" + key + "'");
  return *e;
}

inline void reject_unknown(const IniSection& sec, const std::vector<std::string>& known) {
  for (const auto& [k, e] : sec.entries) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      fail(e.line, "unknown key '" + k + "' in [" + sec.name + "]");
    }
  }
}

inline Patch patch(const IniSection& sec, const std::vector<std::string>& coords, bool boundary) {
  Patch p;
  p.label = sec.name;
  const IniEntry* params = sec.find("params");
  const int n = static_cast<int>(coords.size());
  if (!params) {
    if (boundary) fail(sec.line, "[" + sec.name + "] needs 'params'");
    p.params = coords;
  } else {
    p.params = split_list(params->value, params->line);
    for (const auto& name : p.params) {
      if (name.empty()) fail(params->line, "empty parameter name");
    }
  }
  const int want = boundary ? n - 1 : n;
  if (static_cast<int>(p.params.size()) != want) {
    fail(params ? params->line : sec.line,
         "[" + sec.name + "] needs " + std::to_string(want) + " parameters, found " + std::to_string(p.params.size()));
  }
  std::vector<std::string> known = {"params", "orientation"};
  for (const auto& a : p.params) {
    p.ranges.push_back(interval(require(sec, a), a));
    known.push_back(a);
  }
  if (params) {
    for (const auto& c : coords) {
      if (std::find(p.params.begin(), p.params.end(), c) != p.params.end()) {
        fail(params->line, "parameter names must differ from the coordinate names");
      }
    }
    for (const auto& c : coords) {
      const IniEntry& m = require(sec, c);
      p.maps.push_back(expression(unquote(m), p.params, m.line, c));
      known.push_back(c);
    }
  }
  if (const IniEntry* o = sec.find("orientation")) {
    const long v = integer(*o, "orientation");
    if (v != 1 && v != -1) fail(o->line, "orientation must be 1 or -1");
    p.orientation = static_cast<int>(v);
  }
  reject_unknown(sec, known);
  return p;
}

}  // namespace config_detail

/// Builds a Problem from a parsed document. Test families default to the
/// built-in planar or spatial sets when [tests] is absent.
inline Problem problem_from_ini(const IniDocument& doc) {
  using namespace config_detail;
  const IniSection* space_sec = doc.find("space");
  if (!space_sec) throw ConfigError("line 1: missing [space] section");
  reject_unknown(*space_sec, {"dim", "label", "coords"});
  const IniEntry& dim_e = require(*space_sec, "dim");
  const long dim = integer(dim_e, "dim");
  if (dim < 1 || dim > kMaxDim) fail(dim_e.line, "dim must be between 1 and " + std::to_string(kMaxDim));
  const int n = static_cast<int>(dim);

  std::vector<std::string> coords = default_variable_names(n);
  if (const IniEntry* c = space_sec->find("coords")) {
    coords = split_list(c->value, c->line);
    if (static_cast<int>(coords.size()) != n) fail(c->line, "coords must name " + std::to_string(n) + " variables");
  }

  Problem p;
  WeightedSpace& s = p.space;
  s.dim = n;
  s.label = space_sec->find("label") ? unquote(*space_sec->find("label")) : std::string("config space");

  s.metric.clear();
  const IniSection* metric = doc.find("metric");
  std::vector<std::string> metric_keys;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const std::string key = "g" + std::to_string(i + 1) + std::to_string(j + 1);
      metric_keys.push_back(key);
      const IniEntry* e = metric ? metric->find(key) : nullptr;
      s.metric.push_back(e ? field(unquote(*e), coords, e->line, key)
                           : ScalarField::expression(parse(i == j ? "1" : "0", coords)));
    }
  }
  if (metric) reject_unknown(*metric, metric_keys);

  const IniSection* weight = doc.find("weight");
  if (weight) reject_unknown(*weight, {"V"});
  const IniEntry* v = weight ? weight->find("V") : nullptr;
  s.weight = v ? field(unquote(*v), coords, v->line, "V") : ScalarField::expression(parse("0", coords));

  const IniSection* domain = doc.find("domain");
  if (!domain) throw ConfigError("line 1: missing [domain] section");
  reject_unknown(*domain, {"phi"});
  const IniEntry& phi = require(*domain, "phi");
  s.defining = field(unquote(phi), coords, phi.line, "phi");

  const IniSection* chart = doc.find("chart");
  if (!chart) throw ConfigError("line 1: missing [chart] section");
  reject_unknown(*chart, coords);
  for (const auto& c : coords) s.chart.push_back(interval(require(*chart, c), c));

  for (const auto& sec : doc.sections) {
    if (sec.name.rfind("interior.", 0) == 0) s.interior.push_back(patch(sec, coords, false));
    if (sec.name.rfind("boundary.", 0) == 0) s.boundary.push_back(patch(sec, coords, true));
  }
  if (s.boundary.empty()) throw ConfigError("line 1: at least one [boundary.k] section is required");

  if (const IniSection* cut = doc.find("cutoff")) {
    std::vector<std::string> known = {"regularization"};
    bool any_box = false;
    for (const auto& c : coords) {
      known.push_back("inner." + c);
      known.push_back("outer." + c);
      any_box = any_box || cut->find("inner." + c) || cut->find("outer." + c);
    }
    reject_unknown(*cut, known);
    if (any_box) {
      for (const auto& c : coords) {
        p.suite.cutoff.inner.push_back(interval(require(*cut, "inner." + c), "inner." + c));
        p.suite.cutoff.outer.push_back(interval(require(*cut, "outer." + c), "outer." + c));
      }
    }
    if (const IniEntry* r = cut->find("regularization")) {
      p.suite.cutoff.regularization = constant(unquote(*r), r->line);
    }
    try {
      validate_cutoff(p.suite.cutoff, s);
    } catch (const std::invalid_argument& err) {
      fail(cut->line, err.what());
    }
  }

  if (const IniSection* smp = doc.find("samples")) {
    reject_unknown(*smp, {"interior", "boundary", "random", "seed"});
    auto positive = [&](const char* key, int& out) {
      if (const IniEntry* e = smp->find(key)) {
        const long val = integer(*e, key);
        if (val < 1 || val > 100000) fail(e->line, std::string(key) + " must be between 1 and 100000");
        out = static_cast<int>(val);
      }
    };
    positive("interior", p.plan.interior);
    positive("boundary", p.plan.boundary);
    positive("random", p.plan.random);
    if (const IniEntry* e = smp->find("seed")) {
      const long val = integer(*e, "seed");
      if (val < 0) fail(e->line, "seed must be >= 0");
      p.plan.seed = static_cast<std::uint64_t>(val);
    }
  }
  if (const IniSection* q = doc.find("quadrature")) {
    reject_unknown(*q, {"interior", "boundary"});
    for (auto [key, out] : {std::pair{"interior", &p.rule.interior}, std::pair{"boundary", &p.rule.boundary}}) {
      if (const IniEntry* e = q->find(key)) {
        const long val = integer(*e, key);
        if (val < 1 || val > 4096) fail(e->line, std::string(key) + " node count must be between 1 and 4096");
        *out = static_cast<int>(val);
      }
    }
  }

  const IniSection* tests = doc.find("tests");
  if (tests) reject_unknown(*tests, {"fields", "neumann", "weights"});
  auto family = [&](const char* key, std::vector<std::string> fallback) {
    std::vector<ScalarField> out;
    const IniEntry* e = tests ? tests->find(key) : nullptr;
    const std::vector<std::string> src = e ? split_list(e->value, e->line) : fallback;
    for (const auto& f : src) out.push_back(field(f, coords, e ? e->line : 1, key));
    return out;
  };
  std::vector<std::string> base_fields, base_neumann, base_weights;
  if (coords == default_variable_names(n) && (n == 2 || n == 3)) {
    const TestSuite builtin = n == 2 ? planar_test_suite() : spatial_test_suite();
    for (const auto& f : builtin.fields) base_fields.push_back(f.label());
    for (const auto& f : builtin.neumann_bases) base_neumann.push_back(f.label());
    for (const auto& f : builtin.weights) base_weights.push_back(f.label());
  } else {
    const std::string& a = coords[0];
    const std::string& b = coords[n > 1 ? 1 : 0];
    base_fields = {a + "^2", "sin(" + a + ")*cos(" + b + ")", "exp(0.3*" + a + ")"};
    base_neumann = {a, b, a + "*" + b};
    base_weights = {"1", "cos(" + b + ")", "1 + 0.1*" + a};
  }
  p.suite.fields = family("fields", base_fields);
  p.suite.neumann_bases = family("neumann", base_neumann);
  p.suite.weights = family("weights", base_weights);
  return p;
}

inline Problem load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Problem p = problem_from_ini(parse_ini(in));
  validate_space(p.space);
  return p;
}

}  // namespace gamma2
