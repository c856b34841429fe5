#include "levy_escape/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "levy_escape/diagnostics.hpp"
#include "levy_escape/montecarlo.hpp"
#include "levy_escape/oracles.hpp"
#include "levy_escape/process.hpp"
#include "levy_escape/solver.hpp"

namespace levy_escape::cli {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& message, int line = 0) {
  throw ConfigError{field, message, line};
}

std::string trim(const std::string& s) {
  const auto from = s.find_first_not_of(" \t\r");
  if (from == std::string::npos) return "";
  const auto to = s.find_last_not_of(" \t\r");
  return s.substr(from, to - from + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(key, "trailing characters in number '" + v + "'", line);
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "cannot parse number '" + v + "'", line);
  }
}

long parse_long(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) fail(key, "trailing characters in integer '" + v + "'", line);
    return x;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "cannot parse integer '" + v + "'", line);
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) fail(key, "trailing characters in integer '" + v + "'", line);
    return static_cast<std::uint64_t>(x);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    fail(key, "cannot parse integer '" + v + "'", line);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_sweep(const std::string& v, const std::string& key, int line) {
  // START:STOP:COUNT, or a comma-separated list.
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) fail(key, "expected START:STOP:COUNT", line);
    const double start = parse_double(trim(parts[0]), key, line);
    const double stop = parse_double(trim(parts[1]), key, line);
    const long count = parse_long(trim(parts[2]), key, line);
    if (count < 1) fail(key, "sweep count must be >= 1", line);
    if (count == 1 && start != stop) fail(key, "single-point sweep needs START == STOP", line);
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
      xs[static_cast<std::size_t>(i)] =
          count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1);
    }
    return xs;
  }
  std::vector<double> xs;
  for (const auto& part : split(v, ',')) {
    xs.push_back(parse_double(trim(part), key, line));
  }
  return xs;
}

void parse_table(const std::string& v, const std::string& key, int line,
                 std::vector<double>& xs, std::vector<double>& ys) {
  xs.clear();
  ys.clear();
  for (const auto& part : split(v, ',')) {
    const auto pair = split(trim(part), ':');
    if (pair.size() != 2) fail(key, "expected x:y pairs separated by commas", line);
    xs.push_back(parse_double(trim(pair[0]), key, line));
    ys.push_back(parse_double(trim(pair[1]), key, line));
  }
  if (xs.size() < 2) fail(key, "table needs at least two points", line);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string table_to_string(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt17(xs[i]) + ":" + fmt17(ys[i]);
  }
  return out;
}

const char* problem_name(Problem p) {
  switch (p) {
    case Problem::BmInterval: return "bm_interval";
    case Problem::BmAnnulus: return "bm_annulus";
    case Problem::DriftInterval: return "drift_interval";
    case Problem::StableInterval: return "stable_interval";
    case Problem::Custom: return "custom";
  }
  return "?";
}

const char* route_name(Route r) {
  switch (r) {
    case Route::Mc: return "mc";
    case Route::Solve: return "solve";
    case Route::Oracle: return "oracle";
    case Route::Compare: return "compare";
    case Route::SampleCheck: return "sample-check";
  }
  return "?";
}

}  // namespace

RunConfig config_parse(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail("", "expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail("", "empty key", line);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      fail(key, "duplicate key", line);
    }
    seen.push_back(key);

    if (key == "problem") {
      if (value == "bm_interval") cfg.problem = Problem::BmInterval;
      else if (value == "bm_annulus") cfg.problem = Problem::BmAnnulus;
      else if (value == "drift_interval") cfg.problem = Problem::DriftInterval;
      else if (value == "stable_interval") cfg.problem = Problem::StableInterval;
      else if (value == "custom") cfg.problem = Problem::Custom;
      else fail(key, "unknown problem '" + value + "'", line);
    } else if (key == "route") {
      if (value == "mc") cfg.route = Route::Mc;
      else if (value == "solve") cfg.route = Route::Solve;
      else if (value == "oracle") cfg.route = Route::Oracle;
      else if (value == "compare") cfg.route = Route::Compare;
      else if (value == "sample-check") cfg.route = Route::SampleCheck;
      else fail(key, "unknown route '" + value + "'", line);
    } else if (key == "r") {
      cfg.r = parse_double(value, key, line);
    } else if (key == "R") {
      cfg.R = parse_double(value, key, line);
    } else if (key == "a") {
      cfg.a = parse_double(value, key, line);
    } else if (key == "b") {
      cfg.b = parse_double(value, key, line);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(value, key, line);
    } else if (key == "noise") {
      cfg.noise = value;
    } else if (key == "drift") {
      cfg.drift = value;
    } else if (key == "drift_c") {
      cfg.drift_c = parse_double(value, key, line);
    } else if (key == "drift_kappa") {
      cfg.drift_kappa = parse_double(value, key, line);
    } else if (key == "drift_table") {
      parse_table(value, key, line, cfg.drift_table_x, cfg.drift_table_y);
    } else if (key == "sigma") {
      cfg.sigma = value;
    } else if (key == "sigma_c") {
      cfg.sigma_c = parse_double(value, key, line);
    } else if (key == "sigma_table") {
      parse_table(value, key, line, cfg.sigma_table_x, cfg.sigma_table_y);
    } else if (key == "gamma") {
      cfg.gamma = value;
    } else if (key == "target_u") {
      cfg.target_u = value;
    } else if (key == "n_paths") {
      cfg.n_paths = parse_long(value, key, line);
    } else if (key == "dt") {
      cfg.dt = parse_double(value, key, line);
    } else if (key == "max_time") {
      cfg.max_time = parse_double(value, key, line);
    } else if (key == "grid_n") {
      cfg.grid_n = static_cast<int>(parse_long(value, key, line));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key, line);
    } else if (key == "sweep") {
      cfg.sweep = parse_sweep(value, key, line);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "format") {
      if (value == "csv") cfg.format = Format::Csv;
      else if (value == "json") cfg.format = Format::Json;
      else fail(key, "format must be csv or json", line);
    } else {
      fail(key, "unknown key", line);
    }
  }
  return cfg;
}

std::string config_serialize(const RunConfig& c) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("problem", problem_name(c.problem));
  kv("route", route_name(c.route));
  kv("r", fmt17(c.r));
  kv("R", fmt17(c.R));
  if (c.a) kv("a", fmt17(*c.a));
  if (c.b) kv("b", fmt17(*c.b));
  if (c.alpha) kv("alpha", fmt17(*c.alpha));
  if (!c.noise.empty()) kv("noise", c.noise);
  if (!c.drift.empty()) kv("drift", c.drift);
  kv("drift_c", fmt17(c.drift_c));
  kv("drift_kappa", fmt17(c.drift_kappa));
  if (!c.drift_table_x.empty()) kv("drift_table", table_to_string(c.drift_table_x, c.drift_table_y));
  if (!c.sigma.empty()) kv("sigma", c.sigma);
  kv("sigma_c", fmt17(c.sigma_c));
  if (!c.sigma_table_x.empty()) kv("sigma_table", table_to_string(c.sigma_table_x, c.sigma_table_y));
  if (c.gamma) kv("gamma", *c.gamma);
  if (c.target_u) kv("target_u", *c.target_u);
  kv("n_paths", std::to_string(c.n_paths));
  kv("dt", fmt17(c.dt));
  kv("max_time", fmt17(c.max_time));
  kv("grid_n", std::to_string(c.grid_n));
  kv("seed", std::to_string(c.seed));
  if (!c.sweep.empty()) {
    std::string s;
    for (std::size_t i = 0; i < c.sweep.size(); ++i) {
      if (i) s += ',';
      s += fmt17(c.sweep[i]);
    }
    kv("sweep", s);
  }
  kv("out", c.out);
  kv("format", c.format == Format::Csv ? "csv" : "json");
  return out;
}

void config_validate(const RunConfig& c) {
  if (!(c.r > 0.0)) fail("r", "must be > 0");
  if (c.problem == Problem::BmAnnulus && !(c.R > c.r)) fail("R", "must exceed r");
  if (c.gamma && c.target_u) {
    fail("target_u", "gamma (boundary target) and target_u (exterior target) are mutually exclusive");
  }
  if (c.n_paths < 1) fail("n_paths", "must be >= 1");
  if (!(c.dt > 0.0)) fail("dt", "must be > 0");
  if (!(c.max_time >= c.dt)) fail("max_time", "must be >= dt");
  if (c.grid_n < 3) fail("grid_n", "must be >= 3");

  if (c.alpha && !(*c.alpha > 0.0 && *c.alpha < 2.0)) {
    fail("alpha", "stable index must lie strictly in (0, 2)");
  }
  const bool stable_problem = c.problem == Problem::StableInterval ||
                              (c.problem == Problem::Custom && c.noise != "brownian" && !c.noise.empty());
  if (c.problem == Problem::StableInterval && !c.alpha) {
    fail("alpha", "required for stable_interval");
  }
  if (!stable_problem && c.route != Route::SampleCheck && c.alpha &&
      c.problem != Problem::Custom) {
    fail("alpha", "only applies to stable problems (or sample-check)");
  }

  if (c.problem == Problem::BmInterval || c.problem == Problem::BmAnnulus) {
    if (!c.drift.empty() && c.drift != "zero") {
      fail("drift", "this preset is driftless; use drift_interval or custom");
    }
    if (!c.sigma.empty() && c.sigma != "const") fail("sigma", "preset uses constant sigma");
    if (c.target_u) fail("target_u", "Brownian presets exit through the boundary; use gamma");
  }
  if (c.problem == Problem::DriftInterval && c.target_u) {
    fail("target_u", "drift_interval is a continuous-path preset; use gamma");
  }
  if (c.problem == Problem::StableInterval && c.gamma) {
    fail("gamma", "stable paths exit by jumping; use target_u");
  }
  if (c.problem != Problem::Custom && !c.noise.empty()) {
    fail("noise", "only custom problems take an explicit noise kind");
  }
  if (c.problem == Problem::Custom) {
    if (c.route != Route::Mc && c.route != Route::SampleCheck) {
      fail("route", "custom problems support only the mc route");
    }
    if (c.noise.empty() && c.route == Route::Mc) fail("noise", "required for custom problems");
    if (!(c.noise.empty() || c.noise == "brownian" || c.noise == "stable" ||
          c.noise == "brownian+stable")) {
      fail("noise", "must be brownian, stable, or brownian+stable");
    }
    if ((c.noise == "stable" || c.noise == "brownian+stable") && !c.alpha) {
      fail("alpha", "required for stable noise");
    }
  }
  if (c.gamma && c.problem != Problem::BmAnnulus && *c.gamma != "left" && *c.gamma != "right") {
    fail("gamma", "interval boundary components are left and right");
  }
  if (c.gamma && c.problem == Problem::BmAnnulus && *c.gamma != "inner" && *c.gamma != "outer") {
    fail("gamma", "annulus boundary components are inner and outer");
  }
  if (c.target_u && *c.target_u != "left" && *c.target_u != "right") {
    fail("target_u", "exterior target must be left or right");
  }
  if (c.format != Format::Csv && c.format != Format::Json) fail("format", "csv or json");
}

namespace {

// --- resolved problem ---------------------------------------------------------

struct Resolved {
  process::ProcessSpec spec;
  process::DomainSpec domain;
  process::TargetSpec target;
  bool target_is_right = true;  // orientation of the target side
  std::function<oracles::OracleResult(double)> oracle;  // null if unavailable
  std::function<solver::GridSolution()> solve;          // null if unavailable
};

process::ScalarCoeff resolve_coeff(const std::string& name, const std::string& which,
                                   const RunConfig& c, const std::string& preset_default) {
  const std::string kind = name.empty() ? preset_default : name;
  if (which == "drift") {
    if (kind == "zero") return process::ScalarCoeff::zero();
    if (kind == "const") return process::ScalarCoeff::constant(c.drift_c);
    if (kind == "linear") return process::ScalarCoeff::linear_restoring(c.drift_kappa);
    if (kind == "table") {
      if (c.drift_table_x.empty()) fail("drift_table", "required when drift = table");
      return process::ScalarCoeff::table(c.drift_table_x, c.drift_table_y);
    }
    fail("drift", "unknown drift kind '" + kind + "'");
  }
  if (kind == "const") return process::ScalarCoeff::constant(c.sigma_c);
  if (kind == "table") {
    if (c.sigma_table_x.empty()) fail("sigma_table", "required when sigma = table");
    return process::ScalarCoeff::table(c.sigma_table_x, c.sigma_table_y);
  }
  if (kind == "zero") fail("sigma", "sigma must not vanish; use a stable noise kind instead");
  fail("sigma", "unknown sigma kind '" + kind + "'");
}

Resolved resolve(const RunConfig& c) {
  Resolved res;
  switch (c.problem) {
    case Problem::BmInterval: {
      res.domain = process::DomainSpec::interval(-c.r, c.r);
      res.spec = process::ProcessSpec::brownian_1d(process::ScalarCoeff::zero(),
                                                   process::ScalarCoeff::constant(1.0));
      res.target_is_right = !c.gamma || *c.gamma == "right";
      res.target = process::TargetSpec::boundary(
          {res.target_is_right ? process::BoundaryComponent::Right
                               : process::BoundaryComponent::Left});
      const double r = c.r;
      const bool right = res.target_is_right;
      res.oracle = [r, right](double x) {
        oracles::OracleResult o = oracles::oracle_bm_interval(x, r);
        if (!right) o.value = 1.0 - o.value;
        return o;
      };
      const int n = c.grid_n;
      res.solve = [r, right, n]() {
        return solver::solve_elliptic_1d([](double) { return 0.0; },
                                         [](double) { return 1.0; }, -r, r,
                                         right ? 0.0 : 1.0, right ? 1.0 : 0.0, n);
      };
      break;
    }
    case Problem::BmAnnulus: {
      res.domain = process::DomainSpec::annulus(c.r, c.R);
      res.spec = process::ProcessSpec::brownian_2d(1.0);
      const bool inner = !c.gamma || *c.gamma == "inner";
      res.target_is_right = !inner;
      res.target = process::TargetSpec::boundary(
          {inner ? process::BoundaryComponent::Inner : process::BoundaryComponent::Outer});
      const double r = c.r, R = c.R;
      res.oracle = [r, R, inner](double rho) {
        oracles::OracleResult o = oracles::oracle_bm_annulus(rho, r, R);
        if (!inner) o.value = 1.0 - o.value;
        return o;
      };
      const int n = c.grid_n;
      res.solve = [r, R, inner, n]() {
        return solver::solve_laplace_annulus(r, R, inner ? 1.0 : 0.0, inner ? 0.0 : 1.0, n);
      };
      break;
    }
    case Problem::DriftInterval: {
      res.domain = process::DomainSpec::interval(-c.r, c.r);
      const process::ScalarCoeff b = resolve_coeff(c.drift, "drift", c, "linear");
      const process::ScalarCoeff s = resolve_coeff(c.sigma, "sigma", c, "const");
      res.spec = process::ProcessSpec::brownian_1d(b, s);
      res.target_is_right = !c.gamma || *c.gamma == "right";
      res.target = process::TargetSpec::boundary(
          {res.target_is_right ? process::BoundaryComponent::Right
                               : process::BoundaryComponent::Left});
      const double r = c.r;
      const bool right = res.target_is_right;
      res.oracle = [r, right, b, s](double x) {
        oracles::OracleResult o = oracles::oracle_drift_1d(
            x, r, [&b](double y) { return b(y); }, [&s](double y) { return s(y); });
        if (!right) o.value = 1.0 - o.value;
        return o;
      };
      const int n = c.grid_n;
      res.solve = [r, right, b, s, n]() {
        return solver::solve_elliptic_1d([&b](double y) { return b(y); },
                                         [&s](double y) { return s(y); }, -r, r,
                                         right ? 0.0 : 1.0, right ? 1.0 : 0.0, n);
      };
      break;
    }
    case Problem::StableInterval: {
      res.domain = process::DomainSpec::interval(-c.r, c.r);
      res.spec = process::ProcessSpec::stable_1d(*c.alpha);
      res.target_is_right = !c.target_u || *c.target_u == "right";
      res.target = res.target_is_right ? process::TargetSpec::exterior_right(res.domain)
                                       : process::TargetSpec::exterior_left(res.domain);
      const double r = c.r;
      const double a = *c.alpha;
      const bool right = res.target_is_right;
      res.oracle = [r, a, right](double x) {
        oracles::OracleResult o = oracles::oracle_stable_interval(x, r, stable::StableIndex(a));
        if (!right) o.value = 1.0 - o.value;
        return o;
      };
      const int n = c.grid_n;
      res.solve = [r, a, right, n]() {
        const solver::ExteriorData data = right ? solver::ExteriorData::indicator_right(r)
                                                : solver::ExteriorData::indicator_left(r);
        return solver::solve_fractional_1d(a, r, data, n);
      };
      break;
    }
    case Problem::Custom: {
      const double lo = c.a.value_or(-c.r);
      const double hi = c.b.value_or(c.r);
      if (!(lo < hi)) fail("a", "custom interval needs a < b");
      res.domain = process::DomainSpec::interval(lo, hi);
      const process::ScalarCoeff b = resolve_coeff(c.drift, "drift", c, "zero");
      const process::ScalarCoeff s = resolve_coeff(c.sigma, "sigma", c, "const");
      if (c.noise == "brownian") {
        res.spec = process::ProcessSpec::brownian_1d(b, s);
      } else if (c.noise == "stable") {
        res.spec = process::ProcessSpec::stable_1d(*c.alpha, b);
      } else {
        res.spec = process::ProcessSpec::brownian_plus_stable_1d(*c.alpha, b, s);
      }
      res.target_is_right = !c.target_u && !c.gamma ? true
                            : c.target_u            ? *c.target_u == "right"
                                                    : *c.gamma == "right";
      if (res.spec.has_stable() || c.target_u) {
        res.target = res.target_is_right ? process::TargetSpec::exterior_right(res.domain)
                                         : process::TargetSpec::exterior_left(res.domain);
      } else {
        res.target = process::TargetSpec::boundary(
            {res.target_is_right ? process::BoundaryComponent::Right
                                 : process::BoundaryComponent::Left});
      }
      break;
    }
  }
  return res;
}

std::vector<double> resolve_sweep(const RunConfig& c, const Resolved& res) {
  std::vector<double> xs = c.sweep;
  if (xs.empty()) {
    double lo, hi;
    if (res.domain.shape == process::DomainSpec::Shape::Interval) {
      lo = res.domain.a;
      hi = res.domain.b;
    } else {
      lo = res.domain.r;
      hi = res.domain.R;
    }
    const double margin = 0.05 * (hi - lo);
    for (int i = 0; i < 9; ++i) {
      xs.push_back(lo + margin + (hi - lo - 2 * margin) * i / 8.0);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    const bool inside = res.domain.shape == process::DomainSpec::Shape::Interval
                            ? (x > res.domain.a && x < res.domain.b)
                            : (x > res.domain.r && x < res.domain.R);
    if (!inside) fail("sweep", "point " + fmt17(x) + " lies outside the open domain");
  }
  return xs;
}

int env_thread_cap() {
  const char* env = std::getenv("LEVY_ESCAPE_THREADS");
  if (!env) return 0;
  const int n = std::atoi(env);
  return n > 0 ? n : 0;
}

// --- output ------------------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;  // null entries allowed
  std::vector<std::pair<std::string, ordered_json>> summary;
};

std::string render_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i].is_null()) {
        // empty field
      } else if (row[i].is_number_float()) {
        out += fmt17(row[i].get<double>());
      } else if (row[i].is_string()) {
        out += row[i].get<std::string>();
      } else {
        out += row[i].dump();
      }
    }
    out += '\n';
  }
  out += "# summary:";
  for (const auto& [key, value] : table.summary) {
    out += ' ' + key + '=';
    if (value.is_number_float()) {
      out += fmt17(value.get<double>());
    } else {
      out += value.dump();
    }
  }
  out += '\n';
  return out;
}

std::string render_json(const Table& table) {
  ordered_json doc;
  doc["rows"] = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = row[i];
    doc["rows"].push_back(obj);
  }
  ordered_json summary;
  for (const auto& [key, value] : table.summary) summary[key] = value;
  doc["summary"] = summary;
  return doc.dump(2) + "\n";
}

void write_output(const RunConfig& c, const Table& table) {
  const std::string body = c.format == Format::Csv ? render_csv(table) : render_json(table);
  if (c.out == "-") {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) fail("out", "cannot open '" + c.out + "' for writing");
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
}

// --- routes ------------------------------------------------------------------

Table route_mc(const RunConfig& c, const Resolved& res, const std::vector<double>& xs) {
  Table table;
  table.columns = {"x", "p_hat", "std_err", "ci_lo", "ci_hi", "n_paths", "n_censored"};
  montecarlo::McOptions options;
  options.max_time = c.max_time;
  options.threads = env_thread_cap();
  long censored = 0;
  bool high = false;
  double max_se = 0.0;
  const auto profile = montecarlo::estimate_profile(xs, res.spec, res.domain, res.target,
                                                    c.n_paths, c.dt, c.seed, options);
  for (const auto& [x, est] : profile) {
    table.rows.push_back({x, est.p_hat, est.std_err, est.ci95.first, est.ci95.second,
                          est.n_paths, est.n_censored});
    censored += est.n_censored;
    high = high || est.high_censoring;
    max_se = std::max(max_se, est.std_err);
  }
  table.summary = {{"max_std_err", max_se},
                   {"total_censored", censored},
                   {"high_censoring", high}};
  return table;
}

Table route_solve(const RunConfig&, const Resolved& res) {
  if (!res.solve) fail("route", "no deterministic solver for this problem");
  const solver::GridSolution sol = res.solve();
  Table table;
  table.columns = {"x", "value"};
  for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
    table.rows.push_back({sol.nodes[i], sol.values[i]});
  }
  table.summary = {{"residual_inf", sol.residual_inf},
                   {"residual_tol", sol.residual_tol},
                   {"residual_ok", sol.residual_ok}};
  return table;
}

Table route_oracle(const RunConfig&, const Resolved& res, const std::vector<double>& xs) {
  if (!res.oracle) fail("route", "no oracle for this problem");
  Table table;
  table.columns = {"x", "oracle_p", "abs_error_bound"};
  double max_bound = 0.0;
  for (double x : xs) {
    const oracles::OracleResult o = res.oracle(x);
    table.rows.push_back({x, o.value, o.abs_error_bound});
    max_bound = std::max(max_bound, o.abs_error_bound);
  }
  table.summary = {{"max_error_bound", max_bound}};
  return table;
}

Table route_compare(const RunConfig& c, const Resolved& res, const std::vector<double>& xs) {
  if (!res.oracle || !res.solve) fail("route", "compare needs both a solver and an oracle");
  Table table;
  table.columns = {"x",        "mc_p",     "mc_stderr",          "solver_p",
                   "oracle_p", "abs_mc_minus_oracle", "abs_solver_minus_oracle"};
  montecarlo::McOptions options;
  options.max_time = c.max_time;
  options.threads = env_thread_cap();

  const solver::GridSolution sol = res.solve();
  const auto profile = montecarlo::estimate_profile(xs, res.spec, res.domain, res.target,
                                                    c.n_paths, c.dt, c.seed, options);
  double max_mc = 0.0, max_solver = 0.0;
  long censored = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    const auto& est = profile[i].second;
    const oracles::OracleResult o = res.oracle(x);
    ordered_json solver_p;  // null when x falls in the outermost gap
    ordered_json solver_gap;
    try {
      const double sv = sol.value_at(x);
      solver_p = sv;
      solver_gap = std::abs(sv - o.value);
      max_solver = std::max(max_solver, std::abs(sv - o.value));
    } catch (const std::domain_error&) {
    }
    const double mc_gap = std::abs(est.p_hat - o.value);
    max_mc = std::max(max_mc, mc_gap);
    censored += est.n_censored;
    table.rows.push_back({x, est.p_hat, est.std_err, solver_p, o.value, mc_gap, solver_gap});
  }
  table.summary = {{"max_mc_vs_oracle", max_mc},
                   {"max_solver_vs_oracle", max_solver},
                   {"total_censored", censored},
                   {"solver_residual_inf", sol.residual_inf}};
  return table;
}

std::pair<Table, bool> route_sample_check(const RunConfig& c) {
  Table table;
  table.columns = {"alpha", "n_draws", "ks_density", "ks_density_limit",
                   "ks_cauchy", "ks_cauchy_limit", "pass"};
  std::vector<double> alphas = c.alpha ? std::vector<double>{*c.alpha}
                                       : std::vector<double>{0.5, 1.0, 1.5};
  const long n = c.n_paths;
  bool all_pass = true;
  for (double a : alphas) {
    const stable::StableIndex ai(a);
    RandomStream rng(c.seed, 0, 0);
    std::vector<double> draws(static_cast<std::size_t>(n));
    for (auto& d : draws) d = stable::sample_standard_stable(ai, rng);
    std::sort(draws.begin(), draws.end());
    const diagnostics::StableCdf ref = diagnostics::integrate_stable_cdf(ai);
    const double ks_density = diagnostics::ks_against_cdf(draws, ref);
    constexpr double kDensityLimit = 0.02;
    ordered_json ks_cauchy, cauchy_limit;
    bool pass = ks_density < kDensityLimit;
    if (a == 1.0) {
      const double ks = diagnostics::ks_against_cauchy(draws);
      ks_cauchy = ks;
      cauchy_limit = 0.01;
      pass = pass && ks < 0.01;
    }
    all_pass = all_pass && pass;
    table.rows.push_back({a, n, ks_density, kDensityLimit, ks_cauchy, cauchy_limit, pass});
  }
  table.summary = {{"all_pass", all_pass}};
  return {table, all_pass};
}

}  // namespace

int run(const RunConfig& config) {
  try {
    config_validate(config);
    if (config.route == Route::SampleCheck) {
      // Sample diagnostics need no domain geometry.
      const auto [table, all_pass] = route_sample_check(config);
      write_output(config, table);
      if (!all_pass) {
        ordered_json err;
        err["error"]["message"] = "sample-check: a KS diagnostic exceeded its limit";
        err["error"]["field"] = "sample-check";
        std::cerr << err.dump() << "\n";
        return 1;
      }
      return 0;
    }
    const Resolved res = resolve(config);
    const std::vector<double> xs = resolve_sweep(config, res);
    Table table;
    switch (config.route) {
      case Route::Mc:
        table = route_mc(config, res, xs);
        break;
      case Route::Solve:
        table = route_solve(config, res);
        break;
      case Route::Oracle:
        table = route_oracle(config, res, xs);
        break;
      case Route::Compare:
        table = route_compare(config, res, xs);
        break;
      case Route::SampleCheck:
        break;  // handled above
    }
    write_output(config, table);
    return 0;
  } catch (const ConfigError& e) {
    ordered_json err;
    err["error"]["message"] = e.message;
    err["error"]["field"] = e.field;
    if (e.line > 0) err["error"]["line"] = e.line;
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"]["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}

}  // namespace levy_escape::cli
