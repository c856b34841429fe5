#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "levy_escape/cli.hpp"

namespace {

using levy_escape::cli::Format;
using levy_escape::cli::Problem;
using levy_escape::cli::Route;
using levy_escape::cli::RunConfig;

int run_route(Route route, const std::string& config_path, CLI::App* sub) {
  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) {
      std::cerr << R"({"error":{"message":"cannot read config file","field":"config"}})" << "\n";
      return 1;
    }
    std::stringstream buffer;
    buffer << file.rdbuf();
    try {
      cfg = levy_escape::cli::config_parse(buffer.str());
    } catch (const levy_escape::cli::ConfigError& e) {
      std::cerr << "{\"error\":{\"message\":\"" << e.message << "\",\"field\":\"" << e.field
                << "\",\"line\":" << e.line << "}}\n";
      return 1;
    }
  }
  cfg.route = route;

  // Flags win over file values.
  auto flag = [&](const char* name) { return sub->count(name) > 0; };
  if (flag("--problem")) {
    const std::string p = sub->get_option("--problem")->as<std::string>();
    if (p == "bm_interval") cfg.problem = Problem::BmInterval;
    else if (p == "bm_annulus") cfg.problem = Problem::BmAnnulus;
    else if (p == "drift_interval") cfg.problem = Problem::DriftInterval;
    else if (p == "stable_interval") cfg.problem = Problem::StableInterval;
    else if (p == "custom") cfg.problem = Problem::Custom;
    else {
      std::cerr << R"({"error":{"message":"unknown problem","field":"problem"}})" << "\n";
      return 1;
    }
  }
  if (flag("--out")) cfg.out = sub->get_option("--out")->as<std::string>();
  if (flag("--format")) {
    const std::string f = sub->get_option("--format")->as<std::string>();
    if (f == "csv") cfg.format = Format::Csv;
    else if (f == "json") cfg.format = Format::Json;
    else {
      std::cerr << R"({"error":{"message":"format must be csv or json","field":"format"}})" << "\n";
      return 1;
    }
  }
  if (flag("--seed")) cfg.seed = sub->get_option("--seed")->as<std::uint64_t>();
  if (flag("--paths")) cfg.n_paths = sub->get_option("--paths")->as<long>();
  if (flag("--dt")) cfg.dt = sub->get_option("--dt")->as<double>();
  if (flag("--grid")) cfg.grid_n = sub->get_option("--grid")->as<int>();
  if (flag("--alpha")) cfg.alpha = sub->get_option("--alpha")->as<double>();
  if (flag("--r")) cfg.r = sub->get_option("--r")->as<double>();
  if (flag("--R")) cfg.R = sub->get_option("--R")->as<double>();
  if (flag("--max-time")) cfg.max_time = sub->get_option("--max-time")->as<double>();
  if (flag("--sweep")) {
    try {
      RunConfig sweep_probe =
          levy_escape::cli::config_parse("sweep = " + sub->get_option("--sweep")->as<std::string>());
      cfg.sweep = sweep_probe.sweep;
    } catch (const levy_escape::cli::ConfigError& e) {
      std::cerr << "{\"error\":{\"message\":\"" << e.message << "\",\"field\":\"sweep\"}}\n";
      return 1;
    }
  }
  return levy_escape::cli::run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape probabilities for Brownian and symmetric alpha-stable dynamics:\n"
               "Monte Carlo first exits, deterministic boundary-value solvers, and\n"
               "closed-form/quadrature oracles, cross-checked against each other."};
  app.require_subcommand(1);

  struct SubSpec {
    const char* name;
    const char* help;
    Route route;
  };
  const SubSpec subs[] = {
      {"estimate", "Monte Carlo escape-probability estimates over a sweep", Route::Mc},
      {"solve", "deterministic boundary-value solve on a grid", Route::Solve},
      {"oracle", "closed-form / quadrature reference values over a sweep", Route::Oracle},
      {"compare", "run Monte Carlo, solver and oracle side by side", Route::Compare},
      {"sample-check", "KS diagnostics of the stable sampler", Route::SampleCheck},
  };

  std::string config_path;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", config_path, "configuration file (flat key = value)");
    sub->add_option("--out", "output path ('-' = stdout)");
    sub->add_option("--format", "csv | json");
    sub->add_option("--seed", "random seed");
    sub->add_option("--paths", "Monte Carlo path count");
    sub->add_option("--dt", "time step");
    sub->add_option("--grid", "solver grid size");
    sub->add_option("--alpha", "stable index in (0, 2)");
    sub->add_option("--r", "domain radius (interval half-width / inner radius)");
    sub->add_option("--R", "annulus outer radius");
    sub->add_option("--max-time", "censoring horizon");
    sub->add_option("--sweep", "START:STOP:COUNT or comma list of starting points");
    sub->add_option("--problem", "bm_interval | bm_annulus | drift_interval | stable_interval | custom");
    sub->callback([&config_path, sub, route = s.route]() {
      std::exit(run_route(route, config_path, sub));
    });
  }

  CLI11_PARSE(app, argc, argv);
  return 0;
}
