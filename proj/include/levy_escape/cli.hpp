#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace levy_escape::cli {

enum class Problem { BmInterval, BmAnnulus, DriftInterval, StableInterval, Custom };
enum class Route { Mc, Solve, Oracle, Compare, SampleCheck };
enum class Format { Csv, Json };

/// Configuration error carrying the offending field (and input line when the
/// error came from parsing a document).
struct ConfigError {
  std::string field;
  std::string message;
  int line = 0;  // 0 when not tied to a document line
};

/// Fully resolved run configuration.  The canonical text form is a flat
/// `key = value` document (one per line, `#` comments); command-line flags
/// override file values.
struct RunConfig {
  Problem problem = Problem::BmInterval;
  Route route = Route::Compare;

  // Geometry.
  double r = 2.0;
  double R = 4.0;           // annulus outer radius
  std::optional<double> a;  // custom interval overrides
  std::optional<double> b;

  // Process parameters.
  std::optional<double> alpha;        // stable index where applicable
  std::string noise = "";            // custom problems: brownian | stable | brownian+stable
  std::string drift = "";            // zero | const | linear | table ("" = preset default)
  double drift_c = 0.0;               // const drift value
  double drift_kappa = 1.0;           // linear drift b(x) = -kappa x
  std::vector<double> drift_table_x, drift_table_y;
  std::string sigma = "";            // const | table
  double sigma_c = 1.0;
  std::vector<double> sigma_table_x, sigma_table_y;

  // Target: boundary subset (continuous) or exterior set (jumps); only one
  // of the two may be specified.
  std::optional<std::string> gamma;     // left | right | inner | outer
  std::optional<std::string> target_u;  // right | left

  // Numerics.
  long n_paths = 100000;
  double dt = 1e-4;
  double max_time = 1e4;
  int grid_n = 1000;
  std::uint64_t seed = 1;

  // Sweep of starting points: explicit list, or START:STOP:COUNT.
  std::vector<double> sweep;  // empty = preset default (9 interior points)

  // Output.
  std::string out = "-";  // "-" = stdout
  Format format = Format::Csv;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the canonical flat key-value document.  Unknown keys, duplicate
/// keys and malformed values are errors (ConfigError with the line number).
RunConfig config_parse(const std::string& text);

/// Canonical serialization; config_parse(config_serialize(c)) == c.
std::string config_serialize(const RunConfig& config);

/// Validates cross-field consistency (geometry, route requirements, target
/// exclusivity).  Throws ConfigError.
void config_validate(const RunConfig& config);

/// Executes the configured run, writing the output artifact; returns the
/// process exit status (0 iff no route reported failure).  Errors print a
/// machine-readable JSON record to stderr.
int run(const RunConfig& config);

}  // namespace levy_escape::cli
