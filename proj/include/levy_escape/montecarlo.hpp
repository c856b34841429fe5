#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "levy_escape/process.hpp"

namespace levy_escape::montecarlo {

/// Escape-probability estimate from a batch of simulated first exits.
/// Censored paths are excluded from both the numerator and the denominator
/// and reported separately.
struct EscapeEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;
  long n_paths = 0;
  long n_target = 0;
  long n_censored = 0;
  std::pair<double, double> ci95{0.0, 0.0};  // p_hat +- 1.96 se, clamped to [0,1]
  bool high_censoring = false;               // more than 1% of paths censored
};

struct McOptions {
  double max_time = 1e4;
  int threads = 0;        // 0: one worker per hardware thread (capped)
  std::uint64_t x_index = 0;  // sweep-point index for stream derivation
};

/// Runs n_paths independent first-exit simulations from x0 and aggregates
/// them.  The path with index j draws from the stream derived from
/// (seed, x_index, j), so the result is bit-identical for fixed inputs
/// regardless of how many workers execute the batch.
/// Throws std::runtime_error if every path was censored.
EscapeEstimate estimate_escape(std::span<const double> x0, const process::ProcessSpec& spec,
                               const process::DomainSpec& domain,
                               const process::TargetSpec& target, long n_paths, double dt,
                               std::uint64_t seed, const McOptions& options = {});

/// One estimate per starting point; the i-th point uses x_index = i, so a
/// single-point profile reproduces estimate_escape bit for bit.
std::vector<std::pair<double, EscapeEstimate>> estimate_profile(
    std::span<const double> xs, const process::ProcessSpec& spec,
    const process::DomainSpec& domain, const process::TargetSpec& target, long n_paths,
    double dt, std::uint64_t seed, const McOptions& options = {});

/// Result of snapping (a, x, b) onto the step-delta lattice.
struct LatticeSnap {
  long position;   // walker start index, lattice origin at a
  long right_end;  // index of b
  bool warned;     // a snap moved some point by more than delta/2 * 1e-6
};

LatticeSnap snap_to_lattice(double a, double b, double x, double delta);

/// Unbiased +-delta random walk on the lattice over (a, b), absorbed at the
/// ends; Target is the right end b.  Walks are censored (and reported) after
/// an exceedingly generous step budget.
EscapeEstimate random_walk_escape(double a, double b, double x, double delta, long n_walks,
                                  std::uint64_t seed, const McOptions& options = {});

}  // namespace levy_escape::montecarlo
