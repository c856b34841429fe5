#pragma once

#include <vector>

#include "levy_escape/stable.hpp"

namespace levy_escape::diagnostics {

/// CDF of the standard symmetric alpha-stable law tabulated on a fixed grid:
/// stable_density integrated panel by panel, with the mass beyond the grid
/// ends summed analytically from the tail expansion.
struct StableCdf {
  std::vector<double> ys;  // ascending abscissas
  std::vector<double> cdf;
  double total_mass;       // integral over all of R implied by the table
};

/// Mass of the density beyond +y (y well into the tail), by term-wise
/// integration of the tail series.
double stable_tail_mass(stable::StableIndex alpha, double y);

StableCdf integrate_stable_cdf(stable::StableIndex alpha);

/// Kolmogorov-Smirnov distance between the empirical CDF of a sorted sample
/// and the tabulated reference, evaluated at the table abscissas.
double ks_against_cdf(const std::vector<double>& sorted_sample, const StableCdf& ref);

/// Exact two-sided KS distance against the Cauchy CDF (closed form), for
/// sorted samples; `scale` rescales the law.
double ks_against_cauchy(const std::vector<double>& sorted_sample, double scale = 1.0);

}  // namespace levy_escape::diagnostics
