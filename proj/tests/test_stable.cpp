#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "levy_escape/diagnostics.hpp"
#include "levy_escape/quadrature.hpp"
#include "levy_escape/special_functions.hpp"
#include "levy_escape/stable.hpp"

using namespace levy_escape;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double cauchy_pdf(double y) { return 1.0 / (kPi * (1.0 + y * y)); }

// Integral of the density over [-T, T] plus the leading analytic tail
// C1 * 2 T^-alpha / alpha.
double normalization(double alpha, double t_end) {
  const stable::StableIndex ai(alpha);
  const double c1 = stable::stable_coeffs(1, ai).C1;
  double body = 0.0;
  double lo = 0.0;
  for (double hi = 1.0; lo < t_end; lo = hi, hi = std::min(hi * 4.0, t_end)) {
    body += quadrature::gauss_kronrod(
                [&](double y) { return stable::stable_density(ai, y); }, lo, hi, 1e-8, 4000)
                .value;
    if (hi >= t_end) break;
  }
  return 2.0 * body + 2.0 * c1 * std::pow(t_end, -alpha) / alpha;
}

}  // namespace

TEST_CASE("StableIndex domain gate") {
  CHECK_THROWS_AS(stable::StableIndex(0.0), std::invalid_argument);
  CHECK_THROWS_AS(stable::StableIndex(2.0), std::invalid_argument);
  CHECK_THROWS_AS(stable::StableIndex(2.5), std::invalid_argument);
  CHECK_THROWS_AS(stable::StableIndex(-1.0), std::invalid_argument);
  CHECK(stable::StableIndex(0.5).value() == 0.5);
}

TEST_CASE("stable_coeffs evaluates the Gamma formulas") {
  // d = 1, alpha = 1: C = 1 (Gamma(1/2) cancels) and C1 = 1/pi.
  const auto c = stable::stable_coeffs(1, stable::StableIndex(1.0));
  CHECK(c.C == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.C1 == doctest::Approx(1.0 / kPi).epsilon(1e-14));

  CHECK_THROWS_AS(stable::stable_coeffs(0, stable::StableIndex(1.0)), std::invalid_argument);

  // C = 1 for every alpha at d = 1, and C1 coincides with C_{1,alpha} to 12
  // significant digits.
  for (double a = 0.1; a < 2.0; a += 0.1) {
    const auto k = stable::stable_coeffs(1, stable::StableIndex(a));
    CHECK(k.C == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(k.C1 - k.C_d_alpha) / k.C1 < 1e-12);
  }

  // Finite and positive across dimensions.
  for (int d : {1, 2, 3}) {
    for (double a = 0.15; a < 2.0; a += 0.2) {
      const auto k = stable::stable_coeffs(d, stable::StableIndex(a));
      for (double v : {k.C, k.C_d_alpha, k.C1, k.C2}) {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
      }
    }
  }
}

TEST_CASE("stable_density: Cauchy closed form at alpha = 1") {
  const stable::StableIndex ai(1.0);
  for (double y = -10.0; y <= 10.0; y += 0.37) {
    CHECK(stable::stable_density(ai, y) == doctest::Approx(cauchy_pdf(y)).epsilon(1e-6));
  }
}

TEST_CASE("stable_density: central value and symmetry") {
  const stable::StableIndex ai(1.5);
  const double c2 = special::gamma(2.0 / 3.0) / (1.5 * kPi);
  CHECK(stable::stable_density(ai, 0.0) == doctest::Approx(c2).epsilon(1e-12));
  CHECK(stable::stable_coeffs(1, ai).C2 == doctest::Approx(c2).epsilon(1e-14));

  RandomStream rng(11, 0, 0);
  for (double a : {0.6, 1.2, 1.8}) {
    const stable::StableIndex idx(a);
    for (int i = 0; i < 50; ++i) {
      const double y = 40.0 * (rng.uniform01() - 0.5);
      CHECK(stable::stable_density(idx, y) == stable::stable_density(idx, -y));
    }
  }
}

TEST_CASE("stable_density integrates to one") {
  CHECK(normalization(0.5, 1e4) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(normalization(1.0, 200.0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(normalization(1.5, 50.0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("stable_density tail law") {
  // The second Bergstrom term is relatively O(y^-alpha), so the 5% window
  // starts around y = 20 only for alpha >= ~0.9; smaller indices reach it
  // further out (alpha = 0.5 carries a -0.8/sqrt(y) correction).
  for (double a : {0.9, 1.0, 1.5}) {
    const stable::StableIndex ai(a);
    const double c1 = stable::stable_coeffs(1, ai).C1;
    for (double y = 20.0; y <= 200.0; y *= 1.7) {
      const double ratio = stable::stable_density(ai, y) * std::pow(y, 1.0 + a) / c1;
      CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
    }
  }
  {
    const stable::StableIndex ai(0.5);
    const double c1 = stable::stable_coeffs(1, ai).C1;
    for (double y = 2000.0; y <= 20000.0; y *= 2.5) {
      const double ratio = stable::stable_density(ai, y) * std::pow(y, 1.5) / c1;
      CHECK(ratio == doctest::Approx(1.0).epsilon(0.05));
    }
  }
}

TEST_CASE("stable_density signals non-convergence for unreachable tolerances") {
  // In the handoff zone at small alpha, double precision cannot deliver 1e-14.
  const stable::StableIndex ai(0.5);
  const double yc = stable::density_crossover_radius(ai);
  CHECK_THROWS_AS(stable::stable_density(ai, 0.97 * yc, 1e-14), std::runtime_error);
}

TEST_CASE("sampler: alpha domain gate and symmetry of the median") {
  CHECK_THROWS_AS(stable::StableIndex(2.0), std::invalid_argument);

  for (double a : {0.5, 1.0, 1.5}) {
    const stable::StableIndex ai(a);
    RandomStream rng(101, static_cast<std::uint64_t>(a * 1000), 0);
    const std::size_t n = 100000;
    std::vector<double> draws(n);
    for (auto& d : draws) d = stable::sample_standard_stable(ai, rng);
    std::sort(draws.begin(), draws.end());
    const double median = draws[n / 2];
    const double iqr = draws[3 * n / 4] - draws[n / 4];
    CHECK(std::abs(median) < 3.0 * iqr / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("sampler: KS against the closed-form Cauchy CDF at alpha = 1") {
  RandomStream rng(7, 0, 0);
  const stable::StableIndex ai(1.0);
  std::vector<double> draws(100000);
  for (auto& d : draws) d = stable::sample_standard_stable(ai, rng);
  std::sort(draws.begin(), draws.end());
  CHECK(diagnostics::ks_against_cauchy(draws) < 0.01);
}

TEST_CASE("sampler and density agree (KS against the integrated density)") {
  for (double a : {0.5, 1.0, 1.5}) {
    const stable::StableIndex ai(a);
    RandomStream rng(23, static_cast<std::uint64_t>(a * 100), 0);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = stable::sample_standard_stable(ai, rng);
    std::sort(draws.begin(), draws.end());
    const diagnostics::StableCdf ref = diagnostics::integrate_stable_cdf(ai);
    CHECK(std::abs(ref.total_mass - 1.0) < 1e-4);
    CHECK(diagnostics::ks_against_cdf(draws, ref) < 0.02);
  }
}
