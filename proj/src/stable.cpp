#include "levy_escape/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "levy_escape/special_functions.hpp"

namespace levy_escape::stable {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kMaxTerms = 200;
constexpr double kTermFloor = 1e-12;  // stop once the next term is below this

struct SeriesResult {
  double value = 0.0;
  double err = std::numeric_limits<double>::infinity();
};

// Sums a Bergstrom-type series given the log of the term envelope and a
// bounded oscillation factor.  Handles both the convergent and the
// asymptotic (optimally truncated) regimes: terms are accumulated until the
// envelope drops below kTermFloor; if it never does within kMaxTerms the sum
// is truncated at the smallest envelope seen and that envelope is the error.
template <class LogEnv, class Factor>
SeriesResult sum_series(LogEnv log_env, Factor factor, int k_first) {
  std::vector<double> env;
  env.reserve(64);
  int k_stop = -1;  // index (relative) after which terms are dropped
  for (int k = k_first, i = 0; i <= kMaxTerms; ++k, ++i) {
    const double e = std::exp(log_env(k));
    env.push_back(e);
    if (e < kTermFloor) {
      k_stop = i;
      break;
    }
  }
  std::size_t n_used;
  double trunc_err;
  if (k_stop >= 0) {
    n_used = static_cast<std::size_t>(k_stop) + 1;
    trunc_err = env.back();
  } else {
    // No convergence to the floor: truncate at the envelope minimum.
    const auto it = std::min_element(env.begin(), env.end());
    n_used = static_cast<std::size_t>(it - env.begin());
    trunc_err = *it;
  }
  SeriesResult out;
  double sum = 0.0, comp = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < n_used; ++i) {
    const double term = env[i] * factor(k_first + static_cast<int>(i));
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += env[i];
  }
  out.value = sum;
  // Truncation plus the compensated-summation roundoff bound.  When the
  // envelope towers over the sum (heavy cancellation) the roundoff part is
  // the honest accuracy limit of the representation.
  out.err = trunc_err + 4.5e-16 * abs_sum;
  return out;
}

// Interior representation, even powers of y:
//   f(y) = (1 / (pi alpha)) sum_m (-1)^m Gamma((2m+1)/alpha) y^(2m) / (2m)!
// Convergent for alpha > 1, asymptotic as y -> 0 for alpha < 1.
SeriesResult central_series(double alpha, double ay) {
  if (ay == 0.0) {
    return {special::gamma(1.0 / alpha) / (kPi * alpha), 1e-16};
  }
  const double log_y = std::log(ay);
  auto log_env = [=](int m) {
    return special::log_gamma((2.0 * m + 1.0) / alpha) -
           special::log_gamma(2.0 * m + 1.0) + 2.0 * m * log_y -
           std::log(kPi * alpha);
  };
  auto factor = [](int m) { return (m % 2 == 0) ? 1.0 : -1.0; };
  return sum_series(log_env, factor, 0);
}

// Tail representation, powers of |y|^(-alpha):
//   f(y) = -(1/pi) sum_{k>=1} (-1)^k Gamma(alpha k + 1) / (k! |y|^(alpha k + 1))
//          * sin(k pi alpha / 2)
// Convergent for alpha < 1 (y != 0), asymptotic as |y| -> infinity otherwise.
SeriesResult tail_series(double alpha, double ay) {
  const double log_y = std::log(ay);
  auto log_env = [=](int k) {
    return special::log_gamma(alpha * k + 1.0) - special::log_gamma(k + 1.0) -
           (alpha * k + 1.0) * log_y - std::log(kPi);
  };
  auto factor = [=](int k) {
    const double s = std::sin(0.5 * k * kPi * alpha);
    return (k % 2 == 0) ? -s : s;
  };
  return sum_series(log_env, factor, 1);
}

double cauchy_density(double y) { return 1.0 / (kPi * (1.0 + y * y)); }

// Smallest |y| at which the interior and tail representations agree to 1e-6
// with both self-reported errors under control.  Below it the interior
// series is used, above it the tail series.
double compute_crossover(double alpha) {
  double best_y = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double y = 5e-4; y <= 64.0; y *= 1.031) {
    const SeriesResult c = central_series(alpha, y);
    const SeriesResult t = tail_series(alpha, y);
    const double gap = std::abs(c.value - t.value) + c.err + t.err;
    if (gap < 1e-6) return y;
    if (gap < best_gap) {
      best_gap = gap;
      best_y = y;
    }
  }
  // No point reached 1e-6 agreement (happens for small alpha, where the
  // tail series cancels through huge terms); use the closest approach.
  return best_y;
}

double crossover_cached(double alpha) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  const double y = compute_crossover(alpha);
  cache.emplace(alpha, y);
  return y;
}

}  // namespace

StableIndex::StableIndex(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw std::invalid_argument(
        "StableIndex: alpha must lie strictly in (0, 2)");
  }
}

StableCoeffs stable_coeffs(int dim, StableIndex alpha) {
  if (dim < 1) throw std::invalid_argument("stable_coeffs: dimension must be >= 1");
  const double a = alpha.value();
  const double d = static_cast<double>(dim);

  StableCoeffs c;
  c.C = std::pow(kPi, -0.5) * special::gamma(0.5 * (1.0 + a)) *
        special::gamma(0.5 * d) / special::gamma(0.5 * (d + a));
  c.C_d_alpha = a * special::gamma(0.5 * (d + a)) /
                (std::pow(2.0, 1.0 - a) * std::pow(kPi, 0.5 * d) *
                 special::gamma(1.0 - 0.5 * a));
  c.C1 = std::sin(0.5 * kPi * a) * special::gamma(1.0 + a) / kPi;
  c.C2 = special::gamma(1.0 / a) / (kPi * a);

  for (double v : {c.C, c.C_d_alpha, c.C1, c.C2}) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw std::range_error(
          "stable_coeffs: constant not representable for this (d, alpha)");
    }
  }
  return c;
}

double density_crossover_radius(StableIndex alpha) {
  return crossover_cached(alpha.value());
}

double stable_density(StableIndex alpha, double y, double tol) {
  const double a = alpha.value();
  if (a == 1.0) return cauchy_density(y);
  const double ay = std::abs(y);
  const double yc = crossover_cached(a);

  const bool tail_side = ay >= yc;
  SeriesResult r = tail_side ? tail_series(a, ay) : central_series(a, ay);
  if (r.err > tol) {
    const SeriesResult other = tail_side ? central_series(a, ay) : tail_series(a, ay);
    if (other.err < r.err) r = other;
  }
  if (r.err > tol) {
    throw std::runtime_error("stable_density: no representation reached tolerance");
  }
  return r.value;
}

double sample_standard_stable(StableIndex alpha, RandomStream& rng) {
  const double a = alpha.value();
  const double u = kPi * (rng.uniform_open() - 0.5);  // Uniform(-pi/2, pi/2)
  const double w = rng.exponential();
  if (a == 1.0) return std::tan(u);
  const double inv_a = 1.0 / a;
  const double scale = std::sin(a * u) / std::pow(std::cos(u), inv_a);
  const double adjust = std::pow(std::cos((1.0 - a) * u) / w, inv_a - 1.0);
  return scale * adjust;
}

}  // namespace levy_escape::stable
