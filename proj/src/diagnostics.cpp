#include "levy_escape/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levy_escape/quadrature.hpp"
#include "levy_escape/special_functions.hpp"

namespace levy_escape::diagnostics {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kGridEnd = 20.0;   // linear grid span
constexpr double kFarEnd = 1e8;     // geometric grid span
}  // namespace

double stable_tail_mass(stable::StableIndex alpha, double y) {
  const double a = alpha.value();
  if (a == 1.0) return 0.5 - std::atan(y) / kPi;
  if (!(y >= 10.0)) {
    throw std::invalid_argument("stable_tail_mass: only meaningful well into the tail");
  }
  // Term-wise integral of the tail series over [y, inf).
  double sum = 0.0;
  const double log_y = std::log(y);
  for (int k = 1; k <= 120; ++k) {
    const double env = std::exp(special::log_gamma(a * k + 1.0) -
                                special::log_gamma(k + 1.0) - a * k * log_y) /
                       (kPi * a * k);
    const double term = env * std::sin(0.5 * kPi * a * k) * ((k % 2 == 0) ? -1.0 : 1.0);
    sum += term;
    if (env < 1e-14) break;
  }
  return sum;
}

StableCdf integrate_stable_cdf(stable::StableIndex alpha) {
  StableCdf out;
  // Linear grid across the body, geometric decades into the tails.
  std::vector<double> pos;
  for (double y = 0.0; y <= kGridEnd + 1e-9; y += 0.25) pos.push_back(y);
  for (double y = kGridEnd * 1.3; y <= kFarEnd; y *= 1.3) pos.push_back(y);
  out.ys.reserve(2 * pos.size());
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.ys.push_back(-*it);
  for (std::size_t i = 1; i < pos.size(); ++i) out.ys.push_back(pos[i]);

  out.cdf.resize(out.ys.size());
  double acc = stable_tail_mass(alpha, -out.ys.front());
  out.cdf.front() = acc;
  for (std::size_t i = 1; i < out.ys.size(); ++i) {
    const auto q = quadrature::gauss_kronrod(
        [&](double y) { return stable::stable_density(alpha, y); }, out.ys[i - 1], out.ys[i],
        1e-8, 4000);
    acc += q.value;
    out.cdf[i] = acc;
  }
  out.total_mass = acc + stable_tail_mass(alpha, out.ys.back());
  return out;
}

double ks_against_cdf(const std::vector<double>& sorted_sample, const StableCdf& ref) {
  if (sorted_sample.empty()) throw std::invalid_argument("ks_against_cdf: empty sample");
  const double n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t j = 0; j < ref.ys.size(); ++j) {
    const auto it =
        std::upper_bound(sorted_sample.begin(), sorted_sample.end(), ref.ys[j]);
    const double emp = static_cast<double>(it - sorted_sample.begin()) / n;
    d = std::max(d, std::abs(emp - ref.cdf[j]));
  }
  return d;
}

double ks_against_cauchy(const std::vector<double>& sorted_sample, double scale) {
  if (sorted_sample.empty()) throw std::invalid_argument("ks_against_cauchy: empty sample");
  const double n = static_cast<double>(sorted_sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    const double f = 0.5 + std::atan(sorted_sample[i] / scale) / kPi;
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, f - lo, hi - f});
  }
  return d;
}

}  // namespace levy_escape::diagnostics
