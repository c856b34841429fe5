#include "levy_escape/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "levy_escape/quadrature.hpp"

namespace levy_escape::oracles {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_unit_range(double value, double slack, const char* who) {
  if (value < -slack || value > 1.0 + slack) {
    throw std::runtime_error(std::string(who) +
                             ": value escaped [0, 1]; problem setup is inconsistent");
  }
}

// Inner integral G(y) = int_{-r}^{y} b/sigma^2, tabulated once on a panel
// grid; evaluations inside a panel integrate only the partial panel, so the
// tabulation is exact up to the quadrature rule (no interpolation error).
template <class Integrate>
class CumulativeIntegral {
 public:
  CumulativeIntegral(std::function<double(double)> f, double lo, double hi, double tol,
                     Integrate integrate, int panels = 48)
      : f_(std::move(f)), lo_(lo), integrate_(integrate), tol_(tol) {
    edges_.reserve(static_cast<std::size_t>(panels) + 1);
    cumulative_.reserve(static_cast<std::size_t>(panels) + 1);
    edges_.push_back(lo);
    cumulative_.push_back(0.0);
    double acc = 0.0;
    for (int k = 1; k <= panels; ++k) {
      const double a = lo + (hi - lo) * (k - 1) / panels;
      const double b = lo + (hi - lo) * k / panels;
      const auto q = integrate_(f_, a, b, tol / panels);
      acc += q.value;
      err_ += q.abs_error;
      edges_.push_back(b);
      cumulative_.push_back(acc);
    }
  }

  double operator()(double y) const {
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), y);
    std::size_t k = static_cast<std::size_t>(it - edges_.begin());
    if (k == 0) return 0.0;
    --k;
    if (k >= cumulative_.size() - 1) return cumulative_.back();
    return cumulative_[k] + integrate_(f_, edges_[k], y, tol_).value;
  }

  double abs_error() const { return err_; }

 private:
  std::function<double(double)> f_;
  double lo_;
  Integrate integrate_;
  double tol_;
  std::vector<double> edges_;
  std::vector<double> cumulative_;
  double err_ = 0.0;
};

}  // namespace

OracleResult oracle_bm_interval(double x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("oracle_bm_interval: need r > 0");
  if (x < -r || x > r) {
    throw std::invalid_argument("oracle_bm_interval: x outside [-r, r]");
  }
  return {(x + r) / (2.0 * r), 0.0};
}

OracleResult oracle_bm_annulus(double rho, double r, double R) {
  if (!(0.0 < r) || !(r < R)) throw std::invalid_argument("oracle_bm_annulus: need 0 < r < R");
  if (rho < r || rho > R) {
    throw std::invalid_argument("oracle_bm_annulus: rho outside [r, R]");
  }
  return {(std::log(R) - std::log(rho)) / (std::log(R) - std::log(r)), 0.0};
}

OracleResult oracle_drift_1d(double x, double r, const std::function<double(double)>& b,
                             const std::function<double(double)>& sigma, double tol) {
  if (!(r > 0.0)) throw std::invalid_argument("oracle_drift_1d: need r > 0");
  if (x < -r || x > r) throw std::invalid_argument("oracle_drift_1d: x outside [-r, r]");

  auto ratio = [&](double y) {
    const double s = sigma(y);
    if (!(s * s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("oracle_drift_1d: sigma vanishes at y = " + std::to_string(y));
    }
    return b(y) / (s * s);
  };

  // Route evaluated with one quadrature rule end to end.
  auto route = [&](auto integrate) {
    CumulativeIntegral inner(ratio, -r, r, 0.05 * tol, integrate);
    auto weight = [&](double y) { return std::exp(-2.0 * inner(y)); };
    const auto numer = integrate(weight, -r, x, 0.25 * tol);
    const auto rest = integrate(weight, x, r, 0.25 * tol);
    const double denom_val = numer.value + rest.value;
    const double p = numer.value / denom_val;
    // Quadrature errors of numerator/denominator, plus the inner-integral
    // error acting through the exponential weight (a uniform shift in G
    // cancels in the ratio; bound the non-uniform part crudely).
    const double err = (numer.abs_error + p * (numer.abs_error + rest.abs_error)) / denom_val +
                       4.0 * inner.abs_error();
    if (!numer.converged || !rest.converged) {
      throw std::runtime_error("oracle_drift_1d: quadrature did not converge");
    }
    return OracleResult{p, err};
  };

  const OracleResult gk = route([](const auto& f, double a2, double b2, double t) {
    return quadrature::gauss_kronrod(f, a2, b2, t);
  });
  const OracleResult simpson = route([](const auto& f, double a2, double b2, double t) {
    return quadrature::adaptive_simpson(f, a2, b2, t);
  });

  OracleResult out = gk;
  out.abs_error_bound = std::max(gk.abs_error_bound, std::abs(gk.value - simpson.value));
  check_unit_range(out.value, 10.0 * std::max(out.abs_error_bound, 1e-14), "oracle_drift_1d");
  return out;
}

OracleResult oracle_stable_interval(double x, double r, stable::StableIndex alpha,
                                    double tol) {
  if (!(r > 0.0)) throw std::invalid_argument("oracle_stable_interval: need r > 0");
  if (!(x > -r) || !(x < r)) {
    throw std::invalid_argument(
        "oracle_stable_interval: x must lie strictly inside (-r, r); the limits are 0 and 1");
  }
  const double a = alpha.value();
  const double prefactor = std::sin(0.5 * kPi * a) / kPi *
                           std::pow((r - x) * (r + x), 0.5 * a) * std::pow(r, 1.0 - a);

  // t-integral with t = u^(1/(2-alpha)); the substitution absorbs the
  // sinh^(1-alpha) endpoint behaviour exactly.
  const double t_cut = std::max(6.0, 42.0 / a);
  const double u_cut = std::pow(t_cut, 2.0 - a);
  auto integrand = [&](double u) {
    if (u <= 0.0) return 1.0 / ((2.0 - a) * (r - x));
    const double t = std::pow(u, 1.0 / (2.0 - a));
    const double ratio = t < 1e-4 ? 1.0 + t * t / 6.0 : std::sinh(t) / t;
    return std::pow(ratio, 1.0 - a) / ((2.0 - a) * (r * std::cosh(t) - x));
  };
  const auto q = quadrature::gauss_kronrod(integrand, 0.0, u_cut, tol / std::max(prefactor, 1e-3));
  const double tail_bound =
      std::pow(2.0, a) * std::exp(-a * t_cut) / (a * (r - std::abs(x) / std::cosh(t_cut)));

  OracleResult out;
  out.value = prefactor * q.value;
  out.abs_error_bound = prefactor * (q.abs_error + tail_bound);
  if (!q.converged) {
    throw std::runtime_error("oracle_stable_interval: quadrature did not converge");
  }
  check_unit_range(out.value, 10.0 * std::max(out.abs_error_bound, 1e-14),
                   "oracle_stable_interval");
  return out;
}

OracleResult oracle_stable_interval_direct(double x, double r, stable::StableIndex alpha,
                                           double tol) {
  if (!(r > 0.0)) throw std::invalid_argument("oracle_stable_interval_direct: need r > 0");
  if (!(x > -r) || !(x < r)) {
    throw std::invalid_argument("oracle_stable_interval_direct: x outside (-r, r)");
  }
  const double a = alpha.value();
  const double prefactor =
      std::sin(0.5 * kPi * a) / kPi * std::pow((r - x) * (r + x), 0.5 * a);
  const double y_split = std::max(2.0 * r, x + 10.0 * r);

  // Near part over [r, y_split]: w = (y - r)^(1 - a/2) removes the endpoint
  // singularity; integrate with the Simpson rule (independent of route A).
  const double pw = 1.0 - 0.5 * a;
  const double w_hi = std::pow(y_split - r, pw);
  auto near_integrand = [&](double w) {
    const double y = r + std::pow(w, 1.0 / pw);
    return std::pow(y + r, -0.5 * a) / ((y - x) * pw);
  };
  const auto near = quadrature::adaptive_simpson(near_integrand, 0.0, w_hi,
                                                 tol / std::max(prefactor, 1e-3));

  // Tail beyond y_split: expand (1 - r^2/y^2)^(-a/2) (1 - x/y)^(-1) in 1/y
  // and integrate term by term: sum_m d_m Y^(-a-m) / (a + m).
  double tail = 0.0, tail_err = 0.0;
  {
    const int kMaxTerms = 400;
    std::vector<double> c(static_cast<std::size_t>(kMaxTerms) + 1);
    c[0] = 1.0;
    for (int j = 0; j < kMaxTerms; ++j) {
      c[static_cast<std::size_t>(j) + 1] =
          c[static_cast<std::size_t>(j)] * (0.5 * a + j) / (j + 1.0);
    }
    const double inv_y = 1.0 / y_split;
    double term = 0.0;
    bool done = false;
    for (int m = 0; m <= kMaxTerms; ++m) {
      double d = 0.0;
      for (int j = 0; 2 * j <= m; ++j) {
        d += c[static_cast<std::size_t>(j)] * std::pow(r, 2.0 * j) *
             std::pow(x, static_cast<double>(m - 2 * j));
      }
      term = d * std::pow(inv_y, a + m) / (a + m);
      tail += term;
      if (std::abs(term) < 0.1 * tol && m > 2) {
        done = true;
        break;
      }
    }
    // Remaining terms are geometrically dominated (ratio <= ~0.56).
    tail_err = done ? 2.5 * std::abs(term) : std::abs(term);
    if (!done && std::abs(term) > tol) {
      throw std::runtime_error("oracle_stable_interval_direct: tail series stalled");
    }
  }

  OracleResult out;
  out.value = prefactor * (near.value + tail);
  out.abs_error_bound = prefactor * (near.abs_error + tail_err);
  check_unit_range(out.value, 10.0 * std::max(out.abs_error_bound, 1e-14),
                   "oracle_stable_interval_direct");
  return out;
}

OracleResult stable_boundary_identity(stable::StableIndex alpha) {
  const double a = alpha.value();
  // (sin(pi a/2)/pi) * int_{-1}^{1} (1-v)^(a/2-1) (1+v)^(-a/2) dv, exactly 1.
  // Each endpoint singularity is absorbed by its own power substitution.
  const double half = 0.5 * a;

  // [0, 1]: w = (1 - v)^(a/2).
  auto right_part = [&](double w) {
    const double v = 1.0 - std::pow(w, 1.0 / half);
    return (2.0 / a) * std::pow(1.0 + v, -half);
  };
  // [-1, 0]: w = (1 + v)^(1 - a/2).
  const double pw = 1.0 - half;
  auto left_part = [&](double w) {
    const double v = std::pow(w, 1.0 / pw) - 1.0;
    return std::pow(1.0 - v, half - 1.0) / pw;
  };
  const auto qr = quadrature::gauss_kronrod(right_part, 0.0, 1.0, 2e-11);
  const auto ql = quadrature::gauss_kronrod(left_part, 0.0, 1.0, 2e-11);

  OracleResult out;
  out.value = std::sin(0.5 * kPi * a) / kPi * (qr.value + ql.value);
  out.abs_error_bound = qr.abs_error + ql.abs_error;
  return out;
}

}  // namespace levy_escape::oracles
