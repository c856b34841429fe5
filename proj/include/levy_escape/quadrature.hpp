#pragma once

#include <cmath>
#include <queue>
#include <vector>

namespace levy_escape::quadrature {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;   // accumulated error estimate
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                           0.3818300505051189, 0.4179591836734694};

template <class F>
void gk15(F& f, double a, double b, double& kronrod, double& err) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = hw * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  kronrod = resk * hw;
  err = std::abs((resk - resg) * hw);
}

struct Interval {
  double err;
  double a, b, value;
  bool operator<(const Interval& o) const { return err < o.err; }
};

template <class F>
double simpson_rule(F& f, double a, double fa, double b, double fb, double& fc_out) {
  const double c = 0.5 * (a + b);
  fc_out = f(c);
  return (b - a) / 6.0 * (fa + 4.0 * fc_out + fb);
}

template <class F>
void simpson_recurse(F& f, double a, double fa, double b, double fb, double c,
                     double fc, double whole, double tol, int depth,
                     QuadResult& out) {
  double fd, fe;
  const double left = simpson_rule(f, a, fa, c, fc, fd);
  const double right = simpson_rule(f, c, fc, b, fb, fe);
  out.evaluations += 2;
  const double delta = left + right - whole;
  const double err = std::abs(delta) / 15.0;
  // Accept on tolerance, on hitting roundoff, or on depth exhaustion.
  if (err <= tol || err <= 1e-14 * std::abs(left + right) || depth <= 0) {
    out.value += left + right + delta / 15.0;
    out.abs_error += err;
    if (err > tol && depth <= 0) out.converged = false;
    return;
  }
  simpson_recurse(f, a, fa, c, fc, 0.5 * (a + c), fd, left, 0.5 * tol, depth - 1, out);
  simpson_recurse(f, c, fc, b, fb, 0.5 * (c + b), fe, right, 0.5 * tol, depth - 1, out);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b]
/// to an absolute tolerance.  Globally adaptive: the interval with the worst
/// error estimate is bisected until the summed estimate meets the tolerance
/// or the interval budget runs out (converged flags which happened).
template <class F>
QuadResult gauss_kronrod(F&& f, double a, double b, double abs_tol,
                         int max_intervals = 20000) {
  QuadResult out;
  if (a == b) return out;

  std::priority_queue<detail::Interval> queue;
  double total_err = 0.0, total_val = 0.0;

  auto push = [&](double lo, double hi) {
    double val, err;
    detail::gk15(f, lo, hi, val, err);
    out.evaluations += 15;
    total_val += val;
    total_err += err;
    queue.push({err, lo, hi, val});
  };

  push(a, b);
  while (total_err > abs_tol &&
         static_cast<int>(queue.size()) < max_intervals) {
    const detail::Interval worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // width at roundoff
    queue.pop();
    total_val -= worst.value;
    total_err -= worst.err;
    push(worst.a, mid);
    push(mid, worst.b);
  }
  out.value = total_val;
  out.abs_error = total_err;
  out.converged = total_err <= abs_tol;
  return out;
}

/// Adaptive Simpson integration; an independent rule used for cross-checks.
template <class F>
QuadResult adaptive_simpson(F&& f, double a, double b, double abs_tol,
                            int max_depth = 48) {
  QuadResult out;
  if (a == b) return out;
  const double fa = f(a), fb = f(b);
  double fc;
  const double whole = detail::simpson_rule(f, a, fa, b, fb, fc);
  out.evaluations += 3;
  detail::simpson_recurse(f, a, fa, b, fb, 0.5 * (a + b), fc, whole, abs_tol,
                          max_depth, out);
  return out;
}

}  // namespace levy_escape::quadrature
