// Acceptance suite: runs the full-scale checks that gate a release and
// prints one PASS/FAIL line per criterion.  Tolerances are fixed here, not
// tuned at run time.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "levy_escape/diagnostics.hpp"
#include "levy_escape/montecarlo.hpp"
#include "levy_escape/oracles.hpp"
#include "levy_escape/process.hpp"
#include "levy_escape/quadrature.hpp"
#include "levy_escape/solver.hpp"
#include "levy_escape/stable.hpp"

using namespace levy_escape;
using namespace levy_escape::process;
using namespace levy_escape::montecarlo;

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::span<const double> pt(const double& x) { return {&x, 1}; }

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: 1-d Brownian motion on (-2, 2), Example 4.1 scale.
Outcome criterion1() {
  const double t0 = now_seconds();
  const double r = 2.0;
  auto spec = ProcessSpec::brownian_1d(ScalarCoeff::zero(), ScalarCoeff::constant(1.0));
  auto domain = DomainSpec::interval(-r, r);
  auto target = TargetSpec::boundary({BoundaryComponent::Right});

  std::vector<double> xs;
  for (int i = 0; i < 9; ++i) xs.push_back(-1.8 + 0.45 * i);

  const auto profile = estimate_profile(xs, spec, domain, target, 100000, 1e-4, 1001);
  double worst_gap = 0.0, worst_tol = 1.0;
  bool mc_ok = true;
  for (const auto& [x, est] : profile) {
    const double exact = (x + r) / (2.0 * r);
    const double tol = std::max(0.01, 3.0 * est.std_err);
    const double gap = std::abs(est.p_hat - exact);
    if (gap > worst_gap) {
      worst_gap = gap;
      worst_tol = tol;
    }
    mc_ok = mc_ok && gap <= tol;
  }

  const auto sol = solver::solve_elliptic_1d([](double) { return 0.0; },
                                             [](double) { return 1.0; }, -r, r, 0.0, 1.0, 1000);
  double solver_err = 0.0;
  for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
    solver_err = std::max(solver_err, std::abs(sol.values[i] - (sol.nodes[i] + r) / (2.0 * r)));
  }
  const bool solver_ok = solver_err < 1e-9;

  const double elapsed = now_seconds() - t0;
  const unsigned hw = std::thread::hardware_concurrency();
  const bool runtime_ok = elapsed <= 120.0 || hw < 4;
  return {mc_ok && solver_ok && runtime_ok,
          fmt("max |mc-exact| %.4f (tol %.4f), solver err %.1e (tol 1e-9), "
              "runtime %.0fs on %u thread(s)",
              worst_gap, worst_tol, solver_err, elapsed, hw)};
}

// ---------------------------------------------------------------------------
// Criterion 2: 2-d annulus, Example 4.1.
Outcome criterion2() {
  const double r = 2.0, R = 4.0;
  const auto sol = solver::solve_laplace_annulus(r, R, 1.0, 0.0, 1000);
  const double denom = std::log(R) - std::log(r);
  double solver_err = 0.0;
  for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
    const double exact = (std::log(R) - std::log(sol.nodes[i])) / denom;
    solver_err = std::max(solver_err, std::abs(sol.values[i] - exact));
  }
  const bool solver_ok = solver_err < 1e-6;

  auto spec = ProcessSpec::brownian_2d(1.0);
  auto domain = DomainSpec::annulus(r, R);
  auto target = TargetSpec::boundary({BoundaryComponent::Inner});
  const std::array<double, 2> x0{3.0, 0.0};
  const auto est = estimate_escape(x0, spec, domain, target, 100000, 5e-5, 1002);
  const double exact = std::log(4.0 / 3.0) / std::log(2.0);
  const double gap = std::abs(est.p_hat - exact);
  const bool mc_ok = gap <= 3.0 * est.std_err;

  return {solver_ok && mc_ok,
          fmt("solver err %.2e (tol 1e-6); mc at rho=3: %.5f vs %.5f, gap %.5f "
              "(3 sigma %.5f)",
              solver_err, est.p_hat, exact, gap, 3.0 * est.std_err)};
}

// ---------------------------------------------------------------------------
// Criterion 3: restoring drift b(x) = -x, sigma = 1, Example 4.2.
//
// Reference: p(x) = int_{-r}^x exp(y^2) dy / int_{-r}^r exp(y^2) dy, built as
// a panel-cached quadrature evaluator and spot-validated against the general
// two-rule oracle before use.
struct DriftReference {
  std::vector<double> edges, cumulative;

  explicit DriftReference(double r, int panels = 256) {
    edges.push_back(-r);
    cumulative.push_back(0.0);
    double acc = 0.0;
    for (int k = 1; k <= panels; ++k) {
      const double a = -r + 2.0 * r * (k - 1) / panels;
      const double b = -r + 2.0 * r * k / panels;
      acc += quadrature::gauss_kronrod([](double y) { return std::exp(y * y); }, a, b, 1e-13)
                 .value;
      edges.push_back(b);
      cumulative.push_back(acc);
    }
  }

  double mass(double x) const {
    const auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t k = static_cast<std::size_t>(it - edges.begin());
    if (k == 0) return 0.0;
    --k;
    if (k + 1 >= edges.size()) return cumulative.back();
    return cumulative[k] +
           quadrature::gauss_kronrod([](double y) { return std::exp(y * y); }, edges[k], x, 1e-13)
               .value;
  }

  double p(double x) const { return mass(x) / cumulative.back(); }
};

Outcome criterion3() {
  const double r = 2.0;
  const DriftReference ref(r);

  auto drift = [](double x) { return -x; };
  auto sigma = [](double) { return 1.0; };

  // The cached evaluator must agree with the module's two-rule oracle.
  for (double x : {-1.7, -0.6, 0.0, 0.9, 1.8}) {
    const auto o = oracles::oracle_drift_1d(x, r, drift, sigma);
    if (std::abs(o.value - ref.p(x)) > 1e-9) {
      return {false, fmt("reference mismatch at x=%.2f: %.12f vs %.12f", x, o.value, ref.p(x))};
    }
  }
  const auto mid = oracles::oracle_drift_1d(0.0, r, drift, sigma);
  const bool oracle_mid_ok = std::abs(mid.value - 0.5) < 1e-12;

  const auto sol = solver::solve_elliptic_1d(drift, sigma, -r, r, 0.0, 1.0, 2000);
  double solver_err = 0.0;
  for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
    solver_err = std::max(solver_err, std::abs(sol.values[i] - ref.p(sol.nodes[i])));
  }
  const bool solver_ok = solver_err < 1e-4;

  auto spec = ProcessSpec::brownian_1d(ScalarCoeff::linear_restoring(1.0),
                                       ScalarCoeff::constant(1.0));
  auto domain = DomainSpec::interval(-r, r);
  auto target = TargetSpec::boundary({BoundaryComponent::Right});
  bool mc_ok = true;
  std::string mc_detail;
  const std::array<double, 3> points{-1.0, 0.0, 1.0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    McOptions options;
    options.x_index = i;
    const auto est =
        estimate_escape(pt(points[i]), spec, domain, target, 30000, 2.5e-4, 1003, options);
    const double gap = std::abs(est.p_hat - ref.p(points[i]));
    mc_ok = mc_ok && gap <= 3.0 * est.std_err;
    mc_detail += fmt(" x=%g gap %.4f/%.4f", points[i], gap, 3.0 * est.std_err);
  }

  return {oracle_mid_ok && solver_ok && mc_ok,
          fmt("solver max err %.2e (tol 1e-4), oracle p(0)-0.5 = %.1e; mc:%s", solver_err,
              mid.value - 0.5, mc_detail.c_str())};
}

// ---------------------------------------------------------------------------
// Criterion 4: symmetric alpha-stable motion on (-2, 2), Example 4.3.
Outcome criterion4() {
  const double r = 2.0;
  bool all_ok = true;
  std::string detail;

  for (double a : {0.5, 1.0, 1.5}) {
    const stable::StableIndex ai(a);

    // (a) boundary identity p(r) = 1 via the Beta-function chain.
    const auto identity = oracles::stable_boundary_identity(ai);
    const bool id_ok = std::abs(identity.value - 1.0) < 1e-8;

    // (b) fractional solver vs the Poisson-kernel oracle, n = 800, skipping
    // the outermost node on each side (boundary-layer gap).
    const auto sol = solver::solve_fractional_1d(a, r, solver::ExteriorData::indicator_right(r), 800);
    double solver_err = 0.0;
    for (std::size_t i = 1; i + 1 < sol.nodes.size(); ++i) {
      const auto o = oracles::oracle_stable_interval(sol.nodes[i], r, ai, 1e-9);
      solver_err = std::max(solver_err, std::abs(sol.values[i] - o.value));
    }
    const bool solver_ok = solver_err < 5e-3;

    // (c) jump Monte Carlo against the oracle.
    auto spec = ProcessSpec::stable_1d(a);
    auto domain = DomainSpec::interval(-r, r);
    auto target = TargetSpec::exterior_right(domain);
    bool mc_ok = true;
    double worst_gap = 0.0;
    const std::array<double, 3> points{-1.0, 0.0, 1.0};
    for (std::size_t i = 0; i < points.size(); ++i) {
      McOptions options;
      options.x_index = i;
      const auto est =
          estimate_escape(pt(points[i]), spec, domain, target, 100000, 1e-3, 1004, options);
      const auto o = oracles::oracle_stable_interval(points[i], r, ai);
      const double gap = std::abs(est.p_hat - o.value);
      worst_gap = std::max(worst_gap, gap);
      mc_ok = mc_ok && gap <= std::max(0.012, 3.0 * est.std_err);
    }

    // (d) complement property, exact per seed.
    const double x0 = 0.5;
    const auto right = estimate_escape(pt(x0), spec, domain, target, 20000, 1e-3, 1005);
    const auto left = estimate_escape(pt(x0), spec, domain,
                                      TargetSpec::exterior_left(domain), 20000, 1e-3, 1005);
    const bool split_ok = right.n_target + left.n_target == 20000 - right.n_censored &&
                          right.n_censored == left.n_censored;
    const bool sum_ok = right.p_hat + left.p_hat == 1.0;

    all_ok = all_ok && id_ok && solver_ok && mc_ok && split_ok && sum_ok;
    detail += fmt(" [a=%.1f: id %.1e, solver %.4f, mc %.4f, sum-1 %.1e]", a,
                  identity.value - 1.0, solver_err, worst_gap,
                  right.p_hat + left.p_hat - 1.0);
  }
  return {all_ok, "per alpha:" + detail};
}

// ---------------------------------------------------------------------------
// Criterion 5: discrete random walk against its Brownian limit.
Outcome criterion5() {
  const auto walk = random_walk_escape(-2.0, 2.0, 1.0, 0.01, 100000, 1006);
  const double gap_exact = std::abs(walk.p_hat - 0.75);
  const bool exact_ok = gap_exact <= 3.0 * walk.std_err;

  auto spec = ProcessSpec::brownian_1d(ScalarCoeff::zero(), ScalarCoeff::constant(1.0));
  auto domain = DomainSpec::interval(-2.0, 2.0);
  auto target = TargetSpec::boundary({BoundaryComponent::Right});
  const double x0 = 1.0;
  const auto bm = estimate_escape(pt(x0), spec, domain, target, 100000, 1e-4, 1007);
  const double combined = std::sqrt(walk.std_err * walk.std_err + bm.std_err * bm.std_err);
  const double gap_bm = std::abs(walk.p_hat - bm.p_hat);
  const bool limit_ok = gap_bm <= 3.0 * combined;

  return {exact_ok && limit_ok,
          fmt("walk %.5f vs 0.75 (gap %.5f, 3 sigma %.5f); vs Brownian %.5f "
              "(gap %.5f, 3 sigma %.5f)",
              walk.p_hat, gap_exact, 3.0 * walk.std_err, bm.p_hat, gap_bm, 3.0 * combined)};
}

// ---------------------------------------------------------------------------
// Criterion 6: property suite.
Outcome criterion6() {
  bool ok = true;
  std::string detail;

  // Sampler vs integrated density, KS < 0.02.
  for (double a : {0.5, 1.0, 1.5}) {
    const stable::StableIndex ai(a);
    RandomStream rng(1008, static_cast<std::uint64_t>(10 * a), 0);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = stable::sample_standard_stable(ai, rng);
    std::sort(draws.begin(), draws.end());
    const auto ref = diagnostics::integrate_stable_cdf(ai);
    const double ks = diagnostics::ks_against_cdf(draws, ref);
    ok = ok && ks < 0.02;
    detail += fmt(" ks(%.1f)=%.4f", a, ks);

    // Density normalization: body quadrature plus the leading analytic tail.
    const double t_end = a == 0.5 ? 1e4 : (a == 1.0 ? 200.0 : 50.0);
    double body = 0.0;
    double lo = 0.0;
    for (double hi = 1.0; lo < t_end; lo = hi, hi = std::min(hi * 4.0, t_end)) {
      body += quadrature::gauss_kronrod(
                  [&](double y) { return stable::stable_density(ai, y); }, lo, hi, 1e-8, 4000)
                  .value;
      if (hi >= t_end) break;
    }
    const double c1 = stable::stable_coeffs(1, ai).C1;
    const double total = 2.0 * body + 2.0 * c1 * std::pow(t_end, -a) / a;
    ok = ok && std::abs(total - 1.0) < 1e-4;
    detail += fmt(" norm(%.1f)-1=%.1e", a, total - 1.0);

    // Tail-constant match within 5%, checked where the second-order term
    // (relatively O(y^-alpha)) allows it: y in [20, 200] for alpha >= 1,
    // further out for alpha = 0.5.
    const double y_lo = a < 0.9 ? 2000.0 : 20.0;
    for (double y = y_lo; y <= 10.0 * y_lo; y *= 2.1) {
      const double ratio = stable::stable_density(ai, y) * std::pow(y, 1.0 + a) / c1;
      ok = ok && std::abs(ratio - 1.0) < 0.05;
    }
  }

  // Solver structure: maximum principle, linearity, complement, convergence.
  {
    const auto sol = solver::solve_fractional_1d(1.2, 2.0,
                                                 solver::ExteriorData::indicator_right(2.0), 300);
    for (double v : sol.values) ok = ok && v >= -1e-8 && v <= 1.0 + 1e-8;

    const double inf = std::numeric_limits<double>::infinity();
    const auto phi1 = solver::ExteriorData::from_pieces(
        2.0, {{-inf, -2.0, 0.2}, {2.0, 3.0, 0.4}, {3.0, inf, 0.1}});
    const auto phi2 = solver::ExteriorData::from_pieces(
        2.0, {{-inf, -2.0, 0.15}, {2.0, 3.0, 0.3}, {3.0, inf, 0.55}});
    const auto sum = solver::ExteriorData::from_pieces(
        2.0, {{-inf, -2.0, 0.35}, {2.0, 3.0, 0.7}, {3.0, inf, 0.65}});
    const auto s1 = solver::solve_fractional_1d(0.8, 2.0, phi1, 150);
    const auto s2 = solver::solve_fractional_1d(0.8, 2.0, phi2, 150);
    const auto s12 = solver::solve_fractional_1d(0.8, 2.0, sum, 150);
    double lin_err = 0.0;
    for (std::size_t i = 0; i < s1.values.size(); ++i) {
      lin_err = std::max(lin_err, std::abs(s1.values[i] + s2.values[i] - s12.values[i]));
    }
    ok = ok && lin_err < 1e-10;

    const auto right = solver::solve_fractional_1d(0.9, 2.0,
                                                   solver::ExteriorData::indicator_right(2.0), 300);
    const auto left = solver::solve_fractional_1d(0.9, 2.0,
                                                  solver::ExteriorData::indicator_left(2.0), 300);
    double comp_err = 0.0;
    for (std::size_t i = 0; i < right.values.size(); ++i) {
      comp_err = std::max(comp_err, std::abs(right.values[i] + left.values[i] - 1.0));
    }
    ok = ok && comp_err < 1e-8;
    detail += fmt(" lin=%.1e comp=%.1e", lin_err, comp_err);

    for (double a : {0.5, 1.0, 1.5}) {
      double prev = std::numeric_limits<double>::infinity();
      bool monotone = true;
      for (int n : {100, 200, 400, 800}) {
        const auto s = solver::solve_fractional_1d(a, 2.0,
                                                   solver::ExteriorData::indicator_right(2.0), n);
        double err = 0.0;
        for (std::size_t i = 1; i + 1 < s.nodes.size(); i += 5) {
          const auto o = oracles::oracle_stable_interval(s.nodes[i], 2.0,
                                                         stable::StableIndex(a), 1e-9);
          err = std::max(err, std::abs(s.values[i] - o.value));
        }
        monotone = monotone && err < prev;
        prev = err;
      }
      ok = ok && monotone;
      detail += fmt(" conv(%.1f)%s", a, monotone ? "+" : "-");
    }
  }

  // Bit-identical reruns under varying worker counts.
  {
    auto spec = ProcessSpec::stable_1d(1.1);
    auto domain = DomainSpec::interval(-2.0, 2.0);
    auto target = TargetSpec::exterior_right(domain);
    const double x0 = 0.2;
    EscapeEstimate first;
    bool identical = true;
    for (int threads : {1, 2, 5}) {
      McOptions options;
      options.threads = threads;
      const auto est = estimate_escape(pt(x0), spec, domain, target, 20000, 1e-3, 1009, options);
      if (threads == 1) {
        first = est;
      } else {
        identical = identical && est.p_hat == first.p_hat && est.std_err == first.std_err &&
                    est.n_target == first.n_target && est.n_censored == first.n_censored;
      }
    }
    McOptions two;
    two.threads = 2;
    const auto w1 = random_walk_escape(-2.0, 2.0, 0.5, 0.01, 30000, 1010);
    const auto w2 = random_walk_escape(-2.0, 2.0, 0.5, 0.01, 30000, 1010, two);
    identical = identical && w1.p_hat == w2.p_hat && w1.n_target == w2.n_target;
    ok = ok && identical;
    detail += identical ? " rerun=identical" : " rerun=DIVERGED";
  }

  return {ok, detail.substr(1)};
}

}  // namespace

int main() {
  setvbuf(stdout, nullptr, _IONBF, 0);
  struct Entry {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Entry entries[] = {
      {1, "1-d Brownian interval (closed form, solver, runtime)", criterion1},
      {2, "2-d Brownian annulus (radial solver, Monte Carlo)", criterion2},
      {3, "restoring drift (oracle, elliptic solver, Monte Carlo)", criterion3},
      {4, "symmetric stable interval (identity, fractional solver, jump MC)", criterion4},
      {5, "random-walk limit", criterion5},
      {6, "property suite", criterion6},
  };
  int failures = 0;
  for (const Entry& entry : entries) {
    const double t0 = now_seconds();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[criterion %d] %s — %s (%.1fs) — %s\n", entry.id,
                outcome.pass ? "PASS" : "FAIL", entry.name, now_seconds() - t0,
                outcome.detail.c_str());
  }
  std::printf("ACCEPTANCE: %d/6 criteria passed\n", 6 - failures);
  return failures;
}
