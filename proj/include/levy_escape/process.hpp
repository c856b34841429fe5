#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levy_escape/rng.hpp"
#include "levy_escape/stable.hpp"

namespace levy_escape::process {

/// Scalar coefficient field used for drift and diffusion entries.  The
/// built-in kinds keep the stepping loop free of std::function dispatch;
/// Custom falls back to a user callable.
class ScalarCoeff {
 public:
  enum class Kind { Zero, Const, LinearRestoring, Table, Custom };

  static ScalarCoeff zero() { return ScalarCoeff(Kind::Zero); }
  static ScalarCoeff constant(double c) {
    ScalarCoeff f(Kind::Const);
    f.c0_ = c;
    return f;
  }
  /// b(x) = -kappa * x
  static ScalarCoeff linear_restoring(double kappa) {
    ScalarCoeff f(Kind::LinearRestoring);
    f.c0_ = kappa;
    return f;
  }
  /// Piecewise-linear table on sorted abscissas; clamped outside the range.
  static ScalarCoeff table(std::vector<double> xs, std::vector<double> ys);
  static ScalarCoeff custom(std::function<double(double)> fn, std::string name = "custom");

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Zero:
        return 0.0;
      case Kind::Const:
        return c0_;
      case Kind::LinearRestoring:
        return -c0_ * x;
      case Kind::Table:
        return eval_table(x);
      case Kind::Custom:
        return fn_(x);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double parameter() const { return c0_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& table_xs() const { return xs_; }
  const std::vector<double>& table_ys() const { return ys_; }

 private:
  explicit ScalarCoeff(Kind k) : kind_(k) {}
  double eval_table(double x) const;

  Kind kind_ = Kind::Zero;
  double c0_ = 0.0;
  std::vector<double> xs_, ys_;
  std::function<double(double)> fn_;
  std::string name_;
};

enum class NoiseKind { Brownian, Stable, BrownianPlusStable };

/// The stochastic system dX = b(X) dt + sigma(X) dW + dL^alpha.
///
/// dim = 1: drift and sigma are the scalar coefficient fields below.
/// dim = 2: drift defaults to zero and sigma to the isotropic constant
/// sigma2_iso * I; a custom vector field can be supplied for the drift.
/// Stable noise adds one standard symmetric alpha-stable increment per
/// component and step, scaled by dt^(1/alpha).  Componentwise independence
/// is NOT the rotationally symmetric 2-d stable motion, so first-exit
/// simulation rejects dim = 2 with stable noise (see simulate_until_exit).
struct ProcessSpec {
  int dim = 1;
  NoiseKind noise = NoiseKind::Brownian;
  double alpha = 1.0;  // stable index when noise has a stable part

  ScalarCoeff drift = ScalarCoeff::zero();
  ScalarCoeff sigma = ScalarCoeff::constant(1.0);

  // dim = 2 fields (kept simple: zero or custom drift, isotropic sigma).
  double sigma2_iso = 1.0;
  std::function<void(std::span<const double>, std::span<double>)> drift2;

  bool has_brownian() const { return noise != NoiseKind::Stable; }
  bool has_stable() const { return noise != NoiseKind::Brownian; }

  static ProcessSpec brownian_1d(ScalarCoeff b, ScalarCoeff s);
  static ProcessSpec stable_1d(double alpha, ScalarCoeff b = ScalarCoeff::zero());
  static ProcessSpec brownian_plus_stable_1d(double alpha, ScalarCoeff b, ScalarCoeff s);
  static ProcessSpec brownian_2d(double sigma_iso = 1.0);
};

/// Open domain: interval (a, b) or origin-centred annulus r < |x| < R.
struct DomainSpec {
  enum class Shape { Interval, Annulus };
  Shape shape = Shape::Interval;
  double a = -1.0, b = 1.0;  // interval
  double r = 1.0, R = 2.0;   // annulus radii

  static DomainSpec interval(double a, double b);
  static DomainSpec annulus(double r, double R);

  bool contains(std::span<const double> x) const {
    if (shape == Shape::Interval) return x[0] > a && x[0] < b;
    const double rho2 = x[0] * x[0] + x[1] * x[1];
    return rho2 > r * r && rho2 < R * R;
  }
};

enum class BoundaryComponent { Left, Right, Inner, Outer };

/// Exterior interval [lo, hi] (closed; lo may be -inf, hi +inf).
struct ExteriorInterval {
  double lo, hi;
};

/// Where a path must land to count as an escape.
///
/// BoundarySubset (continuous paths only): a set of boundary components; an
/// exiting path is assigned to the nearest component.  ExteriorSet (required
/// whenever stable noise is present): a subset U of the complement of D,
/// closed intervals in 1-d, inner disk / outer shell for the annulus.
struct TargetSpec {
  enum class Kind { BoundarySubset, ExteriorSet };
  enum class Region2D { None, InnerDisk, OuterShell };

  Kind kind = Kind::BoundarySubset;
  std::vector<BoundaryComponent> components;    // BoundarySubset
  std::vector<ExteriorInterval> intervals;      // ExteriorSet, dim = 1
  Region2D region2d = Region2D::None;           // ExteriorSet, dim = 2

  static TargetSpec boundary(std::vector<BoundaryComponent> comps);
  static TargetSpec exterior_intervals(std::vector<ExteriorInterval> parts);
  /// U = [b, +inf) for an interval domain (a, b).
  static TargetSpec exterior_right(const DomainSpec& d);
  /// U = (-inf, a] for an interval domain (a, b).
  static TargetSpec exterior_left(const DomainSpec& d);
  static TargetSpec exterior_region(Region2D region);
};

/// Checks the (domain, target, process) triple: geometry (U inside the
/// complement of D), noise/target compatibility, coefficient finiteness on a
/// sample grid over the domain closure.  Throws std::invalid_argument with
/// the offending detail.
void validate(const ProcessSpec& spec, const DomainSpec& domain, const TargetSpec& target);

enum class Classification { Inside, Target, NonTarget };

/// Partition of space induced by (domain, target): Inside on D, and
/// Target/NonTarget on the complement per target membership.
Classification classify(std::span<const double> x, const DomainSpec& domain,
                        const TargetSpec& target);

enum class ExitOutcome { Target, NonTarget, Censored };

struct ExitRecord {
  double exit_time = 0.0;                  // first post-step time outside D
  std::array<double, 2> exit_position{};   // state at that time
  ExitOutcome outcome = ExitOutcome::Censored;
  std::uint64_t steps = 0;                 // exit_time / dt, exact
};

/// One Euler step:
///   x' = x + b(x) dt + sigma(x) sqrt(dt) Z + dt^(1/alpha) S
/// with Z standard Gaussian (absent for pure stable noise) and S standard
/// symmetric alpha-stable (absent for pure Brownian noise); the Gaussian
/// block is always drawn before the stable block.  Throws on a non-finite
/// resulting state (non-finite drift or diffusion propagates there).
void step(std::span<double> x, const ProcessSpec& spec, double dt, RandomStream& rng);

/// Runs step() until the state leaves D or max_time is reached; the exit
/// time is the first post-step time with the state outside D, so it is an
/// exact positive integer multiple of dt.  Censoring (max_time reached
/// inside D) is an outcome, not an error.  Throws if x0 is outside D.
ExitRecord simulate_until_exit(std::span<const double> x0, const ProcessSpec& spec,
                               const DomainSpec& domain, const TargetSpec& target,
                               double dt, double max_time, RandomStream& rng);

}  // namespace levy_escape::process
