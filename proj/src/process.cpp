#include "levy_escape/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace levy_escape::process {

ScalarCoeff ScalarCoeff::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size()) {
    throw std::invalid_argument("ScalarCoeff::table: need matching xs/ys, at least two points");
  }
  if (!std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument("ScalarCoeff::table: abscissas must be sorted");
  }
  ScalarCoeff f(Kind::Table);
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  return f;
}

ScalarCoeff ScalarCoeff::custom(std::function<double(double)> fn, std::string name) {
  ScalarCoeff f(Kind::Custom);
  f.fn_ = std::move(fn);
  f.name_ = std::move(name);
  return f;
}

double ScalarCoeff::eval_table(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
}

ProcessSpec ProcessSpec::brownian_1d(ScalarCoeff b, ScalarCoeff s) {
  ProcessSpec spec;
  spec.dim = 1;
  spec.noise = NoiseKind::Brownian;
  spec.drift = std::move(b);
  spec.sigma = std::move(s);
  return spec;
}

ProcessSpec ProcessSpec::stable_1d(double alpha, ScalarCoeff b) {
  ProcessSpec spec;
  spec.dim = 1;
  spec.noise = NoiseKind::Stable;
  spec.alpha = stable::StableIndex(alpha).value();
  spec.drift = std::move(b);
  spec.sigma = ScalarCoeff::zero();
  return spec;
}

ProcessSpec ProcessSpec::brownian_plus_stable_1d(double alpha, ScalarCoeff b, ScalarCoeff s) {
  ProcessSpec spec;
  spec.dim = 1;
  spec.noise = NoiseKind::BrownianPlusStable;
  spec.alpha = stable::StableIndex(alpha).value();
  spec.drift = std::move(b);
  spec.sigma = std::move(s);
  return spec;
}

ProcessSpec ProcessSpec::brownian_2d(double sigma_iso) {
  ProcessSpec spec;
  spec.dim = 2;
  spec.noise = NoiseKind::Brownian;
  spec.sigma2_iso = sigma_iso;
  return spec;
}

DomainSpec DomainSpec::interval(double a, double b) {
  if (!(a < b)) throw std::invalid_argument("DomainSpec::interval: need a < b");
  DomainSpec d;
  d.shape = Shape::Interval;
  d.a = a;
  d.b = b;
  return d;
}

DomainSpec DomainSpec::annulus(double r, double R) {
  if (!(0.0 < r) || !(r < R)) {
    throw std::invalid_argument("DomainSpec::annulus: need 0 < r < R");
  }
  DomainSpec d;
  d.shape = Shape::Annulus;
  d.r = r;
  d.R = R;
  return d;
}

TargetSpec TargetSpec::boundary(std::vector<BoundaryComponent> comps) {
  TargetSpec t;
  t.kind = Kind::BoundarySubset;
  t.components = std::move(comps);
  return t;
}

TargetSpec TargetSpec::exterior_intervals(std::vector<ExteriorInterval> parts) {
  TargetSpec t;
  t.kind = Kind::ExteriorSet;
  t.intervals = std::move(parts);
  return t;
}

TargetSpec TargetSpec::exterior_right(const DomainSpec& d) {
  return exterior_intervals({{d.b, std::numeric_limits<double>::infinity()}});
}

TargetSpec TargetSpec::exterior_left(const DomainSpec& d) {
  return exterior_intervals({{-std::numeric_limits<double>::infinity(), d.a}});
}

TargetSpec TargetSpec::exterior_region(Region2D region) {
  TargetSpec t;
  t.kind = Kind::ExteriorSet;
  t.region2d = region;
  return t;
}

namespace {

bool in_exterior_target_1d(double x, const TargetSpec& target) {
  for (const auto& piece : target.intervals) {
    if (x >= piece.lo && x <= piece.hi) return true;
  }
  return false;
}

bool has_component(const TargetSpec& t, BoundaryComponent c) {
  return std::find(t.components.begin(), t.components.end(), c) != t.components.end();
}

}  // namespace

void validate(const ProcessSpec& spec, const DomainSpec& domain, const TargetSpec& target) {
  if (spec.dim != 1 && spec.dim != 2) {
    throw std::invalid_argument("ProcessSpec: dim must be 1 or 2");
  }
  if ((spec.dim == 1) != (domain.shape == DomainSpec::Shape::Interval)) {
    throw std::invalid_argument("domain shape does not match process dimension");
  }
  if (spec.has_stable()) {
    (void)stable::StableIndex(spec.alpha);  // range check
    if (target.kind != TargetSpec::Kind::ExteriorSet) {
      throw std::invalid_argument(
          "stable noise produces jump exits; the target must be an exterior set");
    }
    if (spec.dim == 2) {
      throw std::invalid_argument(
          "2-d stable first-exit is not supported: componentwise stable increments "
          "are not the rotationally symmetric motion");
    }
  } else if (target.kind == TargetSpec::Kind::ExteriorSet && spec.dim == 1) {
    // Allowed: a Brownian path exits arbitrarily close to the boundary, and
    // half-line exterior targets classify that exit correctly.
  }

  // Geometry: target must live in the complement of D.
  if (target.kind == TargetSpec::Kind::ExteriorSet) {
    if (spec.dim == 1) {
      if (target.intervals.empty()) {
        throw std::invalid_argument("exterior target: no intervals given");
      }
      for (const auto& piece : target.intervals) {
        if (!(piece.lo <= piece.hi)) {
          throw std::invalid_argument("exterior target: interval with lo > hi");
        }
        if (piece.hi > domain.a && piece.lo < domain.b) {
          throw std::invalid_argument("exterior target: interval overlaps the open domain");
        }
      }
    } else {
      if (target.region2d == TargetSpec::Region2D::None) {
        throw std::invalid_argument("exterior target: no 2-d region given");
      }
    }
  } else {
    if (target.components.empty()) {
      throw std::invalid_argument("boundary target: no components given");
    }
    for (BoundaryComponent c : target.components) {
      const bool interval_comp = (c == BoundaryComponent::Left || c == BoundaryComponent::Right);
      if (interval_comp != (domain.shape == DomainSpec::Shape::Interval)) {
        throw std::invalid_argument("boundary target: component does not match domain shape");
      }
    }
  }

  // Coefficient finiteness on a sample grid over the domain closure.
  if (spec.dim == 1) {
    constexpr int kSamples = 65;
    for (int i = 0; i <= kSamples; ++i) {
      const double x = domain.a + (domain.b - domain.a) * i / kSamples;
      if (!std::isfinite(spec.drift(x))) {
        throw std::invalid_argument("drift is not finite at x = " + std::to_string(x));
      }
      if (!std::isfinite(spec.sigma(x))) {
        throw std::invalid_argument("sigma is not finite at x = " + std::to_string(x));
      }
    }
  } else if (spec.drift2) {
    constexpr int kRad = 8, kAng = 16;
    for (int i = 0; i <= kRad; ++i) {
      for (int j = 0; j < kAng; ++j) {
        const double rho = domain.r + (domain.R - domain.r) * i / kRad;
        const double phi = 2.0 * 3.141592653589793 * j / kAng;
        const std::array<double, 2> x{rho * std::cos(phi), rho * std::sin(phi)};
        std::array<double, 2> b{};
        spec.drift2(x, b);
        if (!std::isfinite(b[0]) || !std::isfinite(b[1])) {
          throw std::invalid_argument("drift is not finite on the domain closure");
        }
      }
    }
  }
}

Classification classify(std::span<const double> x, const DomainSpec& domain,
                        const TargetSpec& target) {
  if (domain.contains(x)) return Classification::Inside;

  if (domain.shape == DomainSpec::Shape::Interval) {
    if (target.kind == TargetSpec::Kind::ExteriorSet) {
      return in_exterior_target_1d(x[0], target) ? Classification::Target
                                                 : Classification::NonTarget;
    }
    // Continuous path: assign to the nearest boundary component.
    const bool right = std::abs(x[0] - domain.b) <= std::abs(x[0] - domain.a);
    const bool is_target = right ? has_component(target, BoundaryComponent::Right)
                                 : has_component(target, BoundaryComponent::Left);
    return is_target ? Classification::Target : Classification::NonTarget;
  }

  const double rho = std::hypot(x[0], x[1]);
  if (target.kind == TargetSpec::Kind::ExteriorSet) {
    const bool inner = rho <= domain.r;
    const bool is_target = inner
                               ? target.region2d == TargetSpec::Region2D::InnerDisk
                               : target.region2d == TargetSpec::Region2D::OuterShell;
    return is_target ? Classification::Target : Classification::NonTarget;
  }
  const bool inner = std::abs(rho - domain.r) <= std::abs(rho - domain.R);
  const bool is_target = inner ? has_component(target, BoundaryComponent::Inner)
                               : has_component(target, BoundaryComponent::Outer);
  return is_target ? Classification::Target : Classification::NonTarget;
}

namespace detail {

// Per-simulation constants hoisted out of the stepping loop.
struct StepPlan {
  double dt;
  double sqrt_dt;
  double jump_scale;  // dt^(1/alpha), 0 when unused
};

StepPlan make_plan(const ProcessSpec& spec, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  StepPlan plan{dt, std::sqrt(dt), 0.0};
  if (spec.has_stable()) {
    (void)stable::StableIndex(spec.alpha);  // range check once
    plan.jump_scale = std::pow(dt, 1.0 / spec.alpha);
  }
  return plan;
}

inline void step_impl(std::span<double> x, const ProcessSpec& spec, const StepPlan& plan,
                      RandomStream& rng) {
  if (spec.dim == 1) {
    double xn = x[0] + spec.drift(x[0]) * plan.dt;
    if (spec.has_brownian()) xn += spec.sigma(x[0]) * plan.sqrt_dt * rng.normal();
    if (spec.has_stable()) {
      xn += plan.jump_scale *
            stable::sample_standard_stable(stable::StableIndex(spec.alpha), rng);
    }
    if (!std::isfinite(xn)) {
      throw std::runtime_error("step: non-finite state (check drift/diffusion)");
    }
    x[0] = xn;
    return;
  }

  std::array<double, 2> inc{};
  if (spec.drift2) {
    std::array<double, 2> b{};
    spec.drift2(std::span<const double>(x.data(), 2), b);
    inc[0] += b[0] * plan.dt;
    inc[1] += b[1] * plan.dt;
  }
  if (spec.has_brownian()) {
    // Gaussian block first, fixed draw order.
    const double z0 = rng.normal();
    const double z1 = rng.normal();
    inc[0] += spec.sigma2_iso * plan.sqrt_dt * z0;
    inc[1] += spec.sigma2_iso * plan.sqrt_dt * z1;
  }
  if (spec.has_stable()) {
    const stable::StableIndex ai(spec.alpha);
    inc[0] += plan.jump_scale * stable::sample_standard_stable(ai, rng);
    inc[1] += plan.jump_scale * stable::sample_standard_stable(ai, rng);
  }
  const double x0 = x[0] + inc[0];
  const double x1 = x[1] + inc[1];
  if (!std::isfinite(x0) || !std::isfinite(x1)) {
    throw std::runtime_error("step: non-finite state (check drift/diffusion)");
  }
  x[0] = x0;
  x[1] = x1;
}

// Tight stepping loops for the 1-d interval case, dispatched on coefficient
// kinds; the arithmetic matches step_impl statement for statement, so every
// dispatch path yields the same trajectory bit for bit.
template <class StepFn>
ExitRecord run_interval_1d(double x, double a, double b, std::uint64_t max_steps,
                           double dt, const DomainSpec& domain, const TargetSpec& target,
                           StepFn step_fn) {
  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    x = step_fn(x);
    if (!(x > a && x < b)) {
      ExitRecord rec;
      rec.exit_time = static_cast<double>(k) * dt;
      rec.exit_position = {x, 0.0};
      rec.steps = k;
      const std::array<double, 2> pos{x, 0.0};
      rec.outcome = classify(std::span<const double>(pos.data(), 1), domain, target) ==
                            Classification::Target
                        ? ExitOutcome::Target
                        : ExitOutcome::NonTarget;
      return rec;
    }
  }
  ExitRecord rec;
  rec.exit_time = static_cast<double>(max_steps) * dt;
  rec.exit_position = {x, 0.0};
  rec.steps = max_steps;
  rec.outcome = ExitOutcome::Censored;
  return rec;
}

[[noreturn]] void throw_non_finite() {
  throw std::runtime_error("step: non-finite state (check drift/diffusion)");
}

}  // namespace detail

void step(std::span<double> x, const ProcessSpec& spec, double dt, RandomStream& rng) {
  const detail::StepPlan plan = detail::make_plan(spec, dt);
  detail::step_impl(x, spec, plan, rng);
}

ExitRecord simulate_until_exit(std::span<const double> x0, const ProcessSpec& spec,
                               const DomainSpec& domain, const TargetSpec& target,
                               double dt, double max_time, RandomStream& rng) {
  if (!(dt > 0.0) || !(max_time >= dt)) {
    throw std::invalid_argument("simulate_until_exit: need dt > 0 and max_time >= dt");
  }
  if (!domain.contains(x0)) {
    throw std::invalid_argument("simulate_until_exit: start point is not inside the domain");
  }

  std::array<double, 2> x{};
  for (int i = 0; i < spec.dim; ++i) x[static_cast<std::size_t>(i)] = x0[static_cast<std::size_t>(i)];
  std::span<double> xs(x.data(), static_cast<std::size_t>(spec.dim));

  const detail::StepPlan plan = detail::make_plan(spec, dt);
  const auto max_steps = static_cast<std::uint64_t>(max_time / dt);

  // Hot-path dispatch for the 1-d interval combinations the estimators hit
  // hardest; the generic loop below covers everything else.
  if (spec.dim == 1 && domain.shape == DomainSpec::Shape::Interval) {
    const double a = domain.a, bnd = domain.b, dt_ = plan.dt, sdt = plan.sqrt_dt;
    const auto bk = spec.drift.kind();
    const auto sk = spec.sigma.kind();
    if (spec.noise == NoiseKind::Brownian && sk == ScalarCoeff::Kind::Const) {
      const double sig = spec.sigma.parameter();
      if (bk == ScalarCoeff::Kind::Zero) {
        return detail::run_interval_1d(x[0], a, bnd, max_steps, dt_, domain, target,
                                       [&rng, dt_, sdt, sig](double y) {
                                         double yn = y + 0.0 * dt_;
                                         yn += sig * sdt * rng.normal();
                                         if (!std::isfinite(yn)) detail::throw_non_finite();
                                         return yn;
                                       });
      }
      if (bk == ScalarCoeff::Kind::LinearRestoring) {
        const double kappa = spec.drift.parameter();
        return detail::run_interval_1d(x[0], a, bnd, max_steps, dt_, domain, target,
                                       [&rng, dt_, sdt, sig, kappa](double y) {
                                         double yn = y + (-kappa * y) * dt_;
                                         yn += sig * sdt * rng.normal();
                                         if (!std::isfinite(yn)) detail::throw_non_finite();
                                         return yn;
                                       });
      }
    }
    if (spec.noise == NoiseKind::Stable && bk == ScalarCoeff::Kind::Zero) {
      const stable::StableIndex ai(spec.alpha);
      const double jump = plan.jump_scale;
      return detail::run_interval_1d(x[0], a, bnd, max_steps, dt_, domain, target,
                                     [&rng, dt_, jump, ai](double y) {
                                       double yn = y + 0.0 * dt_;
                                       yn += jump * stable::sample_standard_stable(ai, rng);
                                       if (!std::isfinite(yn)) detail::throw_non_finite();
                                       return yn;
                                     });
    }
  }

  for (std::uint64_t k = 1; k <= max_steps; ++k) {
    detail::step_impl(xs, spec, plan, rng);
    if (!domain.contains(xs)) {
      ExitRecord rec;
      rec.exit_time = static_cast<double>(k) * dt;
      rec.exit_position = x;
      rec.steps = k;
      rec.outcome = classify(xs, domain, target) == Classification::Target
                        ? ExitOutcome::Target
                        : ExitOutcome::NonTarget;
      return rec;
    }
  }
  ExitRecord rec;
  rec.exit_time = static_cast<double>(max_steps) * dt;
  rec.exit_position = x;
  rec.steps = max_steps;
  rec.outcome = ExitOutcome::Censored;
  return rec;
}

}  // namespace levy_escape::process
