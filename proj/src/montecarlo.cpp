#include "levy_escape/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace levy_escape::montecarlo {

namespace {

struct Counts {
  long target = 0;
  long nontarget = 0;
  long censored = 0;
};

int resolve_threads(int requested, long n_items) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    n = std::min(n, 16);
  }
  if (static_cast<long>(n) > n_items) n = static_cast<int>(std::max<long>(1, n_items));
  return n;
}

// Fans path indices [0, n) out to workers; per_path must be pure given the
// path index (it derives its own stream), so scheduling cannot change the
// merged counts.
template <class PerPath>
Counts run_batch(long n, int threads, PerPath per_path) {
  const int n_workers = resolve_threads(threads, n);
  std::vector<Counts> partial(static_cast<std::size_t>(n_workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));

  auto work = [&](int w) {
    try {
      Counts local;
      for (long j = w; j < n; j += n_workers) {
        switch (per_path(j)) {
          case process::ExitOutcome::Target:
            ++local.target;
            break;
          case process::ExitOutcome::NonTarget:
            ++local.nontarget;
            break;
          case process::ExitOutcome::Censored:
            ++local.censored;
            break;
        }
      }
      partial[static_cast<std::size_t>(w)] = local;
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (n_workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Counts total;
  for (const Counts& c : partial) {
    total.target += c.target;
    total.nontarget += c.nontarget;
    total.censored += c.censored;
  }
  return total;
}

EscapeEstimate summarize(const Counts& counts, long n_paths) {
  const long n_valid = n_paths - counts.censored;
  if (n_valid == 0) {
    throw std::runtime_error("estimate_escape: every path was censored; raise max_time");
  }
  EscapeEstimate est;
  est.n_paths = n_paths;
  est.n_target = counts.target;
  est.n_censored = counts.censored;
  est.p_hat = static_cast<double>(counts.target) / static_cast<double>(n_valid);
  est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_valid));
  est.ci95 = {std::max(0.0, est.p_hat - 1.96 * est.std_err),
              std::min(1.0, est.p_hat + 1.96 * est.std_err)};
  est.high_censoring =
      static_cast<double>(counts.censored) > 0.01 * static_cast<double>(n_paths);
  return est;
}

}  // namespace

EscapeEstimate estimate_escape(std::span<const double> x0, const process::ProcessSpec& spec,
                               const process::DomainSpec& domain,
                               const process::TargetSpec& target, long n_paths, double dt,
                               std::uint64_t seed, const McOptions& options) {
  if (n_paths < 1) throw std::invalid_argument("estimate_escape: n_paths must be >= 1");
  process::validate(spec, domain, target);
  if (!domain.contains(x0)) {
    throw std::invalid_argument("estimate_escape: start point is not inside the domain");
  }

  const Counts counts = run_batch(n_paths, options.threads, [&](long j) {
    RandomStream rng(seed, options.x_index, static_cast<std::uint64_t>(j));
    return process::simulate_until_exit(x0, spec, domain, target, dt, options.max_time, rng)
        .outcome;
  });
  return summarize(counts, n_paths);
}

std::vector<std::pair<double, EscapeEstimate>> estimate_profile(
    std::span<const double> xs, const process::ProcessSpec& spec,
    const process::DomainSpec& domain, const process::TargetSpec& target, long n_paths,
    double dt, std::uint64_t seed, const McOptions& options) {
  std::vector<std::pair<double, EscapeEstimate>> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    McOptions point_options = options;
    point_options.x_index = static_cast<std::uint64_t>(i);
    std::array<double, 2> x0{xs[i], 0.0};
    const std::span<const double> x0s(x0.data(), static_cast<std::size_t>(spec.dim));
    out.emplace_back(xs[i],
                     estimate_escape(x0s, spec, domain, target, n_paths, dt, seed, point_options));
  }
  return out;
}

LatticeSnap snap_to_lattice(double a, double b, double x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("random_walk_escape: delta must be > 0");
  if (!(a < x) || !(x < b)) {
    throw std::invalid_argument("random_walk_escape: x must lie strictly inside (a, b)");
  }
  LatticeSnap snap{};
  snap.right_end = std::lround((b - a) / delta);
  snap.position = std::lround((x - a) / delta);
  if (snap.right_end < 2) {
    throw std::invalid_argument("random_walk_escape: fewer than two lattice steps across (a, b)");
  }
  snap.position = std::clamp(snap.position, 1L, snap.right_end - 1);
  const double tol = 0.5e-6 * delta;
  snap.warned =
      std::abs(a + static_cast<double>(snap.position) * delta - x) > tol ||
      std::abs(a + static_cast<double>(snap.right_end) * delta - b) > tol;
  return snap;
}

EscapeEstimate random_walk_escape(double a, double b, double x, double delta, long n_walks,
                                  std::uint64_t seed, const McOptions& options) {
  if (n_walks < 1) throw std::invalid_argument("random_walk_escape: n_walks must be >= 1");
  const LatticeSnap snap = snap_to_lattice(a, b, x, delta);
  const long right = snap.right_end;
  const long start = snap.position;
  // Expected exit needs position * (right - position) steps; censor far beyond.
  const std::uint64_t max_steps =
      200ULL * static_cast<std::uint64_t>(right) * static_cast<std::uint64_t>(right) + 1000ULL;

  const Counts counts = run_batch(n_walks, options.threads, [&](long j) {
    RandomStream rng(seed, options.x_index, static_cast<std::uint64_t>(j));
    long pos = start;
    std::uint64_t used = 0;
    while (used < max_steps) {
      std::uint64_t bits = rng.next_u64();
      // 64 lattice steps per draw.
      for (int i = 0; i < 64; ++i) {
        pos += (bits & 1ULL) ? 1 : -1;
        bits >>= 1;
        if (pos == 0) return process::ExitOutcome::NonTarget;
        if (pos == right) return process::ExitOutcome::Target;
      }
      used += 64;
    }
    return process::ExitOutcome::Censored;
  });
  EscapeEstimate est = summarize(counts, n_walks);
  return est;
}

}  // namespace levy_escape::montecarlo
