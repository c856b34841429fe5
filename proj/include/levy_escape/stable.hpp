#pragma once

#include "levy_escape/rng.hpp"

namespace levy_escape::stable {

/// Stability index, strictly inside (0, 2).  The Gaussian endpoint alpha = 2
/// is a separate noise kind everywhere in this library and is rejected here.
class StableIndex {
 public:
  explicit StableIndex(double alpha);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Constants attached to the d-dimensional symmetric alpha-stable motion:
///   C         characteristic-exponent scale, exp(t Psi), Psi(z) = -C |z|^alpha
///   C_d_alpha jump-measure density constant, nu(du) = C_d_alpha |u|^(-d-alpha) du
///   C1        tail constant of the 1-d density, f(y) ~ C1 |y|^(-1-alpha)
///   C2        central value of the 1-d density, f(0) = C2
/// For d = 1, C = 1 and C1 = C_d_alpha (Gamma-function identities; asserted
/// numerically in the test suite).
struct StableCoeffs {
  double C;
  double C_d_alpha;
  double C1;
  double C2;
};

/// Evaluate all four constants from their Gamma-function formulas.
/// Throws std::invalid_argument for d < 1 and std::range_error if a constant
/// is not representable in double (alpha extremely close to 0).
StableCoeffs stable_coeffs(int dim, StableIndex alpha);

/// Density f(y) of the standard 1-d symmetric alpha-stable law (the law with
/// characteristic function exp(-|z|^alpha)).
///
/// Uses the convergent power series for moderate |y| and the tail expansion
/// beyond a per-alpha crossover radius chosen where the two representations
/// agree to 1e-6 (for small alpha double precision cannot reach that
/// agreement anywhere; the crossover then falls back to the closest-approach
/// point, worst case ~5e-6 near the handoff).  alpha = 1 evaluates the
/// Cauchy closed form.  Throws std::runtime_error if neither representation
/// reaches `tol`.
double stable_density(StableIndex alpha, double y, double tol = 1e-5);

/// Crossover radius used by stable_density for this alpha (exposed for
/// diagnostics and tests).
double density_crossover_radius(StableIndex alpha);

/// One draw of the standard symmetric alpha-stable law, characteristic
/// function exp(-|z|^alpha), by the Chambers-Mallows-Stuck transform:
///   U ~ Uniform(-pi/2, pi/2),  W ~ Exp(1),
///   X = sin(alpha U) / cos(U)^(1/alpha)
///       * ( cos((1-alpha) U) / W )^((1-alpha)/alpha),
/// with X = tan(U) at alpha = 1.
double sample_standard_stable(StableIndex alpha, RandomStream& rng);

}  // namespace levy_escape::stable
