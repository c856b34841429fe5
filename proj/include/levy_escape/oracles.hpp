#pragma once

#include <functional>

#include "levy_escape/stable.hpp"

namespace levy_escape::oracles {

/// Reference value with a quadrature error estimate (0 for closed forms).
/// Values outside [0, 1] are a bug in the caller's problem setup and raise
/// std::runtime_error rather than being clamped.
struct OracleResult {
  double value;
  double abs_error_bound;
};

/// Escape probability of standard Brownian motion from (-r, r) through the
/// right end: p(x) = (x + r) / (2r).
OracleResult oracle_bm_interval(double x, double r);

/// Escape probability of planar Brownian motion from the annulus r < |x| < R
/// through the inner circle: p = (log R - log rho) / (log R - log r).
OracleResult oracle_bm_annulus(double rho, double r, double R);

/// Escape probability through the right end for dX = b dt + sigma dW on
/// (-r, r), by the explicit double-integral solution with the inner integral
/// tabulated on an adaptive panel grid.
OracleResult oracle_drift_1d(double x, double r, const std::function<double(double)>& b,
                             const std::function<double(double)>& sigma, double tol = 1e-10);

/// Escape probability of the symmetric alpha-stable motion from (-r, r) into
/// U = [r, inf), by the interval Poisson kernel
///   p(x) =
///     (sin(pi alpha/2)/pi) * integral_r^inf ((r^2-x^2)/(y^2-r^2))^(alpha/2)
///                                            / (y - x) dy.
/// The endpoint singularity is removed with y = r cosh(t) followed by a
/// power substitution; the infinite tail decays exponentially in t and is
/// cut off with an explicit bound that joins the error estimate.
OracleResult oracle_stable_interval(double x, double r, stable::StableIndex alpha,
                                    double tol = 1e-10);

/// Independent second route for the same quantity: direct y-integration with
/// the (y-r)^(-alpha/2) singularity absorbed by a power substitution and the
/// tail beyond max(2r, x + 10r) summed analytically term by term.  Used to
/// cross-check oracle_stable_interval.
OracleResult oracle_stable_interval_direct(double x, double r, stable::StableIndex alpha,
                                           double tol = 1e-10);

/// Numerically reproduces the boundary identity p(r) = 1: integrates the
/// substituted kernel whose exact value is (sin(pi alpha/2)/pi) B(alpha/2,
/// 1 - alpha/2) = 1.  Returns the numerical value (expected 1 within ~1e-10).
OracleResult stable_boundary_identity(stable::StableIndex alpha);

}  // namespace levy_escape::oracles
