#pragma once

namespace levy_escape::special {

/// Gamma function for real arguments (poles at 0, -1, -2, ... excluded).
/// Lanczos rational approximation, near machine precision in double.
double gamma(double x);

/// log|Gamma(x)| for x > 0.  Stays finite where gamma() would overflow.
double log_gamma(double x);

/// Beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b), a, b > 0.
double beta(double a, double b);

}  // namespace levy_escape::special
