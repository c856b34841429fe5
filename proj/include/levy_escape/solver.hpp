#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace levy_escape::solver {

/// One piece of exterior data: the constant `value` on the interval
/// [lo, hi] of the domain complement (lo may be -inf, hi +inf).
struct ExteriorPiece {
  double lo, hi, value;
};

/// Piecewise-constant data on the complement of (-r, r), covering it exactly
/// with no overlaps.
struct ExteriorData {
  std::vector<ExteriorPiece> pieces;

  /// 1 on [r, inf), 0 on (-inf, -r].
  static ExteriorData indicator_right(double r);
  /// 1 on (-inf, -r], 0 on [r, inf).
  static ExteriorData indicator_left(double r);
  static ExteriorData constant(double r, double value);
  static ExteriorData from_pieces(double r, std::vector<ExteriorPiece> pieces);

  double value_just_left_of(double minus_r) const;   // data limit at -r
  double value_just_right_of(double plus_r) const;   // data limit at +r
};

/// Solved boundary-value problem on a 1-d grid (or radial grid).
struct GridSolution {
  std::vector<double> nodes;   // strictly increasing, strictly inside D
  std::vector<double> values;  // one per node
  std::vector<ExteriorPiece> exterior;  // data descriptor on the complement
  double residual_inf = 0.0;   // inf-norm of A p - rhs after the solve
  double residual_tol = 0.0;   // scale-aware bound the residual is held to
  bool residual_ok = true;
  std::optional<double> alpha;                 // set by the fractional solver
  std::optional<double> left_boundary_value;   // local solvers only
  std::optional<double> right_boundary_value;

  /// Piecewise-linear interpolation between nodes.  Local solutions extend
  /// to their boundary values; nonlocal solutions are only defined on
  /// [nodes.front(), nodes.back()] (the outermost gap holds a boundary
  /// layer the grid cannot represent) and throw outside it.
  double value_at(double x) const;

  /// CSV serialization: header row, then x,value lines with 17 significant
  /// digits and LF line endings.
  std::string to_csv() const;
};

/// Dirichlet problem (sigma^2/2) p'' + b p' = 0 on (a, b), boundary values
/// imposed exactly at the endpoints; second-order central differences and a
/// tridiagonal solve on n interior nodes.  Requires sigma bounded away from
/// zero on the closed interval (checked at grid nodes and endpoints).
GridSolution solve_elliptic_1d(const std::function<double(double)>& b,
                               const std::function<double(double)>& sigma, double a,
                               double b_right, double left_value, double right_value,
                               int n);

/// Radial reduction of (1/2) Laplace p = 0 on the annulus r < |x| < R:
/// (rho p')' = 0 by conservative central differences on n interior radii.
GridSolution solve_laplace_annulus(double r, double R, double inner_value,
                                   double outer_value, int n);

struct FractionalOptions {
  /// Multiplies the assembled operator; the homogeneous solution must not
  /// depend on it (asserted in tests).
  double kernel_scale = 1.0;
};

/// Balayage-Dirichlet problem for the 1-d fractional Laplacian on (-r, r)
/// with piecewise-constant data on the whole complement:
///
///   integral over u != 0 of [p(x+u) - p(x)] C_{1,alpha} |u|^(-1-alpha) du = 0
///
/// Near field |u| <= h uses the symmetrized second difference
/// p(x+u) + p(x-u) - 2 p(x) (the symmetric kernel kills the odd first-order
/// term, which is what makes the principal value finite); the far field is
/// integrated exactly against piecewise-linear interpolation of the interior
/// values and analytically against the exterior data, with no truncation of
/// the unbounded tails.  Dense n x n solve; n is capped at 5000.
GridSolution solve_fractional_1d(double alpha, double r, const ExteriorData& exterior,
                                 int n, const FractionalOptions& options = {});

}  // namespace levy_escape::solver
