#include "levy_escape/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "levy_escape/quadrature.hpp"
#include "levy_escape/stable.hpp"

namespace levy_escape::solver {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- small dense / tridiagonal linear algebra -------------------------------

// Thomas algorithm; lower/diag/upper are the three bands, rhs is overwritten
// with the solution.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw std::runtime_error("tridiagonal solve: zero pivot");
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

// In-place LU with partial pivoting; returns the permutation.
std::vector<int> lu_factor(std::vector<double>& a, int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    double best = std::abs(a[static_cast<std::size_t>(k) * n + k]);
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a[static_cast<std::size_t>(i) * n + k]);
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) throw std::runtime_error("dense solve: singular matrix");
    if (pivot != k) {
      for (int j = 0; j < n; ++j) {
        std::swap(a[static_cast<std::size_t>(pivot) * n + j],
                  a[static_cast<std::size_t>(k) * n + j]);
      }
      std::swap(perm[static_cast<std::size_t>(pivot)], perm[static_cast<std::size_t>(k)]);
    }
    const double inv = 1.0 / a[static_cast<std::size_t>(k) * n + k];
    for (int i = k + 1; i < n; ++i) {
      const double m = a[static_cast<std::size_t>(i) * n + k] * inv;
      a[static_cast<std::size_t>(i) * n + k] = m;
      if (m == 0.0) continue;
      const double* row_k = &a[static_cast<std::size_t>(k) * n];
      double* row_i = &a[static_cast<std::size_t>(i) * n];
      for (int j = k + 1; j < n; ++j) row_i[j] -= m * row_k[j];
    }
  }
  return perm;
}

std::vector<double> lu_solve(const std::vector<double>& lu, const std::vector<int>& perm,
                             const std::vector<double>& rhs, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  for (int i = 1; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    const double* row = &lu[static_cast<std::size_t>(i) * n];
    for (int j = 0; j < i; ++j) s -= row[j] * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    const double* row = &lu[static_cast<std::size_t>(i) * n];
    for (int j = i + 1; j < n; ++j) s -= row[j] * x[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(i)] = s / row[i];
  }
  return x;
}

void finish_residual(GridSolution& sol, double a_norm, double rhs_norm, double res_inf) {
  const double x_norm =
      sol.values.empty() ? 0.0 : *std::max_element(sol.values.begin(), sol.values.end(),
                                                   [](double u, double v) {
                                                     return std::abs(u) < std::abs(v);
                                                   });
  sol.residual_inf = res_inf;
  sol.residual_tol = 1e-10 * (a_norm * std::abs(x_norm) + rhs_norm + 1.0);
  sol.residual_ok = res_inf <= sol.residual_tol;
  if (!sol.residual_ok) {
    std::fprintf(stderr, "solver: residual %.3e above tolerance %.3e\n", res_inf,
                 sol.residual_tol);
  }
}

}  // namespace

// --- exterior data -----------------------------------------------------------

ExteriorData ExteriorData::indicator_right(double r) {
  return from_pieces(r, {{-kInf, -r, 0.0}, {r, kInf, 1.0}});
}

ExteriorData ExteriorData::indicator_left(double r) {
  return from_pieces(r, {{-kInf, -r, 1.0}, {r, kInf, 0.0}});
}

ExteriorData ExteriorData::constant(double r, double value) {
  return from_pieces(r, {{-kInf, -r, value}, {r, kInf, value}});
}

ExteriorData ExteriorData::from_pieces(double r, std::vector<ExteriorPiece> pieces) {
  if (!(r > 0.0)) throw std::invalid_argument("ExteriorData: need r > 0");
  std::sort(pieces.begin(), pieces.end(),
            [](const ExteriorPiece& a, const ExteriorPiece& b) { return a.lo < b.lo; });
  std::vector<ExteriorPiece> left, right;
  for (const auto& piece : pieces) {
    if (!(piece.lo <= piece.hi)) throw std::invalid_argument("ExteriorData: piece with lo > hi");
    if (!std::isfinite(piece.value)) throw std::invalid_argument("ExteriorData: non-finite value");
    if (piece.hi <= -r) {
      left.push_back(piece);
    } else if (piece.lo >= r) {
      right.push_back(piece);
    } else {
      throw std::invalid_argument("ExteriorData: piece overlaps the open domain (-r, r)");
    }
  }
  auto check_chain = [](const std::vector<ExteriorPiece>& side, double lo, double hi) {
    if (side.empty()) throw std::invalid_argument("ExteriorData: complement side not covered");
    if (side.front().lo != lo || side.back().hi != hi) {
      throw std::invalid_argument("ExteriorData: pieces do not span the complement side");
    }
    for (std::size_t i = 1; i < side.size(); ++i) {
      if (side[i].lo != side[i - 1].hi) {
        throw std::invalid_argument("ExteriorData: gap or overlap between pieces");
      }
    }
  };
  check_chain(left, -kInf, -r);
  check_chain(right, r, kInf);
  ExteriorData data;
  data.pieces = std::move(left);
  data.pieces.insert(data.pieces.end(), right.begin(), right.end());
  return data;
}

double ExteriorData::value_just_left_of(double minus_r) const {
  for (const auto& piece : pieces) {
    if (piece.hi >= minus_r && piece.lo < minus_r) return piece.value;
  }
  // The piece ending exactly at -r.
  for (const auto& piece : pieces) {
    if (piece.hi == minus_r) return piece.value;
  }
  throw std::logic_error("ExteriorData: no piece at the left boundary");
}

double ExteriorData::value_just_right_of(double plus_r) const {
  for (const auto& piece : pieces) {
    if (piece.lo <= plus_r && piece.hi > plus_r) return piece.value;
  }
  throw std::logic_error("ExteriorData: no piece at the right boundary");
}

// --- grid solution -----------------------------------------------------------

double GridSolution::value_at(double x) const {
  if (nodes.empty()) throw std::logic_error("GridSolution: empty");
  const double lo = nodes.front(), hi = nodes.back();
  if (x >= lo && x <= hi) {
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    if (it == nodes.begin()) return values.front();
    if (it == nodes.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    const double t = (x - nodes[i - 1]) / (nodes[i] - nodes[i - 1]);
    return values[i - 1] + t * (values[i] - values[i - 1]);
  }
  if (x < lo) {
    if (!left_boundary_value) {
      throw std::domain_error(
          "GridSolution: point lies in the outermost gap of a nonlocal solution");
    }
    const double xa = exterior.front().hi;  // left boundary abscissa
    if (x <= xa) return *left_boundary_value;
    const double t = (x - xa) / (lo - xa);
    return *left_boundary_value + t * (values.front() - *left_boundary_value);
  }
  if (!right_boundary_value) {
    throw std::domain_error(
        "GridSolution: point lies in the outermost gap of a nonlocal solution");
  }
  const double xb = exterior.back().lo;  // right boundary abscissa
  if (x >= xb) return *right_boundary_value;
  const double t = (x - hi) / (xb - hi);
  return values.back() + t * (*right_boundary_value - values.back());
}

std::string GridSolution::to_csv() const {
  std::string out = "x,value\n";
  char line[80];
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", nodes[i], values[i]);
    out += line;
  }
  return out;
}

// --- local solvers -----------------------------------------------------------

GridSolution solve_elliptic_1d(const std::function<double(double)>& b,
                               const std::function<double(double)>& sigma, double a,
                               double b_right, double left_value, double right_value,
                               int n) {
  if (!(a < b_right)) throw std::invalid_argument("solve_elliptic_1d: need a < b");
  if (n < 3) throw std::invalid_argument("solve_elliptic_1d: need n >= 3");
  const double h = (b_right - a) / (n + 1);

  GridSolution sol;
  sol.nodes.resize(static_cast<std::size_t>(n));
  sol.exterior = {{-kInf, a, left_value}, {b_right, kInf, right_value}};
  sol.left_boundary_value = left_value;
  sol.right_boundary_value = right_value;

  std::vector<double> lower(static_cast<std::size_t>(n)), diag(static_cast<std::size_t>(n)),
      upper(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n), 0.0);
  std::vector<double> bi(static_cast<std::size_t>(n)), si(static_cast<std::size_t>(n));

  auto check_sigma = [&](double x) {
    const double s = sigma(x);
    if (!std::isfinite(s) || s * s <= 0.0) {
      throw std::invalid_argument("solve_elliptic_1d: sigma vanishes (or is not finite) at x = " +
                                  std::to_string(x));
    }
    return s;
  };
  check_sigma(a);
  check_sigma(b_right);

  for (int i = 0; i < n; ++i) {
    const double x = a + h * (i + 1);
    sol.nodes[static_cast<std::size_t>(i)] = x;
    si[static_cast<std::size_t>(i)] = check_sigma(x);
    bi[static_cast<std::size_t>(i)] = b(x);
    if (!std::isfinite(bi[static_cast<std::size_t>(i)])) {
      throw std::invalid_argument("solve_elliptic_1d: drift not finite at x = " + std::to_string(x));
    }
  }

  // (sigma^2/2) (p_{i+1} - 2 p_i + p_{i-1})/h^2 + b (p_{i+1} - p_{i-1})/(2h) = 0
  for (int i = 0; i < n; ++i) {
    const double diff = 0.5 * si[static_cast<std::size_t>(i)] * si[static_cast<std::size_t>(i)] / (h * h);
    const double adv = bi[static_cast<std::size_t>(i)] / (2.0 * h);
    const double wl = diff - adv, wd = -2.0 * diff, wu = diff + adv;
    lower[static_cast<std::size_t>(i)] = wl;
    diag[static_cast<std::size_t>(i)] = wd;
    upper[static_cast<std::size_t>(i)] = wu;
    if (i == 0) rhs[static_cast<std::size_t>(i)] -= wl * left_value;
    if (i == n - 1) rhs[static_cast<std::size_t>(i)] -= wu * right_value;
  }

  std::vector<double> dl = lower, dd = diag, du = upper, dr = rhs;
  solve_tridiagonal(dl, dd, du, dr);
  sol.values = dr;

  double res = 0.0, a_norm = 0.0, rhs_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    double row = diag[k] * sol.values[k];
    if (i > 0) row += lower[k] * sol.values[k - 1];
    if (i < n - 1) row += upper[k] * sol.values[k + 1];
    res = std::max(res, std::abs(row - rhs[k]));
    a_norm = std::max(a_norm, std::abs(lower[k]) + std::abs(diag[k]) + std::abs(upper[k]));
    rhs_norm = std::max(rhs_norm, std::abs(rhs[k]));
  }
  finish_residual(sol, a_norm, rhs_norm, res);
  return sol;
}

GridSolution solve_laplace_annulus(double r, double R, double inner_value,
                                   double outer_value, int n) {
  if (!(0.0 < r) || !(r < R)) throw std::invalid_argument("solve_laplace_annulus: need 0 < r < R");
  if (n < 3) throw std::invalid_argument("solve_laplace_annulus: need n >= 3");
  const double h = (R - r) / (n + 1);

  GridSolution sol;
  sol.nodes.resize(static_cast<std::size_t>(n));
  sol.exterior = {{0.0, r, inner_value}, {R, kInf, outer_value}};
  sol.left_boundary_value = inner_value;
  sol.right_boundary_value = outer_value;

  std::vector<double> lower(static_cast<std::size_t>(n)), diag(static_cast<std::size_t>(n)),
      upper(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n), 0.0);

  // Conservative flux form: rho_{i+1/2}(p_{i+1} - p_i) - rho_{i-1/2}(p_i - p_{i-1}) = 0.
  for (int i = 0; i < n; ++i) {
    const double rho = r + h * (i + 1);
    sol.nodes[static_cast<std::size_t>(i)] = rho;
    const double wl = (rho - 0.5 * h) / (h * h);
    const double wu = (rho + 0.5 * h) / (h * h);
    lower[static_cast<std::size_t>(i)] = wl;
    diag[static_cast<std::size_t>(i)] = -(wl + wu);
    upper[static_cast<std::size_t>(i)] = wu;
    if (i == 0) rhs[static_cast<std::size_t>(i)] -= wl * inner_value;
    if (i == n - 1) rhs[static_cast<std::size_t>(i)] -= wu * outer_value;
  }

  std::vector<double> dl = lower, dd = diag, du = upper, dr = rhs;
  solve_tridiagonal(dl, dd, du, dr);
  sol.values = dr;

  double res = 0.0, a_norm = 0.0, rhs_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    double row = diag[k] * sol.values[k];
    if (i > 0) row += lower[k] * sol.values[k - 1];
    if (i < n - 1) row += upper[k] * sol.values[k + 1];
    res = std::max(res, std::abs(row - rhs[k]));
    a_norm = std::max(a_norm, std::abs(lower[k]) + std::abs(diag[k]) + std::abs(upper[k]));
    rhs_norm = std::max(rhs_norm, std::abs(rhs[k]));
  }
  finish_residual(sol, a_norm, rhs_norm, res);
  return sol;
}

// --- fractional solver --------------------------------------------------------

namespace {

struct KernelIntegrals {
  double i0;  // integral of u^(-1-alpha)
  double i1;  // integral of u^(-alpha)
};

KernelIntegrals kernel_integrals(double alpha, double ua, double ub) {
  KernelIntegrals k;
  if (std::isinf(ub)) {
    k.i0 = std::pow(ua, -alpha) / alpha;
    k.i1 = kInf;  // callers never use i1 on unbounded ranges
    return k;
  }
  k.i0 = (std::pow(ua, -alpha) - std::pow(ub, -alpha)) / alpha;
  if (alpha == 1.0) {
    k.i1 = std::log(ub / ua);
  } else {
    k.i1 = (std::pow(ub, 1.0 - alpha) - std::pow(ua, 1.0 - alpha)) / (1.0 - alpha);
  }
  return k;
}

struct AssemblyRow {
  std::vector<double> weights;  // one per interior node
  double rhs;
};

// Kernel mass of the boundary-layer shape over an outermost gap cell:
// integral of ((ub - u)/h)^(alpha/2) u^(-1-alpha) du over [ua, ub].  The
// solution approaches its boundary value like (r -|x|)^(alpha/2), so the gap
// between the last node and the boundary is modelled with that exponent
// rather than linearly.
double graded_gap_mass(double alpha, double ua, double ub, double h, double i0) {
  const double half = 0.5 * alpha;
  auto integrand = [&](double u) {
    return std::pow((ub - u) / h, half) * std::pow(u, -1.0 - alpha);
  };
  const auto q = quadrature::gauss_kronrod(integrand, ua, ub, 1e-12 * std::max(i0, 1e-30));
  return q.value;
}

// Row i (1-based interior index) of the discrete nonlocal operator.
void assemble_row(int i, int n, double h, double r, double alpha, double scale,
                  const std::vector<ExteriorPiece>& left_ext,
                  const std::vector<ExteriorPiece>& right_ext, double phi_left,
                  double phi_right, AssemblyRow& row) {
  std::fill(row.weights.begin(), row.weights.end(), 0.0);
  row.rhs = 0.0;
  const double x_i = -r + h * i;

  double known = 0.0;
  auto add = [&](int node, double w) {
    if (node >= 1 && node <= n) {
      row.weights[static_cast<std::size_t>(node - 1)] += w;
    } else {
      known += w * (node == 0 ? phi_left : phi_right);
    }
  };

  // Near field |u| <= h: symmetrized second difference against the kernel;
  // the quadratic Taylor model integrates to h^(2-alpha)/(2-alpha).
  const double near = scale * std::pow(h, -alpha) / (2.0 - alpha);
  add(i - 1, near);
  add(i + 1, near);
  add(i, -2.0 * near);

  // Far field, right side: interior cells [x_c, x_{c+1}], c = i+1 .. n; the
  // last cell is the boundary gap and carries the layer shape.
  for (int c = i + 1; c <= n; ++c) {
    const double ua = h * (c - i), ub = h * (c - i + 1);
    const KernelIntegrals k = kernel_integrals(alpha, ua, ub);
    if (c == n) {
      const double jn = graded_gap_mass(alpha, ua, ub, h, k.i0);
      add(n, scale * jn);
      known += scale * (k.i0 - jn) * phi_right;
    } else {
      add(c, scale * (ub * k.i0 - k.i1) / h);
      add(c + 1, scale * (k.i1 - ua * k.i0) / h);
    }
    add(i, -scale * k.i0);
  }
  // Far field, left side: interior cells [x_c, x_{c+1}], c = 0 .. i-2; cell
  // c = 0 is the left boundary gap.
  for (int c = 0; c <= i - 2; ++c) {
    const double ua = h * (i - c - 1), ub = h * (i - c);
    const KernelIntegrals k = kernel_integrals(alpha, ua, ub);
    if (c == 0) {
      const double jn = graded_gap_mass(alpha, ua, ub, h, k.i0);
      add(1, scale * jn);
      known += scale * (k.i0 - jn) * phi_left;
    } else {
      add(c, scale * (k.i1 - ua * k.i0) / h);
      add(c + 1, scale * (ub * k.i0 - k.i1) / h);
    }
    add(i, -scale * k.i0);
  }

  // Exterior data, integrated in closed form piece by piece.
  for (const auto& piece : right_ext) {
    const double ua = piece.lo - x_i;
    const double ub = std::isinf(piece.hi) ? kInf : piece.hi - x_i;
    const double mass = kernel_integrals(alpha, ua, ub).i0;
    known += scale * mass * piece.value;
    add(i, -scale * mass);
  }
  for (const auto& piece : left_ext) {
    const double ua = x_i - piece.hi;
    const double ub = std::isinf(piece.lo) ? kInf : x_i - piece.lo;
    const double mass = kernel_integrals(alpha, ua, ub).i0;
    known += scale * mass * piece.value;
    add(i, -scale * mass);
  }

  row.rhs = -known;
}

}  // namespace

GridSolution solve_fractional_1d(double alpha, double r, const ExteriorData& exterior,
                                 int n, const FractionalOptions& options) {
  (void)stable::StableIndex(alpha);  // range check
  if (!(r > 0.0)) throw std::invalid_argument("solve_fractional_1d: need r > 0");
  if (n < 5) throw std::invalid_argument("solve_fractional_1d: need n >= 5");
  if (n > 5000) throw std::invalid_argument("solve_fractional_1d: n capped at 5000 (dense solve)");
  if (!(options.kernel_scale > 0.0)) {
    throw std::invalid_argument("solve_fractional_1d: kernel_scale must be > 0");
  }

  // Validate coverage against this radius (from_pieces checked shape only).
  ExteriorData data = ExteriorData::from_pieces(r, exterior.pieces);

  std::vector<ExteriorPiece> left_ext, right_ext;
  for (const auto& piece : data.pieces) {
    (piece.hi <= -r ? left_ext : right_ext).push_back(piece);
  }
  const double phi_left = data.value_just_left_of(-r);
  const double phi_right = data.value_just_right_of(r);

  const double h = 2.0 * r / (n + 1);
  const double scale = options.kernel_scale * stable::stable_coeffs(1, stable::StableIndex(alpha)).C1;

  GridSolution sol;
  sol.alpha = alpha;
  sol.exterior = data.pieces;
  sol.nodes.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) sol.nodes[static_cast<std::size_t>(i - 1)] = -r + h * i;

  std::vector<double> matrix(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::vector<double> rhs(static_cast<std::size_t>(n));
  AssemblyRow row;
  row.weights.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    assemble_row(i, n, h, r, alpha, scale, left_ext, right_ext, phi_left, phi_right, row);
    std::copy(row.weights.begin(), row.weights.end(),
              matrix.begin() + static_cast<std::size_t>(i - 1) * n);
    rhs[static_cast<std::size_t>(i - 1)] = row.rhs;
  }

  std::vector<double> lu = matrix;
  const std::vector<int> perm = lu_factor(lu, n);
  sol.values = lu_solve(lu, perm, rhs, n);

  // Residual against freshly assembled rows (the LU overwrote its copy).
  double res = 0.0, a_norm = 0.0, rhs_norm = 0.0;
  for (int i = 1; i <= n; ++i) {
    assemble_row(i, n, h, r, alpha, scale, left_ext, right_ext, phi_left, phi_right, row);
    double dot = 0.0, norm = 0.0;
    for (int j = 0; j < n; ++j) {
      dot += row.weights[static_cast<std::size_t>(j)] * sol.values[static_cast<std::size_t>(j)];
      norm += std::abs(row.weights[static_cast<std::size_t>(j)]);
    }
    res = std::max(res, std::abs(dot - row.rhs));
    a_norm = std::max(a_norm, norm);
    rhs_norm = std::max(rhs_norm, std::abs(row.rhs));
  }
  finish_residual(sol, a_norm, rhs_norm, res);
  return sol;
}

}  // namespace levy_escape::solver
