#pragma once

// Adaptive spectral collocation solver for scalar nonlinear initial and
// terminal value problems
//
//     y'  = f(x, y)          (order 1)
//     y'' = f(x, y, y')      (order 2)
//
// The unknown on each piece is the highest derivative at the 16 extrema
// nodes; lower derivatives come from spectral integration anchored at the
// boundary-side endpoint.  Newton's method solves the collocation system.
// Pieces that fail Newton or leave a large Chebyshev tail are bisected, and
// the solver marches from the boundary side toward the other end.

#include <functional>

#include "helmrad/cheb.hpp"

namespace helmrad {

/// Right-hand side value with its partial derivatives.
struct RhsValue {
  double f = 0.0;
  double df_dy = 0.0;
  double df_dyp = 0.0;
};

struct OdeRhs {
  int order = 2;  // 1 or 2
  /// For order 1 the third argument is ignored (pass 0).
  std::function<RhsValue(double x, double y, double yp)> eval;
};

enum class Direction { Forward, Backward };

/// Boundary data: y and (order 2) y' at a (Forward) or at b (Backward).
struct OdeBoundary {
  Direction direction = Direction::Forward;
  double value = 0.0;
  double slope = 0.0;
};

struct OdeOptions {
  double tol = 1e-12;
  /// Floor for the coefficient-tail test: tail <= tol * max(max|c|, y_scale).
  double y_scale = 0.0;
  /// Order 2 only: the tail of y' is accepted when it is below tol times
  /// dy_scale as well.  Useful when y' is computed from a cancelling
  /// right-hand side and carries noise of order eps * dy_scale.
  double dy_scale = 0.0;
  int max_newton = 30;
  int max_halvings = 8;
  std::size_t max_pieces = 200000;
};

struct OdeSolution {
  PiecewiseCheb y;
  PiecewiseCheb dy;
  PiecewiseCheb ddy;  // only for order 2; for order 1 equals dy
  /// Largest final collocation residual |y^(order) - f| over accepted pieces.
  double max_residual = 0.0;
  std::size_t rejected_pieces = 0;
};

/// Solves the IVP (Forward) or TVP (Backward) on [a, b].  Throws
/// ConvergenceError with the offending subinterval when subdivision stalls.
OdeSolution solve_nonlinear_ode(const OdeRhs& rhs, const OdeBoundary& boundary, double a, double b,
                                const OdeOptions& opts = {});

/// Spectral integration matrix on the reference interval [-1, 1]:
/// (S v)_i = integral from -1 to t_i of the interpolant of v.
std::span<const double> cheb_left_integration_matrix();

}  // namespace helmrad
