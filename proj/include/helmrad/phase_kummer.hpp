#pragma once

// Nonoscillatory phase functions for y'' + Q(r) y = 0 where Q > 0.
//
// A phase function alpha (alpha' > 0) gives the basis
//     u = sin(alpha) / sqrt(alpha'),  v = cos(alpha) / sqrt(alpha').
// alpha' is computed through w = log(alpha'), which satisfies
//     w'' = 2 Q - 2 exp(2 w) + (w')^2 / 2.
// The slowly varying solution is selected by windowing: the coefficient is
// replaced by a constant near a, the forward solve there starts from the
// exact constant-coefficient phase, and its values at b are transported back
// with the true coefficient.

#include <functional>

#include "helmrad/cheb.hpp"

namespace helmrad {

struct PhaseFn {
  PiecewiseCheb alpha;    // alpha(a) = 0
  PiecewiseCheb dalpha;   // alpha'
  PiecewiseCheb ddalpha;  // alpha''
  PiecewiseCheb w;        // log(alpha')
  PiecewiseCheb dw;       // alpha'' / alpha'
  PiecewiseCheb ddw;
  double a = 0.0;
  double b = 0.0;
};

/// Smooth step: 0 for s <= 0, 1 for s >= 1, f(s) / (f(s) + f(1 - s)) with
/// f(s) = exp(-1/s) in between (infinitely differentiable).
double window_weight(double s);

/// The windowed coefficient: lambda^2 on [a, (3a+b)/4], Q on [(a+3b)/4, b],
/// lambda^2 (1 - w) + Q w in between with w = window_weight of the rescaled
/// position.  lambda = sqrt(Q((a+3b)/4)).
struct WindowedQ {
  std::function<double(double)> q;
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;

  double operator()(double r) const;
};

WindowedQ make_window(std::function<double(double)> q, double a, double b);

/// Throws PreconditionError if Q <= 0 is found strictly inside (a, b);
/// ConvergenceError propagates from the ODE solver.
PhaseFn build_phase(const std::function<double(double)>& q, double a, double b, double tol = 1e-12);

struct PhaseBasisValue {
  double u = 0.0;
  double du = 0.0;
  double v = 0.0;
  double dv = 0.0;
};

/// u = sin(alpha)/sqrt(alpha'), v = cos(alpha)/sqrt(alpha'); Wronskian
/// u v' - u' v = -1.
PhaseBasisValue phase_basis(const PhaseFn& phi, double r);

/// |w'' - 2Q + 2 exp(2w) - (w')^2/2| relative to 2 exp(2w) + 2|Q|.
double kummer_residual(const PhaseFn& phi, const std::function<double(double)>& q, double r);

}  // namespace helmrad
