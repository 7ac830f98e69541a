#pragma once

// Exponential-type solution pairs of y'' + Q(r) y = 0 where Q < 0, held
// through sigma = log(y).  sigma' solves the Riccati equation
//     p' = -p^2 - Q.
// The increasing solution comes from a forward solve with p(a) = 0 and is
// normalized by sigma(b) = 0; the decreasing one from a backward solve with
// p(b) = 0 and sigma(a) = 0.  Both sigma are <= 0, so exp(sigma) never
// overflows.

#include <functional>
#include <utility>

#include "helmrad/cheb.hpp"

namespace helmrad {

enum class LogKind { Increasing, Decreasing };

struct LogSlope {
  PiecewiseCheb sigma;
  PiecewiseCheb dsigma;
  PiecewiseCheb ddsigma;
  double a = 0.0;
  double b = 0.0;
  LogKind kind = LogKind::Increasing;

  /// Endpoint where sigma = 0.
  double anchor() const { return kind == LogKind::Increasing ? b : a; }
  /// sigma(r), exactly 0 at the anchor.
  double log_value(double r) const;
};

/// First: Increasing (u), second: Decreasing (v).  Throws PreconditionError
/// if Q >= 0 is found strictly inside (a, b).
std::pair<LogSlope, LogSlope> build_log_pair(const std::function<double(double)>& q, double a, double b,
                                             double tol = 1e-12);

struct LogBasisValue {
  double y = 0.0;
  double dy = 0.0;
};

/// y = exp(sigma(r)), y' = sigma'(r) y.
LogBasisValue log_basis(const LogSlope& ls, double r);

/// |sigma'' + sigma'^2 + Q| relative to the largest sigma'^2 + |Q| over the
/// collocation nodes of the piece containing r.
double riccati_residual(const LogSlope& ls, const std::function<double(double)>& q, double r);

}  // namespace helmrad
