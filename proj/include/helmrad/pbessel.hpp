#pragma once

// Regular solution of the radial equation
//     psi'' + psi'/r + (k^2 (1 + q(r)) - n^2 / r^2) psi = 0
// through its normal form phi = sqrt(r) psi,
//     phi'' + Q phi = 0,  Q = k^2 (1 + q) + (1/4 - n^2) / r^2,
// on [1e-15, R].  The interval is split at the zeros of Q and at the
// breakpoints of q; each piece gets a phase-function basis (Q > 0) or a pair
// of log-represented exponential solutions (Q < 0), and the pieces are glued
// by continuity of phi and phi'.
//
// Coefficients carry their own log-scale, so modes that are deeply evanescent
// near the origin never overflow.

#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "helmrad/phase_kummer.hpp"
#include "helmrad/riccati_log.hpp"

namespace helmrad {

/// Left end of the solution interval.
inline constexpr double kOriginCutoff = 1e-15;

struct PotentialSpec {
  std::function<double(double)> q;
  std::vector<double> singular_points;  // sorted, inside (0, R)
  double R = 1.0;
  double q0 = 0.0;  // q(0+)
};

struct NormalFormQ {
  double k = 1.0;
  int n = 0;
  PotentialSpec pot;

  /// Q(r) with q evaluated as is.
  double operator()(double r) const;
  /// Q on the smooth span [lo, hi]: q is sampled strictly inside the span, so
  /// endpoint values are the one-sided limits.
  double on_span(double r, double lo, double hi) const;
  /// Smooth spans [1e-15, chi_1], ..., [chi_s, R].
  std::vector<double> span_points() const;
};

/// 1e-15 = xi_1 < ... < xi_t = R: roots of Q together with the breakpoints of q.
std::vector<double> build_partition(const NormalFormQ& nf, double tol = 1e-12);

/// phi(xi_1) = exp(log_scale) * phi, phi'(xi_1) = exp(log_scale) * dphi.
struct SeedValue {
  double phi = 0.0;
  double dphi = 0.0;
  double log_scale = 0.0;
};

/// From phi ~ sqrt(r) J_n(c r), c = k sqrt(1 + q(0)); when 1 + q(0) = 0 the
/// leading power r^(n + 1/2) is used.  Throws PreconditionError if 1 + q(0) < 0.
SeedValue seed_values(const NormalFormQ& nf);

struct Oscillatory {
  PhaseFn phase;
};

struct Nonoscillatory {
  LogSlope up;    // increasing
  LogSlope down;  // decreasing
};

using IntervalBasis = std::variant<Oscillatory, Nonoscillatory>;

/// A coefficient stored as value * exp(log_scale).
struct ScaledCoeff {
  double value = 0.0;
  double log_scale = 0.0;
};

struct ModeSolution {
  int n = 0;
  double k = 0.0;
  std::vector<double> partition;
  std::vector<IntervalBasis> bases;  // one per interval
  // phi = gamma_j u_j + eta_j v_j on interval j, before normalization
  std::vector<std::pair<ScaledCoeff, ScaledCoeff>> coeffs;
  // log of the factor divided out so that max(|psi(R)|, |psi'(R)|/k) = 1
  double norm_log = 0.0;
  double psi_R = 0.0;
  double dpsi_R = 0.0;

  std::size_t intervals() const { return bases.size(); }
  /// Total Chebyshev pieces over all bases.
  std::size_t piece_count() const;
};

/// Throws StitchingError when a continuity system has condition number above
/// 1e12, PreconditionError when 1 + q(0) <= 0.
ModeSolution solve_mode(const NormalFormQ& nf, double tol = 1e-12);

/// phi, phi', phi'' of the normalized solution.
struct NormalValue {
  double phi = 0.0;
  double dphi = 0.0;
  double ddphi = 0.0;
};

/// Normal-form values from the basis of interval j (r in that interval).
NormalValue eval_normal(const ModeSolution& ms, std::size_t j, double r);
/// Normal-form values at r, using the interval containing r.
NormalValue eval_normal(const ModeSolution& ms, double r);

/// (psi(r), psi'(r)), normalized; exactly (psi_R, dpsi_R) at R and 0 where
/// the mode is below exp(-700) of its size at R.
std::pair<double, double> eval_mode(const ModeSolution& ms, double r);

}  // namespace helmrad
