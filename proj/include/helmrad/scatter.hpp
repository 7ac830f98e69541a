#pragma once

// Scattering of an incident field by a radially symmetric potential supported
// in the disc r <= R:
//     Delta u + k^2 (1 + q(r)) u = 0,  u = u_i + u_s,
// with u_s radiating.  Inside the disc u = sum a_n psi_|n|(r) exp(i n t),
// outside u_s = sum b_n H_n(k r) exp(i n t), and (a_n, b_n) follow from
// continuity of u and du/dr at r = R mode by mode.

#include <complex>
#include <functional>
#include <variant>
#include <vector>

#include "helmrad/pbessel.hpp"
#include "helmrad/specfun.hpp"

namespace helmrad {

using cplx = std::complex<double>;

struct PlaneWave {
  double theta0 = 0.0;  // direction of propagation
};

/// H_0(k |z - z0|), |z0| > R.
struct CircularWave {
  cplx z0;
};

/// Any field given by its values and radial derivative in polar coordinates.
struct SampledField {
  std::function<cplx(double, double)> u;
  std::function<cplx(double, double)> du;
};

struct IncidentField {
  std::variant<PlaneWave, CircularWave, SampledField> kind;
  double k = 1.0;

  cplx value(double r, double t) const;
  /// Radial derivative.
  cplx radial(double r, double t) const;
};

/// Fourier coefficients of u_i(R, t) and du_i/dr(R, t), indexed n + m for
/// |n| <= m, with u_i(R, t) ~ sum c_n exp(i n t).
struct BoundaryData {
  int m = 0;
  std::vector<cplx> c;
  std::vector<cplx> d;

  cplx c_at(int n) const { return c[static_cast<std::size_t>(n + m)]; }
  cplx d_at(int n) const { return d[static_cast<std::size_t>(n + m)]; }
};

/// Samples at the next power of two >= 4m + 4 equispaced angles.
BoundaryData boundary_fourier(const IncidentField& inc, double R, int m);

struct ScatterProblem {
  double k = 1.0;
  PotentialSpec pot;
  int m = 0;  // 0: chosen adaptively
  double tol = 1e-12;
};

/// ceil((pi/2) R k)
int default_order(double R, double k);

struct ScatterSolution {
  double k = 0.0;
  double R = 0.0;
  int m = 0;
  std::vector<cplx> a;  // indexed n + m
  std::vector<cplx> b;  // indexed n + m; b_n H_n(k r) is the exterior term
  // b_n H_n(k R), finite even when H_n(k R) overflows
  std::vector<cplx> b_at_R;
  std::vector<ModeSolution> modes;  // n = 0..m
  std::vector<ScaledHankelValue> hankel_R;  // n = 0..m
  BoundaryData boundary;
  IncidentField incident;

  cplx a_at(int n) const { return a[static_cast<std::size_t>(n + m)]; }
  cplx b_at(int n) const { return b[static_cast<std::size_t>(n + m)]; }
};

/// Coefficients (a_n, b_n H_n(kR)) for one mode from psi(R), psi'(R), the
/// boundary coefficients and H_|n|(kR).  Throws IllConditionedModeError when
/// the determinant vanishes to 1e-12 of its scale.
std::pair<cplx, cplx> match_mode(int n, double psi, double dpsi, cplx c, cplx d, double k, const ScaledHankelValue& H);

/// prob.m if set; otherwise default_order doubled until the trailing boundary
/// coefficients fall below 1e-12 of the largest.
int choose_order(const ScatterProblem& prob, const IncidentField& inc);

/// Builds psi_0..psi_m on up to `threads` workers.
std::vector<ModeSolution> build_modes(const ScatterProblem& prob, int m, int threads = 1);

/// Mode-matching coefficients from precomputed modes (the solution phase).
ScatterSolution solve_with_modes(const ScatterProblem& prob, const IncidentField& inc,
                                 std::vector<ModeSolution> modes);

/// Both phases, with the order from choose_order.  Throws
/// IllConditionedModeError when a matching determinant vanishes to 1e-12 of
/// its scale.
ScatterSolution solve_scatter(const ScatterProblem& prob, const IncidentField& inc, int threads = 1);

/// Residual of the matching system for mode n:
/// |a psi(R) - b H(kR) - c| + |a psi'(R) - b k H'(kR) - d|.
double matching_residual(const ScatterSolution& sol, int n);

/// Total field for 1e-15 <= r <= R.
cplx eval_total(const ScatterSolution& sol, double r, double t);

/// Scattered field: Hankel sum for r >= R, total minus incident inside.
cplx eval_scattered(const ScatterSolution& sol, double r, double t);

}  // namespace helmrad
