#pragma once

// Bessel functions J, Y and the Hankel function H = J + iY of the first kind,
// with first derivatives, for real order nu >= 0 and real x > 0.

#include <complex>
#include <vector>

#include "helmrad/errors.hpp"

namespace helmrad {

struct BesselValue {
  double j = 0.0;
  double y = 0.0;
  double jp = 0.0;
  double yp = 0.0;
  double order = 0.0;
  double arg = 0.0;
};

/// J = j * exp(log_j), Y = y * exp(log_y); derivatives share the scale of
/// their function.  Mantissas are O(1) unless the value is exactly zero.
struct ScaledBesselValue {
  double j = 0.0;
  double jp = 0.0;
  double log_j = 0.0;
  double y = 0.0;
  double yp = 0.0;
  double log_y = 0.0;
  double order = 0.0;
  double arg = 0.0;

  /// Throws ScaledOverflowError when Y does not fit in a double; an
  /// underflowing J is returned as 0.
  BesselValue unscaled() const;
};

/// Real order 0 <= nu <= 1e6, x > 0.
ScaledBesselValue bessel_jy_scaled(double nu, double x);
BesselValue bessel_jy(double nu, double x);

struct HankelValue {
  std::complex<double> h;
  std::complex<double> hp;
};

HankelValue hankel_h(int n, double x);

/// H = h * exp(log), H' = hp * exp(log).
struct ScaledHankelValue {
  std::complex<double> h;
  std::complex<double> hp;
  double log = 0.0;
};

ScaledHankelValue scaled_hankel(const ScaledBesselValue& v);
ScaledHankelValue hankel_h_scaled(int n, double x);

/// Integer orders 0..nmax at one argument.  Y comes from forward recurrence,
/// J from a backward ratio recurrence closed by the Wronskian.
std::vector<ScaledBesselValue> bessel_jy_sequence(int nmax, double x);

}  // namespace helmrad
