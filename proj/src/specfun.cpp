#include "helmrad/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace helmrad {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = 1e-300;
constexpr double kBig = 1e200;
const double kLogBig = std::log(kBig);
const double kLn2 = std::numbers::ln2;

// Taylor coefficients of 1/Gamma(1 + z) about z = 0.
constexpr std::array<double, 28> kRgamma = {
    1.0,
    0.5772156649015328606,
    -0.6558780715202538811,
    -0.04200263503409523553,
    0.1665386113822914895,
    -0.04219773455554433675,
    -0.009621971527876973562,
    0.007218943246663099542,
    -0.001165167591859065112,
    -0.0002152416741149509728,
    0.0001280502823881161862,
    -0.00002013485478078823866,
    -0.000001250493482142670657,
    0.000001133027231981695882,
    -0.0000002056338416977607103,
    0.000000006116095104481415818,
    0.00000000500200764446922293,
    -0.000000001181274570487020145,
    0.000000000104342671169110051,
    0.000000000007782263439905071254,
    -0.000000000003696805618642205708,
    0.0000000000005100370287454475979,
    -0.00000000000002058326053566506783,
    -0.000000000000005348122539423017982,
    0.00000000000000122677862823826079,
    -0.000000000000000118125930169745877,
    0.000000000000000001186692254751600333,
    0.000000000000000001412380655318031782,
};

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  const double m2 = mu * mu;
  double even = 0.0, odd = 0.0;
  for (std::size_t i = kRgamma.size(); i-- > 0;) {
    if (i % 2 == 0) even = even * m2 + kRgamma[i];
    else odd = odd * m2 + kRgamma[i];
  }
  gam2 = even;
  gam1 = -odd;
  gampl = gam2 - mu * gam1;  // 1/G(1+mu)
  gammi = gam2 + mu * gam1;  // 1/G(1-mu)
}

// Moves the binary exponent of the mantissa into the log scale (exact).
void normalize(double& m, double& dm, double& log_scale) {
  if (m == 0.0 || !std::isfinite(m)) return;
  int e = 0;
  std::frexp(m, &e);
  m = std::ldexp(m, -e);
  dm = std::ldexp(dm, -e);
  log_scale += e * kLn2;
}

// Hankel large-argument expansion for J_nu and Y_nu.
void asymptotic_jy(double nu, double x, double& j, double& y) {
  const double mu = 4 * nu * nu;
  double term = 1.0, p = 1.0, q = 0.0, prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * x);
    const double a = std::abs(term);
    if (a > prev) break;  // asymptotic series starts diverging
    prev = a;
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (a < 1e-17 * std::max(std::abs(p), std::abs(q))) break;
  }
  // cos and sin of x - (nu/2 + 1/4) pi without rounding the difference
  const double shift = (0.5 * nu + 0.25) * kPi;
  const double cx = std::cos(x), sx = std::sin(x), cs = std::cos(shift), ss = std::sin(shift);
  const double c = cx * cs + sx * ss, s = sx * cs - cx * ss;
  const double amp = std::sqrt(2.0 / (kPi * x));
  j = amp * (p * c - q * s);
  y = amp * (p * s + q * c);
}

ScaledBesselValue steed(double nu, double x) {
  const int nl = x < 2.0 ? static_cast<int>(nu + 0.5) : std::max(0, static_cast<int>(nu - x + 1.5));
  const double xmu = nu - nl, xmu2 = xmu * xmu;
  const double xi = 1.0 / x, xi2 = 2.0 * xi, w = xi2 / kPi;

  // CF1 for J'_nu / J_nu
  int isign = 1;
  double h = nu * xi;
  if (h < kFpMin) h = kFpMin;
  double b = xi2 * nu, d = 0.0, c = h;
  const long maxit = 20000 + 20 * static_cast<long>(x);
  bool converged = false;
  for (long i = 0; i < maxit; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0) isign = -isign;
    if (std::abs(del - 1.0) < kEps) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("bessel_jy: continued fraction did not converge", nu, x);

  // downward recurrence from nu to xmu, rescaled to stay finite
  double rjl = isign, rjpl = h * rjl;
  const double rjl1 = rjl, rjp1 = rjpl;
  double log_down = 0.0;
  for (int l = nl; l >= 1; --l) {
    const double order = nu - (nl - l);
    const double t = order * xi * rjl + rjpl;
    rjpl = (order - 1.0) * xi * t - rjl;
    rjl = t;
    if (std::abs(rjl) > kBig) {
      rjl /= kBig;
      rjpl /= kBig;
      log_down += kLogBig;
    }
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double rjmu, rymu, rymup, ry1;
  if (x < 2.0) {
    const double x2 = 0.5 * x, pimu = kPi * xmu;
    const double fct = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = xmu * dd;
    const double fct2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(xmu, gam1, gam2, gampl, gammi);
    double ff = 2.0 / kPi * fct * (gam1 * std::cosh(e) + gam2 * fct2 * dd);
    e = std::exp(e);
    double p = e / (gampl * kPi);
    double q = 1.0 / (e * kPi * gammi);
    const double pimu2 = 0.5 * pimu;
    const double fct3 = std::abs(pimu2) < kEps ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fct3 * fct3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q, sum1 = p;
    bool ok = false;
    for (int i = 1; i < 10000; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
      cc *= dd / i;
      p /= (i - xmu);
      q /= (i + xmu);
      const double del = cc * (ff + r * q);
      sum += del;
      const double del1 = cc * p - i * del;
      sum1 += del1;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConvergenceError("bessel_jy: series did not converge", nu, x);
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = xmu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    // CF2 for p + iq = (J' + iY') / (J + iY)
    double a = 0.25 - xmu2, p = -0.5 * xi, q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct, ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den, di = -bi / den;
    double dlr = cr * dr - ci * di, dli = cr * di + ci * dr;
    double t = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = t;
    bool ok = false;
    for (int i = 1; i < 100000; ++i) {
      a += 2 * i;
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      t = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = t;
      if (std::abs(dlr - 1.0) + std::abs(dli) < kEps) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConvergenceError("bessel_jy: continued fraction did not converge", nu, x);
    const double gam = (p - f) / q;
    rjmu = std::copysign(std::sqrt(w / ((p - f) * gam + q)), rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = xmu * xi * rymu - rymup;
  }

  ScaledBesselValue out;
  out.order = nu;
  out.arg = x;
  const double ratio = rjmu / rjl;
  out.j = rjl1 * ratio;
  out.jp = rjp1 * ratio;
  out.log_j = -log_down;
  normalize(out.j, out.jp, out.log_j);

  double log_up = 0.0;
  for (int i = 1; i <= nl; ++i) {
    const double t = (xmu + i) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = t;
    if (std::abs(ry1) > kBig) {
      ry1 /= kBig;
      rymu /= kBig;
      log_up += kLogBig;
    }
  }
  out.y = rymu;
  out.yp = nu * xi * rymu - ry1;
  out.log_y = log_up;
  normalize(out.y, out.yp, out.log_y);
  return out;
}

void check_args(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_jy: argument must be positive");
  if (!(nu >= 0.0) || nu > 1e6) throw DomainError("bessel_jy: order must lie in [0, 1e6]");
}

double unscale(double m, double log_scale, const char* what) {
  if (m == 0.0) return 0.0;
  const double lm = std::log(std::abs(m)) + log_scale;
  if (lm > 709.0) throw ScaledOverflowError(std::string("bessel_jy: ") + what + " overflows", lm);
  return m * std::exp(log_scale);
}

// Steed's continued fractions lose accuracy for large x, so beyond this
// argument the recurrence path below is used instead.
constexpr double kLargeArg = 30.0;

ScaledBesselValue asymptotic_value(double nu, double x) {
  ScaledBesselValue out;
  out.order = nu;
  out.arg = x;
  double j1, y1;
  asymptotic_jy(nu, x, out.j, out.y);
  asymptotic_jy(nu + 1, x, j1, y1);
  out.jp = nu / x * out.j - j1;
  out.yp = nu / x * out.y - y1;
  return out;
}

ScaledBesselValue base_value(double nu, double x) {
  return x >= kLargeArg ? asymptotic_value(nu, x) : steed(nu, x);
}

// Orders mu, mu + 1, ..., mu + nmax at x (0 <= mu < 1).  Y by forward
// recurrence from the two lowest orders, J from a backward ratio recurrence
// closed by the Wronskian J_{v+1} Y_v - J_v Y_{v+1} = 2 / (pi x).  When
// `last_only` is set only the top order is returned.
std::vector<ScaledBesselValue> recurrence_sequence(double mu, int nmax, double x, bool last_only) {
  const std::size_t len = static_cast<std::size_t>(nmax) + 1;
  // ycur[n] * exp(ls[n]) = Y_{mu+n}, ynext[n] * exp(ls[n]) = Y_{mu+n+1}
  std::vector<double> ycur(last_only ? 1 : len), ynext(ycur.size()), ls(ycur.size());
  {
    const ScaledBesselValue y0 = base_value(mu, x), y1 = base_value(mu + 1.0, x);
    double a = y0.y * std::exp(y0.log_y - y1.log_y), b = y1.y, s = y1.log_y;
    for (std::size_t n = 0; n < len; ++n) {
      if (!last_only || n + 1 == len) {
        const std::size_t i = last_only ? 0 : n;
        ycur[i] = a;
        ynext[i] = b;
        ls[i] = s;
      }
      if (n + 1 == len) break;
      const double c = 2.0 * (mu + static_cast<double>(n + 1)) / x * b - a;
      a = b;
      b = c;
      if (std::abs(b) > kBig || std::abs(a) > kBig) {
        a /= kBig;
        b /= kBig;
        s += kLogBig;
      }
    }
  }

  // rho[n] = J_{mu+n} / J_{mu+n-1}, started well above max(mu + nmax, x)
  const double top = std::max(mu + nmax, x);
  const auto start = static_cast<std::size_t>(top + 60.0 + 6.0 * std::sqrt(top));
  std::vector<double> rho(last_only ? 1 : len + 1);
  double r = 0.0;
  for (std::size_t n = start; n >= 1; --n) {
    r = 1.0 / (2.0 * (mu + static_cast<double>(n)) / x - r);
    if (last_only) {
      if (n == len) {
        rho[0] = r;
        break;
      }
    } else if (n < rho.size()) {
      rho[n] = r;
    }
  }

  const double wr = 2.0 / (kPi * x);
  std::vector<ScaledBesselValue> out(ycur.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double nu = mu + static_cast<double>(last_only ? len - 1 : i);
    const double rnext = last_only ? rho[0] : rho[i + 1];
    ScaledBesselValue& v = out[i];
    v.order = nu;
    v.arg = x;
    v.y = ycur[i];
    v.yp = nu / x * ycur[i] - ynext[i];
    v.log_y = ls[i];
    normalize(v.y, v.yp, v.log_y);
    v.j = wr / (rnext * ycur[i] - ynext[i]);
    v.jp = v.j * (nu / x - rnext);
    v.log_j = -ls[i];
    normalize(v.j, v.jp, v.log_j);
  }
  return out;
}

}  // namespace

BesselValue ScaledBesselValue::unscaled() const {
  BesselValue v;
  v.order = order;
  v.arg = arg;
  v.j = j * std::exp(log_j);
  v.jp = jp * std::exp(log_j);
  v.y = unscale(y, log_y, "Y");
  v.yp = unscale(yp, log_y, "Y'");
  return v;
}

ScaledBesselValue bessel_jy_scaled(double nu, double x) {
  check_args(nu, x);
  if (x >= std::max(kLargeArg, (nu + 1) * (nu + 1))) return asymptotic_value(nu, x);
  if (x < kLargeArg) return steed(nu, x);
  const double fl = std::floor(nu);
  auto v = recurrence_sequence(nu - fl, static_cast<int>(fl), x, true).front();
  v.order = nu;
  return v;
}

BesselValue bessel_jy(double nu, double x) { return bessel_jy_scaled(nu, x).unscaled(); }

HankelValue hankel_h(int n, double x) {
  if (n < 0) throw DomainError("hankel_h: order must be nonnegative");
  const BesselValue v = bessel_jy(n, x);
  return {{v.j, v.y}, {v.jp, v.yp}};
}

ScaledHankelValue scaled_hankel(const ScaledBesselValue& v) {
  const double lj = v.j == 0.0 && v.jp == 0.0 ? -std::numeric_limits<double>::infinity() : v.log_j;
  const double top = std::max(lj, v.log_y);
  const double sj = std::exp(lj - top), sy = std::exp(v.log_y - top);
  return {{v.j * sj, v.y * sy}, {v.jp * sj, v.yp * sy}, top};
}

ScaledHankelValue hankel_h_scaled(int n, double x) {
  if (n < 0) throw DomainError("hankel_h_scaled: order must be nonnegative");
  return scaled_hankel(bessel_jy_scaled(n, x));
}

std::vector<ScaledBesselValue> bessel_jy_sequence(int nmax, double x) {
  if (nmax < 0) throw DomainError("bessel_jy_sequence: nmax must be nonnegative");
  check_args(nmax, x);
  return recurrence_sequence(0.0, nmax, x, false);
}

}  // namespace helmrad
