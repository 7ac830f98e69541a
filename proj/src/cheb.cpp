#include "helmrad/cheb.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <mutex>

namespace helmrad {

std::span<const double> cheb_unit_nodes(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    std::vector<double> t(n);
    if (n == 1) {
      t[0] = 0.0;
    } else {
      const double pi = 3.14159265358979323846;
      const std::size_t m = n - 1;
      for (std::size_t j = 0; j < n; ++j) t[j] = -std::cos(pi * static_cast<double>(j) / static_cast<double>(m));
      // exact symmetry and endpoints
      for (std::size_t j = 0; j < n / 2; ++j) t[n - 1 - j] = -t[j];
      if (n % 2 == 1) t[n / 2] = 0.0;
      t.front() = -1.0;
      t.back() = 1.0;
    }
    it = cache.emplace(n, std::move(t)).first;
  }
  return it->second;
}

std::vector<double> cheb_nodes(double a, double b, std::size_t n) {
  auto t = cheb_unit_nodes(n);
  std::vector<double> x(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t j = 0; j < n; ++j) x[j] = mid + half * t[j];
  x.front() = a;
  x.back() = b;
  return x;
}

namespace {

void fit_recursive(const std::function<double(double)>& f, double a, double b, int depth,
                   const AdaptiveFitOptions& opts, std::vector<ChebExpansion>& out) {
  auto piece = ChebExpansion::fit(a, b, f, opts.nodes);
  const double tail = piece.tail_magnitude(3);
  const double scale = piece.max_coeff_magnitude();
  if (tail <= opts.tol * scale) {
    out.push_back(std::move(piece));
    return;
  }
  if (depth >= opts.max_depth)
    throw ConvergenceError("adaptive_fit: recursion depth exceeded on [" + std::to_string(a) + ", " +
                               std::to_string(b) + "]",
                           a, b, scale > 0 ? tail / scale : tail);
  const double mid = 0.5 * (a + b);
  fit_recursive(f, a, mid, depth + 1, opts, out);
  fit_recursive(f, mid, b, depth + 1, opts, out);
}

}  // namespace

PiecewiseCheb adaptive_fit(const std::function<double(double)>& f, double a, double b,
                           const AdaptiveFitOptions& opts) {
  if (!(b > a)) throw DomainError("adaptive_fit: requires a < b");
  if (!(opts.tol > 0)) throw DomainError("adaptive_fit: requires tol > 0");
  std::vector<ChebExpansion> pieces;
  fit_recursive(f, a, b, 0, opts, pieces);
  return PiecewiseCheb(std::move(pieces));
}

std::vector<double> cheb_roots(const ChebExpansion& f) {
  std::vector<double> c = f.coeffs();
  const double scale = f.max_coeff_magnitude();
  if (scale == 0.0) return {};
  // drop negligible leading terms so the colleague matrix is well defined
  while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
  const std::size_t deg = c.size() - 1;
  if (deg == 0) return {};

  std::vector<double> unit_roots;
  if (deg == 1) {
    unit_roots.push_back(-c[0] / c[1]);
  } else {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
    C(0, 1) = 1.0;
    for (std::size_t i = 1; i + 1 < deg; ++i) {
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 0.5;
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = 0.5;
    }
    const auto last = static_cast<Eigen::Index>(deg - 1);
    for (std::size_t k = 0; k < deg; ++k) C(last, static_cast<Eigen::Index>(k)) -= c[k] / (2.0 * c[deg]);
    C(last, last - 1) += 0.5;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      const double re = ev[i].real(), im = ev[i].imag();
      // loose window: a small leading coefficient perturbs the eigenvalues,
      // Newton and the residual check below decide
      if (std::abs(im) <= 1e-2 && re >= -1.02 && re <= 1.02) unit_roots.push_back(re);
    }
  }

  const std::span<const double> cs(c);
  std::vector<double> derivative(deg, 0.0);
  {
    ChebExpansion tmp(-1.0, 1.0, c);
    derivative = tmp.derivative().coeffs();
  }
  std::vector<double> roots;
  for (double t : unit_roots) {
    t = std::clamp(t, -1.0, 1.0);
    for (int it = 0; it < 8; ++it) {
      const double v = clenshaw<double>(cs, t);
      const double dv = clenshaw<double>(derivative, t);
      if (dv == 0.0) break;
      const double step = v / dv;
      const double tn = std::clamp(t - step, -1.0, 1.0);
      if (std::abs(tn - t) <= 1e-16) {
        t = tn;
        break;
      }
      t = tn;
    }
    // reject near-real eigenvalues of a function that does not actually vanish
    if (std::abs(clenshaw<double>(cs, t)) > 1e-9 * scale) continue;
    roots.push_back(0.5 * (f.a() + f.b()) + 0.5 * (f.b() - f.a()) * t);
  }
  // any sign change the eigenvalues missed is bracketed and bisected
  constexpr int samples = 64;
  double tl = -1.0, vl = clenshaw<double>(cs, tl);
  auto to_x = [&](double t) { return 0.5 * (f.a() + f.b()) + 0.5 * (f.b() - f.a()) * t; };
  for (int i = 1; i <= samples; ++i) {
    const double tr = -std::cos(std::numbers::pi * i / samples), vr = clenshaw<double>(cs, tr);
    if ((vl < 0.0) != (vr < 0.0) && vl != 0.0 && vr != 0.0) {
      const double xl = to_x(tl), xr = to_x(tr);
      const bool found = std::any_of(roots.begin(), roots.end(), [&](double x) { return x >= xl && x <= xr; });
      if (!found) {
        double lo = tl, hi = tr, flo = vl;
        while (hi - lo > 4e-16) {
          const double mid = 0.5 * (lo + hi), fm = clenshaw<double>(cs, mid);
          if (mid <= lo || mid >= hi || fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(to_x(0.5 * (lo + hi)));
      }
    }
    tl = tr;
    vl = vr;
  }
  std::sort(roots.begin(), roots.end());
  const double merge = 1e-13 * (f.b() - f.a());
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > merge) out.push_back(r);
  return out;
}

std::vector<double> cheb_roots(const PiecewiseCheb& f) {
  std::vector<double> all;
  for (const auto& p : f.pieces()) {
    auto r = cheb_roots(p);
    all.insert(all.end(), r.begin(), r.end());
  }
  std::sort(all.begin(), all.end());
  const double merge = 1e-13 * (f.b() - f.a());
  std::vector<double> out;
  for (double r : all) {
    if (out.empty() || r - out.back() > merge) out.push_back(r);
  }
  return out;
}

}  // namespace helmrad
