#include "helmrad/phase_kummer.hpp"

#include <cmath>
#include <numbers>

#include "helmrad/cheb_ode.hpp"

namespace helmrad {

namespace {

OdeRhs kummer_rhs(std::function<double(double)> q) {
  return {2, [q = std::move(q)](double r, double w, double wp) {
            const double e2 = std::exp(2.0 * w);
            return RhsValue{2.0 * q(r) - 2.0 * e2 + 0.5 * wp * wp, -4.0 * e2, wp};
          }};
}

// Values of g(w, w') at the nodes of each piece of w, as a new expansion.
PiecewiseCheb map_pieces(const PiecewiseCheb& w, const PiecewiseCheb& dw,
                         const std::function<double(double, double)>& g) {
  std::vector<ChebExpansion> out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& p = w.piece(i);
    const auto& dp = dw.piece(i);
    std::vector<double> vals;
    const auto nodes = cheb_nodes(p.a(), p.b(), p.coeffs().size());
    vals.reserve(nodes.size());
    for (double x : nodes) vals.push_back(g(p(x), dp(x)));
    out.push_back(ChebExpansion::from_values(p.a(), p.b(), vals));
  }
  return PiecewiseCheb(std::move(out));
}

void check_positive(const std::function<double(double)>& q, double a, double b) {
  // interior Chebyshev points of the first kind avoid the endpoints
  constexpr int samples = 65;
  for (int i = 0; i < samples; ++i) {
    const double t = -std::cos(std::numbers::pi * (i + 0.5) / samples);
    const double r = 0.5 * (a + b) + 0.5 * (b - a) * t;
    if (!(q(r) > 0.0))
      throw PreconditionError("build_phase: Q <= 0 at r = " + std::to_string(r) + " inside the interval");
  }
}

}  // namespace

double window_weight(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double f0 = std::exp(-1.0 / s), f1 = std::exp(-1.0 / (1.0 - s));
  return f0 / (f0 + f1);
}

double WindowedQ::operator()(double r) const {
  const double lo = 0.75 * a + 0.25 * b, hi = 0.25 * a + 0.75 * b;
  if (r <= lo) return lambda * lambda;
  if (r >= hi) return q(r);
  const double w = window_weight((r - lo) / (hi - lo));
  return lambda * lambda * (1.0 - w) + q(r) * w;
}

WindowedQ make_window(std::function<double(double)> q, double a, double b) {
  if (!(b > a)) throw DomainError("make_window: requires a < b");
  WindowedQ wq;
  wq.a = a;
  wq.b = b;
  const double q_end = q(0.25 * a + 0.75 * b);
  if (!(q_end > 0.0)) throw PreconditionError("make_window: Q must be positive where the window ends");
  wq.lambda = std::sqrt(q_end);
  wq.q = std::move(q);
  return wq;
}

PhaseFn build_phase(const std::function<double(double)>& q, double a, double b, double tol) {
  if (!(b > a)) throw DomainError("build_phase: requires a < b");
  check_positive(q, a, b);
  const WindowedQ wq = make_window(q, a, b);

  // w is log(alpha'), so an absolute bound on w is a relative bound on alpha'
  OdeOptions opts;
  opts.tol = tol;
  opts.y_scale = 1.0;
  // w' is the log-derivative of alpha', naturally of the size of sqrt(Q)
  opts.dy_scale = wq.lambda;

  const OdeSolution fwd = solve_nonlinear_ode(kummer_rhs(wq), {Direction::Forward, std::log(wq.lambda), 0.0}, a, b, opts);
  const double wb = fwd.y(b), wpb = fwd.dy(b);
  OdeSolution back = solve_nonlinear_ode(kummer_rhs(q), {Direction::Backward, wb, wpb}, a, b, opts);

  PhaseFn phi;
  phi.a = a;
  phi.b = b;
  phi.w = std::move(back.y);
  phi.dw = std::move(back.dy);
  phi.ddw = std::move(back.ddy);
  phi.dalpha = map_pieces(phi.w, phi.dw, [](double w, double) { return std::exp(w); });
  phi.ddalpha = map_pieces(phi.w, phi.dw, [](double w, double wp) { return wp * std::exp(w); });
  phi.alpha = cheb_integrate(phi.dalpha, a, 0.0);
  return phi;
}

PhaseBasisValue phase_basis(const PhaseFn& phi, double r) {
  if (!(r >= phi.a && r <= phi.b)) throw DomainError("phase_basis: r outside the interval");
  const double w = phi.w(r), wp = phi.dw(r), al = r == phi.a ? 0.0 : phi.alpha(r);
  const double s = std::exp(-0.5 * w), sq = std::exp(0.5 * w);
  const double sn = std::sin(al), cs = std::cos(al);
  PhaseBasisValue out;
  out.u = sn * s;
  out.v = cs * s;
  out.du = cs * sq - 0.5 * wp * out.u;
  out.dv = -sn * sq - 0.5 * wp * out.v;
  return out;
}

double kummer_residual(const PhaseFn& phi, const std::function<double(double)>& q, double r) {
  const double w = phi.w(r), wp = phi.dw(r), wpp = phi.ddw(r), qr = q(r);
  const double e2 = std::exp(2.0 * w);
  return std::abs(wpp - 2.0 * qr + 2.0 * e2 - 0.5 * wp * wp) / (2.0 * e2 + 2.0 * std::abs(qr));
}

}  // namespace helmrad
