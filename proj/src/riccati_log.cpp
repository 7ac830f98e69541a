#include "helmrad/riccati_log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "helmrad/cheb_ode.hpp"

namespace helmrad {

namespace {

OdeRhs riccati_rhs(const std::function<double(double)>& q) {
  return {1, [&q](double r, double p, double) { return RhsValue{-p * p - q(r), -2.0 * p, 0.0}; }};
}

void check_negative(const std::function<double(double)>& q, double a, double b) {
  constexpr int samples = 65;
  for (int i = 0; i < samples; ++i) {
    const double t = -std::cos(std::numbers::pi * (i + 0.5) / samples);
    const double r = 0.5 * (a + b) + 0.5 * (b - a) * t;
    if (!(q(r) < 0.0))
      throw PreconditionError("build_log_pair: Q >= 0 at r = " + std::to_string(r) + " inside the interval");
  }
}

LogSlope make_slope(OdeSolution&& sol, double a, double b, LogKind kind) {
  LogSlope ls;
  ls.a = a;
  ls.b = b;
  ls.kind = kind;
  ls.sigma = cheb_integrate(sol.y, ls.anchor(), 0.0);
  ls.dsigma = std::move(sol.y);
  ls.ddsigma = std::move(sol.dy);
  return ls;
}

}  // namespace

double LogSlope::log_value(double r) const {
  if (r == anchor()) return 0.0;
  return sigma(r);
}

std::pair<LogSlope, LogSlope> build_log_pair(const std::function<double(double)>& q, double a, double b,
                                             double tol) {
  if (!(b > a)) throw DomainError("build_log_pair: requires a < b");
  check_negative(q, a, b);
  OdeOptions opts;
  opts.tol = tol;
  const OdeRhs rhs = riccati_rhs(q);
  OdeSolution up = solve_nonlinear_ode(rhs, {Direction::Forward, 0.0, 0.0}, a, b, opts);
  OdeSolution down = solve_nonlinear_ode(rhs, {Direction::Backward, 0.0, 0.0}, a, b, opts);
  return {make_slope(std::move(up), a, b, LogKind::Increasing),
          make_slope(std::move(down), a, b, LogKind::Decreasing)};
}

LogBasisValue log_basis(const LogSlope& ls, double r) {
  if (!(r >= ls.a && r <= ls.b)) throw DomainError("log_basis: r outside the interval");
  const double y = std::exp(ls.log_value(r));
  return {y, ls.dsigma(r) * y};
}

double riccati_residual(const LogSlope& ls, const std::function<double(double)>& q, double r) {
  const double p = ls.dsigma(r), dp = ls.ddsigma(r), qr = q(r);
  // sigma'^2 and Q both vanish at a turning point, so the scale is taken over
  // the whole piece
  const auto& piece = ls.dsigma.piece(ls.dsigma.locate(r));
  double scale = 0.0;
  for (double x : cheb_nodes(piece.a(), piece.b())) scale = std::max(scale, ls.dsigma(x) * ls.dsigma(x) + std::abs(q(x)));
  return std::abs(dp + p * p + qr) / scale;
}

}  // namespace helmrad
