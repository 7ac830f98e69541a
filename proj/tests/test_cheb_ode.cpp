#include <doctest.h>

#include <cmath>
#include <random>

#include "helmrad/cheb_ode.hpp"

using namespace helmrad;

namespace {

// w = log(alpha'): w'' = 2 eta - 2 exp(2w) + w'^2 / 2
OdeRhs kummer_log_rhs(std::function<double(double)> eta) {
  return {2, [eta = std::move(eta)](double x, double w, double wp) {
            const double e2 = std::exp(2 * w);
            return RhsValue{2 * eta(x) - 2 * e2 + 0.5 * wp * wp, -4 * e2, wp};
          }};
}

OdeRhs riccati_rhs(std::function<double(double)> Q) {
  return {1, [Q = std::move(Q)](double x, double p, double) {
            return RhsValue{-p * p - Q(x), -2 * p, 0.0};
          }};
}

// Kummer residual in log form, w'' - 2 eta + 2 exp(2w) - w'^2/2, relative to eta.
double kummer_residual(const OdeSolution& s, const std::function<double(double)>& eta, double x) {
  const double w = s.y(x), wp = s.dy(x), wpp = s.ddy(x);
  return std::abs(wpp - 2 * eta(x) + 2 * std::exp(2 * w) - 0.5 * wp * wp) / std::abs(eta(x));
}

// smooth step: 0 for t <= 0, 1 for t >= 1
double smooth_step(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  const double f0 = std::exp(-1.0 / t), f1 = std::exp(-1.0 / (1.0 - t));
  return f0 / (f0 + f1);
}

}  // namespace

TEST_CASE("constant Kummer coefficient gives a constant phase derivative") {
  auto sol = solve_nonlinear_ode(kummer_log_rhs([](double) { return 1.0; }),
                                 {Direction::Forward, 0.0, 0.0}, 0.0, 5.0, {.tol = 1e-12, .y_scale = 1.0});
  for (int i = 0; i <= 100; ++i) {
    const double x = 5.0 * i / 100;
    CHECK(std::abs(std::exp(sol.y(x)) - 1.0) < 1e-13);
  }
}

TEST_CASE("Riccati with Q = -1 gives tanh") {
  const double a = 0.5;
  auto sol = solve_nonlinear_ode(riccati_rhs([](double) { return -1.0; }), {Direction::Forward, 0.0, 0.0}, a,
                                 a + 6.0, {.tol = 1e-13});
  for (int i = 0; i <= 200; ++i) {
    const double x = a + 6.0 * i / 200;
    CHECK(std::abs(sol.y(x) - std::tanh(x - a)) <= 1e-11);
  }
}

TEST_CASE("backward Riccati mirrors the forward solution") {
  auto sol = solve_nonlinear_ode(riccati_rhs([](double) { return -4.0; }), {Direction::Backward, 0.0, 0.0}, 0.0,
                                 3.0, {.tol = 1e-13});
  for (int i = 0; i <= 100; ++i) {
    const double x = 3.0 * i / 100;
    CHECK(std::abs(sol.y(x) + 2.0 * std::tanh(2.0 * (3.0 - x))) <= 1e-11);
  }
}

TEST_CASE("Kummer terminal value problem with eta(t) = t") {
  // terminal data from a forward solve of the windowed problem
  const double a = 1.0, b = 2.0;
  auto eta = [](double t) { return t; };
  auto sol = solve_nonlinear_ode(kummer_log_rhs(eta), {Direction::Backward, 0.5 * std::log(2.0), -0.25}, a, b,
                                 {.tol = 1e-13, .y_scale = 1.0});
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (const auto& p : sol.y.pieces()) {
    for (double x : cheb_nodes(p.a(), p.b())) worst = std::max(worst, kummer_residual(sol, eta, x));
    std::uniform_real_distribution<double> u(p.a(), p.b());
    for (int i = 0; i < 10; ++i) worst = std::max(worst, kummer_residual(sol, eta, u(rng)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("stiff oscillatory Kummer solve stays nonoscillatory") {
  const double k = 1000.0;
  // constant up to t = 1 so that w' = 0 is the nonoscillatory initial slope
  auto eta = [k](double t) { return k * k * (1.0 + 0.5 * std::sin(t) * smooth_step(t - 1.0)); };
  auto sol = solve_nonlinear_ode(kummer_log_rhs(eta), {Direction::Forward, 0.5 * std::log(eta(0.0)), 0.0}, 0.0,
                                 3.0, {.tol = 1e-12, .y_scale = 1.0});
  // the number of pieces must not scale with k (there are ~500 oscillations here)
  CHECK(sol.y.size() < 60);
}

TEST_CASE("solution satisfies the residual at random points per piece") {
  std::mt19937_64 rng(3);
  auto Q = [](double x) { return -(1.0 + x * x); };
  auto sol = solve_nonlinear_ode(riccati_rhs(Q), {Direction::Forward, 0.0, 0.0}, 0.0, 2.0, {.tol = 1e-12});
  auto dp = sol.y.derivative();
  for (const auto& p : sol.y.pieces()) {
    std::uniform_real_distribution<double> u(p.a(), p.b());
    for (int i = 0; i < 10; ++i) {
      const double x = u(rng);
      const double y = sol.y(x);
      CHECK(std::abs(dp(x) + y * y + Q(x)) <= 1e-10);
    }
  }
}

TEST_CASE("divergent problem reports the failing subinterval") {
  // y' = y^2 blows up at x = 1 from y(0) = 1
  OdeRhs blowup{1, [](double, double y, double) { return RhsValue{y * y, 2 * y, 0.0}; }};
  try {
    solve_nonlinear_ode(blowup, {Direction::Forward, 1.0, 0.0}, 0.0, 2.0, {.tol = 1e-12, .max_pieces = 400});
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.a() <= 1.0 + 1e-6);
    CHECK(e.b() >= 0.9);
  }
}
