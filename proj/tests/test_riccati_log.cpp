#include <doctest.h>

#include <cmath>
#include <random>

#include "helmrad/riccati_log.hpp"
#include "helmrad/specfun.hpp"

using namespace helmrad;

TEST_CASE("constant coefficient has the log-cosh solution") {
  const double mu = 3.0, a = 0.25, b = 2.0;
  auto [u, v] = build_log_pair([mu](double) { return -mu * mu; }, a, b);
  const double lcb = std::log(std::cosh(mu * (b - a)));
  for (int i = 0; i <= 100; ++i) {
    const double r = a + (b - a) * i / 100;
    CHECK(std::abs(u.log_value(r) - (std::log(std::cosh(mu * (r - a))) - lcb)) <= 1e-12 * lcb);
    CHECK(std::abs(u.dsigma(r) - mu * std::tanh(mu * (r - a))) <= 1e-12 * mu);
    // reflection: the backward slope is the forward one mirrored and negated
    CHECK(std::abs(v.dsigma(r) + u.dsigma(a + b - r)) <= 1e-12 * mu);
  }
}

TEST_CASE("ratio against the closed form on [0, 1]") {
  auto [u, v] = build_log_pair([](double) { return -1.0; }, 0.0, 1.0);
  CHECK(std::abs(log_basis(u, 0.5).y / log_basis(u, 1.0).y - std::cosh(0.5) / std::cosh(1.0)) <= 1e-13);
}

TEST_CASE("anchor values and sign of sigma") {
  auto q = [](double r) { return -(4.0 + r * r); };
  auto [u, v] = build_log_pair(q, 0.5, 3.0);
  CHECK(log_basis(u, 3.0).y == 1.0);
  CHECK(log_basis(v, 0.5).y == 1.0);
  CHECK(u.kind == LogKind::Increasing);
  CHECK(v.kind == LogKind::Decreasing);
  for (int i = 0; i <= 200; ++i) {
    const double r = 0.5 + 2.5 * i / 200;
    CHECK(u.log_value(r) <= 1e-15);
    CHECK(v.log_value(r) <= 1e-15);
  }
}

TEST_CASE("residual, Wronskian constancy and collocation residual") {
  const double k = 200.0;
  auto q = [k](double r) { return k * k * (1.0 + 0.5 * std::exp(-r)) - 90000.0 / (r * r); };
  // q < 0 below the turning point near r = 1.27
  const double a = 0.05, b = 1.2;
  auto [u, v] = build_log_pair(q, a, b);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dist(a, b);
  double w0 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = dist(rng);
    for (const LogSlope* s : {&u, &v}) {
      const auto y = log_basis(*s, r);
      const double p = s->dsigma(r), dp = s->ddsigma(r);
      CHECK(std::abs((dp + p * p) * y.y + q(r) * y.y) <= 1e-9 * std::abs(q(r)) * std::abs(y.y));
    }
    // u v' - u' v = (p_v - p_u) exp(sigma_u + sigma_v)
    const double lw = u.log_value(r) + v.log_value(r);
    const double w = (v.dsigma(r) - u.dsigma(r)) * std::exp(lw - (u.log_value(a) + v.log_value(a)));
    if (i == 0) w0 = (v.dsigma(a) - u.dsigma(a));
    CHECK(std::abs(w / w0 - 1.0) <= 1e-8);
  }
  double worst = 0.0;
  for (const LogSlope* s : {&u, &v})
    for (const auto& p : s->dsigma.pieces())
      for (double x : cheb_nodes(p.a(), p.b())) worst = std::max(worst, riccati_residual(*s, q, x));
  CHECK(worst <= 1e-10);
}

TEST_CASE("slopes approach the Bessel log-derivatives in the evanescent region") {
  const double n = 100.0, k = 100.0;
  auto q = [=](double r) { return k * k + (0.25 - n * n) / (r * r); };
  const double tp = std::sqrt(n * n - 0.25) / k;
  const double a = 0.01, b = 0.9 * tp;
  auto [u, v] = build_log_pair(q, a, b);
  // log-derivative of sqrt(r) Z_n(k r)
  auto logder = [=](double r, bool second) {
    const auto s = bessel_jy_scaled(n, k * r);
    const double z = second ? s.y : s.j, zp = second ? s.yp : s.jp;
    return 0.5 / r + k * zp / z;
  };
  for (int i = 0; i <= 50; ++i) {
    // the seed transient of the increasing solution dies out within a few 1/sqrt(|Q|)
    const double r = std::min(b, 0.1 + (b - 0.1) * i / 50);
    CHECK(std::abs(u.dsigma(r) - logder(r, false)) <= 1e-9 * std::abs(logder(r, false)));
    // likewise for the decreasing one toward b, where sqrt(|Q|) is smaller
    const double rv = a + (b - 0.3 - a) * i / 50;
    CHECK(std::abs(v.dsigma(rv) - logder(rv, true)) <= 1e-9 * std::abs(logder(rv, true)));
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(build_log_pair([](double r) { return r - 1.0; }, 0.0, 2.0), PreconditionError);
  auto [u, v] = build_log_pair([](double) { return -1.0; }, 0.0, 1.0);
  CHECK_THROWS_AS(log_basis(u, 2.0), DomainError);
  CHECK_THROWS_AS(log_basis(v, -0.1), DomainError);
}
