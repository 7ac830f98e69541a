#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helmrad/cheb.hpp"

using namespace helmrad;

namespace {

PiecewiseCheb single(double a, double b, const std::function<double(double)>& f) {
  return PiecewiseCheb({ChebExpansion::fit(a, b, f)});
}

double max_error(const PiecewiseCheb& p, const std::function<double(double)>& f, int samples) {
  double err = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double x = p.a() + (p.b() - p.a()) * i / samples;
    err = std::max(err, std::abs(p(x) - f(x)));
  }
  return err;
}

}  // namespace

TEST_CASE("nodes are ascending extrema with exact endpoints") {
  auto x = cheb_nodes(2.0, 5.0);
  REQUIRE(x.size() == kChebNodes);
  CHECK(x.front() == 2.0);
  CHECK(x.back() == 5.0);
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
}

TEST_CASE("interpolant reproduces nodal values") {
  const auto x = cheb_nodes(-0.3, 1.7);
  std::vector<double> v;
  for (double t : x) v.push_back(std::exp(t) * std::sin(3 * t));
  auto e = ChebExpansion::from_values(-0.3, 1.7, v);
  double vmax = 0.0;
  for (double t : v) vmax = std::max(vmax, std::abs(t));
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(e(x[i]) - v[i]) <= 10 * std::numeric_limits<double>::epsilon() * vmax);
}

TEST_CASE("cheb_eval") {
  SUBCASE("constant") {
    auto f = single(0.0, 1.0, [](double) { return 3.0; });
    CHECK(cheb_eval(f, 0.5) == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("identity") {
    auto f = single(-1.0, 1.0, [](double x) { return x; });
    CHECK(std::abs(cheb_eval(f, 0.25) - 0.25) < 1e-15);
  }
  SUBCASE("cosine") {
    auto f = adaptive_fit([](double x) { return std::cos(x); }, 0.0, std::numbers::pi, 1e-14);
    CHECK(std::abs(cheb_eval(f, 1.0) - std::cos(1.0)) < 1e-14);
  }
  SUBCASE("out of range") {
    auto f = single(0.0, 1.0, [](double x) { return x; });
    CHECK_THROWS_AS(cheb_eval(f, 1.5), DomainError);
    CHECK_THROWS_AS(cheb_eval(f, -1e-3), DomainError);
  }
  SUBCASE("shared breakpoint uses the left piece") {
    PiecewiseCheb f({ChebExpansion(0.0, 1.0, {1.0}), ChebExpansion(1.0, 2.0, {2.0})});
    CHECK(f(1.0) == 1.0);
    CHECK(f.locate(1.0) == 0);
    CHECK(f(1.0 + 1e-12) == 2.0);
  }
}

TEST_CASE("cheb_diff") {
  SUBCASE("x^2 -> 2x") {
    auto d = cheb_diff(ChebExpansion::fit(0.0, 1.0, [](double x) { return x * x; }));
    for (int i = 0; i <= 50; ++i) {
      const double x = i / 50.0;
      CHECK(std::abs(d(x) - 2 * x) <= 1e-13);
    }
  }
  SUBCASE("constant -> zero") {
    auto d = cheb_diff(ChebExpansion(0.0, 3.0, {4.0, 0.0, 0.0}));
    CHECK(d.max_coeff_magnitude() == 0.0);
  }
  SUBCASE("sin -> cos") {
    auto d = cheb_diff(ChebExpansion::fit(0.0, 1.0, [](double x) { return std::sin(x); }));
    for (int i = 0; i < 100; ++i) {
      const double x = (i + 0.5) / 100.0;
      CHECK(std::abs(d(x) - std::cos(x)) <= 1e-12);
    }
  }
}

TEST_CASE("cheb_integrate") {
  SUBCASE("f = 1") {
    auto F = cheb_integrate(single(0.0, 2.0, [](double) { return 1.0; }), 0.0, 0.0);
    for (double x : {0.0, 0.3, 1.0, 2.0}) CHECK(std::abs(F(x) - x) < 1e-15);
  }
  SUBCASE("f = 2x anchored at the right end") {
    auto F = cheb_integrate(single(0.0, 1.0, [](double x) { return 2 * x; }), 1.0, 0.0);
    for (double x : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(F(x) - (x * x - 1.0)) < 1e-15);
  }
  SUBCASE("cos, piecewise, anchored at pi") {
    const double pi = std::numbers::pi;
    auto f = adaptive_fit([](double x) { return std::cos(x); }, 0.0, pi, {.tol = 1e-14, .max_depth = 3});
    // force several pieces so continuity across breakpoints is exercised
    std::vector<ChebExpansion> parts;
    for (int i = 0; i < 4; ++i)
      parts.push_back(ChebExpansion::fit(i * pi / 4, (i + 1) * pi / 4, [](double x) { return std::cos(x); }));
    PiecewiseCheb g(parts);
    for (const auto* p : {&f, &g}) {
      auto F = cheb_integrate(*p, pi, 0.0);
      for (int i = 0; i < 100; ++i) {
        const double x = pi * (i + 0.37) / 100.0;
        CHECK(std::abs(F(x) - (std::sin(x) - std::sin(pi))) < 1e-12);
      }
    }
  }
  SUBCASE("anchor out of range") {
    CHECK_THROWS_AS(cheb_integrate(single(0.0, 1.0, [](double x) { return x; }), 2.0, 0.0), DomainError);
  }
}

TEST_CASE("adaptive_fit") {
  SUBCASE("low degree polynomial needs one piece") {
    auto f = adaptive_fit([](double x) { return x * x; }, -1.0, 3.0, 1e-12);
    CHECK(f.size() == 1);
    CHECK(max_error(f, [](double x) { return x * x; }, 1000) <= 1e-14 * 9);
  }
  SUBCASE("kink") {
    auto fn = [](double x) { return std::abs(x - 0.5); };
    auto f = adaptive_fit(fn, 0.0, 1.0, 1e-12);
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      if (std::abs(x - 0.5) > 1e-3) err = std::max(err, std::abs(f(x) - fn(x)));
    }
    CHECK(err <= 1e-12);
    bool breakpoint_near_kink = false;
    for (double br : f.breakpoints()) breakpoint_near_kink |= std::abs(br - 0.5) < 1e-12;
    CHECK(breakpoint_near_kink);
  }
  SUBCASE("kink off the dyadic grid exhausts the depth limit next to the kink") {
    auto fn = [](double x) { return std::abs(x - 0.3); };
    try {
      adaptive_fit(fn, 0.0, 1.0, {.tol = 1e-12, .max_depth = 50});
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      // relative tolerance on |x - 0.3| cannot be met once roundoff in x - 0.3 dominates
      CHECK(std::abs(0.5 * (e.a() + e.b()) - 0.3) < 1e-6);
      CHECK(e.b() - e.a() < 1e-14);
    }
  }
  SUBCASE("oscillatory") {
    auto fn = [](double x) { return std::cos(100 * x); };
    auto f = adaptive_fit(fn, 0.0, 1.0, 1e-12);
    CHECK(f.size() > 1);
    CHECK(max_error(f, fn, 1000) <= 1e-10);
  }
  SUBCASE("depth exceeded") {
    auto fn = [](double x) { return x < 0.3 ? 0.0 : 1.0; };
    CHECK_THROWS_AS(adaptive_fit(fn, 0.0, 1.0, {.tol = 1e-12, .max_depth = 10}), ConvergenceError);
    try {
      adaptive_fit(fn, 0.0, 1.0, {.tol = 1e-12, .max_depth = 10});
    } catch (const ConvergenceError& e) {
      CHECK(e.a() <= 0.3);
      CHECK(e.b() >= 0.3);
    }
  }
}

TEST_CASE("adaptive_fit round trip on random points") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double tol = 1e-12;
  auto fn = [](double x) { return std::exp(-x * x) * std::sin(7 * x) + 0.2; };
  auto f = adaptive_fit(fn, -2.0, 2.0, tol);
  double err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    err = std::max(err, std::abs(f(x) - fn(x)));
  }
  CHECK(err <= 10 * tol);
}

TEST_CASE("differentiation undoes integration") {
  auto fn = [](double x) { return 1.0 / (1.0 + x * x); };
  auto f = adaptive_fit(fn, -3.0, 3.0, 1e-14);
  auto d = cheb_integrate(f, 0.0, 1.0).derivative();
  for (int i = 0; i <= 200; ++i) {
    const double x = -3.0 + 6.0 * i / 200;
    CHECK(std::abs(d(x) - f(x)) <= 1e-12 * std::abs(f(x)));
  }
}

TEST_CASE("cheb_roots") {
  SUBCASE("x^2 - 1") {
    auto r = cheb_roots(single(-2.0, 2.0, [](double x) { return x * x - 1; }));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] + 1) < 1e-14);
    CHECK(std::abs(r[1] - 1) < 1e-14);
  }
  SUBCASE("positive constant") { CHECK(cheb_roots(single(0.0, 1.0, [](double) { return 2.5; })).empty()); }
  SUBCASE("normal-form coefficient with a single turning point") {
    const double k = 100, n = 120;
    auto Q = [&](double r) { return k * k * r * r + (0.25 - n * n) / (r * r); };
    auto f = adaptive_fit(Q, 0.1, 2.0, 1e-13);
    auto r = cheb_roots(f);
    REQUIRE(r.size() == 1);
    const double expected = std::pow((n * n - 0.25) / (k * k), 0.25);
    CHECK(std::abs(r[0] - expected) < 1e-10);
    CHECK(std::abs(expected - 1.0954) < 1e-4);
  }
  SUBCASE("root next to the endpoint of a steep piece") {
    // the leading coefficients sit near roundoff, which pushes the colleague
    // eigenvalue outside [-1, 1]
    auto fn = [](double r) { return 1024.0 * (1.0 + 14 * r * r * std::exp(-5 * r * r)) * r * r + 0.25 - 4096.0; };
    auto r = cheb_roots(adaptive_fit(fn, 1.5, 2.0, 1e-12));
    REQUIRE(r.size() == 1);
    CHECK(r[0] > 1.9999);
    CHECK(r[0] < 2.0);
    CHECK(std::abs(fn(r[0])) <= 1e-10);
  }
  SUBCASE("root count matches dense sign changes") {
    auto fn = [](double x) { return std::sin(20 * x) + 0.3 * std::cos(7 * x + 0.1); };
    auto f = adaptive_fit(fn, 0.0, 3.0, 1e-13);
    int changes = 0;
    double prev = fn(0.0);
    for (int i = 1; i <= 10000; ++i) {
      const double v = fn(3.0 * i / 10000);
      if ((v > 0) != (prev > 0)) ++changes;
      prev = v;
    }
    auto r = cheb_roots(f);
    CHECK(static_cast<int>(r.size()) == changes);
    for (double x : r) CHECK(std::abs(fn(x)) < 1e-12);
  }
}
