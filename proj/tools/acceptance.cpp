// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "helmrad/harness.hpp"

using namespace helmrad;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail, double seconds) {
  std::printf("[%s] %d %s: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> hundred_points(double R) {
  std::vector<double> r;
  for (int i = 1; i <= 100; ++i) r.push_back(R * i / 100.0);
  return r;
}

// Single modes against a closed form: worst error and worst time.
void closed_form_criterion(int id, const char* name, const std::string& pot, const std::vector<double>& ks,
                           auto orders) {
  const auto t0 = Clock::now();
  const PotentialSpec spec = named_potential(pot);
  const auto pts = hundred_points(spec.R);
  double worst = 0.0, slowest = 0.0;
  bool ok = true;
  for (double k : ks) {
    for (int n : orders(k)) {
      const auto t1 = Clock::now();
      const auto ms = solve_mode({k, n, spec});
      const double dt = since(t1);
      const auto exact = closed_form_mode(pot, k, n, pts);
      double err = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(eval_mode(ms, pts[i]).first - (*exact)[i]));
      std::printf("    k=%g n=%d err=%.3e time=%.3f s\n", k, n, err, dt);
      worst = std::max(worst, err);
      slowest = std::max(slowest, dt);
      ok = ok && err <= 1e-9 && dt < 10.0;
    }
  }
  report(id, name, ok, fmt("max error %.3e (<= 1e-9), max time %.3f s (< 10 s)", worst, slowest), since(t0));
}

void quasilinear_scaling() {
  const auto t0 = Clock::now();
  const auto rows = build_sk("square_shell", 256.0, 2048.0, 1, 2);
  bool ok = true;
  std::string detail = "ratios";
  for (const auto& r : rows) {
    std::printf("    k=%g time=%.3f s pieces=%zu ratio=%.3f\n", r.k, r.seconds, r.pieces, r.ratio);
    if (r.ratio == 0.0) continue;
    detail += fmt(" %.3f", r.ratio);
    ok = ok && r.ratio >= 1.4 && r.ratio <= 2.6;
  }
  report(3, "quasilinear S_k construction", ok, detail + " (each in [1.4, 2.6])", since(t0));
}

void log_growth() {
  const auto t0 = Clock::now();
  const auto rows = sweep_modes("rsq", 4096.0, "n-eq-k", 7);
  // least squares t = c0 + c1 log k
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double x = std::log(r.k), y = r.seconds;
    std::printf("    k=%g n=%d time=%.4f s pieces=%zu err=%.3e\n", r.k, r.n, r.seconds, r.pieces, r.max_abs_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double N = static_cast<double>(rows.size());
  const double slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
  const double growth = rows.back().seconds / rows.front().seconds;
  report(4, "per-mode log growth", slope > 0.0 && growth <= 4.0,
         fmt("slope %.3e s per unit log k (> 0), t(4096)/t(256) = %.3f (<= 4)", slope, growth), since(t0));
}

ScatterSolution gaussian_solution(double& precomp) {
  const ScatterProblem prob{16.0, named_potential("gaussian"), 100, 1e-12};
  const auto t0 = Clock::now();
  auto sol = solve_scatter(prob, parse_incident("plane:0.7853981633974483", 16.0));
  precomp = since(t0);
  return sol;
}

void full_scattering(const ScatterSolution& sol, double solve_time) {
  const auto t0 = Clock::now();
  std::vector<double> r, t;
  evaluation_points(sol.R, r, t);
  const ScatterProblem prob{sol.k, named_potential("gaussian"), sol.m, 1e-12};
  const auto ref = oracle_total_field(prob, sol.incident, sol.m, r, t);
  double err = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) err = std::max(err, std::abs(eval_total(sol, r[i], t[i]) - ref[i]));
  report(5, "gaussian scattering vs oracle", err <= 1e-10 && solve_time < 30.0,
         fmt("k=16 m=%d R=%g, max field error %.3e (<= 1e-10), solve %.3f s (< 30 s)", sol.m, sol.R, err, solve_time),
         since(t0) + solve_time);
}

void null_potential() {
  const auto t0 = Clock::now();
  const double k = 64.0;
  const IncidentField inc = parse_incident("plane:0.4", k);
  const auto sol = solve_scatter({k, named_potential("null"), 0, 1e-12}, inc);
  double bmax = 0.0;
  for (const cplx& b : sol.b) bmax = std::max(bmax, std::abs(b));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> rr(1e-6, sol.R), tt(0.0, 2 * std::numbers::pi);
  double ferr = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = rr(rng), t = tt(rng);
    ferr = std::max(ferr, std::abs(eval_total(sol, r, t) - inc.value(r, t)));
  }
  report(6, "null potential", bmax <= 1e-11 && ferr <= 1e-10,
         fmt("m=%d, max |b_n| %.3e (<= 1e-11), interior field error %.3e (<= 1e-10)", sol.m, bmax, ferr), since(t0));
}

struct Worst {
  double kummer = 0, riccati = 0, jump = 0;
};

void mode_invariants(const NormalFormQ& nf, const ModeSolution& ms, Worst& w) {
  const auto spans = nf.span_points();
  for (std::size_t j = 0; j < ms.intervals(); ++j) {
    const double a = ms.partition[j], b = ms.partition[j + 1];
    const auto s = static_cast<std::size_t>(std::upper_bound(spans.begin(), spans.end(), 0.5 * (a + b)) - spans.begin()) - 1;
    const double lo = spans[s], hi = spans[s + 1];
    const std::function<double(double)> q = [&nf, lo, hi](double r) { return nf.on_span(r, lo, hi); };
    if (const auto* o = std::get_if<Oscillatory>(&ms.bases[j])) {
      for (const auto& p : o->phase.w.pieces())
        for (double x : cheb_nodes(p.a(), p.b())) w.kummer = std::max(w.kummer, kummer_residual(o->phase, q, x));
    } else {
      const auto& no = std::get<Nonoscillatory>(ms.bases[j]);
      for (const LogSlope* ls : {&no.up, &no.down})
        for (const auto& p : ls->dsigma.pieces())
          for (double x : cheb_nodes(p.a(), p.b())) w.riccati = std::max(w.riccati, riccati_residual(*ls, q, x));
    }
    if (j == 0) continue;
    const auto l = eval_normal(ms, j - 1, a), r = eval_normal(ms, j, a);
    const double scale = std::max({std::abs(l.phi), std::abs(r.phi), std::abs(l.dphi) / ms.k, std::abs(r.dphi) / ms.k});
    if (scale == 0.0) continue;
    w.jump = std::max({w.jump, std::abs(l.phi - r.phi) / scale, std::abs(l.dphi - r.dphi) / (ms.k * scale)});
  }
}

void invariant_suite(const ScatterSolution& gsol) {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;

  Worst w;
  const PotentialSpec gauss = named_potential("gaussian");
  for (const auto& ms : gsol.modes) mode_invariants({gsol.k, ms.n, gauss}, ms, w);
  for (const char* pot : {"square_shell", "rsq", "discont", "volcano"}) {
    const PotentialSpec spec = named_potential(pot);
    for (int n : {0, 64, 128, 256, 400}) {
      const NormalFormQ nf{256.0, n, spec};
      mode_invariants(nf, solve_mode(nf), w);
    }
  }
  ok = ok && w.kummer <= 1e-10 && w.riccati <= 1e-10 && w.jump <= 1e-10;
  detail += fmt("Kummer %.2e, Riccati %.2e, interface jump %.2e", w.kummer, w.riccati, w.jump);

  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> nu(0.0, 500.0), lx(std::log(1e-2), std::log(1e3));
  double wr = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto v = bessel_jy_scaled(nu(rng), std::exp(lx(rng)));
    const double wron = (v.j * v.yp - v.jp * v.y) * std::exp(v.log_j + v.log_y);
    wr = std::max(wr, std::abs(wron * std::numbers::pi * v.arg / 2.0 - 1.0));
  }
  ok = ok && wr <= 1e-10;
  detail += fmt(", Wronskian %.2e", wr);

  const double delta = 1.3;
  const ScatterProblem prob{gsol.k, gauss, gsol.m, 1e-12};
  const auto theta = std::get<PlaneWave>(gsol.incident.kind).theta0;
  const auto rot = solve_with_modes(prob, {PlaneWave{theta + delta}, gsol.k}, gsol.modes);
  double eq = 0.0;
  std::uniform_real_distribution<double> rr(0.01, gsol.R), tt(0.0, 2 * std::numbers::pi);
  for (int i = 0; i < 100; ++i) {
    const double r = rr(rng), t = tt(rng);
    eq = std::max(eq, std::abs(eval_total(rot, r, t) - eval_total(gsol, r, t - delta)));
  }
  ok = ok && eq <= 1e-10;
  detail += fmt(", rotation %.2e", eq);

  double back = 0.0;
  for (const ScatterSolution* s : {&gsol, &rot})
    for (int n = -s->m; n <= s->m; ++n) {
      const double scale = std::abs(s->boundary.c_at(n)) + std::abs(s->boundary.d_at(n));
      if (scale > 0.0) back = std::max(back, matching_residual(*s, n) / scale);
    }
  ok = ok && back <= 1e-10;
  detail += fmt(", 2x2 residual %.2e (all <= 1e-10)", back);

  const double elapsed = since(t0);
  report(7, "invariant suite", ok && elapsed < 300.0, detail, elapsed);
}

}  // namespace

int main() {
  std::printf("helmrad acceptance\n");
  closed_form_criterion(1, "analytic r^2-1 modes", "rsq", {256.0, 1024.0}, [](double k) {
    return std::vector<int>{0, static_cast<int>(k / 2), static_cast<int>(k)};
  });
  closed_form_criterion(2, "square shell transfer-matrix modes", "square_shell", {256.0},
                        [](double) { return std::vector<int>{0, 64, 256}; });
  quasilinear_scaling();
  log_growth();
  double solve_time = 0.0;
  const auto gsol = gaussian_solution(solve_time);
  full_scattering(gsol, solve_time);
  null_potential();
  invariant_suite(gsol);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures;
}
