#include "helmrad/scatter.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "helmrad/parallel.hpp"

namespace helmrad {

namespace {

constexpr double kTrailing = 1e-12;
constexpr double kDeterminantFloor = 1e-12;
constexpr int kMaxOrderGrowth = 64;

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t idx(int n, int m) { return static_cast<std::size_t>(n + m); }

cplx sign_of_order(int n) { return (n < 0 && (-n) % 2 == 1) ? -1.0 : 1.0; }

bool trailing_small(const BoundaryData& bd) {
  double cmax = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < bd.c.size(); ++i) {
    cmax = std::max(cmax, std::abs(bd.c[i]));
    dmax = std::max(dmax, std::abs(bd.d[i]));
  }
  const double ct = std::max(std::abs(bd.c.front()), std::abs(bd.c.back()));
  const double dt = std::max(std::abs(bd.d.front()), std::abs(bd.d.back()));
  return ct <= kTrailing * cmax && dt <= kTrailing * dmax;
}

}  // namespace

cplx IncidentField::value(double r, double t) const {
  if (const auto* p = std::get_if<PlaneWave>(&kind)) return std::exp(cplx(0.0, k * r * std::cos(t - p->theta0)));
  if (const auto* c = std::get_if<CircularWave>(&kind)) {
    const double rho = std::abs(std::polar(r, t) - c->z0);
    return hankel_h(0, k * rho).h;
  }
  return std::get<SampledField>(kind).u(r, t);
}

cplx IncidentField::radial(double r, double t) const {
  if (const auto* p = std::get_if<PlaneWave>(&kind)) {
    const double ct = std::cos(t - p->theta0);
    return cplx(0.0, k * ct) * std::exp(cplx(0.0, k * r * ct));
  }
  if (const auto* c = std::get_if<CircularWave>(&kind)) {
    const cplx dz = std::polar(r, t) - c->z0;
    const double rho = std::abs(dz);
    // d rho / d r = Re((z - z0) exp(-i t)) / rho
    const double drho = (dz * std::polar(1.0, -t)).real() / rho;
    return k * hankel_h(0, k * rho).hp * drho;
  }
  return std::get<SampledField>(kind).du(r, t);
}

BoundaryData boundary_fourier(const IncidentField& inc, double R, int m) {
  if (m < 1) throw DomainError("boundary_fourier: m must be at least 1");
  std::size_t N = 1;
  while (N < static_cast<std::size_t>(4 * m + 4)) N *= 2;
  fftw_complex* in = fftw_alloc_complex(N);
  fftw_complex* out = fftw_alloc_complex(N);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(N), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  BoundaryData bd;
  bd.m = m;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(N);
  for (auto [field, target] : {std::pair{0, &bd.c}, std::pair{1, &bd.d}}) {
    for (std::size_t j = 0; j < N; ++j) {
      const double t = h * static_cast<double>(j);
      const cplx v = field == 0 ? inc.value(R, t) : inc.radial(R, t);
      in[j][0] = v.real();
      in[j][1] = v.imag();
    }
    fftw_execute(plan);
    target->resize(static_cast<std::size_t>(2 * m + 1));
    for (int n = -m; n <= m; ++n) {
      const std::size_t s = n >= 0 ? static_cast<std::size_t>(n) : N - static_cast<std::size_t>(-n);
      (*target)[idx(n, m)] = cplx(out[s][0], out[s][1]) / static_cast<double>(N);
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return bd;
}

std::pair<cplx, cplx> match_mode(int n, double psi, double dpsi, cplx c, cplx d, double k, const ScaledHankelValue& H) {
  const cplx rho = H.hp / H.h;
  const cplx det = dpsi - k * psi * rho;
  if (std::abs(det) < kDeterminantFloor * (std::abs(dpsi) + k * std::abs(psi) * std::abs(rho)))
    throw IllConditionedModeError("solve_scatter: matching determinant vanishes for mode " + std::to_string(n), n);
  return {(d - k * rho * c) / det, (psi * d - dpsi * c) / det};
}

int default_order(double R, double k) {
  return std::max(1, static_cast<int>(std::ceil(0.5 * std::numbers::pi * R * k)));
}

int choose_order(const ScatterProblem& prob, const IncidentField& inc) {
  if (prob.m > 0) return prob.m;
  const int m0 = default_order(prob.pot.R, prob.k);
  int m = m0;
  while (m < kMaxOrderGrowth * m0 && !trailing_small(boundary_fourier(inc, prob.pot.R, m))) m *= 2;
  return m;
}

std::vector<ModeSolution> build_modes(const ScatterProblem& prob, int m, int threads) {
  std::vector<ModeSolution> modes(static_cast<std::size_t>(m) + 1);
  parallel_for(modes.size(), threads, [&](std::size_t n) {
    modes[n] = solve_mode({prob.k, static_cast<int>(n), prob.pot}, prob.tol);
  });
  return modes;
}

ScatterSolution solve_with_modes(const ScatterProblem& prob, const IncidentField& inc,
                                 std::vector<ModeSolution> modes) {
  if (modes.empty()) throw DomainError("solve_with_modes: no modes");
  ScatterSolution sol;
  sol.k = prob.k;
  sol.R = prob.pot.R;
  sol.m = static_cast<int>(modes.size()) - 1;
  sol.incident = inc;
  const int m = sol.m;
  const double k = sol.k, R = sol.R;
  sol.boundary = boundary_fourier(inc, R, std::max(m, 1));
  sol.hankel_R.reserve(modes.size());
  for (int n = 0; n <= m; ++n) sol.hankel_R.push_back(hankel_h_scaled(n, k * R));

  const std::size_t len = static_cast<std::size_t>(2 * m + 1);
  sol.a.assign(len, 0.0);
  sol.b.assign(len, 0.0);
  sol.b_at_R.assign(len, 0.0);
  for (int n = -m; n <= m; ++n) {
    const int an = std::abs(n);
    const ModeSolution& ms = modes[static_cast<std::size_t>(an)];
    const ScaledHankelValue& H = sol.hankel_R[static_cast<std::size_t>(an)];
    const auto [a, bR] = match_mode(n, ms.psi_R, ms.dpsi_R, sol.boundary.c_at(n), sol.boundary.d_at(n), k, H);
    sol.a[idx(n, m)] = a;
    sol.b_at_R[idx(n, m)] = bR;
    sol.b[idx(n, m)] = bR * std::exp(-H.log) / (sign_of_order(n) * H.h);
  }
  sol.modes = std::move(modes);
  return sol;
}

ScatterSolution solve_scatter(const ScatterProblem& prob, const IncidentField& inc, int threads) {
  const int m = choose_order(prob, inc);
  return solve_with_modes(prob, inc, build_modes(prob, m, threads));
}

double matching_residual(const ScatterSolution& sol, int n) {
  if (std::abs(n) > sol.m) throw DomainError("matching_residual: mode out of range");
  const ModeSolution& ms = sol.modes[static_cast<std::size_t>(std::abs(n))];
  const ScaledHankelValue& H = sol.hankel_R[static_cast<std::size_t>(std::abs(n))];
  const cplx a = sol.a_at(n), bR = sol.b_at_R[idx(n, sol.m)];
  return std::abs(a * ms.psi_R - bR - sol.boundary.c_at(n)) +
         std::abs(a * ms.dpsi_R - sol.k * (H.hp / H.h) * bR - sol.boundary.d_at(n));
}

cplx eval_total(const ScatterSolution& sol, double r, double t) {
  if (!(r >= kOriginCutoff && r <= sol.R)) throw DomainError("eval_total: r outside [1e-15, R]");
  cplx sum = 0.0;
  for (int n = 0; n <= sol.m; ++n) {
    const double psi = eval_mode(sol.modes[static_cast<std::size_t>(n)], r).first;
    if (psi == 0.0) continue;
    if (n == 0) {
      sum += sol.a_at(0) * psi;
    } else {
      sum += psi * (sol.a_at(n) * std::polar(1.0, n * t) + sol.a_at(-n) * std::polar(1.0, -n * t));
    }
  }
  return sum;
}

cplx eval_scattered(const ScatterSolution& sol, double r, double t) {
  if (r < sol.R) return eval_total(sol, r, t) - sol.incident.value(r, t);
  const auto seq = bessel_jy_sequence(sol.m, sol.k * r);
  cplx sum = 0.0;
  for (int n = 0; n <= sol.m; ++n) {
    const ScaledHankelValue h = scaled_hankel(seq[static_cast<std::size_t>(n)]);
    const ScaledHankelValue& hR = sol.hankel_R[static_cast<std::size_t>(n)];
    const cplx ratio = h.h / hR.h * std::exp(h.log - hR.log);
    const cplx bp = sol.b_at_R[idx(n, sol.m)], bm = sol.b_at_R[idx(-n, sol.m)];
    if (n == 0) {
      sum += bp * ratio;
    } else {
      sum += ratio * (bp * std::polar(1.0, n * t) + bm * std::polar(1.0, -n * t));
    }
  }
  return sum;
}

}  // namespace helmrad
