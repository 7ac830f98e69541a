#include "helmrad/pbessel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace helmrad {

namespace {

constexpr double kUnderflowLog = -700.0;
constexpr double kMaxCondition = 1e12;

// A basis function at a point: exp(log) * (y, dy, ddy).
struct BasisPoint {
  double y = 0.0;
  double dy = 0.0;
  double ddy = 0.0;
  double log = 0.0;
};

// phi = exp(log) * (phi, dphi, ddphi)
struct ScaledState {
  double phi = 0.0;
  double dphi = 0.0;
  double ddphi = 0.0;
  double log = 0.0;
};

std::pair<BasisPoint, BasisPoint> basis_at(const IntervalBasis& basis, double r) {
  if (const auto* osc = std::get_if<Oscillatory>(&basis)) {
    const PhaseFn& ph = osc->phase;
    const auto b = phase_basis(ph, r);
    const double w = ph.w(r), wp = ph.dw(r), wpp = ph.ddw(r);
    const double al = r == ph.a ? 0.0 : ph.alpha(r);
    const double e3 = std::exp(1.5 * w), e1 = std::exp(0.5 * w);
    const double sn = std::sin(al), cs = std::cos(al);
    BasisPoint u{b.u, b.du, -sn * e3 + 0.5 * wp * cs * e1 - 0.5 * wpp * b.u - 0.5 * wp * b.du, 0.0};
    BasisPoint v{b.v, b.dv, -cs * e3 - 0.5 * wp * sn * e1 - 0.5 * wpp * b.v - 0.5 * wp * b.dv, 0.0};
    return {u, v};
  }
  const auto& non = std::get<Nonoscillatory>(basis);
  auto point = [r](const LogSlope& ls) {
    if (!(r >= ls.a && r <= ls.b)) throw DomainError("pbessel: r outside the interval");
    const double p = ls.dsigma(r);
    return BasisPoint{1.0, p, ls.ddsigma(r) + p * p, ls.log_value(r)};
  };
  return {point(non.up), point(non.down)};
}

ScaledState combine(const std::pair<ScaledCoeff, ScaledCoeff>& c, const std::pair<BasisPoint, BasisPoint>& b) {
  const double inf = std::numeric_limits<double>::infinity();
  const double lu = c.first.value == 0.0 ? -inf : c.first.log_scale + b.first.log;
  const double lv = c.second.value == 0.0 ? -inf : c.second.log_scale + b.second.log;
  const double top = std::max(lu, lv);
  if (top == -inf) return {0.0, 0.0, 0.0, 0.0};
  const double su = c.first.value * std::exp(lu - top), sv = c.second.value * std::exp(lv - top);
  return {su * b.first.y + sv * b.second.y, su * b.first.dy + sv * b.second.dy,
          su * b.first.ddy + sv * b.second.ddy, top};
}

// Coefficients of the basis pair reproducing (phi, phi') at x.
std::pair<ScaledCoeff, ScaledCoeff> match(const ScaledState& s, const std::pair<BasisPoint, BasisPoint>& b, double x) {
  Eigen::Matrix2d m;
  m << b.first.y, b.second.y, b.first.dy, b.second.dy;
  Eigen::Vector2d rhs(s.phi, s.dphi);
  // equilibrate rows, then columns
  for (int i = 0; i < 2; ++i) {
    const double rs = m.row(i).cwiseAbs().maxCoeff();
    if (rs == 0.0) throw StitchingError("pbessel: degenerate continuity system", x);
    m.row(i) /= rs;
    rhs(i) /= rs;
  }
  Eigen::Vector2d cs;
  for (int j = 0; j < 2; ++j) {
    cs(j) = m.col(j).cwiseAbs().maxCoeff();
    if (cs(j) == 0.0) throw StitchingError("pbessel: degenerate continuity system", x);
    m.col(j) /= cs(j);
  }
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  const auto sv = svd.singularValues();
  if (!(sv(1) > 0.0) || sv(0) / sv(1) > kMaxCondition)
    throw StitchingError("pbessel: ill-conditioned continuity system at r = " + std::to_string(x), x);
  const Eigen::Vector2d sol = m.inverse() * rhs;
  return {ScaledCoeff{sol(0) / cs(0), s.log - b.first.log}, ScaledCoeff{sol(1) / cs(1), s.log - b.second.log}};
}

std::size_t interval_index(const std::vector<double>& partition, double r) {
  const auto it = std::upper_bound(partition.begin(), partition.end(), r);
  std::size_t j = static_cast<std::size_t>(it - partition.begin());
  j = j == 0 ? 0 : j - 1;
  return std::min(j, partition.size() - 2);
}

}  // namespace

double NormalFormQ::operator()(double r) const {
  return k * k * (1.0 + pot.q(r)) + (0.25 - static_cast<double>(n) * n) / (r * r);
}

double NormalFormQ::on_span(double r, double lo, double hi) const {
  const double eps = std::numeric_limits<double>::epsilon();
  const double inner = std::clamp(r, lo + 4 * eps * std::abs(lo), hi - 4 * eps * std::abs(hi));
  return k * k * (1.0 + pot.q(inner)) + (0.25 - static_cast<double>(n) * n) / (r * r);
}

std::vector<double> NormalFormQ::span_points() const {
  std::vector<double> pts{kOriginCutoff};
  for (double c : pot.singular_points)
    if (c > kOriginCutoff && c < pot.R && c > pts.back()) pts.push_back(c);
  pts.push_back(pot.R);
  return pts;
}

std::vector<double> build_partition(const NormalFormQ& nf, double tol) {
  const double R = nf.pot.R;
  if (!(R > kOriginCutoff)) throw DomainError("build_partition: R must exceed 1e-15");
  const auto spans = nf.span_points();
  // candidate points tagged with whether they are breakpoints of q
  std::vector<std::pair<double, bool>> cand;
  for (std::size_t i = 1; i + 1 < spans.size(); ++i) cand.emplace_back(spans[i], true);
  const double nn = static_cast<double>(nf.n) * nf.n;
  for (std::size_t i = 0; i + 1 < spans.size(); ++i) {
    const double lo = spans[i], hi = spans[i + 1];
    // r^2 Q is smooth up to r = 0 and has the same zeros
    const auto g = [&](double r) {
      const double eps = std::numeric_limits<double>::epsilon();
      const double inner = std::clamp(r, lo + 4 * eps * std::abs(lo), hi - 4 * eps * std::abs(hi));
      return nf.k * nf.k * (1.0 + nf.pot.q(inner)) * r * r + 0.25 - nn;
    };
    const PiecewiseCheb fit = adaptive_fit(g, lo, hi, tol);
    for (double x : cheb_roots(fit))
      if (x > kOriginCutoff && x < R) cand.emplace_back(x, false);
  }
  std::sort(cand.begin(), cand.end());
  std::vector<double> out{kOriginCutoff};
  bool last_fixed = true;  // whether out.back() must not move
  const double merge = 1e-12 * R;
  for (const auto& [x, singular] : cand) {
    if (x - out.back() > merge) {
      out.push_back(x);
      last_fixed = singular;
    } else if (singular && !last_fixed && out.size() > 1) {
      out.back() = x;
      last_fixed = true;
    }
  }
  if (R - out.back() > merge) {
    out.push_back(R);
  } else if (out.size() > 1) {
    out.back() = R;
  } else {
    out.push_back(R);
  }
  return out;
}

SeedValue seed_values(const NormalFormQ& nf) {
  const double one_q = 1.0 + nf.pot.q0;
  if (!(one_q >= 0.0)) throw PreconditionError("seed_values: 1 + q(0) must not be negative");
  const double c = nf.k * std::sqrt(one_q), r = kOriginCutoff, n = nf.n;
  SeedValue s;
  if (c == 0.0) {
    // 1 + q vanishes at the origin: only the leading power r^(n + 1/2) survives
    s.log_scale = (n + 0.5) * std::log(r);
    s.phi = 1.0;
    s.dphi = (n + 0.5) / r;
    return s;
  }
  // sqrt(r) J_n(c r) = sqrt(r) (c r / 2)^n / n! (1 - (c r)^2 / (4 (n + 1)) + ...)
  const double x2 = 0.25 * c * c * r * r;
  s.log_scale = 0.5 * std::log(r) + n * std::log(0.5 * c * r) - std::lgamma(n + 1.0);
  s.phi = 1.0 - x2 / (n + 1.0);
  s.dphi = (n + 0.5) / r * s.phi - 2.0 * x2 / (r * (n + 1.0));
  return s;
}

std::size_t ModeSolution::piece_count() const {
  std::size_t total = 0;
  for (const auto& b : bases) {
    if (const auto* osc = std::get_if<Oscillatory>(&b))
      total += osc->phase.w.size();
    else
      total += std::get<Nonoscillatory>(b).up.dsigma.size() + std::get<Nonoscillatory>(b).down.dsigma.size();
  }
  return total;
}

ModeSolution solve_mode(const NormalFormQ& nf, double tol) {
  if (!(nf.k > 0.0)) throw DomainError("solve_mode: k must be positive");
  if (nf.n < 0) throw DomainError("solve_mode: n must be nonnegative");
  const SeedValue seed = seed_values(nf);

  ModeSolution ms;
  ms.n = nf.n;
  ms.k = nf.k;
  ms.partition = build_partition(nf, tol);
  const auto spans = nf.span_points();
  const std::size_t t = ms.partition.size() - 1;
  ms.bases.reserve(t);
  for (std::size_t j = 0; j < t; ++j) {
    const double a = ms.partition[j], b = ms.partition[j + 1], mid = 0.5 * (a + b);
    const std::size_t s = interval_index(spans, mid);
    const double lo = spans[s], hi = spans[s + 1];
    const std::function<double(double)> q = [&nf, lo, hi](double r) { return nf.on_span(r, lo, hi); };
    if (q(mid) > 0.0) {
      ms.bases.emplace_back(Oscillatory{build_phase(q, a, b, tol)});
    } else {
      auto [up, down] = build_log_pair(q, a, b, tol);
      ms.bases.emplace_back(Nonoscillatory{std::move(up), std::move(down)});
    }
  }

  ScaledState state{seed.phi, seed.dphi, 0.0, seed.log_scale};
  ms.coeffs.reserve(t);
  for (std::size_t j = 0; j < t; ++j) {
    const double x = ms.partition[j];
    ms.coeffs.push_back(match(state, basis_at(ms.bases[j], x), x));
    state = combine(ms.coeffs.back(), basis_at(ms.bases[j], ms.partition[j + 1]));
  }

  const double R = nf.pot.R, sr = std::sqrt(R);
  const double psi = state.phi / sr, dpsi = (state.dphi - state.phi / (2 * R)) / sr;
  const double size = std::max(std::abs(psi), std::abs(dpsi) / nf.k);
  if (!(size > 0.0) || !std::isfinite(size)) throw StitchingError("solve_mode: solution vanishes at R", R);
  ms.norm_log = state.log + std::log(size);
  ms.psi_R = psi / size;
  ms.dpsi_R = dpsi / size;
  return ms;
}

NormalValue eval_normal(const ModeSolution& ms, std::size_t j, double r) {
  if (j >= ms.intervals()) throw DomainError("eval_normal: interval index out of range");
  const ScaledState s = combine(ms.coeffs[j], basis_at(ms.bases[j], r));
  const double shift = s.log - ms.norm_log;
  if (shift < kUnderflowLog || (s.phi == 0.0 && s.dphi == 0.0)) return {};
  const double f = std::exp(shift);
  return {s.phi * f, s.dphi * f, s.ddphi * f};
}

NormalValue eval_normal(const ModeSolution& ms, double r) {
  if (!(r >= kOriginCutoff && r <= ms.partition.back())) throw DomainError("eval_normal: r outside [1e-15, R]");
  return eval_normal(ms, interval_index(ms.partition, r), r);
}

std::pair<double, double> eval_mode(const ModeSolution& ms, double r) {
  if (!(r >= kOriginCutoff && r <= ms.partition.back())) throw DomainError("eval_mode: r outside [1e-15, R]");
  if (r == ms.partition.back()) return {ms.psi_R, ms.dpsi_R};
  const NormalValue v = eval_normal(ms, r);
  const double sr = std::sqrt(r);
  return {v.phi / sr, (v.dphi - v.phi / (2 * r)) / sr};
}

}  // namespace helmrad
