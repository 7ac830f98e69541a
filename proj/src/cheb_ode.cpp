#include "helmrad/cheb_ode.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>

namespace helmrad {

namespace {

constexpr int N = static_cast<int>(kChebNodes);
using Mat = Eigen::Matrix<double, N, N>;
using Vec = Eigen::Matrix<double, N, 1>;

const Mat& reference_integration() {
  static const Mat S = [] {
    Mat m;
    auto t = cheb_unit_nodes(kChebNodes);
    for (int j = 0; j < N; ++j) {
      std::vector<double> e(kChebNodes, 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      auto F = ChebExpansion::from_values(-1.0, 1.0, e).antiderivative();
      for (int i = 0; i < N; ++i) m(i, j) = F(t[static_cast<std::size_t>(i)]);
    }
    return m;
  }();
  return S;
}

struct PieceResult {
  bool ok = false;
  Vec y, yp, g;
  double residual = 0.0;
};

double inf_norm(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

bool finite(const Vec& v) { return v.allFinite(); }

double coefficient_tail(const Vec& values, double& max_coeff) {
  std::array<double, N> buf{};
  for (int i = 0; i < N; ++i) buf[static_cast<std::size_t>(i)] = values(i);
  auto c = cheb_coeffs_from_values<double>(std::span<const double>(buf.data(), buf.size()));
  max_coeff = 0.0;
  for (double v : c) max_coeff = std::max(max_coeff, std::abs(v));
  return std::max({std::abs(c[N - 1]), std::abs(c[N - 2]), std::abs(c[N - 3])});
}

// Solves one forward piece [l, r] with y(l) = y0, y'(l) = yp0.
PieceResult solve_piece(const OdeRhs& rhs, double l, double r, double y0, double yp0,
                        const OdeOptions& opts) {
  PieceResult res;
  const double half = 0.5 * (r - l);
  const Mat S = half * reference_integration();
  const bool second = rhs.order == 2;
  const Mat S2 = second ? Mat(S * S) : Mat(S);
  const auto tnodes = cheb_unit_nodes(kChebNodes);
  Vec x;
  for (int i = 0; i < N; ++i) x(i) = l + half * (tnodes[static_cast<std::size_t>(i)] + 1.0);
  x(N - 1) = r;

  Vec g, Y, Yp, F, Fy, Fyp;
  auto integrate_state = [&](const Vec& gv) {
    if (second) {
      Yp = Vec::Constant(yp0) + S * gv;
      Y = Vec::Constant(y0) + S * Yp;
    } else {
      Y = Vec::Constant(y0) + S * gv;
      Yp = gv;
    }
  };
  auto evaluate = [&](const Vec& gv) {
    integrate_state(gv);
    for (int i = 0; i < N; ++i) {
      RhsValue v = rhs.eval(x(i), Y(i), second ? Yp(i) : 0.0);
      F(i) = v.f;
      Fy(i) = v.df_dy;
      Fyp(i) = v.df_dyp;
    }
    return Vec(gv - F);
  };
  // roundoff level of the residual, from the size of the terms that cancel in f
  auto noise_level = [&]() {
    double m = inf_norm(F);
    for (int i = 0; i < N; ++i) m = std::max({m, std::abs(Fy(i) * Y(i)), std::abs(Fyp(i) * Yp(i))});
    return 64.0 * std::numeric_limits<double>::epsilon() * m;
  };

  // initial guess: the Taylor polynomial at l, i.e. a constant highest derivative
  g = Vec::Constant(rhs.eval(l, y0, second ? yp0 : 0.0).f);
  if (!finite(g)) return res;

  Vec R = evaluate(g);
  if (!finite(R)) return res;
  double rnorm = inf_norm(R);
  double noise = noise_level();
  const double eps_newton = 1e-14;
  double prev_step = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (int iter = 0; iter < opts.max_newton; ++iter) {
    Mat J = Mat::Identity();
    J.noalias() -= Fy.asDiagonal() * S2;
    if (second) J.noalias() -= Fyp.asDiagonal() * S;
    Eigen::PartialPivLU<Mat> lu(J);
    Vec delta = lu.solve(R);
    if (!finite(delta)) {
      if (rnorm <= noise) {
        converged = true;
        break;
      }
      return res;
    }

    double theta = 1.0;
    Vec gn, Rn;
    double rn = 0.0;
    bool accepted = false;
    double noise_n = 0.0;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      gn = g - theta * delta;
      Rn = evaluate(gn);
      rn = finite(Rn) ? inf_norm(Rn) : std::numeric_limits<double>::infinity();
      noise_n = finite(Rn) ? noise_level() : 0.0;
      if (rn <= rnorm || rn <= noise_n) {
        accepted = true;
        break;
      }
      theta *= 0.5;
    }
    if (!accepted) {
      // no descent left: fine if the current iterate is already at roundoff level
      if (rnorm <= noise) {
        converged = true;
        break;
      }
      return res;
    }

    // size of the update in y (and h*y') relative to the solution scale
    const Vec dg = theta * delta;
    const Vec dY = second ? Vec(S2 * dg) : Vec(S * dg);
    double step = inf_norm(dY);
    if (second) step = std::max(step, half * inf_norm(Vec(S * dg)));
    g = gn;
    R = Rn;
    rnorm = rn;
    noise = noise_n;
    const double yscale = std::max({inf_norm(Y), opts.y_scale, 1e-300});
    if (step <= eps_newton * yscale) {
      converged = true;
      break;
    }
    if (iter >= 4 && step > 0.5 * prev_step && step <= opts.tol * yscale) {
      converged = true;  // stagnated at roundoff level
      break;
    }
    prev_step = step;
  }
  if (!converged) return res;

  integrate_state(g);
  double cmax = 0.0;
  const double tail_y = coefficient_tail(Y, cmax);
  const double threshold_scale = std::max(cmax, opts.y_scale);
  if (!(tail_y <= opts.tol * threshold_scale)) return res;
  if (second) {
    double cmax_p = 0.0;
    const double tail_p = coefficient_tail(Yp, cmax_p);
    if (!(half * tail_p <= opts.tol * threshold_scale || tail_p <= opts.tol * opts.dy_scale)) return res;
  }

  res.ok = true;
  res.y = Y;
  res.yp = Yp;
  res.g = g;
  res.residual = rnorm;
  return res;
}

ChebExpansion piece_from(const Vec& v, double l, double r) {
  std::array<double, N> buf{};
  for (int i = 0; i < N; ++i) buf[static_cast<std::size_t>(i)] = v(i);
  return ChebExpansion::from_values(l, r, std::span<const double>(buf.data(), buf.size()));
}

OdeSolution solve_forward(const OdeRhs& rhs, double a, double b, double y0, double yp0,
                          const OdeOptions& opts) {
  std::vector<ChebExpansion> ys, yps, gs;
  std::vector<std::pair<double, double>> pending{{a, b}};
  OdeSolution sol;
  double ycur = y0, ypcur = yp0;
  while (!pending.empty()) {
    auto [l, r] = pending.back();
    pending.pop_back();
    PieceResult pr = solve_piece(rhs, l, r, ycur, ypcur, opts);
    if (pr.ok) {
      ys.push_back(piece_from(pr.y, l, r));
      yps.push_back(piece_from(pr.yp, l, r));
      gs.push_back(piece_from(pr.g, l, r));
      ycur = pr.y(N - 1);
      ypcur = pr.yp(N - 1);
      sol.max_residual = std::max(sol.max_residual, pr.residual);
      continue;
    }
    ++sol.rejected_pieces;
    const double mid = 0.5 * (l + r);
    const double limit = 32.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(l), std::abs(r));
    if (!(r - l > limit) || mid <= l || mid >= r || ys.size() + pending.size() + 2 > opts.max_pieces)
      throw ConvergenceError("solve_nonlinear_ode: subdivision limit reached on [" + std::to_string(l) +
                                 ", " + std::to_string(r) + "]",
                             l, r, pr.residual);
    pending.emplace_back(mid, r);
    pending.emplace_back(l, mid);
  }
  sol.y = PiecewiseCheb(std::move(ys));
  sol.dy = PiecewiseCheb(std::move(yps));
  sol.ddy = PiecewiseCheb(std::move(gs));
  return sol;
}

// Reflects a piecewise expansion given in s = -x back to x; `sign` flips the
// values (odd derivatives pick up a minus sign under reflection).
PiecewiseCheb reflect(const PiecewiseCheb& f, double sign) {
  std::vector<ChebExpansion> out;
  out.reserve(f.size());
  for (auto it = f.pieces().rbegin(); it != f.pieces().rend(); ++it) {
    std::vector<double> c = it->coeffs();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= (k % 2 == 0 ? sign : -sign);
    out.emplace_back(-it->b(), -it->a(), std::move(c));
  }
  return PiecewiseCheb(std::move(out));
}

}  // namespace

std::span<const double> cheb_left_integration_matrix() {
  const Mat& S = reference_integration();
  static const std::vector<double> flat = [&] {
    std::vector<double> v(static_cast<std::size_t>(N * N));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) v[static_cast<std::size_t>(i * N + j)] = S(i, j);
    return v;
  }();
  return flat;
}

OdeSolution solve_nonlinear_ode(const OdeRhs& rhs, const OdeBoundary& boundary, double a, double b,
                                const OdeOptions& opts) {
  if (!(b > a)) throw DomainError("solve_nonlinear_ode: requires a < b");
  if (rhs.order != 1 && rhs.order != 2) throw DomainError("solve_nonlinear_ode: order must be 1 or 2");
  if (!rhs.eval) throw DomainError("solve_nonlinear_ode: missing right-hand side");

  if (boundary.direction == Direction::Forward)
    return solve_forward(rhs, a, b, boundary.value, boundary.slope, opts);

  // terminal value problem: z(s) = y(-s) marches forward from s = -b
  OdeRhs reflected;
  reflected.order = rhs.order;
  reflected.eval = [&rhs](double s, double z, double zp) {
    RhsValue v = rhs.eval(-s, z, -zp);
    if (rhs.order == 1) v.f = -v.f, v.df_dy = -v.df_dy;
    else v.df_dyp = -v.df_dyp;
    return v;
  };
  OdeSolution zs = solve_forward(reflected, -b, -a, boundary.value, -boundary.slope, opts);
  OdeSolution out;
  out.y = reflect(zs.y, 1.0);
  out.dy = reflect(zs.dy, -1.0);
  out.ddy = rhs.order == 2 ? reflect(zs.ddy, 1.0) : out.dy;
  out.max_residual = zs.max_residual;
  out.rejected_pieces = zs.rejected_pieces;
  return out;
}

}  // namespace helmrad
