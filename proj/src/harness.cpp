#include "helmrad/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <json.hpp>

namespace helmrad {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

constexpr double kOracleTol = 1e-13;
constexpr double kOracleMaxKR = 1e3;

std::vector<double> sweep_points(double R) {
  std::vector<double> r(100);
  for (int i = 0; i < 100; ++i) r[static_cast<std::size_t>(i)] = R * (i + 1) / 100.0;
  return r;
}

double max_deviation(const ModeSolution& ms, const std::vector<double>& r, const std::vector<double>& psi) {
  double err = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) err = std::max(err, std::abs(eval_mode(ms, r[i]).first - psi[i]));
  return err;
}

// Normalizes values given as mantissa * exp(log) like solve_mode does.
std::vector<double> normalize_like_mode(double k, double vR, double dvR, double logR,
                                        const std::vector<double>& v, const std::vector<double>& logs) {
  const double size = std::max(std::abs(vR), std::abs(dvR) / k);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double e = logs[i] - logR;
    out[i] = e < -700.0 ? 0.0 : v[i] * std::exp(e) / size;
  }
  return out;
}

}  // namespace

PotentialSpec named_potential(const std::string& name) {
  if (name == "gaussian") return {[](double r) { return std::exp(-5 * r * r); }, {}, 4.0, 1.0};
  if (name == "volcano") return {[](double r) { return 14 * r * r * std::exp(-5 * r * r); }, {}, 4.0, 0.0};
  if (name == "discont")
    return {[](double r) { return r < 1.0 ? 1.0 : (r > 2.0 && r < 3.0 ? 2.0 : 0.0); }, {1.0, 2.0}, 3.0, 1.0};
  if (name == "square_shell" || name == "square-shell")
    return {[](double r) { return r >= 1.0 && r <= 2.0 ? 3.0 : 0.0; }, {1.0}, 2.0, 0.0};
  if (name == "rsq") return {[](double r) { return r * r - 1.0; }, {}, 2.0, -1.0};
  if (name == "null") return {[](double) { return 0.0; }, {}, 1.0, 0.0};
  throw PreconditionError("unknown potential '" + name + "'");
}

PotentialSpec potential_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  struct Piece {
    double a, b;
    std::vector<double> c;
  };
  std::vector<Piece> pieces;
  for (const auto& p : j.at("pieces")) pieces.push_back({p.at("a"), p.at("b"), p.at("poly_coeffs")});
  PotentialSpec pot;
  pot.R = j.at("R").get<double>();
  if (!(pot.R > 0.0)) throw PreconditionError("custom potential: R must be positive");
  std::vector<double> sing = j.value("singular_points", std::vector<double>{});
  for (const auto& p : pieces) {
    if (!(p.b > p.a)) throw PreconditionError("custom potential: piece with b <= a");
    for (double e : {p.a, p.b})
      if (e > 0.0 && e < pot.R) sing.push_back(e);
  }
  std::sort(sing.begin(), sing.end());
  sing.erase(std::unique(sing.begin(), sing.end()), sing.end());
  pot.singular_points = sing;
  pot.q = [pieces](double r) {
    for (const auto& p : pieces) {
      if (r < p.a || r > p.b) continue;
      double s = 0.0;
      for (auto it = p.c.rbegin(); it != p.c.rend(); ++it) s = s * r + *it;
      return s;
    }
    return 0.0;
  };
  pot.q0 = pot.q(0.0);
  return pot;
}

PotentialSpec load_potential_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open potential file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return potential_from_json(ss.str());
}

IncidentField parse_incident(const std::string& spec, double k) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon), arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "plane") return {PlaneWave{arg.empty() ? 0.0 : std::stod(arg)}, k};
  if (kind == "circular") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw PreconditionError("circular incident field needs 'circular:x,y'");
    return {CircularWave{cplx(std::stod(arg.substr(0, comma)), std::stod(arg.substr(comma + 1)))}, k};
  }
  throw PreconditionError("unknown incident field '" + spec + "'");
}

OracleSolution oracle_mode(const NormalFormQ& nf, const SeedValue& seed, std::vector<double> points) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const double R = nf.pot.R, k = nf.k;
  std::sort(points.begin(), points.end());
  if (!points.empty() && (points.front() < kOriginCutoff || points.back() > R))
    throw DomainError("oracle_mode: points outside [1e-15, R]");

  // y = (phi, phi' / k) * exp(-log), kept at unit size
  State y{seed.phi, seed.dphi / k};
  double log = seed.log_scale;
  auto renormalize = [&] {
    const double s = std::max(std::abs(y[0]), std::abs(y[1]));
    if (s > 0.0 && std::isfinite(s)) {
      y[0] /= s;
      y[1] /= s;
      log += std::log(s);
    }
  };
  renormalize();

  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(kOracleTol, kOracleTol);
  OracleSolution out;
  std::vector<double> vals, dvals, logs;
  const auto spans = nf.span_points();
  double r = kOriginCutoff, dt = kOriginCutoff * 1e-2;
  std::size_t next = 0;
  for (std::size_t s = 0; s + 1 < spans.size(); ++s) {
    const double lo = spans[s], hi = spans[s + 1];
    auto sys = [&nf, lo, hi, k](const State& x, State& dx, double t) {
      dx[0] = k * x[1];
      dx[1] = -nf.on_span(t, lo, hi) * x[0] / k;
    };
    auto advance = [&](double target) {
      while (r < target) {
        double h = std::min(dt, target - r);
        const double before = h;
        if (stepper.try_step(sys, y, r, h) == odeint::success) {
          ++out.steps;
          renormalize();
          // a step shortened to hit the target should not shrink the next one
          dt = before < dt ? dt : h;
        } else {
          dt = h;
          if (dt < 1e-300 || dt <= std::numeric_limits<double>::epsilon() * r * 1e-3)
            throw ConvergenceError("oracle_mode: step size underflow", lo, hi);
        }
      }
    };
    while (next < points.size() && points[next] <= hi) {
      advance(points[next]);
      vals.push_back(y[0]);
      dvals.push_back(k * y[1]);
      logs.push_back(log);
      ++next;
    }
    advance(hi);
  }
  const double phi = y[0], dphi = k * y[1], sr = std::sqrt(R);
  const double psi = phi / sr, dpsi = (dphi - phi / (2 * R)) / sr;
  const double size = std::max(std::abs(psi), std::abs(dpsi) / k);
  out.psi_R = psi / size;
  out.dpsi_R = dpsi / size;
  const double norm = log + std::log(size);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double e = logs[i] - norm, x = points[i], f = e < -700.0 ? 0.0 : std::exp(e);
    out.r.push_back(x);
    out.psi.push_back(vals[i] * f / std::sqrt(x));
    out.dpsi.push_back((dvals[i] - vals[i] / (2 * x)) * f / std::sqrt(x));
  }
  return out;
}

std::vector<cplx> oracle_total_field(const ScatterProblem& prob, const IncidentField& inc, int m,
                                     const std::vector<double>& r, const std::vector<double>& t) {
  const BoundaryData bd = boundary_fourier(inc, prob.pot.R, m);
  // oracle_mode sorts its points; keep the permutation
  std::vector<std::size_t> order(r.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r[a] < r[b]; });
  std::vector<double> sorted(r.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = r[order[i]];

  std::vector<cplx> field(r.size(), 0.0);
  for (int n = 0; n <= m; ++n) {
    const NormalFormQ nf{prob.k, n, prob.pot};
    const OracleSolution os = oracle_mode(nf, seed_values(nf), sorted);
    const ScaledHankelValue H = hankel_h_scaled(n, prob.k * prob.pot.R);
    const cplx ap = match_mode(n, os.psi_R, os.dpsi_R, bd.c_at(n), bd.d_at(n), prob.k, H).first;
    const cplx am = n == 0 ? 0.0 : match_mode(-n, os.psi_R, os.dpsi_R, bd.c_at(-n), bd.d_at(-n), prob.k, H).first;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::size_t j = order[i];
      field[j] += os.psi[i] * (ap * std::polar(1.0, n * t[j]) + am * std::polar(1.0, -n * t[j]));
    }
  }
  return field;
}

std::string report_json(const RunReport& rep) {
  nlohmann::json j;
  j["potential"] = rep.potential;
  j["k"] = rep.k;
  j["m"] = rep.m;
  j["precomp_seconds"] = rep.precomp_seconds;
  j["solve_seconds"] = rep.solve_seconds;
  j["max_abs_error"] = rep.max_abs_error ? nlohmann::json(*rep.max_abs_error) : nlohmann::json(nullptr);
  j["mode_count"] = rep.mode_count;
  j["piece_counts"] = rep.piece_counts;
  j["interval_counts"] = rep.interval_counts;
  return j.dump(2);
}

void evaluation_points(double R, std::vector<double>& r, std::vector<double>& t) {
  r.clear();
  t.clear();
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < 50; ++i) {
    r.push_back(0.999 * R);
    t.push_back(2 * std::numbers::pi * i / 50.0);
  }
  for (int i = 0; i < 50; ++i) {
    r.push_back(R * std::sqrt((i + 0.5) / 50.0));
    t.push_back(std::fmod(golden * i, 2 * std::numbers::pi));
  }
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  if (!(cfg.k > 0.0)) throw PreconditionError("run_experiment: k must be positive");
  if (cfg.grid < 2) throw PreconditionError("run_experiment: grid must be at least 2");
  const PotentialSpec pot = cfg.potential == "custom" ? load_potential_file(cfg.potential_file)
                                                      : named_potential(cfg.potential);
  const IncidentField inc = parse_incident(cfg.incident, cfg.k);
  const ScatterProblem prob{cfg.k, pot, cfg.m, cfg.tol};

  RunReport rep;
  rep.potential = cfg.potential;
  rep.k = cfg.k;
  rep.m = choose_order(prob, inc);

  auto t0 = Clock::now();
  std::vector<ModeSolution> modes;
  try {
    modes = build_modes(prob, rep.m, cfg.threads);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("precomputation: ") + e.what());
  }
  rep.precomp_seconds = seconds_since(t0);
  rep.mode_count = modes.size();
  for (const auto& ms : modes) {
    rep.piece_counts.push_back(ms.piece_count());
    rep.interval_counts.push_back(ms.intervals());
  }

  t0 = Clock::now();
  ScatterSolution sol;
  try {
    sol = solve_with_modes(prob, inc, std::move(modes));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("solution: ") + e.what());
  }
  rep.solve_seconds = seconds_since(t0);

  if (cfg.oracle && cfg.k * pot.R <= kOracleMaxKR) {
    std::vector<double> r, t;
    evaluation_points(pot.R, r, t);
    try {
      const auto ref = oracle_total_field(prob, inc, rep.m, r, t);
      double err = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) err = std::max(err, std::abs(eval_total(sol, r[i], t[i]) - ref[i]));
      rep.max_abs_error = err;
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("oracle: ") + e.what());
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  std::ofstream fi(fs::path(cfg.output_dir) / "incident.txt"), ft(fs::path(cfg.output_dir) / "total.txt"),
      fsc(fs::path(cfg.output_dir) / "scattered.txt");
  for (auto* f : {&fi, &ft, &fsc}) f->precision(17);
  const double R = pot.R, nan = std::numeric_limits<double>::quiet_NaN();
  for (int iy = 0; iy < cfg.grid; ++iy) {
    for (int ix = 0; ix < cfg.grid; ++ix) {
      const double x = -2 * R + 4 * R * ix / (cfg.grid - 1), y = -2 * R + 4 * R * iy / (cfg.grid - 1);
      const double r = std::max(std::hypot(x, y), kOriginCutoff), t = std::atan2(y, x);
      cplx ui(nan, nan), us(nan, nan), ut(nan, nan);
      try {
        ui = inc.value(r, t);
        if (r <= R) {
          ut = eval_total(sol, r, t);
          us = ut - ui;
        } else {
          us = eval_scattered(sol, r, t);
          ut = ui + us;
        }
      } catch (const DomainError&) {
        // the source point of a circular wave
      }
      fi << x << ' ' << y << ' ' << ui.real() << ' ' << ui.imag() << '\n';
      ft << x << ' ' << y << ' ' << ut.real() << ' ' << ut.imag() << '\n';
      fsc << x << ' ' << y << ' ' << us.real() << ' ' << us.imag() << '\n';
    }
  }
  std::ofstream(fs::path(cfg.output_dir) / "report.json") << report_json(rep) << '\n';
  return rep;
}

std::optional<std::vector<double>> closed_form_mode(const std::string& potential, double k, int n,
                                                    const std::vector<double>& r) {
  std::vector<double> v, logs;
  double vR = 0.0, dvR = 0.0, logR = 0.0;
  if (potential == "rsq") {
    const double R = 2.0;
    auto at = [&](double x) { return bessel_jy_scaled(n / 2.0, k * x * x / 2); };
    const auto e = at(R);
    vR = e.j;
    dvR = e.jp * k * R;
    logR = e.log_j;
    for (double x : r) {
      const auto b = at(x);
      v.push_back(b.j);
      logs.push_back(b.log_j);
    }
    return normalize_like_mode(k, vR, dvR, logR, v, logs);
  }
  if (potential == "square_shell" || potential == "square-shell") {
    // J_n(k r) on r < 1 and A J_n(2 k r) + B Y_n(2 k r) on [1, 2], in units of J_n(k)
    const auto in = bessel_jy_scaled(n, k);
    const auto out = bessel_jy(n, 2 * k);
    const double det = out.j * out.yp - out.jp * out.y;
    const double f = in.j, fp = in.jp / 2;
    const double A = (f * out.yp - fp * out.y) / det, B = (out.j * fp - out.jp * f) / det;
    const auto e = bessel_jy(n, 4 * k);
    vR = A * e.j + B * e.y;
    dvR = 2 * k * (A * e.jp + B * e.yp);
    for (double x : r) {
      if (x < 1.0) {
        const auto b = bessel_jy_scaled(n, k * x);
        v.push_back(b.j);
        logs.push_back(b.log_j - in.log_j);
      } else {
        const auto b = bessel_jy(n, 2 * k * x);
        v.push_back(A * b.j + B * b.y);
        logs.push_back(0.0);
      }
    }
    return normalize_like_mode(k, vR, dvR, 0.0, v, logs);
  }
  return std::nullopt;
}

std::vector<SweepRow> sweep_modes(const std::string& potential, double k, const std::string& regime, int repeats) {
  const PotentialSpec pot = named_potential(potential);
  std::vector<std::pair<double, int>> cases;
  if (regime == "fixed-k") {
    for (int i = 0; i <= 16; ++i) cases.emplace_back(k, static_cast<int>(std::lround(k * i / 16.0)));
  } else if (regime == "n-zero" || regime == "n-half" || regime == "n-eq-k") {
    for (double kk = std::min(256.0, k); kk <= k * (1 + 1e-12); kk *= 2) {
      const int n = regime == "n-zero" ? 0 : regime == "n-half" ? static_cast<int>(kk / 2) : static_cast<int>(kk);
      cases.emplace_back(kk, n);
    }
  } else {
    throw PreconditionError("unknown regime '" + regime + "'");
  }
  const auto pts = sweep_points(pot.R);
  std::vector<SweepRow> rows;
  for (const auto& [kk, n] : cases) {
    SweepRow row;
    row.k = kk;
    row.n = n;
    row.seconds = std::numeric_limits<double>::infinity();
    ModeSolution ms;
    for (int rep = 0; rep < std::max(repeats, 1); ++rep) {
      const auto t0 = Clock::now();
      ms = solve_mode({kk, n, pot});
      row.seconds = std::min(row.seconds, seconds_since(t0));
    }
    row.pieces = ms.piece_count();
    if (const auto exact = closed_form_mode(potential, kk, n, pts)) {
      row.max_abs_error = max_deviation(ms, pts, *exact);
    } else if (kk * pot.R <= kOracleMaxKR) {
      const NormalFormQ nf{kk, n, pot};
      row.max_abs_error = max_deviation(ms, pts, oracle_mode(nf, seed_values(nf), pts).psi);
    } else {
      row.max_abs_error = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "k,n,seconds,max_abs_error,pieces\n";
  os.precision(6);
  for (const auto& r : rows) os << r.k << ',' << r.n << ',' << r.seconds << ',' << r.max_abs_error << ',' << r.pieces << '\n';
}

std::vector<SkRow> build_sk(const std::string& potential, double kmin, double kmax, int threads, int repeats) {
  const PotentialSpec pot = named_potential(potential);
  std::vector<SkRow> rows;
  for (double k = kmin; k <= kmax * (1 + 1e-12); k *= 2) {
    SkRow row;
    row.k = k;
    row.seconds = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < std::max(repeats, 1); ++rep) {
      const auto t0 = Clock::now();
      const auto modes = build_modes({k, pot, 0, 1e-12}, static_cast<int>(k), threads);
      row.seconds = std::min(row.seconds, seconds_since(t0));
      row.pieces = 0;
      for (const auto& ms : modes) row.pieces += ms.piece_count();
    }
    row.ratio = rows.empty() ? 0.0 : row.seconds / rows.back().seconds;
    rows.push_back(row);
  }
  return rows;
}

void write_sk_csv(std::ostream& os, const std::vector<SkRow>& rows) {
  os << "k,seconds,ratio,pieces\n";
  os.precision(6);
  for (const auto& r : rows) os << r.k << ',' << r.seconds << ',' << r.ratio << ',' << r.pieces << '\n';
}

}  // namespace helmrad
