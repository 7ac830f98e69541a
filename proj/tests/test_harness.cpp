#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helmrad/harness.hpp"

using namespace helmrad;

namespace {

std::vector<double> grid_points(double R, int count, double rmin) {
  std::vector<double> r;
  for (int i = 0; i < count; ++i) r.push_back(rmin + (R - rmin) * i / (count - 1));
  return r;
}

// max |a - b / size| with size = max(|b(R)|, |b'(R)|/k)
template <typename F>
double normalized_error(const OracleSolution& os, F exact, double k, double R) {
  const auto [vR, dvR] = exact(R);
  const double size = std::max(std::abs(vR), std::abs(dvR) / k);
  double err = 0.0;
  for (std::size_t i = 0; i < os.r.size(); ++i) err = std::max(err, std::abs(os.psi[i] - exact(os.r[i]).first / size));
  return err;
}

}  // namespace

TEST_CASE("named potentials bind their formulas") {
  CHECK(named_potential("gaussian").q(0.5) == std::exp(-1.25));
  CHECK(named_potential("volcano").q(0.5) == 14 * 0.25 * std::exp(-1.25));
  const auto d = named_potential("discont");
  CHECK(d.R == 3.0);
  CHECK(d.q(0.5) == 1.0);
  CHECK(d.q(1.5) == 0.0);
  CHECK(d.q(2.5) == 2.0);
  CHECK(d.singular_points == std::vector<double>{1.0, 2.0});
  const auto s = named_potential("square-shell");
  CHECK(s.R == 2.0);
  CHECK(s.q(1.5) == 3.0);
  CHECK(s.q(0.5) == 0.0);
  CHECK_THROWS_AS(named_potential("nope"), PreconditionError);
}

TEST_CASE("custom potential from JSON") {
  const auto pot = potential_from_json(
      R"({"R": 2, "singular_points": [1], "pieces": [{"a": 0, "b": 1, "poly_coeffs": [1, 0, -1]},
                                                    {"a": 1, "b": 2, "poly_coeffs": [0.5]}]})");
  CHECK(pot.R == 2.0);
  CHECK(pot.q(0.5) == doctest::Approx(0.75));
  CHECK(pot.q(1.5) == 0.5);
  CHECK(pot.q0 == 1.0);
  CHECK(pot.singular_points == std::vector<double>{1.0});
  // usable by the mode solver
  const auto ms = solve_mode({20.0, 3, pot});
  CHECK(std::isfinite(ms.psi_R));
}

TEST_CASE("incident field strings") {
  const auto p = parse_incident("plane:0.5", 3.0);
  CHECK(std::get<PlaneWave>(p.kind).theta0 == 0.5);
  const auto c = parse_incident("circular:0,6", 3.0);
  CHECK(std::get<CircularWave>(c.kind).z0 == cplx(0.0, 6.0));
  CHECK_THROWS_AS(parse_incident("spherical:1", 1.0), PreconditionError);
}

TEST_CASE("oracle reproduces J0 for the null potential") {
  const double k = 10.0, R = 1.0;
  const NormalFormQ nf{k, 0, {[](double) { return 0.0; }, {}, R, 0.0}};
  const auto os = oracle_mode(nf, seed_values(nf), grid_points(R, 100, 0.01));
  const double err = normalized_error(os, [k](double r) {
    const auto b = bessel_jy(0.0, k * r);
    return std::pair{b.j, k * b.jp};
  }, k, R);
  CHECK(err <= 1e-11);
}

TEST_CASE("oracle reproduces the r^2 family") {
  const double k = 32.0, R = 2.0;
  const NormalFormQ nf{k, 4, named_potential("rsq")};
  const auto os = oracle_mode(nf, seed_values(nf), grid_points(R, 100, 0.01));
  const double err = normalized_error(os, [k](double r) {
    const auto b = bessel_jy(2.0, k * r * r / 2);
    return std::pair{b.j, b.jp * k * r};
  }, k, R);
  CHECK(err <= 1e-10);
}

TEST_CASE("oracle and solver agree for the gaussian potential") {
  const double k = 64.0;
  const NormalFormQ nf{k, 7, named_potential("gaussian")};
  const auto pts = grid_points(nf.pot.R, 100, 0.1);
  const auto os = oracle_mode(nf, seed_values(nf), pts);
  const auto ms = solve_mode(nf);
  double err = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    err = std::max(err, std::abs(eval_mode(ms, pts[i]).first - os.psi[i]));
    mx = std::max(mx, std::abs(os.psi[i]));
  }
  CHECK(err <= 1e-9 * mx);
  CHECK(std::abs(os.psi_R - ms.psi_R) <= 1e-9);
}

TEST_CASE("closed-form modes match the solver") {
  for (const char* name : {"rsq", "square_shell"}) {
    CAPTURE(name);
    const double k = 128.0;
    const auto pts = grid_points(2.0, 50, 0.05);
    const auto exact = closed_form_mode(name, k, 40, pts);
    REQUIRE(exact);
    const auto ms = solve_mode({k, 40, named_potential(name)});
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(std::abs(eval_mode(ms, pts[i]).first - (*exact)[i]) <= 1e-9);
  }
  CHECK_FALSE(closed_form_mode("gaussian", 1.0, 0, {0.5}));
}

TEST_CASE("run_experiment writes a report and field grids") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "helmrad_run_experiment_test";
  fs::remove_all(dir);
  ExperimentConfig cfg;
  cfg.potential = "gaussian";
  cfg.k = 4.0;
  cfg.grid = 9;
  cfg.output_dir = dir.string();
  const auto rep = run_experiment(cfg);
  CHECK(rep.m >= default_order(4.0, 4.0));
  CHECK(rep.mode_count == static_cast<std::size_t>(rep.m) + 1);
  CHECK(rep.precomp_seconds >= 0.0);
  CHECK(rep.solve_seconds >= 0.0);
  REQUIRE(rep.max_abs_error);
  CHECK(*rep.max_abs_error <= 1e-10);
  for (const char* f : {"incident.txt", "total.txt", "scattered.txt"}) {
    std::ifstream in(dir / f);
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
      std::istringstream ss(line);
      double x, y, re, im;
      CHECK(static_cast<bool>(ss >> x >> y >> re >> im));
      ++lines;
    }
    CHECK(lines == 81);
  }
  std::ifstream js(dir / "report.json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j.at("m").get<int>() == rep.m);
  CHECK(j.at("piece_counts").size() == rep.mode_count);
  fs::remove_all(dir);
}

TEST_CASE("identical runs give identical coefficients") {
  const ScatterProblem prob{8.0, named_potential("volcano"), 0, 1e-12};
  const auto inc = parse_incident("circular:0,6", 8.0);
  const auto a = solve_scatter(prob, inc, 1), b = solve_scatter(prob, inc, 2);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
}

TEST_CASE("sweep rows and csv") {
  const auto rows = sweep_modes("rsq", 512.0, "n-eq-k");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].k == 256.0);
  CHECK(rows[1].n == 512);
  for (const auto& r : rows) CHECK(r.max_abs_error <= 1e-8);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str().rfind("k,n,seconds,max_abs_error,pieces\n", 0) == 0);
  CHECK_THROWS_AS(sweep_modes("rsq", 256.0, "sideways"), PreconditionError);
}

TEST_CASE("scattered fields agree with the oracle") {
  std::vector<double> r, t;
  SUBCASE("gaussian, R = 2, m = 100") {
    PotentialSpec pot = named_potential("gaussian");
    pot.R = 2.0;
    const ScatterProblem prob{16.0, pot, 100, 1e-12};
    const auto inc = parse_incident("plane:0.7853981633974483", 16.0);
    const auto sol = solve_scatter(prob, inc);
    evaluation_points(pot.R, r, t);
    const auto ref = oracle_total_field(prob, inc, 100, r, t);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(eval_total(sol, r[i], t[i]) - ref[i]) <= 1e-10);
  }
  SUBCASE("volcano, k = 16, m = 100") {
    const ScatterProblem prob{16.0, named_potential("volcano"), 100, 1e-12};
    const auto inc = parse_incident("circular:0,6", 16.0);
    const auto sol = solve_scatter(prob, inc);
    evaluation_points(prob.pot.R, r, t);
    const auto ref = oracle_total_field(prob, inc, 100, r, t);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(eval_total(sol, r[i], t[i]) - ref[i]) <= 1e-10);
  }
  SUBCASE("volcano run at k = 32") {
    ExperimentConfig cfg;
    cfg.potential = "volcano";
    cfg.k = 32.0;
    cfg.incident = "circular:0,6";
    cfg.grid = 2;
    cfg.output_dir = (std::filesystem::temp_directory_path() / "helmrad_volcano_test").string();
    const auto rep = run_experiment(cfg);
    REQUIRE(rep.max_abs_error);
    CHECK(*rep.max_abs_error <= 1e-10);
    std::filesystem::remove_all(cfg.output_dir);
  }
}
