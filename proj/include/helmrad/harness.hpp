#pragma once

// Experiment drivers, an independent dense-integration oracle for single
// modes, and the text emitters used by the command line tool.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "helmrad/scatter.hpp"

namespace helmrad {

/// Named potentials:
///   gaussian      exp(-5 r^2), R = 4
///   volcano       14 r^2 exp(-5 r^2), R = 4
///   discont       1 on (0, 1), 2 on (2, 3), 0 elsewhere, R = 3
///   square_shell  3 on [1, 2], R = 2 ("square-shell" is accepted too)
///   rsq           r^2 - 1, R = 2
///   null          0, R = 1
PotentialSpec named_potential(const std::string& name);

/// Piecewise-polynomial potential from JSON:
///   {"R": 2, "singular_points": [1],
///    "pieces": [{"a": 0, "b": 1, "poly_coeffs": [c0, c1, ...]}, ...]}
/// with q(r) = sum c_i r^i on [a, b] and 0 outside every piece.
PotentialSpec potential_from_json(const std::string& text);
PotentialSpec load_potential_file(const std::string& path);

/// "plane:<angle>" or "circular:<x>,<y>".
IncidentField parse_incident(const std::string& spec, double k);

/// Values of the normalized mode on a set of radii.
struct OracleSolution {
  std::vector<double> r;
  std::vector<double> psi;
  std::vector<double> dpsi;
  double psi_R = 0.0;
  double dpsi_R = 0.0;
  std::size_t steps = 0;
};

/// Integrates phi'' + Q phi = 0 from 1e-15 to R with an adaptive
/// Runge-Kutta-Fehlberg 7(8) method at tolerance 1e-13, span by span, starting
/// from `seed`.  The result is normalized like solve_mode.  Points must lie in
/// [1e-15, R].  Throws ConvergenceError if the step size underflows.
OracleSolution oracle_mode(const NormalFormQ& nf, const SeedValue& seed, std::vector<double> points);

/// Total field from oracle modes and the same matching formulas; used to
/// check solve_scatter.
std::vector<cplx> oracle_total_field(const ScatterProblem& prob, const IncidentField& inc, int m,
                                     const std::vector<double>& r, const std::vector<double>& t);

struct ExperimentConfig {
  std::string potential = "gaussian";
  std::string potential_file;  // used when potential == "custom"
  double k = 16.0;
  int m = 0;  // 0: automatic
  std::string incident = "plane:0.7853981633974483";
  int grid = 101;
  std::string output_dir = "results";
  double tol = 1e-12;
  int threads = 1;
  bool oracle = true;
};

struct RunReport {
  std::string potential;
  double k = 0.0;
  int m = 0;
  double precomp_seconds = 0.0;
  double solve_seconds = 0.0;
  std::optional<double> max_abs_error;
  std::size_t mode_count = 0;
  std::vector<std::size_t> piece_counts;  // per mode
  std::vector<std::size_t> interval_counts;  // per mode
};

std::string report_json(const RunReport& rep);

/// The 100 evaluation points: 50 on r = 0.999 R, 50 spread through the disc.
void evaluation_points(double R, std::vector<double>& r, std::vector<double>& t);

/// Solves, times both phases, optionally compares with the oracle (k R <=
/// 1e3), and writes report.json plus incident.txt, total.txt and
/// scattered.txt ("x y re im" per line) covering [-2R, 2R]^2.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  double k = 0.0;
  int n = 0;
  double seconds = 0.0;
  double max_abs_error = 0.0;  // NaN when no oracle applies
  std::size_t pieces = 0;
};

/// Regimes: "fixed-k" (n = 0, k/16, ..., k), "n-zero", "n-half", "n-eq-k"
/// (k = 2^8, 2^9, ... up to k).  Errors come from the closed form for rsq and
/// from the dense oracle otherwise (when k R <= 1e3).
std::vector<SweepRow> sweep_modes(const std::string& potential, double k, const std::string& regime,
                                  int repeats = 1);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct SkRow {
  double k = 0.0;
  double seconds = 0.0;
  double ratio = 0.0;  // t(k) / t(k/2), 0 for the first row
  std::size_t pieces = 0;
};

/// Time to build psi_0..psi_k, for k = kmin, 2 kmin, ..., kmax; the minimum
/// over `repeats` runs.
std::vector<SkRow> build_sk(const std::string& potential, double kmin, double kmax, int threads = 1,
                            int repeats = 1);
void write_sk_csv(std::ostream& os, const std::vector<SkRow>& rows);

/// psi from the closed form for rsq (J_{n/2}(k r^2 / 2)) and the matched
/// Bessel oracle for square_shell, normalized like solve_mode; nullopt for
/// other potentials.
std::optional<std::vector<double>> closed_form_mode(const std::string& potential, double k, int n,
                                                    const std::vector<double>& r);

}  // namespace helmrad
