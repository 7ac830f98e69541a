#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "helmrad/harness.hpp"

using namespace helmrad;

namespace {

int threads_or_env(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("HELMRAD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helmholtz scattering from radially symmetric potentials"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string m_arg = "auto";
  int threads = 0;
  bool no_oracle = false;
  auto* solve = app.add_subcommand("solve", "solve one scattering problem and write field grids");
  solve->add_option("--potential", cfg.potential, "gaussian, volcano, discont, square_shell, rsq, null or custom")
      ->capture_default_str();
  solve->add_option("--potential-file", cfg.potential_file, "JSON potential, implies --potential custom");
  solve->add_option("--k", cfg.k, "wavenumber")->capture_default_str()->check(CLI::PositiveNumber);
  solve->add_option("--m", m_arg, "truncation order or auto")->capture_default_str();
  solve->add_option("--incident", cfg.incident, "plane:<angle> or circular:<x>,<y>")->capture_default_str();
  solve->add_option("--tol", cfg.tol, "solver tolerance")->capture_default_str();
  solve->add_option("--threads", threads, "worker threads (default: HELMRAD_THREADS or 1)");
  solve->add_option("--grid", cfg.grid, "grid points per axis")->capture_default_str()->check(CLI::Range(2, 100000));
  solve->add_option("--out", cfg.output_dir, "output directory")->capture_default_str();
  solve->add_flag("--no-oracle", no_oracle, "skip the dense oracle comparison");

  std::string sw_potential = "rsq", regime = "n-eq-k", sw_out;
  double sw_k = 256.0;
  int sw_repeats = 1;
  auto* sweep = app.add_subcommand("sweep-modes", "per-mode timing and error series (CSV)");
  sweep->add_option("--potential", sw_potential)->capture_default_str();
  sweep->add_option("--k", sw_k)->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--regime", regime, "fixed-k, n-zero, n-half or n-eq-k")->capture_default_str();
  sweep->add_option("--repeats", sw_repeats, "timing repeats, minimum is kept")->capture_default_str();
  sweep->add_option("--out", sw_out, "CSV file (default: stdout)");

  std::string sk_potential = "square_shell", sk_out;
  double kmin = 256.0, kmax = 4096.0;
  int sk_repeats = 1;
  auto* sk = app.add_subcommand("build-sk", "time the construction of psi_0..psi_k for doubling k (CSV)");
  sk->add_option("--potential", sk_potential)->capture_default_str();
  sk->add_option("--kmin", kmin)->capture_default_str()->check(CLI::PositiveNumber);
  sk->add_option("--kmax", kmax)->capture_default_str()->check(CLI::PositiveNumber);
  sk->add_option("--threads", threads, "worker threads (default: HELMRAD_THREADS or 1)");
  sk->add_option("--repeats", sk_repeats, "timing repeats, minimum is kept")->capture_default_str();
  sk->add_option("--out", sk_out, "CSV file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  auto emit = [](const std::string& path, auto write) {
    if (path.empty()) {
      write(std::cout);
      return;
    }
    if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write(os);
  };

  try {
    if (*solve) {
      if (!cfg.potential_file.empty()) cfg.potential = "custom";
      cfg.m = m_arg == "auto" ? 0 : std::stoi(m_arg);
      if (cfg.m < 0) throw PreconditionError("--m must be auto or a positive integer");
      cfg.threads = threads_or_env(threads);
      cfg.oracle = !no_oracle;
      const auto rep = run_experiment(cfg);
      std::cout << report_json(rep) << '\n';
    } else if (*sweep) {
      const auto rows = sweep_modes(sw_potential, sw_k, regime, sw_repeats);
      emit(sw_out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
    } else if (*sk) {
      const auto rows = build_sk(sk_potential, kmin, kmax, threads_or_env(threads), sk_repeats);
      emit(sk_out, [&](std::ostream& os) { write_sk_csv(os, rows); });
    }
  } catch (const std::exception& e) {
    std::cerr << "helmrad: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
