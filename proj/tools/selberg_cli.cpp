#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "selberg/cli.hpp"

int main(int argc, char** argv) {
  using namespace selberg::cli;
  RunConfig cfg;
  std::string mode = "value";
  std::string format = "json";

  CLI::App app{"Selberg zeta functions of Hecke triangle groups via transfer operators"};
  app.add_option("--mode", mode, "value | line | verify-phi | oracle | partition | table1")->capture_default_str();
  app.add_option("--q", cfg.q, "Hecke group index (q >= 3)")->capture_default_str();
  app.add_option("--s", cfg.s, "complex argument, e.g. 0.5+5i")->capture_default_str();
  app.add_option("--t-min", cfg.t_min)->capture_default_str();
  app.add_option("--t-max", cfg.t_max)->capture_default_str();
  app.add_option("--t-step", cfg.t_step)->capture_default_str();
  app.add_option("--n0", cfg.n0, "initial truncation order N")->capture_default_str();
  app.add_option("--delta", cfg.delta, "eigenvalue matching threshold")->capture_default_str();
  app.add_option("--eps", cfg.eps, "target tail |lambda_K|")->capture_default_str();
  app.add_option("--prec", cfg.prec, "working precision in decimal digits")->capture_default_str();
  app.add_option("--n-max", cfg.n_max)->capture_default_str();
  app.add_option("--prec-max", cfg.prec_max)->capture_default_str();
  app.add_option("--time-budget", cfg.time_budget, "seconds per value before escalation stops (0: none)");
  app.add_option("--c", cfg.c, "sign c in Z(1-s) = c phi Psi Z(s)")->capture_default_str();
  app.add_option("--n-values", cfg.n_values, "table1: orders N per precision")->delimiter(',');
  app.add_option("--norm-max", cfg.norm_max, "oracle: norm cutoff X")->capture_default_str();
  app.add_option("--word-length", cfg.word_length, "oracle: maximal word length L")->capture_default_str();
  app.add_option("--n-check", cfg.n_check, "partition: digits checked by validation")->capture_default_str();
  app.add_option("--phi-table", cfg.phi_table, "scattering values for q >= 4");
  app.add_option("--cache-dir", cfg.cache_dir, "directory for the Bernoulli cache");
  app.add_option("--out", cfg.out, "output file (default stdout)");
  app.add_option("--format", format, "json | csv")->capture_default_str();
  app.add_option("--workers", cfg.workers, "threads for grid modes (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : exit_code::config_error;
  }

  try {
    cfg.mode = parse_mode(mode);
    cfg.format = parse_format(format);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  if (cfg.out.empty()) return run(cfg, std::cout, std::cerr);
  std::ofstream file(cfg.out);
  if (!file) {
    std::cerr << "cannot open " << cfg.out << '\n';
    return exit_code::config_error;
  }
  return run(cfg, file, std::cerr);
}
