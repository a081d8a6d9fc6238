#pragma once

#include <string>
#include <vector>

#include "conegl/minimizer.hpp"

namespace conegl {

// Resolved experiment configuration; round-trips losslessly through JSON.
struct ExperimentConfig {
  int schema_version = 1;
  double alpha = kPi;
  int dbar = 1;
  std::vector<double> epsilons = {0.1};
  int n_r = 96;
  int n_theta = 192;
  double r_min = 1e-3;
  SolverOptions solver;
  std::string output_dir = "out";

  // mtable
  int d_min = -5;
  int d_max = 5;
  int alpha_count = 50;
  // growth
  int growth_balls = 4;
  double growth_t_final = -1.0;  // < 0: grow until the radius sum reaches 0.5
  // renorm
  int landscape_samples = 48;
  // core-energy
  int core_which = 0;  // 0 = both problems
  double core_eta = 1.0;
  // fit
  std::vector<std::string> fit_inputs;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ExperimentConfig&) const = default;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

// Subcommand drivers; each writes its artifacts under cfg.output_dir and
// throws on validation or numerical failure.
void run_minimize(const ExperimentConfig& cfg);
void run_mtable(const ExperimentConfig& cfg);
void run_growth(const ExperimentConfig& cfg);
void run_renorm(const ExperimentConfig& cfg);
void run_core_energy(const ExperimentConfig& cfg);
void run_fit(const ExperimentConfig& cfg);

// Batch entry point. Exit codes: 0 ok, 1 validation error, 2 numerical
// failure. Honors the CONEGL_OUTPUT_ROOT environment variable.
int cli_main(int argc, const char* const* argv);

}  // namespace conegl
