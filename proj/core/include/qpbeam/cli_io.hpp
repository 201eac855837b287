#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qpbeam/fourier.hpp"
#include "qpbeam/frequency.hpp"
#include "qpbeam/linear_solvers.hpp"
#include "qpbeam/nash_moser.hpp"

namespace qpbeam {

struct FrequencySpec {
  enum class Kind { Vector, Golden, Liouvillean };
  Kind kind = Kind::Golden;
  std::vector<double> components;  ///< Vector: used as given (must satisfy |omega| <= 1)
  int depth = 3;                   ///< Liouvillean
};

struct Config {
  ScheduleParams schedule;
  bool gamma_auto = false;  ///< raise gamma (doubling from 2) until the certificate validates
  FrequencySpec frequency;
  std::vector<std::pair<ModeIndex, cplx>> forcing;  ///< empty: default forcing
  std::string forcing_file;                          ///< coefficient dump, resolved against the config dir
  double tol = 1e-10;
  double stop_increment = 1e-12;
  LinearMethod linear_method = LinearMethod::Conjugation;
  int residual_grid = 64;
  int sample_grid = 32;
  int certificate_kmax = 0;  ///< 0: final N
};

/// Parses flat YAML. Every violated key or precondition is collected into one
/// ConfigError. base_dir resolves relative forcing file paths.
Config parse_config(const std::string& text, const std::string& base_dir = ".");
Config load_config(const std::string& path);

/// Re-runs the precondition checks (after command-line overrides).
void validate_config(const Config& config);

FrequencyVector resolve_frequency(const Config& config);

/// cos(phi_1) cos(x_1) + 0.5 cos(phi_2) sin(x_1) (second term only when nu >= 2).
std::vector<std::pair<ModeIndex, cplx>> default_forcing_modes(int nu, int d);

/// Forcing field at the given cutoff.
FourierField build_forcing(const Config& config, int cutoff);

/// Schedule with gamma resolved (gamma_auto) for the given frequency.
Schedule resolve_schedule(const Config& config, const FrequencyVector& omega);

RunOptions run_options(const Config& config);

/// Writes "phi_1..phi_nu,x_1..x_d,U" rows on a uniform grid.
void write_grid_samples(std::ostream& os, const FourierField& U, int grid);

/// solve | check-frequency | verify | spectrum. Returns the process exit status.
int dispatch(const std::string& command, const Config& config, const std::string& out_dir, std::ostream& log);

}  // namespace qpbeam
