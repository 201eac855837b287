#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpbeam/fourier.hpp"
#include "qpbeam/frequency.hpp"
#include "qpbeam/linear_solvers.hpp"

namespace qpbeam {

struct ScheduleParams {
  int nu = 2;
  int d = 1;
  double s = 2.0;
  double rho0 = 0.5;
  int M = 3;
  double gamma = 2.0;
  double delta = 0.05;
  double epsilon = 0.0375;
  int N0 = 8;
  int levels = 4;
  double tau = 2.0;  ///< admissible delta^{1/4} gamma^2
};

struct Schedule {
  ScheduleParams params;
  double lambda = 0.0;
  int k0 = 0;
  std::vector<int> N;       ///< N_n = N_0 2^n, n < levels
  std::vector<double> rho;  ///< rho_n = lambda^n rho_0
};

/// Smallest k with 2^12 / (2 lambda)^k < 1/2. Requires 2 lambda > 1.
int compute_k0(double lambda);

/// ConfigError listing every violated condition.
Schedule build_schedule(const ScheduleParams& params);

struct IterationOptions {
  double tol = 1e-10;           ///< relative fixed-point residual
  int max_iterations = 100;
  double stop_increment = 1e-12;  ///< stop once ||h_n||_{rho_n,s} falls below this; 0 disables
  LinearizedOptions linear{};
  int proxy_probes = 4;          ///< modes used by the inverse-norm proxy per level
};

struct LevelResult {
  int level = 0;
  int N = 0;
  double rho = 0.0;
  FourierField v;          ///< v_n in H_n, stored at cutoff N_n
  FourierField increment;  ///< v_n - v_{n-1} (v_0 at level 0)
  double increment_norm = 0.0;  ///< ||.||_{rho_n,s}
  int iterations = 0;
  double contraction = 0.0;
  double fixed_point_residual = 0.0;
  double projected_residual = 0.0;  ///< ||P_n F(eps,omega,v_n)||_{rho_n,s} / ||eps^{5/4} P_n f||_{rho_n,s}
  double full_residual = 0.0;       ///< same on the padded box 2N_n, in ||.||_{0,s}
  double prior_norm = 0.0;          ///< ||v_n||_{rho_n,s+4}
  bool prior_ok = false;
  double bound_shape = 0.0;  ///< delta^{1/4} Theta N^6 e^{...}; 0 when not checked
  bool bound_checked = false;
  bool bound_ok = true;      ///< increment <= 1/2 bound_shape for levels >= 2
  double inverse_proxy = 0.0;
};

/// Level 0: Picard iteration for v = L^{-1}(-eps^{3/2} P_0 F(v) + eps^{5/4} P_0 f).
LevelResult solve_level0(const FourierField& f, const FrequencyVector& omega, const Schedule& schedule,
                         const IterationOptions& options = {});

/// Level n+1 from level n via h = -L_{n+1}^{-1}(R_n(h) + r_n).
LevelResult solve_level_np1(const LevelResult& prev, const FourierField& f, const FrequencyVector& omega,
                            const Schedule& schedule, int n, const IterationOptions& options = {});

/// P_N (L v + eps^{3/2} F(v) - eps^{5/4} f) at cutoff N.
FourierField functional_residual(const FourierField& v, const FourierField& f, const FrequencyVector& omega,
                                 double epsilon, int N);

struct RunReport {
  std::vector<LevelResult> levels;
  double theta0 = 0.0;
  double theta1 = 0.0;
  bool stopped_early = false;
  bool monotone_residual = false;
  bool bounds_ok = false;
  bool prior_ok = false;
  bool residuals_ok = false;
  bool converged = false;
  std::string failure;  ///< message of the level that threw, if any
  double average_residual = 0.0;
  double coupling_defect = 0.0;  ///< ||eps^{3/2} Pi_0 (b . omega.grad u0)||_{0,s}, dropped by the split
  double final_residual_max = 0.0;  ///< max |residual| of the rescaled equation on the grid
  double final_residual_rms = 0.0;
  double mean_of_u = 0.0;  ///< |u_{0,0}|
  std::optional<NonresonanceCertificate> certificate;
};

struct RunOutput {
  RunReport report;
  FourierField u;   ///< rescaled solution u0 + v
  FourierField U;   ///< eps^{3/4} u, solution of the original equation
  FourierField u0;
};

struct RunOptions {
  IterationOptions iteration{};
  int residual_grid = 64;      ///< points per direction for the final residual
  double residual_floor = 1e-12;  ///< relative full residual treated as converged noise
  int certificate_kmax = 0;    ///< 0: final N
};

/// g with zero average over T^{nu+d}; returns a partial report if a level fails.
RunOutput run(const FourierField& g, const FrequencyVector& omega, const Schedule& schedule,
              const RunOptions& options = {});

/// Residual of the rescaled equation evaluated pointwise on sizes^{nu+d}.
struct GridResidual {
  double max_abs = 0.0;
  double rms = 0.0;
};
GridResidual pde_residual_on_grid(const FourierField& u, const FourierField& g, const FrequencyVector& omega,
                                  double epsilon, int grid);

void write_run_report(std::ostream& os, const RunReport& report, const Schedule& schedule);

}  // namespace qpbeam
