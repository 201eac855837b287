#pragma once

// The spatial-average equation
//     (omega.grad)^2 u0 + eps (omega.grad) u0 = eps^{5/4} g0
// solved mode by mode.

#include "qpbeam/fourier.hpp"

namespace qpbeam {

/// g0 phase-only with zero phase mean (PhaseMeanError); SmallDivisorError when
/// |omega.k| is below the default floor for a stored k != 0.
FourierField solve_average(const FourierField& g0, const FrequencyVector& omega, double epsilon);

/// ||(omega.grad)^2 u0 + eps omega.grad u0 - eps^{5/4} g0||_{phi,0,s}
double residual_average(const FourierField& u0, const FourierField& g0, const FrequencyVector& omega,
                        double epsilon, double s);

struct AverageBound {
  double norm_rho0 = 0.0;         ///< ||u0||_{phi,rho0,s}
  double norm_lambda_rho0 = 0.0;  ///< ||u0||_{phi,lambda rho0,s}
  double bound = 0.0;             ///< delta^{5/4} gamma^2 ||g0||_{phi,rho0,s}
  bool ok = false;                ///< norm_lambda_rho0 <= bound
};

AverageBound average_bound(const FourierField& u0, const FourierField& g0, double delta, double gamma,
                           double rho0, int M, double s);

}  // namespace qpbeam
