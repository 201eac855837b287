#include "qpbeam/averaged_solver.hpp"

#include <cmath>

namespace qpbeam {

FourierField solve_average(const FourierField& g0, const FrequencyVector& omega, double epsilon) {
  if (!g0.phase_only()) throw ShapeError("solve_average: g0 must be phase-only");
  const FieldLayout& lay = g0.layout();
  if (g0.slice_active(0) && g0.slice(0)[lay.phase_zero()] != cplx{}) {
    throw PhaseMeanError("solve_average: g0 has nonzero phase mean");
  }
  FourierField u = phase_antiderivative(g0, omega);  // raises on resonant k
  const double e54 = std::pow(epsilon, 1.25);
  return apply_symbol(u, omega, [&](double wk, double) {
    // g/(-(wk)^2 + i eps wk) = (g/(i wk)) / (i wk + eps)
    return e54 / cplx(epsilon, wk);
  });
}

double residual_average(const FourierField& u0, const FourierField& g0, const FrequencyVector& omega,
                        double epsilon, double s) {
  FourierField r = apply_symbol(u0, omega, [epsilon](double wk, double) { return cplx(-wk * wk, epsilon * wk); });
  r.axpy(-std::pow(epsilon, 1.25), u0.cutoff() == g0.cutoff() ? g0 : rebox(g0, u0.cutoff()));
  return sobolev_norm(r, NormSpec{0.0, s});
}

AverageBound average_bound(const FourierField& u0, const FourierField& g0, double delta, double gamma,
                           double rho0, int M, double s) {
  const double lambda = static_cast<double>(M - 1) / M;
  AverageBound b;
  b.norm_rho0 = sobolev_norm(u0, NormSpec{rho0, s});
  b.norm_lambda_rho0 = sobolev_norm(u0, NormSpec{lambda * rho0, s});
  b.bound = std::pow(delta, 1.25) * gamma * gamma * sobolev_norm(g0, NormSpec{rho0, s});
  b.ok = b.norm_lambda_rho0 <= b.bound;
  return b;
}

}  // namespace qpbeam
