#pragma once

// The damping nonlinearity F(v) = (omega . grad_phi v) * int_{T^d} |grad v|^2 dx
// and its derivatives. All spatial integrals are evaluated in mode space.

#include "qpbeam/fourier.hpp"

namespace qpbeam {

/// b(phi) = int |grad v|^2 dx as a phase-only field. Stored at twice the
/// source cutoff, where the convolution is exact.
struct DampingCoefficient {
  FourierField b;
  int source_cutoff = 0;
  double mean() const;
};

/// Throws SpatialMeanError when v carries j = 0 modes.
void require_zero_spatial_mean(const FourierField& v, const char* what);

DampingCoefficient damping_coefficient(const FourierField& v);

/// F(v) truncated to the box of v.
FourierField apply_F(const FourierField& v, const FrequencyVector& omega);

/// DF(v)[h] truncated to the larger of the two cutoffs.
FourierField apply_DF(const FourierField& v, const FourierField& h, const FrequencyVector& omega);

/// R h = 2 (omega . grad v) int grad v . grad h dx.
FourierField apply_R(const FourierField& v, const FourierField& h, const FrequencyVector& omega);

/// DF(v) as a reusable linear map: b(v) and omega . grad v are formed once.
class DampingLinearization {
 public:
  DampingLinearization(const FourierField& v, const FrequencyVector& omega);

  const FourierField& v() const noexcept { return v_; }
  const FourierField& b() const noexcept { return b_.b; }
  const FrequencyVector& omega() const noexcept { return omega_; }
  double mu() const { return b_.mean(); }

  /// Results are truncated to out_cutoff (default: cutoff of h).
  FourierField DF(const FourierField& h, int out_cutoff = 0) const;
  FourierField R(const FourierField& h, int out_cutoff = 0) const;
  /// b . (omega . grad h)
  FourierField b_times_derivative(const FourierField& h, int out_cutoff = 0) const;

 private:
  FourierField v_;
  FrequencyVector omega_;
  DampingCoefficient b_;
  FourierField dv_;
};

struct TaylorRemainder {
  FourierField direct;       ///< F(v+h) - F(v) - DF(v)[h]
  FourierField closed_form;  ///< (w.grad v)|grad h|^2 + 2 (w.grad h)<grad v,grad h> + (w.grad h)|grad h|^2
  double discrepancy = 0.0;  ///< max coefficient difference of the two routes
};

TaylorRemainder taylor_remainder(const FourierField& v, const FourierField& h, const FrequencyVector& omega);

}  // namespace qpbeam
