#pragma once

// Conjugation of the linearized operator by multiplication with
//     beta = exp(1/2 eps^{3/2} (omega . grad)^{-1} (mu - b)),
// which turns the variable damping b(phi) into its mean mu.

#include <vector>

#include "qpbeam/fourier.hpp"
#include "qpbeam/nonlinearity.hpp"

namespace qpbeam {

/// mu = phase mean of b(v) = int |grad v|^2.
double compute_mu(const FourierField& v);

struct ReductionOptions {
  int beta_cutoff = 0;  ///< cutoff of beta, beta^{-1}; 0 means the cutoff of v
  double divisor_floor = -1.0;
  ExpOptions exp{};
};

struct ReductionData {
  double mu = 0.0;
  double epsilon = 0.0;
  FrequencyVector omega;
  FourierField b;         ///< phase-only, cutoff 2N
  FourierField exponent;  ///< w with beta = exp(w), cutoff 2N
  FourierField beta;
  FourierField beta_inv;  ///< exp(-w), not a series inverse
};

ReductionData compute_beta(const FourierField& v, const FrequencyVector& omega, double epsilon,
                           const ReductionOptions& options = {});

/// beta * h (or beta^{-1} * h), truncated to out_cutoff (default: cutoff of h).
FourierField apply_A(const FourierField& h, const ReductionData& data, bool inverse = false,
                     int out_cutoff = 0);

/// R~ h = eps^{3/2} beta^{-1} R(beta h) + c h with
/// c = beta^{-1}(w.grad)^2 beta + eps beta^{-1} w.grad beta + eps^{3/2} beta^{-1} b w.grad beta.
/// Intermediate products are truncated to the output cutoff.
class ConjugatedRemainder {
 public:
  ConjugatedRemainder(const FourierField& v, const ReductionData& data);

  FourierField operator()(const FourierField& h, int out_cutoff = 0) const;
  const FourierField& multiplier() const noexcept { return c_; }
  const ReductionData& data() const noexcept { return data_; }
  const DampingLinearization& linearization() const noexcept { return lin_; }

 private:
  ReductionData data_;
  DampingLinearization lin_;
  FourierField c_;
};

/// || 2 eps^{-3/2} beta^{-1} (omega.grad beta) + b - mu ||_{0,s} evaluated at
/// eval_cutoff (default: twice the beta cutoff).
double homological_residual(const ReductionData& data, double s, int eval_cutoff = 0);

/// L h = (w.grad)^2 h + Delta^2 h + eps w.grad h + eps^{3/2} DF(v)[h], truncated to out_cutoff.
FourierField apply_linearized_operator(const DampingLinearization& lin, double epsilon,
                                       const FourierField& h, int out_cutoff = 0);

struct DefectOptions {
  int padding = 2;                 ///< evaluation box = padding * cutoff of v
  bool beta_on_padded_box = false; ///< compute beta at the padded cutoff instead of the cutoff of v
  double s = 0.0;
  std::vector<FourierField> probes;  ///< empty: default_probes(v, 6)
};

/// Real unit probes cos(k.phi + j.x) with j from the spatial support of v and
/// |k|_1 <= cutoff/2, ordered by |k|_1.
std::vector<FourierField> default_probes(const FourierField& v, int count);

/// max over probes of ||A^{-1} L A h - (D + R~) h||_{0,s} / ||h||_{0,s} on the padded box.
double conjugation_defect(const FourierField& v, const FrequencyVector& omega, double epsilon,
                          const DefectOptions& options = {});

}  // namespace qpbeam
