#include "qpbeam/nonlinearity.hpp"

#include <algorithm>
#include <string>

namespace qpbeam {

namespace {

int resolve_cutoff(int out_cutoff, const FourierField& h) { return out_cutoff > 0 ? out_cutoff : h.cutoff(); }

}  // namespace

double DampingCoefficient::mean() const {
  if (!b.slice_active(0)) return 0.0;
  return b.slice(0)[b.layout().phase_zero()].real();
}

void require_zero_spatial_mean(const FourierField& v, const char* what) {
  if (v.phase_only()) {
    if (!v.is_zero()) throw SpatialMeanError(std::string(what) + ": phase-only field has nonzero spatial mean");
    return;
  }
  const std::size_t z = v.layout().zero_slot();
  if (!v.slice_active(z)) return;
  for (const cplx& c : v.slice(z)) {
    if (c != cplx{}) throw SpatialMeanError(std::string(what) + ": field carries j = 0 modes");
  }
}

DampingCoefficient damping_coefficient(const FourierField& v) {
  require_zero_spatial_mean(v, "damping_coefficient");
  DampingCoefficient out;
  out.source_cutoff = v.cutoff();
  out.b = spatial_pairing(v, v, 2 * v.cutoff(), PairingWeight::GradSquared);
  return out;
}

DampingLinearization::DampingLinearization(const FourierField& v, const FrequencyVector& omega)
    : v_(v), omega_(omega), b_(damping_coefficient(v)), dv_(phase_derivative(v, omega)) {}

FourierField DampingLinearization::b_times_derivative(const FourierField& h, int out_cutoff) const {
  require_zero_spatial_mean(h, "DF");
  return multiply(b_.b, phase_derivative(h, omega_), resolve_cutoff(out_cutoff, h));
}

FourierField DampingLinearization::R(const FourierField& h, int out_cutoff) const {
  require_zero_spatial_mean(h, "R");
  const int nout = resolve_cutoff(out_cutoff, h);
  FourierField pair = spatial_pairing(v_, h, nout + v_.cutoff(), PairingWeight::GradSquared);
  pair *= 2.0;
  FourierField out = multiply(pair, dv_, nout);
  return out;
}

FourierField DampingLinearization::DF(const FourierField& h, int out_cutoff) const {
  const int nout = resolve_cutoff(out_cutoff, h);
  FourierField out = R(h, nout);
  out += b_times_derivative(h, nout);
  return out;
}

FourierField apply_F(const FourierField& v, const FrequencyVector& omega) {
  const DampingCoefficient b = damping_coefficient(v);
  return multiply(b.b, phase_derivative(v, omega), v.cutoff());
}

FourierField apply_DF(const FourierField& v, const FourierField& h, const FrequencyVector& omega) {
  return DampingLinearization(v, omega).DF(h, std::max(v.cutoff(), h.cutoff()));
}

FourierField apply_R(const FourierField& v, const FourierField& h, const FrequencyVector& omega) {
  return DampingLinearization(v, omega).R(h, std::max(v.cutoff(), h.cutoff()));
}

TaylorRemainder taylor_remainder(const FourierField& v, const FourierField& h, const FrequencyVector& omega) {
  if (v.cutoff() != h.cutoff()) throw ShapeError("taylor_remainder: v and h must share a box");
  require_zero_spatial_mean(v, "taylor_remainder");
  require_zero_spatial_mean(h, "taylor_remainder");
  const int n = v.cutoff();
  TaylorRemainder out;

  out.direct = apply_F(v + h, omega);
  out.direct -= apply_F(v, omega);
  out.direct -= apply_DF(v, h, omega);

  const FourierField dv = phase_derivative(v, omega);
  const FourierField dh = phase_derivative(h, omega);
  const FourierField bh = spatial_pairing(h, h, 2 * n, PairingWeight::GradSquared);
  FourierField vh = spatial_pairing(v, h, 2 * n, PairingWeight::GradSquared);
  vh *= 2.0;
  out.closed_form = multiply(bh, dv, n);
  out.closed_form += multiply(vh, dh, n);
  out.closed_form += multiply(bh, dh, n);

  out.discrepancy = (out.direct - out.closed_form).max_abs();
  return out;
}

}  // namespace qpbeam
