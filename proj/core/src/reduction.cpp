#include "qpbeam/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace qpbeam {

double compute_mu(const FourierField& v) { return damping_coefficient(v).mean(); }

ReductionData compute_beta(const FourierField& v, const FrequencyVector& omega, double epsilon,
                           const ReductionOptions& options) {
  if (!(epsilon > 0.0)) throw Error("compute_beta: epsilon must be positive");
  ReductionData d;
  d.epsilon = epsilon;
  d.omega = omega;
  const DampingCoefficient bc = damping_coefficient(v);
  d.b = bc.b;
  d.mu = bc.mean();
  // mu - b has zero phase mean by construction
  FourierField centered = -d.b;
  if (centered.slice_active(0)) centered.mutable_slice(0)[centered.layout().phase_zero()] = 0.0;
  d.exponent = phase_antiderivative(centered, omega, options.divisor_floor);
  d.exponent *= 0.5 * std::pow(epsilon, 1.5);
  d.exponent.symmetrize();
  const int nb = options.beta_cutoff > 0 ? options.beta_cutoff : v.cutoff();
  d.beta = exp_phase_field(d.exponent, nb, options.exp);
  d.beta_inv = exp_phase_field(-d.exponent, nb, options.exp);
  return d;
}

FourierField apply_A(const FourierField& h, const ReductionData& data, bool inverse, int out_cutoff) {
  return multiply(inverse ? data.beta_inv : data.beta, h, out_cutoff > 0 ? out_cutoff : h.cutoff());
}

ConjugatedRemainder::ConjugatedRemainder(const FourierField& v, const ReductionData& data)
    : data_(data), lin_(v, data.omega) {
  const int nc = 2 * std::max(data.beta.cutoff(), v.cutoff());
  const double eps = data.epsilon;
  const FourierField dbeta = phase_derivative(data.beta, data.omega);
  const FourierField ddbeta = phase_derivative(dbeta, data.omega);
  FourierField inner = rebox(ddbeta, nc);
  inner.axpy(eps, rebox(dbeta, nc));
  inner.axpy(std::pow(eps, 1.5), multiply(data.b, dbeta, nc));
  c_ = multiply(data.beta_inv, inner, nc);
}

FourierField ConjugatedRemainder::operator()(const FourierField& h, int out_cutoff) const {
  const int nout = out_cutoff > 0 ? out_cutoff : h.cutoff();
  const FourierField bh = multiply(data_.beta, h, nout);
  FourierField out = multiply(data_.beta_inv, lin_.R(bh, nout), nout);
  out *= std::pow(data_.epsilon, 1.5);
  out += multiply(c_, h, nout);
  return out;
}

double homological_residual(const ReductionData& data, double s, int eval_cutoff) {
  const int ne = eval_cutoff > 0 ? eval_cutoff : 2 * data.beta.cutoff();
  FourierField r = multiply(data.beta_inv, phase_derivative(data.beta, data.omega), ne);
  r *= 2.0 / std::pow(data.epsilon, 1.5);
  r += rebox(data.b, ne);
  if (r.slice_active(0)) r.mutable_slice(0)[r.layout().phase_zero()] -= data.mu;
  return sobolev_norm(r, NormSpec{0.0, s});
}

FourierField apply_linearized_operator(const DampingLinearization& lin, double epsilon,
                                       const FourierField& h, int out_cutoff) {
  const int nout = out_cutoff > 0 ? out_cutoff : h.cutoff();
  const FourierField hh = nout == h.cutoff() ? h : rebox(h, nout);
  FourierField out = apply_symbol(hh, lin.omega(), [epsilon](double wk, double j2) {
    return cplx(-wk * wk + j2 * j2, epsilon * wk);
  });
  out.axpy(std::pow(epsilon, 1.5), lin.DF(hh, nout));
  return out;
}

std::vector<FourierField> default_probes(const FourierField& v, int count) {
  const FieldLayout& lay = v.layout();
  std::vector<std::vector<int>> js;
  for (std::size_t s = 0; s < lay.spatial_count(); ++s) {
    if (v.slice_active(s) && lay.spatial_l1(s) > 0) {
      const auto j = lay.spatial_mode(s);
      js.emplace_back(j.begin(), j.end());
    }
  }
  if (js.empty()) {
    js.emplace_back(static_cast<std::size_t>(v.d()), 0);
    js.back()[0] = 1;
  }
  const int kmax = v.cutoff() / 2;
  std::vector<std::tuple<int, std::size_t, std::size_t>> order;  // (|k|_1, j index, phase idx)
  for (std::size_t ji = 0; ji < js.size(); ++ji) {
    for (std::size_t idx : lay.phase_box_indices()) {
      if (lay.phase_l1(idx) <= kmax) order.emplace_back(lay.phase_l1(idx), ji, idx);
    }
  }
  std::sort(order.begin(), order.end());
  std::vector<FourierField> probes;
  std::vector<int> k(static_cast<std::size_t>(v.nu()));
  for (const auto& [l1, ji, idx] : order) {
    if (static_cast<int>(probes.size()) >= count) break;
    lay.phase_mode(idx, k);
    const std::pair<ModeIndex, cplx> e{ModeIndex{k, js[ji]}, 0.5};
    probes.push_back(field_from_modes(std::span(&e, 1), v.nu(), v.d(), v.box()));
  }
  return probes;
}

double conjugation_defect(const FourierField& v, const FrequencyVector& omega, double epsilon,
                          const DefectOptions& options) {
  const int np = options.padding * v.cutoff();
  ReductionOptions ro;
  if (options.beta_on_padded_box) ro.beta_cutoff = np;
  const ReductionData data = compute_beta(v, omega, epsilon, ro);
  const ConjugatedRemainder rt(v, data);
  const std::vector<FourierField> probes =
      options.probes.empty() ? default_probes(v, 6) : options.probes;

  const double mu = data.mu;
  const double damp = epsilon + std::pow(epsilon, 1.5) * mu;
  double worst = 0.0;
  for (const FourierField& probe : probes) {
    const FourierField h = rebox(probe, np);
    const double hn = sobolev_norm(h, NormSpec{0.0, options.s});
    if (hn == 0.0) continue;
    const FourierField Ah = apply_A(h, data, false, np);
    const FourierField lhs = apply_A(apply_linearized_operator(rt.linearization(), epsilon, Ah, np), data, true, np);
    FourierField rhs = apply_symbol(h, omega, [damp](double wk, double j2) {
      return cplx(-wk * wk + j2 * j2, damp * wk);
    });
    rhs += rt(h, np);
    worst = std::max(worst, sobolev_norm(lhs - rhs, NormSpec{0.0, options.s}) / hn);
  }
  return worst;
}

}  // namespace qpbeam
