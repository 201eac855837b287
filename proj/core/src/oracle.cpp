#include "qpbeam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "qpbeam/nonlinearity.hpp"
#include "qpbeam/reduction.hpp"

namespace qpbeam {

std::vector<std::vector<int>> ModeBasis::spatial_support(std::span<const FourierField* const> fields) {
  std::set<std::vector<int>> js;
  for (const FourierField* f : fields) {
    const FieldLayout& lay = f->layout();
    for (std::size_t s = 0; s < lay.spatial_count(); ++s) {
      if (!f->slice_active(s) || lay.spatial_l1(s) == 0) continue;
      const auto sl = f->slice(s);
      if (std::all_of(sl.begin(), sl.end(), [](const cplx& c) { return c == cplx{}; })) continue;
      const auto j = lay.spatial_mode(s);
      std::vector<int> jj(j.begin(), j.end());
      js.insert(jj);
      for (int& x : jj) x = -x;
      js.insert(jj);
    }
  }
  return {js.begin(), js.end()};
}

ModeBasis ModeBasis::with_spatial_support(int nu, int d, int cutoff, std::span<const std::vector<int>> spatial) {
  ModeBasis b;
  b.nu_ = nu;
  b.d_ = d;
  b.cutoff_ = cutoff;
  const auto lay = FieldLayout::get(nu, d, cutoff, Arity::Full);
  std::vector<int> k(static_cast<std::size_t>(nu));
  for (const auto& j : spatial) {
    const int slot = lay->spatial_slot(j);
    if (slot < 0 || static_cast<std::size_t>(slot) == lay->zero_slot()) continue;
    for (std::size_t idx : lay->phase_box_indices()) {
      lay->phase_mode(idx, k);
      b.modes_.push_back(ModeIndex{k, j});
      b.slots_.emplace_back(static_cast<std::size_t>(slot), idx);
    }
  }
  return b;
}

Eigen::VectorXcd ModeBasis::to_vector(const FourierField& u) const {
  if (u.cutoff() != cutoff_ || u.phase_only()) throw ShapeError("ModeBasis: field does not match the basis box");
  Eigen::VectorXcd x(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const auto [slot, idx] = slots_[m];
    x[static_cast<Eigen::Index>(m)] = u.slice_active(slot) ? u.slice(slot)[idx] : cplx{};
  }
  return x;
}

FourierField ModeBasis::from_vector(const Eigen::VectorXcd& x) const {
  FourierField u(nu_, d_, TruncationBox{cutoff_, 2});
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    const cplx c = x[static_cast<Eigen::Index>(m)];
    if (c != cplx{}) u.mutable_slice(slots_[m].first)[slots_[m].second] = c;
  }
  return u;
}

FourierField ModeBasis::unit(std::size_t m) const {
  FourierField u(nu_, d_, TruncationBox{cutoff_, 2});
  u.mutable_slice(slots_[m].first)[slots_[m].second] = 1.0;
  return u;
}

double ModeBasis::leakage(const FourierField& u) const {
  FourierField rest = u;
  for (const auto& [slot, idx] : slots_) {
    if (rest.slice_active(slot)) rest.mutable_slice(slot)[idx] = 0.0;
  }
  return rest.max_abs();
}

Eigen::MatrixXcd assemble_dense(const ModeBasis& basis, const LinearMap& map, std::size_t cap) {
  if (basis.size() > cap) {
    throw SolveError("dense oracle: basis of " + std::to_string(basis.size()) + " modes exceeds cap " +
                     std::to_string(cap));
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    A.col(m) = basis.to_vector(map(basis.unit(static_cast<std::size_t>(m))));
  }
  return A;
}

Eigen::MatrixXcd dense_linearized(const FourierField& v, const FrequencyVector& omega, double epsilon,
                                  const ModeBasis& basis, std::size_t cap) {
  const FourierField vv = v.cutoff() == basis.cutoff() ? v : rebox(v, basis.cutoff());
  const DampingLinearization lin(vv, omega);
  return assemble_dense(
      basis, [&](const FourierField& h) { return apply_linearized_operator(lin, epsilon, h, basis.cutoff()); },
      cap);
}

Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs, double tol) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size()) throw ShapeError("dense_solve: size mismatch");
  if (matrix.rows() == 0) return {};
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(matrix);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
    throw SolveError("dense_solve: matrix is singular to working precision");
  }
  Eigen::VectorXcd x = lu.solve(rhs);
  const double bn = rhs.norm();
  const double rn = (matrix * x - rhs).norm();
  if (bn > 0.0 && !(rn <= tol * bn)) {
    throw SolveError("dense_solve: relative residual " + std::to_string(rn / bn) + " above tolerance");
  }
  return x;
}

FourierField random_field(int nu, int d, int cutoff, std::span<const std::vector<int>> spatial, double amplitude,
                          double decay, std::uint64_t seed) {
  std::set<std::vector<int>> js;
  for (const auto& j : spatial) {
    js.insert(j);
    std::vector<int> m = j;
    for (int& x : m) x = -x;
    js.insert(m);
  }
  const std::vector<std::vector<int>> list(js.begin(), js.end());
  const ModeBasis basis = ModeBasis::with_spatial_support(nu, d, cutoff, list);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FourierField u(nu, d, TruncationBox{cutoff, 2});
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const ModeIndex& mi = basis.mode(m);
    int l1 = 0;
    for (int x : mi.k) l1 += std::abs(x);
    for (int x : mi.j) l1 += std::abs(x);
    const double re = normal(rng);
    const double im = normal(rng);
    u.set(mi, amplitude * std::exp(-decay * l1) * cplx(re, im));
  }
  u.symmetrize();
  return u;
}

FourierField random_phase_field(int nu, int d, int cutoff, double amplitude, double decay, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  FourierField u(nu, d, TruncationBox{cutoff, 2}, Arity::PhaseOnly);
  const FieldLayout& lay = u.layout();
  auto s = u.mutable_slice(0);
  for (std::size_t idx : lay.phase_box_indices()) {
    const double re = normal(rng);
    const double im = normal(rng);
    if (idx == lay.phase_zero()) continue;
    s[idx] = amplitude * std::exp(-decay * lay.phase_l1(idx)) * cplx(re, im);
  }
  u.symmetrize();
  return u;
}

double fd_derivative_check(const FourierField& v, const FourierField& h, const FrequencyVector& omega, double t,
                           double s) {
  if (!(t > 0.0)) throw Error("fd_derivative_check: t must be positive");
  const NormSpec norm{0.0, s};
  FourierField plus = v;
  plus.axpy(t, h);
  FourierField minus = v;
  minus.axpy(-t, h);
  FourierField fd = apply_F(plus, omega) - apply_F(minus, omega);
  fd *= 1.0 / (2.0 * t);
  const FourierField df = apply_DF(v, h, omega);
  const double err = sobolev_norm(fd - df, norm);
  const double ref = sobolev_norm(df, norm);
  return ref > 0.0 ? err / ref : err;
}

}  // namespace qpbeam
