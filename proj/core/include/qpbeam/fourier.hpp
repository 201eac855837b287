#pragma once

// Truncated Fourier series on T^nu x T^d.
//
// A field stores coefficients u_{k,j} of
//     u(phi, x) = sum_{k,j} u_{k,j} exp(i (k.phi + j.x))
// for every mode with <k,j> := max{1, |k|_1, |j|_1} <= cutoff. Storage is
// slice-wise: one dense phase array (the cube [-N,N]^nu, entries outside the
// l1 diamond held at zero) per spatial mode j, with absent slices meaning zero.
// Products only visit active slices, so fields concentrated on a few spatial
// modes stay cheap at large cutoffs.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qpbeam/errors.hpp"
#include "qpbeam/frequency_vector.hpp"

namespace qpbeam {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct ModeIndex {
  std::vector<int> k;  ///< phase mode, length nu
  std::vector<int> j;  ///< spatial mode, length d
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

struct TruncationBox {
  int cutoff = 1;   ///< modes kept satisfy <k,j> <= cutoff
  int padding = 2;  ///< factor for padded evaluation boxes
  int padded_cutoff() const noexcept { return cutoff * padding; }
  friend bool operator==(const TruncationBox&, const TruncationBox&) = default;
};

/// Weighted norm parameters: analyticity width rho and Sobolev index s.
struct NormSpec {
  double rho = 0.0;
  double s = 0.0;
};

/// s_0 = floor((nu + d) / 2) + 1.
int sobolev_s0(int nu, int d);

enum class Arity { Full, PhaseOnly };

/// Index bookkeeping for one (nu, d, cutoff, arity) combination. Layouts are
/// immutable and shared between fields.
class FieldLayout {
 public:
  static std::shared_ptr<const FieldLayout> get(int nu, int d, int cutoff, Arity arity);

  int nu() const noexcept { return nu_; }
  int d() const noexcept { return d_; }
  int cutoff() const noexcept { return cutoff_; }
  Arity arity() const noexcept { return arity_; }
  bool phase_only() const noexcept { return arity_ == Arity::PhaseOnly; }

  // Phase cube [-N, N]^nu, row-major with k_1 most significant.
  int side() const noexcept { return 2 * cutoff_ + 1; }
  std::size_t phase_size() const noexcept { return phase_size_; }
  int phase_l1(std::size_t idx) const noexcept { return phase_l1_[idx]; }
  bool phase_in_box(std::size_t idx) const noexcept { return phase_l1_[idx] <= cutoff_; }
  std::size_t phase_negate(std::size_t idx) const noexcept { return phase_size_ - 1 - idx; }
  std::size_t phase_zero() const noexcept { return phase_size_ / 2; }
  /// Returns phase_size() when k lies outside the cube.
  std::size_t phase_index(std::span<const int> k) const;
  void phase_mode(std::size_t idx, std::span<int> k) const;
  const std::vector<std::size_t>& phase_box_indices() const noexcept { return phase_box_; }

  // Spatial modes with |j|_1 <= N (only j = 0 for phase-only layouts),
  // listed lexicographically.
  std::size_t spatial_count() const noexcept { return spatial_l1_.size(); }
  std::span<const int> spatial_mode(std::size_t slot) const {
    return {spatial_modes_.data() + slot * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  int spatial_l1(std::size_t slot) const noexcept { return spatial_l1_[slot]; }
  int spatial_l2sq(std::size_t slot) const noexcept { return spatial_l2sq_[slot]; }
  /// -1 when j lies outside the layout.
  int spatial_slot(std::span<const int> j) const;
  std::size_t spatial_negate(std::size_t slot) const noexcept { return spatial_neg_[slot]; }
  std::size_t zero_slot() const noexcept { return zero_slot_; }

 private:
  FieldLayout(int nu, int d, int cutoff, Arity arity);

  int nu_;
  int d_;
  int cutoff_;
  Arity arity_;
  std::size_t phase_size_ = 0;
  std::vector<int> phase_l1_;
  std::vector<std::size_t> phase_box_;
  std::vector<int> spatial_modes_;
  std::vector<int> spatial_l1_;
  std::vector<int> spatial_l2sq_;
  std::vector<std::size_t> spatial_neg_;
  std::size_t zero_slot_ = 0;
};

class FourierField {
 public:
  FourierField() = default;
  FourierField(int nu, int d, TruncationBox box, Arity arity = Arity::Full);

  int nu() const { return layout_->nu(); }
  int d() const { return layout_->d(); }
  int cutoff() const { return box_.cutoff; }
  const TruncationBox& box() const noexcept { return box_; }
  Arity arity() const { return layout_->arity(); }
  bool phase_only() const { return layout_->phase_only(); }
  const FieldLayout& layout() const { return *layout_; }
  bool valid() const noexcept { return static_cast<bool>(layout_); }

  /// Zero for modes outside the box.
  cplx coeff(const ModeIndex& m) const;
  /// Raw write without symmetry completion. Throws BoxError outside the box.
  void set(const ModeIndex& m, cplx value);
  void add(const ModeIndex& m, cplx value);

  bool slice_active(std::size_t slot) const { return !slices_[slot].empty(); }
  std::span<const cplx> slice(std::size_t slot) const { return slices_[slot]; }
  /// Allocates the slice (zero-filled) if it is absent.
  std::span<cplx> mutable_slice(std::size_t slot);
  void clear_slice(std::size_t slot) { slices_[slot].clear(); }
  std::size_t active_slices() const;

  bool is_zero() const;
  double max_abs() const;
  /// True when coeff(-k,-j) == conj(coeff(k,j)) within tol (absolute).
  bool is_real(double tol = 1e-13) const;
  /// Replaces u by (u + conj(u(-.)))/2, the nearest real field.
  void symmetrize();
  /// Drops slices whose entries are all exactly zero.
  void compact();

  /// Visits every nonzero coefficient as (k, j, value).
  template <class Fn>
  void for_each_nonzero(Fn&& fn) const;

  FourierField& operator+=(const FourierField& rhs);
  FourierField& operator-=(const FourierField& rhs);
  FourierField& operator*=(cplx scalar);
  FourierField operator-() const;

  /// u += a * w
  void axpy(cplx a, const FourierField& w);

 private:
  void require_same_layout(const FourierField& rhs, const char* op) const;

  TruncationBox box_{};
  std::shared_ptr<const FieldLayout> layout_;
  std::vector<std::vector<cplx>> slices_;
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(cplx s, FourierField a);
FourierField operator*(FourierField a, cplx s);

template <class Fn>
void FourierField::for_each_nonzero(Fn&& fn) const {
  std::vector<int> k(static_cast<std::size_t>(nu()));
  for (std::size_t slot = 0; slot < slices_.size(); ++slot) {
    if (slices_[slot].empty()) continue;
    const auto j = layout_->spatial_mode(slot);
    for (std::size_t idx : layout_->phase_box_indices()) {
      const cplx c = slices_[slot][idx];
      if (c == cplx{}) continue;
      layout_->phase_mode(idx, k);
      fn(std::span<const int>(k), j, c);
    }
  }
}

// ---------------------------------------------------------------------------
// Construction and reshaping

/// Builds a field from explicit modes. Duplicates are summed; for every given
/// mode whose partner (-k,-j) is absent, the partner is set to the conjugate.
FourierField field_from_modes(std::span<const std::pair<ModeIndex, cplx>> entries, int nu, int d,
                              TruncationBox box, Arity arity = Arity::Full);

FourierField constant_field(int nu, int d, TruncationBox box, double value,
                            Arity arity = Arity::Full);

/// Same data on a different cutoff: truncates or zero-extends.
FourierField rebox(const FourierField& u, int cutoff);

/// The j = 0 slice as a phase-only field.
FourierField to_phase_only(const FourierField& u);

/// A phase-only field embedded as a full-arity field with the given d.
FourierField to_full(const FourierField& phase, int d);

// ---------------------------------------------------------------------------
// Algebra

/// Exact product truncated to the common box. Throws ShapeError on mismatch.
FourierField multiply(const FourierField& u, const FourierField& w);

/// Exact product truncated to out_cutoff. Operands may have different
/// cutoffs; arity of the result is phase-only iff both operands are.
FourierField multiply(const FourierField& u, const FourierField& w, int out_cutoff);

/// Phase-only field (2 pi)^d sum_j weight(j) u_{., j} w_{., -j} (products in
/// phi), truncated to out_cutoff. With weight |j|_2^2 this is the integral of
/// grad u . grad w over T^d.
enum class PairingWeight { One, GradSquared };
FourierField spatial_pairing(const FourierField& u, const FourierField& w, int out_cutoff,
                             PairingWeight weight = PairingWeight::GradSquared);

// ---------------------------------------------------------------------------
// Norms and projections

double sobolev_norm(const FourierField& u, NormSpec spec);

enum class SpatialPart { Mean, Complement };
/// Mean keeps j = 0 (Pi_0); Complement zeroes it (Pi_0^perp). Same layout out.
FourierField project_spatial(const FourierField& u, SpatialPart part);

enum class GalerkinPart { Low, Tail };
/// Low keeps <k,j> <= level_cutoff; Tail keeps <k,j> > level_cutoff.
FourierField galerkin_project(const FourierField& u, int level_cutoff, GalerkinPart part);

/// Largest <k,j> among nonzero coefficients (0 for the zero field).
int effective_cutoff(const FourierField& u);

// ---------------------------------------------------------------------------
// Differential operators

/// omega . grad_phi on every mode: c -> i (omega . k) c.
FourierField phase_derivative(const FourierField& u, const FrequencyVector& omega);

/// Default divisor floor 1e-14 * max|omega_i|.
double default_divisor_floor(const FrequencyVector& omega);

/// Zero-phase-mean primitive: c(0,j) -> 0, c(k,j) -> c / (i omega.k).
/// Throws SmallDivisorError when |omega.k| < floor for a nonzero coefficient.
FourierField phase_antiderivative(const FourierField& u, const FrequencyVector& omega,
                                  double divisor_floor = -1.0);

/// Delta^2: c -> |j|_2^4 c.
FourierField bilaplacian(const FourierField& u);

/// Multiplies every coefficient by fn(omega.k, |j|_2^2).
template <class Fn>
FourierField apply_symbol(const FourierField& u, const FrequencyVector& omega, Fn&& fn);

/// omega . k for every entry of the phase cube of a layout.
std::vector<double> phase_frequencies(const FieldLayout& layout, const FrequencyVector& omega);

// ---------------------------------------------------------------------------
// Grid transforms

struct ExpOptions {
  int oversample = 4;
  double cap = 700.0;  ///< max grid value of w before OverflowError
};

/// exp(w) for real phase-only w, via an oversampled grid, truncated to
/// out_cutoff.
FourierField exp_phase_field(const FourierField& w, int out_cutoff, ExpOptions options = {});

enum class AliasPolicy {
  Reject,  ///< AliasingError when a grid size is below 2N + 1
  Fold,    ///< exact pointwise values on any grid (no Parseval identity)
};

/// Real samples on a uniform grid over T^nu x T^d, row-major in
/// (phi_1..phi_nu, x_1..x_d); point m sits at angle 2 pi m / size.
struct RealGrid {
  std::vector<int> sizes;
  std::vector<double> values;
  double mean_square() const;
};

/// sizes has nu entries for phase-only fields and nu + d otherwise.
RealGrid synthesize_on_grid(const FourierField& u, std::span<const int> sizes,
                            AliasPolicy policy = AliasPolicy::Reject);

/// Coefficients of grid samples, truncated to box (inverse of synthesis).
FourierField analyze_grid(const RealGrid& grid, int nu, int d, TruncationBox box,
                          Arity arity = Arity::Full);

// ---------------------------------------------------------------------------
// Coefficient dump: header "# nu <nu> d <d> cutoff <N>", then one line
// "k_1..k_nu j_1..j_d re im" per nonzero mode in lexicographic order.

void write_coefficient_dump(std::ostream& os, const FourierField& u);
FourierField read_coefficient_dump(std::istream& is, Arity arity = Arity::Full);

// ---------------------------------------------------------------------------

template <class Fn>
FourierField apply_symbol(const FourierField& u, const FrequencyVector& omega, Fn&& fn) {
  const FieldLayout& lay = u.layout();
  const std::vector<double> wk = phase_frequencies(lay, omega);
  FourierField out(u.nu(), u.d(), u.box(), u.arity());
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const auto in = u.slice(slot);
    auto dst = out.mutable_slice(slot);
    const double j2 = static_cast<double>(lay.spatial_l2sq(slot));
    for (std::size_t idx : lay.phase_box_indices()) {
      if (in[idx] != cplx{}) dst[idx] = fn(wk[idx], j2) * in[idx];
    }
  }
  return out;
}

}  // namespace qpbeam
