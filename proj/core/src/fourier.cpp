#include "qpbeam/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "fft.hpp"

namespace qpbeam {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

std::string format_mode(std::span<const int> k, std::span<const int> j) {
  std::ostringstream os;
  os << "(k=[";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << "], j=[";
  for (std::size_t i = 0; i < j.size(); ++i) os << (i ? "," : "") << j[i];
  os << "])";
  return os.str();
}

/// Grid position of every in-box phase entry of `lay` on a periodic grid with
/// side L, parallel to lay.phase_box_indices().
std::vector<std::size_t> grid_positions(const FieldLayout& lay, int L) {
  const auto& box = lay.phase_box_indices();
  std::vector<std::size_t> pos(box.size());
  std::vector<int> k(static_cast<std::size_t>(lay.nu()));
  for (std::size_t n = 0; n < box.size(); ++n) {
    lay.phase_mode(box[n], k);
    std::size_t p = 0;
    for (int ki : k) p = p * static_cast<std::size_t>(L) + static_cast<std::size_t>(((ki % L) + L) % L);
    pos[n] = p;
  }
  return pos;
}

class SliceTransformer {
 public:
  SliceTransformer(int nu, int L) : dims_(static_cast<std::size_t>(nu), L), size_(ipow(static_cast<std::size_t>(L), nu)) {}

  std::size_t grid_size() const { return size_; }

  std::vector<cplx> to_grid(std::span<const cplx> slice, const FieldLayout& lay,
                            const std::vector<std::size_t>& pos) const {
    std::vector<cplx> grid(size_);
    const auto& box = lay.phase_box_indices();
    for (std::size_t n = 0; n < box.size(); ++n) grid[pos[n]] = slice[box[n]];
    detail::fft_inplace(grid, dims_, +1);
    return grid;
  }

  void from_grid(std::vector<cplx>& grid, const FieldLayout& lay, const std::vector<std::size_t>& pos,
                 std::span<cplx> slice, double scale) const {
    detail::fft_inplace(grid, dims_, -1);
    const auto& box = lay.phase_box_indices();
    const double norm = scale / static_cast<double>(size_);
    for (std::size_t n = 0; n < box.size(); ++n) slice[box[n]] = grid[pos[n]] * norm;
  }

 private:
  std::vector<int> dims_;
  std::size_t size_;
};

void require_compatible(const FourierField& u, const FourierField& w, const char* op) {
  if (!u.valid() || !w.valid()) throw ShapeError(std::string(op) + ": uninitialized field");
  if (u.nu() != w.nu() || u.d() != w.d()) {
    throw ShapeError(std::string(op) + ": dimension mismatch");
  }
}

}  // namespace

int sobolev_s0(int nu, int d) { return (nu + d) / 2 + 1; }

// ---------------------------------------------------------------------------
// FieldLayout

FieldLayout::FieldLayout(int nu, int d, int cutoff, Arity arity)
    : nu_(nu), d_(d), cutoff_(cutoff), arity_(arity) {
  const int side = 2 * cutoff + 1;
  phase_size_ = ipow(static_cast<std::size_t>(side), nu);
  phase_l1_.resize(phase_size_);
  for (std::size_t idx = 0; idx < phase_size_; ++idx) {
    std::size_t r = idx;
    int l1 = 0;
    for (int i = 0; i < nu; ++i) {
      l1 += std::abs(static_cast<int>(r % static_cast<std::size_t>(side)) - cutoff);
      r /= static_cast<std::size_t>(side);
    }
    phase_l1_[idx] = l1;
    if (l1 <= cutoff) phase_box_.push_back(idx);
  }

  if (arity == Arity::PhaseOnly) {
    spatial_modes_.assign(static_cast<std::size_t>(d), 0);
    spatial_l1_ = {0};
    spatial_l2sq_ = {0};
    spatial_neg_ = {0};
    zero_slot_ = 0;
    return;
  }
  const std::size_t cube = ipow(static_cast<std::size_t>(side), d);
  std::vector<int> j(static_cast<std::size_t>(d));
  for (std::size_t idx = 0; idx < cube; ++idx) {
    std::size_t r = idx;
    for (int i = d - 1; i >= 0; --i) {
      j[static_cast<std::size_t>(i)] = static_cast<int>(r % static_cast<std::size_t>(side)) - cutoff;
      r /= static_cast<std::size_t>(side);
    }
    int l1 = 0;
    int l2 = 0;
    for (int ji : j) {
      l1 += std::abs(ji);
      l2 += ji * ji;
    }
    if (l1 > cutoff) continue;
    if (l1 == 0) zero_slot_ = spatial_l1_.size();
    spatial_modes_.insert(spatial_modes_.end(), j.begin(), j.end());
    spatial_l1_.push_back(l1);
    spatial_l2sq_.push_back(l2);
  }
  // The list is symmetric under j -> -j and sorted, so -j sits at the mirror slot.
  const std::size_t n = spatial_l1_.size();
  spatial_neg_.resize(n);
  for (std::size_t s = 0; s < n; ++s) spatial_neg_[s] = n - 1 - s;
}

std::shared_ptr<const FieldLayout> FieldLayout::get(int nu, int d, int cutoff, Arity arity) {
  if (nu < 1 || d < 1) throw ShapeError("FieldLayout: nu and d must be >= 1");
  if (cutoff < 1) throw ShapeError("FieldLayout: cutoff must be >= 1");
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const FieldLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(nu, d, cutoff, static_cast<int>(arity));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const FieldLayout> lay(new FieldLayout(nu, d, cutoff, arity));
  cache.emplace(key, lay);
  return lay;
}

std::size_t FieldLayout::phase_index(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != nu_) return phase_size_;
  std::size_t idx = 0;
  for (int ki : k) {
    if (ki < -cutoff_ || ki > cutoff_) return phase_size_;
    idx = idx * static_cast<std::size_t>(side()) + static_cast<std::size_t>(ki + cutoff_);
  }
  return idx;
}

void FieldLayout::phase_mode(std::size_t idx, std::span<int> k) const {
  const auto s = static_cast<std::size_t>(side());
  for (int i = nu_ - 1; i >= 0; --i) {
    k[static_cast<std::size_t>(i)] = static_cast<int>(idx % s) - cutoff_;
    idx /= s;
  }
}

int FieldLayout::spatial_slot(std::span<const int> j) const {
  if (phase_only()) {
    if (!j.empty() && static_cast<int>(j.size()) != d_) return -1;
    return std::all_of(j.begin(), j.end(), [](int v) { return v == 0; }) ? 0 : -1;
  }
  if (static_cast<int>(j.size()) != d_) return -1;
  int l1 = 0;
  for (int ji : j) l1 += std::abs(ji);
  if (l1 > cutoff_) return -1;
  std::size_t lo = 0;
  std::size_t hi = spatial_l1_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto m = spatial_mode(mid);
    if (std::lexicographical_compare(m.begin(), m.end(), j.begin(), j.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < spatial_l1_.size() && std::equal(j.begin(), j.end(), spatial_mode(lo).begin())) {
    return static_cast<int>(lo);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// FourierField

FourierField::FourierField(int nu, int d, TruncationBox box, Arity arity)
    : box_(box), layout_(FieldLayout::get(nu, d, box.cutoff, arity)) {
  if (box.padding < 1) throw ShapeError("TruncationBox: padding must be >= 1");
  slices_.resize(layout_->spatial_count());
}

cplx FourierField::coeff(const ModeIndex& m) const {
  const std::size_t p = layout_->phase_index(m.k);
  if (p == layout_->phase_size() || !layout_->phase_in_box(p)) return {};
  const int s = layout_->spatial_slot(m.j);
  if (s < 0 || slices_[static_cast<std::size_t>(s)].empty()) return {};
  return slices_[static_cast<std::size_t>(s)][p];
}

void FourierField::set(const ModeIndex& m, cplx value) {
  const std::size_t p = layout_->phase_index(m.k);
  const int s = layout_->spatial_slot(m.j);
  if (p == layout_->phase_size() || !layout_->phase_in_box(p) || s < 0) {
    throw BoxError("mode " + format_mode(m.k, m.j) + " outside box with cutoff " +
                       std::to_string(box_.cutoff) + (phase_only() ? " (phase-only field)" : ""),
                   m.k, m.j);
  }
  mutable_slice(static_cast<std::size_t>(s))[p] = value;
}

void FourierField::add(const ModeIndex& m, cplx value) { set(m, coeff(m) + value); }

std::span<cplx> FourierField::mutable_slice(std::size_t slot) {
  auto& s = slices_[slot];
  if (s.empty()) s.assign(layout_->phase_size(), cplx{});
  return s;
}

std::size_t FourierField::active_slices() const {
  return static_cast<std::size_t>(
      std::count_if(slices_.begin(), slices_.end(), [](const auto& s) { return !s.empty(); }));
}

bool FourierField::is_zero() const {
  for (const auto& s : slices_) {
    for (const cplx& c : s) {
      if (c != cplx{}) return false;
    }
  }
  return true;
}

double FourierField::max_abs() const {
  double m = 0.0;
  for (const auto& s : slices_) {
    for (const cplx& c : s) m = std::max(m, std::abs(c));
  }
  return m;
}

bool FourierField::is_real(double tol) const {
  for (std::size_t slot = 0; slot < slices_.size(); ++slot) {
    const std::size_t neg = layout_->spatial_negate(slot);
    for (std::size_t idx : layout_->phase_box_indices()) {
      const cplx a = slices_[slot].empty() ? cplx{} : slices_[slot][idx];
      const cplx b = slices_[neg].empty() ? cplx{} : slices_[neg][layout_->phase_negate(idx)];
      if (std::abs(a - std::conj(b)) > tol) return false;
    }
  }
  return true;
}

void FourierField::symmetrize() {
  FourierField mirrored(nu(), d(), box_, arity());
  for (std::size_t slot = 0; slot < slices_.size(); ++slot) {
    const std::size_t neg = layout_->spatial_negate(slot);
    if (slices_[neg].empty()) continue;
    auto dst = mirrored.mutable_slice(slot);
    for (std::size_t idx : layout_->phase_box_indices()) {
      dst[idx] = std::conj(slices_[neg][layout_->phase_negate(idx)]);
    }
  }
  *this += mirrored;
  *this *= 0.5;
}

void FourierField::compact() {
  for (auto& s : slices_) {
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](const cplx& c) { return c == cplx{}; })) {
      s.clear();
    }
  }
}

void FourierField::require_same_layout(const FourierField& rhs, const char* op) const {
  if (layout_ != rhs.layout_) {
    throw ShapeError(std::string(op) + ": operands live on different boxes or arities");
  }
}

FourierField& FourierField::operator+=(const FourierField& rhs) {
  axpy(1.0, rhs);
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& rhs) {
  axpy(-1.0, rhs);
  return *this;
}

FourierField& FourierField::operator*=(cplx scalar) {
  for (auto& s : slices_) {
    for (cplx& c : s) c *= scalar;
  }
  return *this;
}

FourierField FourierField::operator-() const {
  FourierField r = *this;
  r *= -1.0;
  return r;
}

void FourierField::axpy(cplx a, const FourierField& w) {
  require_same_layout(w, "axpy");
  for (std::size_t slot = 0; slot < slices_.size(); ++slot) {
    if (w.slices_[slot].empty()) continue;
    auto dst = mutable_slice(slot);
    const auto& src = w.slices_[slot];
    for (std::size_t idx : layout_->phase_box_indices()) dst[idx] += a * src[idx];
  }
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(cplx s, FourierField a) { return a *= s; }
FourierField operator*(FourierField a, cplx s) { return a *= s; }

// ---------------------------------------------------------------------------
// Construction and reshaping

FourierField field_from_modes(std::span<const std::pair<ModeIndex, cplx>> entries, int nu, int d,
                              TruncationBox box, Arity arity) {
  std::map<ModeIndex, cplx> summed;
  for (const auto& [mode, value] : entries) {
    if (static_cast<int>(mode.k.size()) != nu || static_cast<int>(mode.j.size()) != d) {
      throw BoxError("mode " + format_mode(mode.k, mode.j) + " has the wrong dimension", mode.k, mode.j);
    }
    summed[mode] += value;
  }
  FourierField u(nu, d, box, arity);
  for (const auto& [mode, value] : summed) u.set(mode, value);
  for (const auto& [mode, value] : summed) {
    ModeIndex partner{mode.k, mode.j};
    for (int& v : partner.k) v = -v;
    for (int& v : partner.j) v = -v;
    if (!summed.contains(partner)) u.set(partner, std::conj(value));
  }
  return u;
}

FourierField constant_field(int nu, int d, TruncationBox box, double value, Arity arity) {
  FourierField u(nu, d, box, arity);
  if (value != 0.0) {
    u.mutable_slice(u.layout().zero_slot())[u.layout().phase_zero()] = value;
  }
  return u;
}

FourierField rebox(const FourierField& u, int cutoff) {
  TruncationBox box = u.box();
  box.cutoff = cutoff;
  FourierField out(u.nu(), u.d(), box, u.arity());
  if (cutoff == u.cutoff()) {
    out = u;
    return out;
  }
  const FieldLayout& src = u.layout();
  const FieldLayout& dst = out.layout();
  std::vector<int> k(static_cast<std::size_t>(u.nu()));
  // Map in-box phase entries once.
  std::vector<std::pair<std::size_t, std::size_t>> phase_map;
  for (std::size_t idx : src.phase_box_indices()) {
    src.phase_mode(idx, k);
    const std::size_t t = dst.phase_index(k);
    if (t != dst.phase_size() && dst.phase_in_box(t)) phase_map.emplace_back(idx, t);
  }
  for (std::size_t slot = 0; slot < src.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const int t = dst.spatial_slot(src.spatial_mode(slot));
    if (t < 0) continue;
    const auto in = u.slice(slot);
    auto o = out.mutable_slice(static_cast<std::size_t>(t));
    for (const auto& [a, b] : phase_map) o[b] = in[a];
  }
  return out;
}

FourierField to_phase_only(const FourierField& u) {
  if (u.phase_only()) return u;
  FourierField out(u.nu(), u.d(), u.box(), Arity::PhaseOnly);
  const std::size_t z = u.layout().zero_slot();
  if (u.slice_active(z)) {
    auto dst = out.mutable_slice(0);
    const auto src = u.slice(z);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

FourierField to_full(const FourierField& phase, int d) {
  FourierField out(phase.nu(), d, phase.box(), Arity::Full);
  if (phase.slice_active(0)) {
    auto dst = out.mutable_slice(out.layout().zero_slot());
    const auto src = phase.slice(0);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algebra

FourierField multiply(const FourierField& u, const FourierField& w) {
  require_compatible(u, w, "multiply");
  if (u.cutoff() != w.cutoff()) {
    throw ShapeError("multiply: box mismatch (cutoff " + std::to_string(u.cutoff()) + " vs " +
                     std::to_string(w.cutoff()) + ")");
  }
  return multiply(u, w, u.cutoff());
}

FourierField multiply(const FourierField& u, const FourierField& w, int out_cutoff) {
  require_compatible(u, w, "multiply");
  const Arity arity = (u.phase_only() && w.phase_only()) ? Arity::PhaseOnly : Arity::Full;
  TruncationBox box = u.box();
  box.cutoff = out_cutoff;
  FourierField out(u.nu(), u.d(), box, arity);
  if (u.active_slices() == 0 || w.active_slices() == 0) return out;

  const int L = detail::next_smooth_size(u.cutoff() + w.cutoff() + out_cutoff + 1);
  SliceTransformer tr(u.nu(), L);
  const FieldLayout& lu = u.layout();
  const FieldLayout& lw = w.layout();
  const FieldLayout& lo = out.layout();
  const auto pos_u = grid_positions(lu, L);
  const auto pos_w = grid_positions(lw, L);
  const auto pos_o = grid_positions(lo, L);

  std::vector<std::pair<std::size_t, std::vector<cplx>>> gu;
  std::vector<std::pair<std::size_t, std::vector<cplx>>> gw;
  for (std::size_t s = 0; s < lu.spatial_count(); ++s) {
    if (u.slice_active(s)) gu.emplace_back(s, tr.to_grid(u.slice(s), lu, pos_u));
  }
  for (std::size_t s = 0; s < lw.spatial_count(); ++s) {
    if (w.slice_active(s)) gw.emplace_back(s, tr.to_grid(w.slice(s), lw, pos_w));
  }

  std::map<std::size_t, std::vector<cplx>> acc;
  std::vector<int> jsum(static_cast<std::size_t>(u.d()));
  for (const auto& [su, grid_u] : gu) {
    const auto ju = lu.spatial_mode(su);
    for (const auto& [sw, grid_w] : gw) {
      const auto jw = lw.spatial_mode(sw);
      for (std::size_t i = 0; i < jsum.size(); ++i) jsum[i] = ju[i] + jw[i];
      const int so = lo.spatial_slot(jsum);
      if (so < 0) continue;
      auto& a = acc[static_cast<std::size_t>(so)];
      if (a.empty()) a.assign(tr.grid_size(), cplx{});
      for (std::size_t p = 0; p < a.size(); ++p) a[p] += grid_u[p] * grid_w[p];
    }
  }
  for (auto& [so, grid] : acc) tr.from_grid(grid, lo, pos_o, out.mutable_slice(so), 1.0);
  return out;
}

FourierField spatial_pairing(const FourierField& u, const FourierField& w, int out_cutoff,
                             PairingWeight weight) {
  require_compatible(u, w, "spatial_pairing");
  TruncationBox box = u.box();
  box.cutoff = out_cutoff;
  FourierField out(u.nu(), u.d(), box, Arity::PhaseOnly);

  const FieldLayout& lu = u.layout();
  const FieldLayout& lw = w.layout();
  std::vector<int> neg(static_cast<std::size_t>(u.d()));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t su = 0; su < lu.spatial_count(); ++su) {
    if (!u.slice_active(su)) continue;
    if (weight == PairingWeight::GradSquared && lu.spatial_l2sq(su) == 0) continue;
    const auto j = lu.spatial_mode(su);
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -j[i];
    const int sw = lw.spatial_slot(neg);
    if (sw >= 0 && w.slice_active(static_cast<std::size_t>(sw))) {
      pairs.emplace_back(su, static_cast<std::size_t>(sw));
    }
  }
  if (pairs.empty()) return out;

  const int L = detail::next_smooth_size(u.cutoff() + w.cutoff() + out_cutoff + 1);
  SliceTransformer tr(u.nu(), L);
  const auto pos_u = grid_positions(lu, L);
  const auto pos_w = grid_positions(lw, L);
  const auto pos_o = grid_positions(out.layout(), L);
  std::vector<cplx> acc(tr.grid_size());
  for (const auto& [su, sw] : pairs) {
    const double wt =
        weight == PairingWeight::GradSquared ? static_cast<double>(lu.spatial_l2sq(su)) : 1.0;
    const auto gu = tr.to_grid(u.slice(su), lu, pos_u);
    const auto gw = tr.to_grid(w.slice(sw), lw, pos_w);
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += wt * gu[p] * gw[p];
  }
  const double torus = std::pow(2.0 * kPi, u.d());
  tr.from_grid(acc, out.layout(), pos_o, out.mutable_slice(0), torus);
  return out;
}

// ---------------------------------------------------------------------------
// Norms and projections

double sobolev_norm(const FourierField& u, NormSpec spec) {
  const FieldLayout& lay = u.layout();
  const int N = lay.cutoff();
  std::vector<double> exp_w(static_cast<std::size_t>(2 * N + 1));
  for (int t = 0; t <= 2 * N; ++t) exp_w[static_cast<std::size_t>(t)] = std::exp(2.0 * spec.rho * t);
  std::vector<double> pow_w(static_cast<std::size_t>(N + 1));
  for (int t = 0; t <= N; ++t) pow_w[static_cast<std::size_t>(t)] = std::pow(std::max(1, t), 2.0 * spec.s);

  double sum = 0.0;
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const int jl1 = lay.spatial_l1(slot);
    const auto s = u.slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) {
      const double a = std::norm(s[idx]);
      if (a == 0.0) continue;
      const int kl1 = lay.phase_l1(idx);
      sum += a * exp_w[static_cast<std::size_t>(kl1 + jl1)] *
             pow_w[static_cast<std::size_t>(std::max(kl1, jl1))];
    }
  }
  return std::sqrt(sum);
}

FourierField project_spatial(const FourierField& u, SpatialPart part) {
  FourierField out = u;
  const std::size_t z = u.layout().zero_slot();
  if (part == SpatialPart::Complement) {
    out.clear_slice(z);
    return out;
  }
  for (std::size_t s = 0; s < u.layout().spatial_count(); ++s) {
    if (s != z) out.clear_slice(s);
  }
  return out;
}

FourierField galerkin_project(const FourierField& u, int level_cutoff, GalerkinPart part) {
  FourierField out(u.nu(), u.d(), u.box(), u.arity());
  const FieldLayout& lay = u.layout();
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const int jl1 = lay.spatial_l1(slot);
    const auto src = u.slice(slot);
    std::span<cplx> dst;
    for (std::size_t idx : lay.phase_box_indices()) {
      const bool low = std::max(lay.phase_l1(idx), jl1) <= level_cutoff;
      if (low != (part == GalerkinPart::Low) || src[idx] == cplx{}) continue;
      if (dst.empty()) dst = out.mutable_slice(slot);
      dst[idx] = src[idx];
    }
  }
  return out;
}

int effective_cutoff(const FourierField& u) {
  int m = 0;
  const FieldLayout& lay = u.layout();
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const auto s = u.slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) {
      if (s[idx] != cplx{}) m = std::max({m, 1, lay.phase_l1(idx), lay.spatial_l1(slot)});
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Differential operators

std::vector<double> phase_frequencies(const FieldLayout& lay, const FrequencyVector& omega) {
  if (omega.dimension() != lay.nu()) throw ShapeError("frequency dimension differs from nu");
  std::vector<double> out(lay.phase_size());
  std::vector<int> k(static_cast<std::size_t>(lay.nu()));
  for (std::size_t idx : lay.phase_box_indices()) {
    lay.phase_mode(idx, k);
    out[idx] = omega.dot(k);
  }
  return out;
}

FourierField phase_derivative(const FourierField& u, const FrequencyVector& omega) {
  return apply_symbol(u, omega, [](double wk, double) { return cplx(0.0, wk); });
}

double default_divisor_floor(const FrequencyVector& omega) { return 1e-14 * omega.max_abs(); }

FourierField phase_antiderivative(const FourierField& u, const FrequencyVector& omega,
                                  double divisor_floor) {
  if (divisor_floor < 0.0) divisor_floor = default_divisor_floor(omega);
  const FieldLayout& lay = u.layout();
  const std::vector<double> wk = phase_frequencies(lay, omega);
  FourierField out(u.nu(), u.d(), u.box(), u.arity());
  std::vector<int> k(static_cast<std::size_t>(u.nu()));
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const auto src = u.slice(slot);
    auto dst = out.mutable_slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) {
      if (idx == lay.phase_zero() || src[idx] == cplx{}) continue;
      if (std::abs(wk[idx]) < divisor_floor) {
        lay.phase_mode(idx, k);
        throw SmallDivisorError("small divisor |omega.k| = " + std::to_string(std::abs(wk[idx])) +
                                    " below floor at " + format_mode(k, lay.spatial_mode(slot)),
                                k, wk[idx]);
      }
      dst[idx] = src[idx] / cplx(0.0, wk[idx]);
    }
  }
  return out;
}

FourierField bilaplacian(const FourierField& u) {
  FourierField out(u.nu(), u.d(), u.box(), u.arity());
  const FieldLayout& lay = u.layout();
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot) || lay.spatial_l2sq(slot) == 0) continue;
    const double j4 = std::pow(static_cast<double>(lay.spatial_l2sq(slot)), 2);
    const auto src = u.slice(slot);
    auto dst = out.mutable_slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) dst[idx] = j4 * src[idx];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid transforms

double RealGrid::mean_square() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v * v;
  return s / static_cast<double>(values.size());
}

FourierField exp_phase_field(const FourierField& w, int out_cutoff, ExpOptions options) {
  if (!w.phase_only()) throw ShapeError("exp_phase_field: argument must be phase-only");
  const double scale = std::max(1.0, w.max_abs());
  if (!w.is_real(1e-12 * scale)) throw Error("exp_phase_field: argument is not real-valued");
  const int n = std::max(w.cutoff(), out_cutoff);
  const int L = detail::next_smooth_size(options.oversample * (2 * n + 1));
  SliceTransformer tr(w.nu(), L);
  std::vector<cplx> grid;
  if (w.slice_active(0)) {
    grid = tr.to_grid(w.slice(0), w.layout(), grid_positions(w.layout(), L));
  } else {
    grid.assign(tr.grid_size(), cplx{});
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (cplx& g : grid) {
    peak = std::max(peak, g.real());
  }
  if (peak > options.cap) {
    throw OverflowError("exp_phase_field: grid maximum " + std::to_string(peak) + " exceeds cap " +
                        std::to_string(options.cap));
  }
  for (cplx& g : grid) g = std::exp(g.real());
  TruncationBox box = w.box();
  box.cutoff = out_cutoff;
  FourierField out(w.nu(), w.d(), box, Arity::PhaseOnly);
  tr.from_grid(grid, out.layout(), grid_positions(out.layout(), L), out.mutable_slice(0), 1.0);
  return out;
}

RealGrid synthesize_on_grid(const FourierField& u, std::span<const int> sizes, AliasPolicy policy) {
  const int nu = u.nu();
  const int dims_total = u.phase_only() ? nu : nu + u.d();
  if (static_cast<int>(sizes.size()) != dims_total) {
    throw ShapeError("synthesize_on_grid: expected " + std::to_string(dims_total) + " grid sizes");
  }
  for (int n : sizes) {
    if (n < 1) throw ShapeError("synthesize_on_grid: grid sizes must be positive");
    if (policy == AliasPolicy::Reject && n < 2 * u.cutoff() + 1) {
      throw AliasingError("synthesize_on_grid: grid size " + std::to_string(n) +
                          " cannot resolve cutoff " + std::to_string(u.cutoff()) +
                          " (needs >= " + std::to_string(2 * u.cutoff() + 1) + ")");
    }
  }
  std::size_t total = 1;
  for (int n : sizes) total *= static_cast<std::size_t>(n);
  std::vector<cplx> grid(total);
  const FieldLayout& lay = u.layout();
  std::vector<int> k(static_cast<std::size_t>(nu));
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!u.slice_active(slot)) continue;
    const auto j = lay.spatial_mode(slot);
    const auto src = u.slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) {
      if (src[idx] == cplx{}) continue;
      lay.phase_mode(idx, k);
      std::size_t p = 0;
      for (int i = 0; i < nu; ++i) {
        const int n = sizes[static_cast<std::size_t>(i)];
        p = p * static_cast<std::size_t>(n) + static_cast<std::size_t>(((k[static_cast<std::size_t>(i)] % n) + n) % n);
      }
      if (!u.phase_only()) {
        for (int i = 0; i < u.d(); ++i) {
          const int n = sizes[static_cast<std::size_t>(nu + i)];
          p = p * static_cast<std::size_t>(n) + static_cast<std::size_t>(((j[static_cast<std::size_t>(i)] % n) + n) % n);
        }
      }
      grid[p] += src[idx];
    }
  }
  detail::fft_inplace(grid, sizes, +1);
  RealGrid out;
  out.sizes.assign(sizes.begin(), sizes.end());
  out.values.resize(total);
  for (std::size_t p = 0; p < total; ++p) out.values[p] = grid[p].real();
  return out;
}

FourierField analyze_grid(const RealGrid& grid, int nu, int d, TruncationBox box, Arity arity) {
  const int dims_total = arity == Arity::PhaseOnly ? nu : nu + d;
  if (static_cast<int>(grid.sizes.size()) != dims_total) {
    throw ShapeError("analyze_grid: grid dimension does not match the requested field");
  }
  for (int n : grid.sizes) {
    if (n < 2 * box.cutoff + 1) {
      throw AliasingError("analyze_grid: grid size " + std::to_string(n) + " cannot resolve cutoff " +
                          std::to_string(box.cutoff));
    }
  }
  std::vector<cplx> data(grid.values.begin(), grid.values.end());
  detail::fft_inplace(data, grid.sizes, -1);
  const double norm = 1.0 / static_cast<double>(data.size());
  FourierField out(nu, d, box, arity);
  const FieldLayout& lay = out.layout();
  std::vector<int> k(static_cast<std::size_t>(nu));
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    const auto j = lay.spatial_mode(slot);
    auto dst = out.mutable_slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) {
      lay.phase_mode(idx, k);
      std::size_t p = 0;
      for (int i = 0; i < nu; ++i) {
        const int n = grid.sizes[static_cast<std::size_t>(i)];
        p = p * static_cast<std::size_t>(n) + static_cast<std::size_t>(((k[static_cast<std::size_t>(i)] % n) + n) % n);
      }
      if (arity == Arity::Full) {
        for (int i = 0; i < d; ++i) {
          const int n = grid.sizes[static_cast<std::size_t>(nu + i)];
          p = p * static_cast<std::size_t>(n) + static_cast<std::size_t>(((j[static_cast<std::size_t>(i)] % n) + n) % n);
        }
      }
      dst[idx] = data[p] * norm;
    }
  }
  out.compact();
  return out;
}

// ---------------------------------------------------------------------------
// Coefficient dump

void write_coefficient_dump(std::ostream& os, const FourierField& u) {
  std::vector<std::pair<ModeIndex, cplx>> rows;
  u.for_each_nonzero([&](std::span<const int> k, std::span<const int> j, cplx c) {
    rows.push_back({ModeIndex{{k.begin(), k.end()}, {j.begin(), j.end()}}, c});
  });
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  os << "# nu " << u.nu() << " d " << u.d() << " cutoff " << u.cutoff() << "\n";
  char buf[64];
  for (const auto& [m, c] : rows) {
    for (int v : m.k) os << v << ' ';
    for (int v : m.j) os << v << ' ';
    std::snprintf(buf, sizeof buf, "%.17g %.17g", c.real(), c.imag());
    os << buf << '\n';
  }
}

FourierField read_coefficient_dump(std::istream& is, Arity arity) {
  std::string line;
  int nu = 0;
  int d = 0;
  int cutoff = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream hs(line);
    std::string hash, tnu, td, tc;
    if (!(hs >> hash >> tnu >> nu >> td >> d >> tc >> cutoff) || hash != "#" || tnu != "nu" ||
        td != "d" || tc != "cutoff") {
      throw Error("coefficient dump: malformed header line '" + line + "'");
    }
    break;
  }
  if (nu < 1 || d < 1 || cutoff < 1) throw Error("coefficient dump: missing or invalid header");
  FourierField u(nu, d, TruncationBox{cutoff, 2}, arity);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ModeIndex m{std::vector<int>(static_cast<std::size_t>(nu)), std::vector<int>(static_cast<std::size_t>(d))};
    double re = 0.0;
    double im = 0.0;
    for (int& v : m.k) ls >> v;
    for (int& v : m.j) ls >> v;
    ls >> re >> im;
    if (!ls) throw Error("coefficient dump: malformed line '" + line + "'");
    u.add(m, cplx(re, im));
  }
  return u;
}

}  // namespace qpbeam
