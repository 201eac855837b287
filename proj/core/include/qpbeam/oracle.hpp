#pragma once

// Dense reference objects: explicit matrices over a finite mode basis and
// finite-difference derivative checks.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qpbeam/fourier.hpp"

namespace qpbeam {

/// Ordered list of modes (k, j) of a box; a field restricted to these modes
/// maps to a complex vector and back.
class ModeBasis {
 public:
  /// All modes of the box with j in `spatial`, j != 0.
  static ModeBasis with_spatial_support(int nu, int d, int cutoff, std::span<const std::vector<int>> spatial);
  /// j-support of the given fields, closed under j -> -j, zero excluded.
  static std::vector<std::vector<int>> spatial_support(std::span<const FourierField* const> fields);

  int nu() const noexcept { return nu_; }
  int d() const noexcept { return d_; }
  int cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const ModeIndex& mode(std::size_t m) const { return modes_[m]; }

  Eigen::VectorXcd to_vector(const FourierField& u) const;
  FourierField from_vector(const Eigen::VectorXcd& x) const;
  FourierField unit(std::size_t m) const;
  /// Largest |coefficient| of u outside the basis.
  double leakage(const FourierField& u) const;

 private:
  int nu_ = 0;
  int d_ = 0;
  int cutoff_ = 0;
  std::vector<ModeIndex> modes_;
  std::vector<std::pair<std::size_t, std::size_t>> slots_;  // (spatial slot, phase index) per mode
};

using LinearMap = std::function<FourierField(const FourierField&)>;

/// Column m = map(unit m) read back on the basis. SolveError above cap.
Eigen::MatrixXcd assemble_dense(const ModeBasis& basis, const LinearMap& map, std::size_t cap = 4000);

/// Matrix of P_N (L_{eps,omega} + eps^{3/2} DF(v)) on the basis.
Eigen::MatrixXcd dense_linearized(const FourierField& v, const FrequencyVector& omega, double epsilon,
                                  const ModeBasis& basis, std::size_t cap = 4000);

/// LU solve; SolveError if singular or the relative residual exceeds tol.
Eigen::VectorXcd dense_solve(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs, double tol = 1e-10);

/// Real random field with Gaussian coefficients of size
/// amplitude * exp(-decay (|k|_1 + |j|_1)) on the modes of the box with j in
/// `spatial` (closed under j -> -j). Deterministic in seed.
FourierField random_field(int nu, int d, int cutoff, std::span<const std::vector<int>> spatial, double amplitude,
                          double decay, std::uint64_t seed);

/// Real random phase-only field, zero phase mean.
FourierField random_phase_field(int nu, int d, int cutoff, double amplitude, double decay, std::uint64_t seed);

/// ||(F(v+th) - F(v-th))/(2t) - DF(v)[h]||_{0,s} / ||DF(v)[h]||_{0,s}
/// (absolute error when DF(v)[h] = 0).
double fd_derivative_check(const FourierField& v, const FourierField& h, const FrequencyVector& omega,
                           double t, double s);

}  // namespace qpbeam
