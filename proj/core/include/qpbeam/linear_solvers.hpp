#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpbeam/fourier.hpp"
#include "qpbeam/frequency_vector.hpp"
#include "qpbeam/reduction.hpp"

namespace qpbeam {

/// Theta = -(omega.k)^2 + |j|_2^4 + i (eps^{3/2} mu omega.k + eps omega.k).
cplx theta_symbol(double epsilon, double mu, const FrequencyVector& omega, std::span<const int> k,
                  std::span<const int> j);
/// Same in terms of varsigma = omega.k and |j|_2^2.
cplx theta_value(double epsilon, double mu, double varsigma, double j2);

/// Diagonal multiplier Theta on zero-spatial-mean fields. mu = 0 gives L_{eps,omega}.
struct DiagonalSymbol {
  double epsilon = 0.0;
  double mu = 0.0;
  FrequencyVector omega;

  cplx operator()(double varsigma, double j2) const { return theta_value(epsilon, mu, varsigma, j2); }
  FourierField apply(const FourierField& h) const;
};

inline constexpr double kSymbolK0 = 1e6;

struct SymbolViolation {
  double varsigma = 0.0;
  double j2 = 0.0;
  double theta_sq = 0.0;
  double bound = 0.0;
  std::string region;
};

struct SymbolFloorReport {
  double epsilon = 0.0;
  double mu = 0.0;
  double delta = 0.0;
  int J0 = 0;
  std::size_t points = 0;
  double min_theta = 0.0;    ///< min |Theta| over the scan
  double min_margin = 0.0;   ///< min of |Theta|^2 / bound - 1
  bool preconditions_ok = false;
  std::vector<std::string> precondition_failures;
  bool k0_bound_ok = false;  ///< min |Theta| >= delta / K_0
  std::vector<SymbolViolation> violations;

  bool ok() const { return preconditions_ok && k0_bound_ok && violations.empty(); }
};

/// Scans varsigma over [-range, range] (uniform grid plus band edges and the
/// resonances varsigma^2 = |j|^4) against every |j|_2^2 of a lattice vector in
/// Z^d with 0 < |j|_2 <= j_max, and checks the piecewise lower bounds on |Theta|^2.
SymbolFloorReport symbol_floor(double epsilon, double mu, double delta, int J0, double range, int j_max,
                               int d = 1, int grid_points = 20001);

struct DiagonalOptions {
  double floor = 1e-300;  ///< SymbolError when |Theta| < floor on a stored mode
  /// When set, ||D^{-1}h||_{rho,s} <= K_0 delta^{-1} ||h||_{rho,s} is checked (SymbolError).
  std::optional<NormSpec> bound_norm;
  double delta = 0.0;
};

/// Requires zero spatial mean (SpatialMeanError).
FourierField invert_diagonal(const DiagonalSymbol& symbol, const FourierField& h,
                             const DiagonalOptions& options = {});

struct NeumannOptions {
  double tol = 1e-10;  ///< relative residual in ||.||_{0,s}
  int max_iterations = 200;
  double s = 0.0;
  /// When positive, ||x|| <= 2 K_0 delta^{-1} ||h|| is checked in ||.||_{0,s}.
  double delta = 0.0;
};

struct NeumannResult {
  FourierField x;
  int iterations = 0;
  double contraction = 0.0;  ///< last ratio of successive corrections
  double residual = 0.0;     ///< ||(D + R~)x - h|| / ||h||
  bool bound_ok = true;
};

/// (D + R~) for one v, solved by x <- D^{-1}(h - R~ x).
class LtildeSolver {
 public:
  LtildeSolver(const FourierField& v, const FrequencyVector& omega, double epsilon,
               const ReductionOptions& options = {});

  const ReductionData& data() const noexcept { return remainder_.data(); }
  const DiagonalSymbol& symbol() const noexcept { return D_; }
  const ConjugatedRemainder& remainder() const noexcept { return remainder_; }

  FourierField apply(const FourierField& x) const;
  /// Throws ContractionError with the measured factor when the iteration stalls.
  NeumannResult solve(const FourierField& h, const NeumannOptions& options = {}) const;

 private:
  ConjugatedRemainder remainder_;
  DiagonalSymbol D_;
};

FourierField invert_Ltilde(const FourierField& v, const FrequencyVector& omega, double epsilon,
                           const FourierField& h, const NeumannOptions& options = {});

enum class LinearMethod { Conjugation, Direct };

struct LinearizedOptions {
  LinearMethod method = LinearMethod::Conjugation;
  double tol = 1e-12;  ///< relative residual of the projected system in ||.||_{0,s}
  int max_corrections = 50;
  double s = 0.0;
  NeumannOptions neumann{1e-13, 200, 0.0, 0.0};
  std::size_t dense_cap = 4000;
};

struct LinearizedResult {
  FourierField x;
  double residual = 0.0;
  int corrections = 0;      ///< defect-correction sweeps (conjugation)
  int neumann_iterations = 0;
};

/// Solves P (L_{eps,omega} x + eps^{3/2} DF(v)[x]) = h for x in H_N with N =
/// `cutoff`. Operators are formed once and reused.
class LinearizedSolver {
 public:
  LinearizedSolver(const FourierField& v, const FrequencyVector& omega, double epsilon, int cutoff,
                   const LinearizedOptions& options = {});

  int cutoff() const noexcept { return cutoff_; }
  double epsilon() const noexcept { return epsilon_; }
  const DampingLinearization& linearization() const noexcept { return lin_; }

  FourierField apply(const FourierField& x) const;
  LinearizedResult solve(const FourierField& h) const;

 private:
  LinearizedResult solve_conjugation(const FourierField& h) const;
  LinearizedResult solve_direct(const FourierField& h) const;

  FourierField v_;
  FrequencyVector omega_;
  double epsilon_;
  int cutoff_;
  LinearizedOptions options_;
  DampingLinearization lin_;
  std::optional<LtildeSolver> tilde_;
};

FourierField invert_linearized(const FourierField& v, const FrequencyVector& omega, double epsilon,
                               int cutoff, const FourierField& h, const LinearizedOptions& options = {});

struct InverseProxy {
  double value = 0.0;  ///< max ||L^{-1} p|| / ||p|| over probes
  std::vector<int> worst_k;
  std::vector<int> worst_j;
  double min_theta = 0.0;
};

/// Proxy for ||L^{-1}|| in ||.||_{0,s}: unit modes cos(k.phi + j.x) in H_N with
/// j in spatial_support and the `probes` smallest |Theta_{eps,0}|.
InverseProxy inverse_norm_proxy(const FourierField& v, const FrequencyVector& omega, double epsilon,
                                int cutoff, std::span<const std::vector<int>> spatial_support, int probes,
                                double s);

}  // namespace qpbeam
