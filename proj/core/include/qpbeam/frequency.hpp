#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpbeam/frequency_vector.hpp"

namespace qpbeam {

/// |omega . k|. Throws Error for k = 0 or a dimension mismatch.
double small_divisor(const FrequencyVector& omega, std::span<const int> k);

/// Outcome of an exhaustive scan of 0 < |k|_1 <= k_max against
///     |omega . k|^{-1} <= gamma exp((rho / M) |k|_1).
struct NonresonanceCertificate {
  double gamma = 0.0;
  int M = 0;
  double rho = 0.0;
  int k_max = 0;
  double worst_ratio = 0.0;  ///< max_k 1 / (|omega.k| gamma e^{(rho/M)|k|_1}); inf if resonant
  std::vector<int> worst_k;
  double worst_divisor = 0.0;  ///< |omega . worst_k|

  bool valid() const noexcept { return worst_ratio <= 1.0; }

  static std::string csv_header();
  std::string csv_row() const;
};

/// Preconditions: gamma > 1, M >= 3, rho > 0, k_max >= 1 (ConfigError otherwise).
NonresonanceCertificate certify_nonresonance(const FrequencyVector& omega, double gamma, int M,
                                             double rho, int k_max);

/// Smallest gamma for which the scan up to k_max passes (inf if resonant).
double minimal_gamma(const FrequencyVector& omega, int M, double rho, int k_max);

/// Doubles gamma from gamma_start until the certificate validates. Throws
/// Error after max_doublings.
NonresonanceCertificate raise_gamma_until_valid(const FrequencyVector& omega, double gamma_start,
                                                int M, double rho, int k_max,
                                                int max_doublings = 64);

enum class GrowthRule {
  SuperExponential,  ///< a_1 = 1, a_{n+1} = ceil(e^{q_n})
  None,              ///< every partial quotient 1 (golden mean)
};

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 0;
};

struct LiouvilleanFrequency {
  FrequencyVector omega;  ///< normalize(1, alpha)
  double alpha = 0.0;
  std::vector<std::int64_t> partial_quotients;  ///< a_1..a_depth
  std::vector<Convergent> convergents;          ///< p_n/q_n for n = 1..depth, then tail terms
  double brjuno_partial_sum = 0.0;              ///< sum_n ln(q_{n+1}) / q_n over the stored list
};

/// alpha = [0; a_1, ..., a_depth, 1, 1, 1, ...]. The all-ones tail keeps alpha
/// irrational; tail_terms more convergents of it are listed. Throws
/// OverflowError when q_n leaves 64-bit range.
LiouvilleanFrequency build_liouvillean(GrowthRule rule, int depth, int tail_terms = 8);

/// sum_{m=0}^{m_max} 2^{-m} ln(1 / min_{0<|k|_1<=2^m} |omega.k|) by exhaustive scan.
double dyadic_brjuno_sum(const FrequencyVector& omega, int m_max);

/// Calls fn(k) for every k in Z^nu with 0 < |k|_1 <= k_max, lexicographic order.
template <class Fn>
void for_each_lattice_point(int nu, int k_max, Fn&& fn) {
  std::vector<int> k(static_cast<std::size_t>(nu), -k_max);
  while (true) {
    int l1 = 0;
    for (int v : k) l1 += v < 0 ? -v : v;
    if (l1 > 0 && l1 <= k_max) fn(std::span<const int>(k));
    int i = nu - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == k_max) {
      k[static_cast<std::size_t>(i)] = -k_max;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
  }
}

}  // namespace qpbeam
