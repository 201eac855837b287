#include "qpbeam/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "qpbeam/errors.hpp"

namespace qpbeam {

FrequencyVector::FrequencyVector(std::vector<double> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error("frequency vector must have at least one component");
  for (double c : components_) {
    if (!std::isfinite(c)) throw Error("frequency vector has a non-finite component");
  }
  // allow a rounding hair above 1 so normalized() output is accepted
  if (euclidean_norm() > 1.0 + 1e-15) {
    throw Error("frequency vector violates |omega|_2 <= 1 (norm " + std::to_string(euclidean_norm()) + ")");
  }
}

FrequencyVector FrequencyVector::normalized(std::vector<double> components) {
  double n = 0.0;
  for (double c : components) n += c * c;
  n = std::sqrt(n);
  if (!(n > 0.0)) throw Error("cannot normalize a zero frequency vector");
  for (double& c : components) c /= n;
  return FrequencyVector(std::move(components));
}

double FrequencyVector::dot(std::span<const int> k) const {
  if (k.size() != components_.size()) throw Error("dot: k has the wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += components_[i] * k[i];
  return s;
}

double FrequencyVector::euclidean_norm() const {
  double s = 0.0;
  for (double c : components_) s += c * c;
  return std::sqrt(s);
}

double FrequencyVector::max_abs() const {
  double m = 0.0;
  for (double c : components_) m = std::max(m, std::abs(c));
  return m;
}

double small_divisor(const FrequencyVector& omega, std::span<const int> k) {
  if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) {
    throw Error("small_divisor: k = 0 has no divisor");
  }
  return std::abs(omega.dot(k));
}

std::string NonresonanceCertificate::csv_header() {
  return "gamma,M,rho,K_max,worst_ratio,worst_divisor,valid,worst_k";
}

std::string NonresonanceCertificate::csv_row() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%d,%.17g,%.17g,%d,", gamma, M, rho, k_max, worst_ratio,
                worst_divisor, valid() ? 1 : 0);
  std::string row(buf);
  for (std::size_t i = 0; i < worst_k.size(); ++i) row += (i ? " " : "") + std::to_string(worst_k[i]);
  return row;
}

namespace {

struct WorstScan {
  double value = 0.0;  // max_k 1/(|omega.k| e^{(rho/M)|k|})
  std::vector<int> k;
  double divisor = 0.0;
};

WorstScan scan_worst(const FrequencyVector& omega, int M, double rho, int k_max) {
  WorstScan w;
  for_each_lattice_point(omega.dimension(), k_max, [&](std::span<const int> k) {
    int l1 = 0;
    for (int v : k) l1 += std::abs(v);
    const double div = std::abs(omega.dot(k));
    const double r = div == 0.0 ? std::numeric_limits<double>::infinity()
                                : 1.0 / (div * std::exp(rho / M * l1));
    if (w.k.empty() || r > w.value) {
      w.value = r;
      w.k.assign(k.begin(), k.end());
      w.divisor = div;
    }
  });
  return w;
}

void check_certificate_args(double gamma, int M, double rho, int k_max) {
  std::vector<std::string> v;
  if (!(gamma > 1.0)) v.push_back("gamma must exceed 1");
  if (M < 3) v.push_back("M must be at least 3");
  if (!(rho > 0.0)) v.push_back("rho must be positive");
  if (k_max < 1) v.push_back("K_max must be at least 1");
  if (!v.empty()) throw ConfigError(std::move(v));
}

}  // namespace

NonresonanceCertificate certify_nonresonance(const FrequencyVector& omega, double gamma, int M,
                                             double rho, int k_max) {
  check_certificate_args(gamma, M, rho, k_max);
  const WorstScan w = scan_worst(omega, M, rho, k_max);
  NonresonanceCertificate c;
  c.gamma = gamma;
  c.M = M;
  c.rho = rho;
  c.k_max = k_max;
  c.worst_ratio = w.value / gamma;
  c.worst_k = w.k;
  c.worst_divisor = w.divisor;
  return c;
}

double minimal_gamma(const FrequencyVector& omega, int M, double rho, int k_max) {
  check_certificate_args(2.0, M, rho, k_max);
  return scan_worst(omega, M, rho, k_max).value;
}

NonresonanceCertificate raise_gamma_until_valid(const FrequencyVector& omega, double gamma_start,
                                                int M, double rho, int k_max, int max_doublings) {
  double gamma = gamma_start;
  for (int i = 0; i <= max_doublings; ++i) {
    NonresonanceCertificate c = certify_nonresonance(omega, gamma, M, rho, k_max);
    if (c.valid()) return c;
    gamma *= 2.0;
  }
  throw Error("no valid certificate after " + std::to_string(max_doublings) + " doublings of gamma");
}

LiouvilleanFrequency build_liouvillean(GrowthRule rule, int depth, int tail_terms) {
  if (depth < 2) throw Error("build_liouvillean: depth must be at least 2");
  if (tail_terms < 0) throw Error("build_liouvillean: tail_terms must be nonnegative");
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();

  LiouvilleanFrequency out;
  // p_{-1}=1, q_{-1}=0; p_0=0, q_0=1 for alpha = [0; a_1, ...]
  std::int64_t p_prev = 1, q_prev = 0, p = 0, q = 1;
  auto push = [&](std::int64_t a) {
    if (a > 0 && (q > (kMax - q_prev) / a || p > (kMax - p_prev) / a)) {
      throw OverflowError("build_liouvillean: convergent denominator overflows 64 bits");
    }
    const std::int64_t pn = a * p + p_prev;
    const std::int64_t qn = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    out.convergents.push_back({p, q});
  };

  for (int n = 1; n <= depth; ++n) {
    std::int64_t a = 1;
    if (rule == GrowthRule::SuperExponential && n > 1) {
      const double e = std::ceil(std::exp(static_cast<double>(q)));
      if (!(e < 9.0e18)) {
        throw OverflowError("build_liouvillean: partial quotient e^{q_n} overflows at depth " +
                            std::to_string(n) + " (q = " + std::to_string(q) + ")");
      }
      a = static_cast<std::int64_t>(e);
    }
    out.partial_quotients.push_back(a);
    push(a);
  }
  for (int t = 0; t < tail_terms; ++t) push(1);

  // alpha = 1/(a_1 + 1/(... + 1/(a_depth + 1/phi))), phi = [1;1,1,...]
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  double x = phi;
  for (auto it = out.partial_quotients.rbegin(); it != out.partial_quotients.rend(); ++it) {
    x = static_cast<double>(*it) + 1.0 / x;
  }
  out.alpha = 1.0 / x;
  out.omega = FrequencyVector::normalized({1.0, out.alpha});

  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < out.convergents.size(); ++n) {
    sum += std::log(static_cast<double>(out.convergents[n + 1].q)) /
           static_cast<double>(out.convergents[n].q);
  }
  out.brjuno_partial_sum = sum;
  return out;
}

double dyadic_brjuno_sum(const FrequencyVector& omega, int m_max) {
  if (m_max < 0) throw Error("dyadic_brjuno_sum: m_max must be nonnegative");
  double sum = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    double mn = std::numeric_limits<double>::infinity();
    for_each_lattice_point(omega.dimension(), 1 << m,
                           [&](std::span<const int> k) { mn = std::min(mn, std::abs(omega.dot(k))); });
    if (mn == 0.0) return std::numeric_limits<double>::infinity();
    sum += std::ldexp(std::log(1.0 / mn), -m);
  }
  return sum;
}

}  // namespace qpbeam
