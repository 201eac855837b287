#include "qpbeam/linear_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include "qpbeam/oracle.hpp"

namespace qpbeam {

cplx theta_value(double epsilon, double mu, double varsigma, double j2) {
  return {-varsigma * varsigma + j2 * j2, std::pow(epsilon, 1.5) * mu * varsigma + epsilon * varsigma};
}

cplx theta_symbol(double epsilon, double mu, const FrequencyVector& omega, std::span<const int> k,
                  std::span<const int> j) {
  double j2 = 0.0;
  for (int v : j) j2 += static_cast<double>(v) * v;
  return theta_value(epsilon, mu, omega.dot(k), j2);
}

FourierField DiagonalSymbol::apply(const FourierField& h) const {
  return apply_symbol(h, omega, [this](double wk, double j2) { return (*this)(wk, j2); });
}

// ---------------------------------------------------------------------------

SymbolFloorReport symbol_floor(double epsilon, double mu, double delta, int J0, double range, int j_max,
                               int d, int grid_points) {
  SymbolFloorReport rep;
  rep.epsilon = epsilon;
  rep.mu = mu;
  rep.delta = delta;
  rep.J0 = J0;
  if (!(std::sqrt(delta) * std::abs(mu) <= 0.5)) {
    rep.precondition_failures.push_back("delta^{1/2}|mu| <= 1/2 violated");
  }
  if (!(0.5 * delta <= epsilon && epsilon <= delta)) {
    rep.precondition_failures.push_back("epsilon outside [delta/2, delta]");
  }
  if (J0 <= 1) rep.precondition_failures.push_back("J0 must exceed 1");
  rep.preconditions_ok = rep.precondition_failures.empty();
  if (d < 1 || j_max < 1 || grid_points < 2 || !(range > 0.0)) throw Error("symbol_floor: bad scan extent");

  std::set<int> j2s;
  {
    std::vector<int> j(static_cast<std::size_t>(d), -j_max);
    while (true) {
      int n = 0;
      for (int v : j) n += v * v;
      if (n > 0 && n <= j_max * j_max) j2s.insert(n);
      int i = d - 1;
      while (i >= 0 && j[static_cast<std::size_t>(i)] == j_max) j[static_cast<std::size_t>(i--)] = -j_max;
      if (i < 0) break;
      ++j[static_cast<std::size_t>(i)];
    }
  }

  const double J = static_cast<double>(J0);
  const double lo_edge = 1.0 - 1e-3;
  const double hi_edge = (1.0 + 1e-3) * std::sqrt(J);
  std::set<double> sigmas;
  for (int i = 0; i < grid_points; ++i) sigmas.insert(-range + 2.0 * range * i / (grid_points - 1));
  auto add_pm = [&](double x) {
    if (x >= 0.0 && x <= range) {
      sigmas.insert(x);
      sigmas.insert(-x);
    }
  };
  add_pm(0.0);
  add_pm(lo_edge);
  add_pm(hi_edge);
  add_pm(1.0 + 1e-3);
  for (int n : j2s) {
    const double j4 = static_cast<double>(n) * n;
    add_pm(static_cast<double>(n));
    add_pm(std::sqrt(j4 + 0.5 * J));
    if (j4 > 0.5 * J) add_pm(std::sqrt(j4 - 0.5 * J));
  }

  rep.min_theta = std::numeric_limits<double>::infinity();
  rep.min_margin = std::numeric_limits<double>::infinity();
  const double band = delta * delta * lo_edge * lo_edge / 16.0;
  for (int n : j2s) {
    const double j2 = n;
    const double j4 = j2 * j2;
    for (double sg : sigmas) {
      const double t2 = std::norm(theta_value(epsilon, mu, sg, j2));
      double bound = 0.0;
      const char* region = nullptr;
      if (j4 <= J) {
        if (std::abs(sg) < lo_edge) {
          bound = 1e-6;
          region = "a:inner";
        } else if (std::abs(sg) > hi_edge) {
          bound = 1e-6 * J * J;
          region = "a:outer";
        } else {
          bound = band;
          region = "a:band";
        }
      } else if (std::abs(j4 - sg * sg) >= 0.5 * J) {
        bound = 0.25 * J * J;
        region = "b:off";
      } else {
        bound = delta * delta * J / 32.0;
        region = "b:near";
      }
      ++rep.points;
      rep.min_theta = std::min(rep.min_theta, std::sqrt(t2));
      const double margin = t2 / bound - 1.0;
      rep.min_margin = std::min(rep.min_margin, margin);
      if (margin < 0.0) rep.violations.push_back({sg, j2, t2, bound, region});
    }
  }
  rep.k0_bound_ok = rep.min_theta >= delta / kSymbolK0;
  return rep;
}

// ---------------------------------------------------------------------------

FourierField invert_diagonal(const DiagonalSymbol& symbol, const FourierField& h, const DiagonalOptions& options) {
  require_zero_spatial_mean(h, "invert_diagonal");
  const FieldLayout& lay = h.layout();
  const std::vector<double> wk = phase_frequencies(lay, symbol.omega);
  FourierField out(h.nu(), h.d(), h.box(), h.arity());
  std::vector<int> k(static_cast<std::size_t>(h.nu()));
  for (std::size_t slot = 0; slot < lay.spatial_count(); ++slot) {
    if (!h.slice_active(slot)) continue;
    const double j2 = lay.spatial_l2sq(slot);
    const auto src = h.slice(slot);
    auto dst = out.mutable_slice(slot);
    for (std::size_t idx : lay.phase_box_indices()) {
      if (src[idx] == cplx{}) continue;
      const cplx th = symbol(wk[idx], j2);
      if (std::abs(th) < options.floor) {
        lay.phase_mode(idx, k);
        throw SymbolError("invert_diagonal: |Theta| = " + std::to_string(std::abs(th)) + " below floor");
      }
      dst[idx] = src[idx] / th;
    }
  }
  if (options.bound_norm) {
    const double lhs = sobolev_norm(out, *options.bound_norm);
    const double rhs = kSymbolK0 / options.delta * sobolev_norm(h, *options.bound_norm);
    if (!(lhs <= rhs)) {
      throw SymbolError("invert_diagonal: ||D^{-1}h|| = " + std::to_string(lhs) + " exceeds K_0/delta ||h|| = " +
                        std::to_string(rhs));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

LtildeSolver::LtildeSolver(const FourierField& v, const FrequencyVector& omega, double epsilon,
                           const ReductionOptions& options)
    : remainder_(v, compute_beta(v, omega, epsilon, options)),
      D_{epsilon, remainder_.data().mu, omega} {}

FourierField LtildeSolver::apply(const FourierField& x) const {
  FourierField out = D_.apply(x);
  out += remainder_(x);
  return out;
}

NeumannResult LtildeSolver::solve(const FourierField& h, const NeumannOptions& options) const {
  require_zero_spatial_mean(h, "invert_Ltilde");
  const NormSpec norm{0.0, options.s};
  NeumannResult res;
  const double hn = sobolev_norm(h, norm);
  if (hn == 0.0) {
    res.x = FourierField(h.nu(), h.d(), h.box(), h.arity());
    return res;
  }
  res.x = invert_diagonal(D_, h);
  double prev_step = sobolev_norm(res.x, norm);
  int rising = 0;
  for (int it = 1;; ++it) {
    const FourierField r = h - apply(res.x);
    res.residual = sobolev_norm(r, norm) / hn;
    res.iterations = it;
    if (res.residual <= options.tol) break;
    if (it >= options.max_iterations) {
      throw ContractionError("invert_Ltilde: no convergence after " + std::to_string(it) +
                                 " iterations (residual " + std::to_string(res.residual) + ")",
                             res.contraction);
    }
    const FourierField dx = invert_diagonal(D_, r);
    const double step = sobolev_norm(dx, norm);
    res.contraction = prev_step > 0.0 ? step / prev_step : 0.0;
    rising = res.contraction >= 1.0 ? rising + 1 : 0;
    if (rising >= 2) {
      throw ContractionError("invert_Ltilde: Neumann iteration does not contract (factor " +
                                 std::to_string(res.contraction) + ")",
                             res.contraction);
    }
    res.x += dx;
    prev_step = step;
  }
  if (options.delta > 0.0) {
    res.bound_ok = sobolev_norm(res.x, norm) <= 2.0 * kSymbolK0 / options.delta * hn;
  }
  return res;
}

FourierField invert_Ltilde(const FourierField& v, const FrequencyVector& omega, double epsilon,
                           const FourierField& h, const NeumannOptions& options) {
  ReductionOptions ro;
  ro.beta_cutoff = h.cutoff();
  return LtildeSolver(v.cutoff() == h.cutoff() ? v : rebox(v, h.cutoff()), omega, epsilon, ro).solve(h, options).x;
}

// ---------------------------------------------------------------------------

LinearizedSolver::LinearizedSolver(const FourierField& v, const FrequencyVector& omega, double epsilon, int cutoff,
                                   const LinearizedOptions& options)
    : v_(v.cutoff() == cutoff ? v : rebox(v, cutoff)),
      omega_(omega),
      epsilon_(epsilon),
      cutoff_(cutoff),
      options_(options),
      lin_(v_, omega) {
  if (options.method == LinearMethod::Conjugation) {
    ReductionOptions ro;
    ro.beta_cutoff = cutoff;
    tilde_.emplace(v_, omega, epsilon, ro);
  }
}

FourierField LinearizedSolver::apply(const FourierField& x) const {
  return apply_linearized_operator(lin_, epsilon_, x, cutoff_);
}

LinearizedResult LinearizedSolver::solve(const FourierField& h) const {
  require_zero_spatial_mean(h, "invert_linearized");
  return options_.method == LinearMethod::Conjugation ? solve_conjugation(h) : solve_direct(h);
}

LinearizedResult LinearizedSolver::solve_conjugation(const FourierField& h) const {
  const NormSpec norm{0.0, options_.s};
  const FourierField rhs = h.cutoff() == cutoff_ ? h : rebox(h, cutoff_);
  LinearizedResult out;
  out.x = FourierField(rhs.nu(), rhs.d(), rhs.box(), rhs.arity());
  const double hn = sobolev_norm(rhs, norm);
  if (hn == 0.0) return out;
  const ReductionData& data = tilde_->data();
  FourierField r = rhs;
  double prev = std::numeric_limits<double>::infinity();
  for (int c = 0;; ++c) {
    out.residual = sobolev_norm(r, norm) / hn;
    out.corrections = c;
    if (out.residual <= options_.tol) break;
    if (c >= options_.max_corrections) {
      throw ContractionError("invert_linearized: defect correction stalled at residual " +
                                 std::to_string(out.residual),
                             out.residual / prev);
    }
    if (c >= 2 && out.residual >= prev) {
      throw ContractionError("invert_linearized: defect correction diverges (factor " +
                                 std::to_string(out.residual / prev) + ")",
                             out.residual / prev);
    }
    prev = out.residual;
    NeumannOptions no = options_.neumann;
    no.s = options_.s;
    const NeumannResult nr = tilde_->solve(apply_A(r, data, true, cutoff_), no);
    out.neumann_iterations += nr.iterations;
    out.x += apply_A(nr.x, data, false, cutoff_);
    r = rhs - apply(out.x);
  }
  return out;
}

LinearizedResult LinearizedSolver::solve_direct(const FourierField& h) const {
  const FourierField rhs = h.cutoff() == cutoff_ ? h : rebox(h, cutoff_);
  const FourierField* fields[] = {&v_, &rhs};
  const auto support = ModeBasis::spatial_support(fields);
  LinearizedResult out;
  if (support.empty()) {
    out.x = FourierField(rhs.nu(), rhs.d(), rhs.box(), rhs.arity());
    return out;
  }
  const ModeBasis basis = ModeBasis::with_spatial_support(rhs.nu(), rhs.d(), cutoff_, support);
  if (basis.size() > options_.dense_cap) {
    throw SolveError("invert_linearized: dense basis of " + std::to_string(basis.size()) + " modes exceeds cap " +
                     std::to_string(options_.dense_cap));
  }
  const Eigen::MatrixXcd A = assemble_dense(basis, [this](const FourierField& x) { return apply(x); },
                                            options_.dense_cap);
  const Eigen::VectorXcd b = basis.to_vector(rhs);
  out.x = basis.from_vector(dense_solve(A, b));
  const NormSpec norm{0.0, options_.s};
  const double hn = sobolev_norm(rhs, norm);
  out.residual = hn > 0.0 ? sobolev_norm(rhs - apply(out.x), norm) / hn : 0.0;
  return out;
}

FourierField invert_linearized(const FourierField& v, const FrequencyVector& omega, double epsilon, int cutoff,
                               const FourierField& h, const LinearizedOptions& options) {
  return LinearizedSolver(v, omega, epsilon, cutoff, options).solve(h).x;
}

// ---------------------------------------------------------------------------

InverseProxy inverse_norm_proxy(const FourierField& v, const FrequencyVector& omega, double epsilon, int cutoff,
                                std::span<const std::vector<int>> spatial_support, int probes, double s) {
  const ModeBasis basis = ModeBasis::with_spatial_support(v.nu(), v.d(), cutoff, spatial_support);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const ModeIndex& mi = basis.mode(m);
    ranked.emplace_back(std::abs(theta_symbol(epsilon, 0.0, omega, mi.k, mi.j)), m);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  LinearizedOptions lo;
  lo.s = s;
  const LinearizedSolver solver(v, omega, epsilon, cutoff, lo);
  InverseProxy out;
  out.min_theta = ranked.empty() ? 0.0 : ranked.front().first;
  const NormSpec norm{0.0, s};
  TruncationBox box = v.box();
  box.cutoff = cutoff;
  for (int i = 0; i < probes && i < static_cast<int>(ranked.size()); ++i) {
    const ModeIndex& mi = basis.mode(ranked[static_cast<std::size_t>(i)].second);
    const std::pair<ModeIndex, cplx> e{mi, 0.5};
    const FourierField p = field_from_modes(std::span(&e, 1), v.nu(), v.d(), box);
    const double ratio = sobolev_norm(solver.solve(p).x, norm) / sobolev_norm(p, norm);
    if (ratio > out.value) {
      out.value = ratio;
      out.worst_k = mi.k;
      out.worst_j = mi.j;
    }
  }
  return out;
}

}  // namespace qpbeam
