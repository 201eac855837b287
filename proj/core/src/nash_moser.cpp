#include "qpbeam/nash_moser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qpbeam/averaged_solver.hpp"
#include "qpbeam/nonlinearity.hpp"
#include "qpbeam/oracle.hpp"

namespace qpbeam {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

FourierField zero_like(int nu, int d, int N) { return FourierField(nu, d, TruncationBox{N, 2}); }

FourierField fit(const FourierField& u, int N) { return u.cutoff() == N ? u : rebox(u, N); }

double relative(double num, double den) { return den > 0.0 ? num / den : num; }

// eps^{3/2}-free Taylor remainder of F at v in direction h, closed form.
FourierField remainder_closed(const FourierField& v, const FourierField& dv, const FourierField& h,
                              const FrequencyVector& omega, int N) {
  const FourierField dh = phase_derivative(h, omega);
  const FourierField bh = spatial_pairing(h, h, 2 * N, PairingWeight::GradSquared);
  FourierField vh = spatial_pairing(v, h, 2 * N, PairingWeight::GradSquared);
  vh *= 2.0;
  vh += bh;
  FourierField out = multiply(bh, dv, N);
  out += multiply(vh, dh, N);
  return out;
}

double inverse_proxy(const FourierField& v, const FourierField& f, const FrequencyVector& omega, double epsilon,
                     int N, double s, int probes) {
  if (probes <= 0) return 0.0;
  const FourierField* fields[] = {&v, &f};
  const auto support = ModeBasis::spatial_support(fields);
  if (support.empty()) return 0.0;
  return inverse_norm_proxy(v, omega, epsilon, N, support, probes, s).value;
}

void fill_diagnostics(LevelResult& r, const FourierField& f, const FrequencyVector& omega, const Schedule& sc) {
  const ScheduleParams& p = sc.params;
  const NormSpec rs{r.rho, p.s};
  const FourierField fn = fit(f, r.N);
  const double fnorm = std::pow(p.epsilon, 1.25) * sobolev_norm(fn, rs);
  r.projected_residual = relative(sobolev_norm(functional_residual(r.v, f, omega, p.epsilon, r.N), rs), fnorm);
  const int np = 2 * r.N;
  const double fpad = std::pow(p.epsilon, 1.25) * sobolev_norm(fit(f, np), NormSpec{0.0, p.s});
  r.full_residual =
      relative(sobolev_norm(functional_residual(r.v, f, omega, p.epsilon, np), NormSpec{0.0, p.s}), fpad);
  r.prior_norm = sobolev_norm(r.v, NormSpec{r.rho, p.s + 4.0});
  r.prior_ok = r.prior_norm <= 1.0;
}

}  // namespace

int compute_k0(double lambda) {
  if (!(2.0 * lambda > 1.0)) throw Error("compute_k0: requires 2 lambda > 1");
  // 2^12/(2 lambda)^k < 1/2  <=>  k ln(2 lambda) > 13 ln 2
  int k = 1;
  while (!(std::pow(2.0, 12) / std::pow(2.0 * lambda, k) < 0.5)) ++k;
  return k;
}

Schedule build_schedule(const ScheduleParams& p) {
  std::vector<std::string> v;
  if (p.nu < 1) v.push_back("nu must be at least 1");
  if (p.d < 1) v.push_back("d must be at least 1");
  if (p.M < 3) v.push_back("M must be at least 3 (got " + std::to_string(p.M) + ")");
  if (!(p.gamma > 1.0)) v.push_back("gamma must exceed 1 (got " + fmt(p.gamma) + ")");
  if (!(p.delta > 0.0 && p.delta < 1.0)) v.push_back("delta must lie in (0, 1) (got " + fmt(p.delta) + ")");
  if (!(0.5 * p.delta <= p.epsilon && p.epsilon <= p.delta)) {
    v.push_back("epsilon must satisfy delta/2 <= epsilon <= delta (got " + fmt(p.epsilon) + ")");
  }
  if (!(p.rho0 > 0.0)) v.push_back("rho0 must be positive");
  if (p.nu >= 1 && p.d >= 1 && p.s < sobolev_s0(p.nu, p.d)) {
    v.push_back("s must be at least s0 = " + std::to_string(sobolev_s0(p.nu, p.d)));
  }
  if (p.N0 < 1) v.push_back("N0 must be at least 1");
  if (p.levels < 1) v.push_back("levels must be at least 1");
  if (p.levels > 24 || (p.N0 >= 1 && p.levels >= 1 && static_cast<double>(p.N0) * std::ldexp(1.0, p.levels - 1) > 1e6)) {
    v.push_back("N0 * 2^(levels-1) is too large");
  }
  if (p.delta > 0.0 && p.gamma > 0.0 && !(std::pow(p.delta, 0.25) * p.gamma * p.gamma <= p.tau)) {
    v.push_back("delta^{1/4} gamma^2 = " + fmt(std::pow(p.delta, 0.25) * p.gamma * p.gamma) + " exceeds tau = " +
                fmt(p.tau));
  }
  if (!v.empty()) throw ConfigError(std::move(v));

  Schedule s;
  s.params = p;
  s.lambda = static_cast<double>(p.M - 1) / p.M;
  s.k0 = compute_k0(s.lambda);
  for (int n = 0; n < p.levels; ++n) {
    s.N.push_back(p.N0 << n);
    s.rho.push_back(std::pow(s.lambda, n) * p.rho0);
  }
  return s;
}

FourierField functional_residual(const FourierField& v, const FourierField& f, const FrequencyVector& omega,
                                 double epsilon, int N) {
  const FourierField vv = fit(v, N);
  FourierField r = apply_symbol(vv, omega, [epsilon](double wk, double j2) {
    return cplx(-wk * wk + j2 * j2, epsilon * wk);
  });
  r.axpy(std::pow(epsilon, 1.5), apply_F(vv, omega));
  r.axpy(-std::pow(epsilon, 1.25), fit(f, N));
  return r;
}

LevelResult solve_level0(const FourierField& f, const FrequencyVector& omega, const Schedule& schedule,
                         const IterationOptions& options) {
  require_zero_spatial_mean(f, "solve_level0");
  const ScheduleParams& p = schedule.params;
  const int N = schedule.N.at(0);
  const NormSpec ns{schedule.rho[0], p.s};
  const DiagonalSymbol L{p.epsilon, 0.0, omega};
  FourierField forcing = fit(f, N);
  forcing *= std::pow(p.epsilon, 1.25);

  LevelResult r;
  r.level = 0;
  r.N = N;
  r.rho = schedule.rho[0];
  FourierField v = zero_like(f.nu(), f.d(), N);
  double prev_diff = 0.0;
  for (int it = 1;; ++it) {
    FourierField rhs = forcing;
    if (!v.is_zero()) rhs.axpy(-std::pow(p.epsilon, 1.5), apply_F(v, omega));
    FourierField next = invert_diagonal(L, rhs);
    const double diff = sobolev_norm(next - v, ns);
    const double scale = sobolev_norm(next, ns);
    if (it >= 2) r.contraction = relative(diff, prev_diff);
    v = std::move(next);
    r.iterations = it;
    r.fixed_point_residual = relative(diff, scale);
    if (scale == 0.0 || diff <= options.tol * scale) break;
    if (it >= 3 && r.contraction >= 1.0) {
      throw ContractionError("level 0: U_0 is not a contraction (factor " + fmt(r.contraction) +
                                 "); reduce delta^{1/4} gamma",
                             r.contraction);
    }
    if (it >= options.max_iterations) break;
    prev_diff = diff;
  }
  r.v = v;
  r.increment = v;
  r.increment_norm = sobolev_norm(v, ns);
  fill_diagnostics(r, f, omega, schedule);
  r.inverse_proxy = inverse_proxy(zero_like(f.nu(), f.d(), N), f, omega, p.epsilon, N, p.s, options.proxy_probes);
  return r;
}

LevelResult solve_level_np1(const LevelResult& prev, const FourierField& f, const FrequencyVector& omega,
                            const Schedule& schedule, int n, const IterationOptions& options) {
  require_zero_spatial_mean(f, "solve_level_np1");
  const ScheduleParams& p = schedule.params;
  const int Nn = schedule.N.at(static_cast<std::size_t>(n));
  const int N = schedule.N.at(static_cast<std::size_t>(n + 1));
  const NormSpec ns{schedule.rho[static_cast<std::size_t>(n + 1)], p.s};
  const double e32 = std::pow(p.epsilon, 1.5);

  const FourierField vn = fit(prev.v, N);
  FourierField rn = galerkin_project(apply_F(vn, omega), Nn, GalerkinPart::Tail);
  rn *= e32;
  rn.axpy(-std::pow(p.epsilon, 1.25), galerkin_project(fit(f, N), Nn, GalerkinPart::Tail));

  LinearizedOptions lo = options.linear;
  lo.s = p.s;
  const LinearizedSolver solver(vn, omega, p.epsilon, N, lo);
  const FourierField dv = phase_derivative(vn, omega);

  LevelResult r;
  r.level = n + 1;
  r.N = N;
  r.rho = ns.rho;
  FourierField h = zero_like(f.nu(), f.d(), N);
  double prev_diff = 0.0;
  for (int it = 1;; ++it) {
    FourierField rhs = rn;
    if (!h.is_zero()) rhs.axpy(e32, remainder_closed(vn, dv, h, omega, N));
    FourierField next = rhs.is_zero() ? zero_like(f.nu(), f.d(), N) : -solver.solve(rhs).x;
    const double diff = sobolev_norm(next - h, ns);
    const double scale = sobolev_norm(next, ns);
    if (it >= 2) r.contraction = relative(diff, prev_diff);
    h = std::move(next);
    r.iterations = it;
    r.fixed_point_residual = relative(diff, scale);
    if (scale == 0.0 || diff <= options.tol * scale) break;
    if (it >= 3 && r.contraction >= 1.0) {
      throw ContractionError("level " + std::to_string(n + 1) + ": U_{n+1} is not a contraction (factor " +
                                 fmt(r.contraction) + "); reduce delta^{1/4} gamma",
                             r.contraction);
    }
    if (it >= options.max_iterations) break;
    prev_diff = diff;
  }
  r.increment = h;
  r.increment_norm = sobolev_norm(h, ns);
  r.v = vn + h;
  fill_diagnostics(r, f, omega, schedule);
  r.inverse_proxy = inverse_proxy(vn, f, omega, p.epsilon, N, p.s, options.proxy_probes);
  return r;
}

GridResidual pde_residual_on_grid(const FourierField& u, const FourierField& g, const FrequencyVector& omega,
                                  double epsilon, int grid) {
  const int nl = std::max(u.cutoff(), g.cutoff());
  FourierField lin = apply_symbol(fit(u, nl), omega, [epsilon](double wk, double j2) {
    return cplx(-wk * wk + j2 * j2, epsilon * wk);
  });
  lin.axpy(-std::pow(epsilon, 1.25), fit(g, nl));
  const FourierField b = spatial_pairing(u, u, 2 * u.cutoff(), PairingWeight::GradSquared);
  const FourierField du = phase_derivative(u, omega);

  const std::vector<int> sizes(static_cast<std::size_t>(u.nu() + u.d()), grid);
  const std::vector<int> phase_sizes(static_cast<std::size_t>(u.nu()), grid);
  const RealGrid gl = synthesize_on_grid(lin, sizes, AliasPolicy::Fold);
  const RealGrid gd = synthesize_on_grid(du, sizes, AliasPolicy::Fold);
  const RealGrid gb = synthesize_on_grid(b, phase_sizes, AliasPolicy::Fold);
  std::size_t spatial = 1;
  for (int i = 0; i < u.d(); ++i) spatial *= static_cast<std::size_t>(grid);
  const double e32 = std::pow(epsilon, 1.5);
  GridResidual out;
  double sum = 0.0;
  for (std::size_t q = 0; q < gl.values.size(); ++q) {
    const double r = gl.values[q] + e32 * gb.values[q / spatial] * gd.values[q];
    out.max_abs = std::max(out.max_abs, std::abs(r));
    sum += r * r;
  }
  out.rms = std::sqrt(sum / static_cast<double>(gl.values.size()));
  return out;
}

RunOutput run(const FourierField& g, const FrequencyVector& omega, const Schedule& schedule,
              const RunOptions& options) {
  const ScheduleParams& p = schedule.params;
  if (g.nu() != p.nu || g.d() != p.d) throw ShapeError("run: forcing dimensions differ from the schedule");
  if (omega.dimension() != p.nu) throw ShapeError("run: frequency dimension differs from nu");
  {
    const std::vector<int> z0(static_cast<std::size_t>(p.nu), 0), z1(static_cast<std::size_t>(p.d), 0);
    if (std::abs(g.coeff(ModeIndex{z0, z1})) > 1e-14 * std::max(1.0, g.max_abs())) {
      throw PhaseMeanError("run: forcing must have zero average over the torus");
    }
  }
  RunOutput out;
  RunReport& rep = out.report;
  const FourierField g0 = to_phase_only(g);
  const FourierField f = project_spatial(g, SpatialPart::Complement);
  out.u0 = solve_average(g0, omega, p.epsilon);
  rep.average_residual = residual_average(out.u0, g0, omega, p.epsilon, p.s);

  const int L = static_cast<int>(schedule.N.size());
  try {
    rep.levels.push_back(solve_level0(f, omega, schedule, options.iteration));
    for (int n = 0; n + 1 < L; ++n) {
      rep.levels.push_back(solve_level_np1(rep.levels.back(), f, omega, schedule, n, options.iteration));
      if (options.iteration.stop_increment > 0.0 && rep.levels.back().increment_norm < options.iteration.stop_increment) {
        rep.stopped_early = n + 2 < L;
        break;
      }
    }
  } catch (const Error& e) {
    rep.failure = e.what();
  }

  const double d14 = std::pow(p.delta, 0.25);
  const double lam = schedule.lambda;
  auto shape = [&](int l) {  // N_{l-1}^6 e^{-1/2 (1-lambda) rho_{l-1} N_{l-1}}
    const double Nl = schedule.N[static_cast<std::size_t>(l - 1)];
    return std::pow(Nl, 6) * std::exp(-0.5 * (1.0 - lam) * schedule.rho[static_cast<std::size_t>(l - 1)] * Nl);
  };
  rep.bounds_ok = true;
  rep.prior_ok = true;
  rep.residuals_ok = true;
  rep.monotone_residual = true;
  for (std::size_t l = 0; l < rep.levels.size(); ++l) {
    LevelResult& lr = rep.levels[l];
    if (l == 0) rep.theta0 = lr.increment_norm / (d14 * std::pow(static_cast<double>(schedule.N[0]), 6));
    if (l == 1) rep.theta1 = lr.increment_norm / (d14 * shape(1));
    if (l >= 2) {
      lr.bound_shape = d14 * rep.theta1 * shape(static_cast<int>(l));
      lr.bound_checked = true;
      lr.bound_ok = lr.increment_norm <= 0.5 * lr.bound_shape;
    }
    if (l >= 1 && !(lr.full_residual <= rep.levels[l - 1].full_residual || lr.full_residual <= options.residual_floor)) {
      rep.monotone_residual = false;
    }
    rep.bounds_ok = rep.bounds_ok && lr.bound_ok;
    rep.prior_ok = rep.prior_ok && lr.prior_ok;
    rep.residuals_ok = rep.residuals_ok && lr.projected_residual <= 100.0 * options.iteration.tol;
  }
  rep.converged = rep.failure.empty() && !rep.levels.empty() && rep.monotone_residual && rep.bounds_ok &&
                  rep.prior_ok && rep.residuals_ok;

  const int Nf = rep.levels.empty() ? schedule.N[0] : rep.levels.back().N;
  const FourierField v = rep.levels.empty() ? zero_like(p.nu, p.d, Nf) : rep.levels.back().v;
  out.u = to_full(fit(out.u0, Nf), p.d);
  out.u += v;
  out.U = std::pow(p.epsilon, 0.75) * out.u;

  const FourierField b = spatial_pairing(v, v, 2 * Nf, PairingWeight::GradSquared);
  const FourierField coupling = multiply(b, phase_derivative(fit(out.u0, Nf), omega), Nf);
  rep.coupling_defect = std::pow(p.epsilon, 1.5) * sobolev_norm(coupling, NormSpec{0.0, p.s});

  const GridResidual gr = pde_residual_on_grid(out.u, g, omega, p.epsilon, options.residual_grid);
  rep.final_residual_max = gr.max_abs;
  rep.final_residual_rms = gr.rms;
  rep.mean_of_u = std::abs(out.u.coeff(ModeIndex{std::vector<int>(static_cast<std::size_t>(p.nu), 0),
                                                 std::vector<int>(static_cast<std::size_t>(p.d), 0)}));
  rep.certificate = certify_nonresonance(omega, p.gamma, p.M, p.rho0,
                                         options.certificate_kmax > 0 ? options.certificate_kmax : Nf);
  return out;
}

void write_run_report(std::ostream& os, const RunReport& rep, const Schedule& schedule) {
  os << "level,N,rho,increment_norm,projected_residual,full_residual,contraction,iterations,"
        "fixed_point_residual,prior_norm,prior_ok,bound_shape,bound_ok,inverse_proxy\n";
  for (const LevelResult& l : rep.levels) {
    os << l.level << ',' << l.N << ',' << fmt(l.rho) << ',' << fmt(l.increment_norm) << ','
       << fmt(l.projected_residual) << ',' << fmt(l.full_residual) << ',' << fmt(l.contraction) << ','
       << l.iterations << ',' << fmt(l.fixed_point_residual) << ',' << fmt(l.prior_norm) << ','
       << (l.prior_ok ? 1 : 0) << ',' << (l.bound_checked ? fmt(l.bound_shape) : std::string("")) << ','
       << (l.bound_checked ? (l.bound_ok ? "1" : "0") : "") << ',' << fmt(l.inverse_proxy) << '\n';
  }
  os << "\nkey,value\n";
  os << "lambda," << fmt(schedule.lambda) << '\n';
  os << "k0," << schedule.k0 << '\n';
  os << "theta0," << fmt(rep.theta0) << '\n';
  os << "theta1," << fmt(rep.theta1) << '\n';
  os << "average_residual," << fmt(rep.average_residual) << '\n';
  os << "coupling_defect," << fmt(rep.coupling_defect) << '\n';
  os << "final_residual_max," << fmt(rep.final_residual_max) << '\n';
  os << "final_residual_rms," << fmt(rep.final_residual_rms) << '\n';
  os << "mean_of_u," << fmt(rep.mean_of_u) << '\n';
  os << "monotone_residual," << (rep.monotone_residual ? 1 : 0) << '\n';
  os << "bounds_ok," << (rep.bounds_ok ? 1 : 0) << '\n';
  os << "prior_ok," << (rep.prior_ok ? 1 : 0) << '\n';
  os << "residuals_ok," << (rep.residuals_ok ? 1 : 0) << '\n';
  os << "stopped_early," << (rep.stopped_early ? 1 : 0) << '\n';
  if (rep.certificate) {
    os << "certificate_gamma," << fmt(rep.certificate->gamma) << '\n';
    os << "certificate_kmax," << rep.certificate->k_max << '\n';
    os << "certificate_worst_ratio," << fmt(rep.certificate->worst_ratio) << '\n';
    os << "certificate_valid," << (rep.certificate->valid() ? 1 : 0) << '\n';
  }
  os << "verdict," << (rep.converged ? "converged" : "not_converged") << '\n';
  if (!rep.failure.empty()) {
    std::string msg = rep.failure;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << "failure," << msg << '\n';
  }
}

}  // namespace qpbeam
