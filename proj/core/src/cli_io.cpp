#include "qpbeam/cli_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "qpbeam/averaged_solver.hpp"
#include "qpbeam/nonlinearity.hpp"
#include "qpbeam/oracle.hpp"
#include "qpbeam/reduction.hpp"

namespace qpbeam {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string s = "invalid configuration:";
  for (const auto& m : v) s += "\n  - " + m;
  return s;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::set<std::string> kKeys = {"nu",  "d",      "s",         "rho0",          "M",
                                     "gamma", "delta", "epsilon",   "N0",            "levels",
                                     "tau", "forcing", "frequency", "tol",           "stop_increment",
                                     "linear_method", "residual_grid", "sample_grid", "certificate_kmax"};

class Reader {
 public:
  Reader(const YAML::Node& root, std::vector<std::string>& errors) : root_(root), errors_(errors) {}

  template <class T>
  std::optional<T> get(const std::string& key) {
    const YAML::Node n = root_[key];
    if (!n) return std::nullopt;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      errors_.push_back(key + ": expected " + (std::is_integral_v<T> ? "an integer" : "a number"));
      return std::nullopt;
    }
  }

 private:
  const YAML::Node& root_;
  std::vector<std::string>& errors_;
};

int mode_size(const ModeIndex& m) {
  int a = 1;
  int b = 0;
  for (int x : m.k) b += std::abs(x);
  a = std::max(a, b);
  b = 0;
  for (int x : m.j) b += std::abs(x);
  return std::max(a, b);
}

void parse_frequency(const YAML::Node& n, Config& c, std::vector<std::string>& errors) {
  if (!n) return;
  if (n.IsSequence()) {
    c.frequency.kind = FrequencySpec::Kind::Vector;
    try {
      c.frequency.components = n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      errors.push_back("frequency: expected a list of numbers");
    }
    return;
  }
  if (n.IsMap() && n["liouvillean"]) {
    c.frequency.kind = FrequencySpec::Kind::Liouvillean;
    try {
      c.frequency.depth = n["liouvillean"].as<int>();
    } catch (const YAML::Exception&) {
      errors.push_back("frequency: liouvillean depth must be an integer");
    }
    return;
  }
  if (n.IsScalar()) {
    const std::string s = n.as<std::string>();
    if (s == "golden") {
      c.frequency.kind = FrequencySpec::Kind::Golden;
      return;
    }
    int depth = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "liouvillean{%d%c", &depth, &tail) == 2 && tail == '}') {
      c.frequency.kind = FrequencySpec::Kind::Liouvillean;
      c.frequency.depth = depth;
      return;
    }
  }
  errors.push_back("frequency: expected a vector, 'golden', or liouvillean{depth}");
}

void parse_forcing(const YAML::Node& n, Config& c, const std::string& base_dir, std::vector<std::string>& errors) {
  if (!n) return;
  if (n.IsScalar()) {
    const std::string s = n.as<std::string>();
    if (s == "default") return;
    std::filesystem::path p(s);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    c.forcing_file = p.string();
    return;
  }
  if (!n.IsSequence()) {
    errors.push_back("forcing: expected 'default', a file path, or a list of [k..., j..., re, im] rows");
    return;
  }
  const int nu = c.schedule.nu;
  const int d = c.schedule.d;
  for (std::size_t r = 0; r < n.size(); ++r) {
    std::vector<double> row;
    try {
      row = n[r].as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      errors.push_back("forcing row " + std::to_string(r) + ": expected numbers");
      continue;
    }
    if (static_cast<int>(row.size()) != nu + d + 2) {
      errors.push_back("forcing row " + std::to_string(r) + ": expected " + std::to_string(nu + d + 2) + " entries");
      continue;
    }
    ModeIndex m;
    bool integral = true;
    for (int i = 0; i < nu + d; ++i) {
      const double x = row[static_cast<std::size_t>(i)];
      if (x != std::round(x)) integral = false;
      (i < nu ? m.k : m.j).push_back(static_cast<int>(std::lround(x)));
    }
    if (!integral) {
      errors.push_back("forcing row " + std::to_string(r) + ": mode indices must be integers");
      continue;
    }
    c.forcing.emplace_back(std::move(m), cplx(row[static_cast<std::size_t>(nu + d)], row[static_cast<std::size_t>(nu + d + 1)]));
  }
}

std::vector<std::string> config_violations(const Config& c) {
  std::vector<std::string> v;
  ScheduleParams p = c.schedule;
  if (c.gamma_auto) {
    // tau is checked again once gamma is known
    p.gamma = 2.0;
    p.tau = 1e300;
  }
  try {
    build_schedule(p);
  } catch (const ConfigError& e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }
  if (c.frequency.kind == FrequencySpec::Kind::Vector) {
    if (static_cast<int>(c.frequency.components.size()) != c.schedule.nu) {
      v.push_back("frequency: expected " + std::to_string(c.schedule.nu) + " components");
    } else {
      try {
        FrequencyVector w(c.frequency.components);
      } catch (const Error& e) {
        v.push_back(std::string("frequency: ") + e.what());
      }
    }
  } else if (c.schedule.nu != 2) {
    v.push_back("frequency: golden and liouvillean vectors need nu = 2");
  }
  if (c.frequency.kind == FrequencySpec::Kind::Liouvillean && c.frequency.depth < 2) {
    v.push_back("frequency: liouvillean depth must be at least 2");
  }
  if (c.tol <= 0.0 || !(c.tol < 1.0)) v.push_back("tol must lie in (0, 1)");
  if (c.stop_increment < 0.0) v.push_back("stop_increment must be nonnegative");
  if (c.residual_grid < 1) v.push_back("residual_grid must be positive");
  if (c.sample_grid < 1) v.push_back("sample_grid must be positive");
  if (c.certificate_kmax < 0) v.push_back("certificate_kmax must be nonnegative");
  if (c.forcing_file.empty()) {
    const auto modes =
        c.forcing.empty() ? default_forcing_modes(c.schedule.nu, c.schedule.d) : c.forcing;
    cplx mean{};
    for (const auto& [m, val] : modes) {
      if (static_cast<int>(m.k.size()) != c.schedule.nu || static_cast<int>(m.j.size()) != c.schedule.d) continue;
      if (std::all_of(m.k.begin(), m.k.end(), [](int x) { return x == 0; }) &&
          std::all_of(m.j.begin(), m.j.end(), [](int x) { return x == 0; })) {
        mean += val;
      }
    }
    if (std::abs(mean) != 0.0) v.push_back("forcing: average over the torus must vanish");
  } else if (!std::filesystem::exists(c.forcing_file)) {
    v.push_back("forcing: file not found: " + c.forcing_file);
  }
  return v;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

std::vector<std::pair<ModeIndex, cplx>> default_forcing_modes(int nu, int d) {
  std::vector<std::pair<ModeIndex, cplx>> out;
  if (nu < 1 || d < 1) return out;
  auto mode = [&](int k1, int k2, int j1) {
    ModeIndex m{std::vector<int>(static_cast<std::size_t>(nu), 0), std::vector<int>(static_cast<std::size_t>(d), 0)};
    m.k[0] = k1;
    if (nu >= 2) m.k[1] = k2;
    m.j[0] = j1;
    return m;
  };
  for (int a : {1, -1}) {
    for (int b : {1, -1}) out.emplace_back(mode(a, 0, b), 0.25);
  }
  if (nu >= 2) {
    // 0.5 cos(phi_2) sin(x_1)
    for (int a : {1, -1}) {
      out.emplace_back(mode(0, a, 1), cplx(0.0, -0.125));
      out.emplace_back(mode(0, a, -1), cplx(0.0, 0.125));
    }
  }
  return out;
}

Config parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("malformed YAML: ") + e.what()});
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError({"configuration must be a key-value map"});

  std::vector<std::string> errors;
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!kKeys.contains(key)) errors.push_back("unknown key '" + key + "'");
  }
  Config c;
  Reader rd(root, errors);
  ScheduleParams& p = c.schedule;
  if (auto x = rd.get<int>("nu")) p.nu = *x;
  if (auto x = rd.get<int>("d")) p.d = *x;
  p.s = sobolev_s0(std::max(p.nu, 1), std::max(p.d, 1));
  if (auto x = rd.get<double>("s")) p.s = *x;
  if (auto x = rd.get<double>("rho0")) p.rho0 = *x;
  if (auto x = rd.get<int>("M")) p.M = *x;
  if (root["gamma"] && root["gamma"].IsScalar() && root["gamma"].as<std::string>() == "auto") {
    c.gamma_auto = true;
  } else if (auto x = rd.get<double>("gamma")) {
    p.gamma = *x;
  }
  if (auto x = rd.get<double>("delta")) p.delta = *x;
  p.epsilon = 0.75 * p.delta;
  if (root["epsilon"]) {
    if (root["epsilon"].IsScalar() && root["epsilon"].as<std::string>() == "mid") {
      p.epsilon = 0.75 * p.delta;
    } else if (auto x = rd.get<double>("epsilon")) {
      p.epsilon = *x;
    }
  }
  if (auto x = rd.get<int>("N0")) p.N0 = *x;
  if (auto x = rd.get<int>("levels")) p.levels = *x;
  if (auto x = rd.get<double>("tau")) p.tau = *x;
  if (auto x = rd.get<double>("tol")) c.tol = *x;
  if (auto x = rd.get<double>("stop_increment")) c.stop_increment = *x;
  if (auto x = rd.get<int>("residual_grid")) c.residual_grid = *x;
  if (auto x = rd.get<int>("sample_grid")) c.sample_grid = *x;
  if (auto x = rd.get<int>("certificate_kmax")) c.certificate_kmax = *x;
  if (root["linear_method"]) {
    const std::string m = root["linear_method"].as<std::string>();
    if (m == "conjugation") {
      c.linear_method = LinearMethod::Conjugation;
    } else if (m == "direct") {
      c.linear_method = LinearMethod::Direct;
    } else {
      errors.push_back("linear_method: expected 'conjugation' or 'direct'");
    }
  }
  parse_frequency(root["frequency"], c, errors);
  parse_forcing(root["forcing"], c, base_dir, errors);

  const auto more = config_violations(c);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open configuration file " + path});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

void validate_config(const Config& config) {
  auto v = config_violations(config);
  if (!v.empty()) throw ConfigError(std::move(v));
}

FrequencyVector resolve_frequency(const Config& config) {
  switch (config.frequency.kind) {
    case FrequencySpec::Kind::Vector:
      return FrequencyVector(config.frequency.components);
    case FrequencySpec::Kind::Golden:
      return FrequencyVector::normalized({1.0, 0.5 * (std::sqrt(5.0) - 1.0)});
    case FrequencySpec::Kind::Liouvillean:
      return build_liouvillean(GrowthRule::SuperExponential, config.frequency.depth).omega;
  }
  throw Error("unknown frequency kind");
}

FourierField build_forcing(const Config& config, int cutoff) {
  const int nu = config.schedule.nu;
  const int d = config.schedule.d;
  if (!config.forcing_file.empty()) {
    std::ifstream in(config.forcing_file);
    if (!in) throw ConfigError({"forcing: cannot open " + config.forcing_file});
    FourierField g = read_coefficient_dump(in);
    if (g.nu() != nu || g.d() != d) throw ConfigError({"forcing: file dimensions differ from nu, d"});
    return rebox(g, std::max(cutoff, g.cutoff()));
  }
  const auto modes = config.forcing.empty() ? default_forcing_modes(nu, d) : config.forcing;
  int need = cutoff;
  for (const auto& [m, v] : modes) need = std::max(need, mode_size(m));
  return field_from_modes(modes, nu, d, TruncationBox{need, 2});
}

Schedule resolve_schedule(const Config& config, const FrequencyVector& omega) {
  ScheduleParams p = config.schedule;
  if (config.gamma_auto) {
    const int kmax = config.certificate_kmax > 0 ? config.certificate_kmax : p.N0 << (p.levels - 1);
    p.gamma = raise_gamma_until_valid(omega, 2.0, p.M, p.rho0, kmax).gamma;
  }
  return build_schedule(p);
}

RunOptions run_options(const Config& config) {
  RunOptions o;
  o.iteration.tol = config.tol;
  o.iteration.stop_increment = config.stop_increment;
  o.iteration.linear.method = config.linear_method;
  o.residual_grid = config.residual_grid;
  o.certificate_kmax = config.certificate_kmax;
  return o;
}

void write_grid_samples(std::ostream& os, const FourierField& U, int grid) {
  const int dims = U.nu() + U.d();
  const std::vector<int> sizes(static_cast<std::size_t>(dims), grid);
  const RealGrid g = synthesize_on_grid(U, sizes, AliasPolicy::Fold);
  for (int i = 0; i < U.nu(); ++i) os << "phi_" << i + 1 << ',';
  for (int i = 0; i < U.d(); ++i) os << "x_" << i + 1 << ',';
  os << "U\n";
  std::vector<int> idx(static_cast<std::size_t>(dims), 0);
  const double h = 2.0 * kPi / grid;
  for (std::size_t q = 0; q < g.values.size(); ++q) {
    std::size_t r = q;
    for (int i = dims - 1; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(r % static_cast<std::size_t>(grid));
      r /= static_cast<std::size_t>(grid);
    }
    for (int i = 0; i < dims; ++i) os << fmt(h * idx[static_cast<std::size_t>(i)]) << ',';
    os << fmt(g.values[q]) << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

int do_solve(const Config& config, const std::filesystem::path& out, std::ostream& log) {
  const FrequencyVector omega = resolve_frequency(config);
  const Schedule sc = resolve_schedule(config, omega);
  const FourierField g = build_forcing(config, sc.N.back());
  const RunOutput res = run(g, omega, sc, run_options(config));
  {
    auto os = open_out(out / "run_report.csv");
    write_run_report(os, res.report, sc);
  }
  {
    auto os = open_out(out / "solution_coefficients.txt");
    write_coefficient_dump(os, res.U);
  }
  {
    auto os = open_out(out / "grid_samples.csv");
    write_grid_samples(os, res.U, config.sample_grid);
  }
  const RunReport& r = res.report;
  log << "levels completed: " << r.levels.size() << "/" << sc.N.size() << "\n";
  log << "gamma: " << sc.params.gamma << "\n";
  log << "final residual (max on grid): " << fmt(r.final_residual_max) << "\n";
  log << "verdict: " << (r.converged ? "converged" : "not converged") << "\n";
  if (!r.failure.empty()) log << "failure: " << r.failure << "\n";
  return r.converged ? 0 : 1;
}

int do_check_frequency(const Config& config, const std::filesystem::path& out, std::ostream& log) {
  const FrequencyVector omega = resolve_frequency(config);
  const Schedule sc = resolve_schedule(config, omega);
  const ScheduleParams& p = sc.params;
  const int kmax = config.certificate_kmax > 0 ? config.certificate_kmax : sc.N.back();
  const NonresonanceCertificate cert = certify_nonresonance(omega, p.gamma, p.M, p.rho0, kmax);
  auto os = open_out(out / "certificate.csv");
  os << NonresonanceCertificate::csv_header() << ",minimal_gamma,dyadic_brjuno\n";
  const double dyadic = dyadic_brjuno_sum(omega, std::min(8, static_cast<int>(std::log2(kmax))));
  os << cert.csv_row() << ',' << fmt(minimal_gamma(omega, p.M, p.rho0, kmax)) << ',' << fmt(dyadic) << '\n';
  log << NonresonanceCertificate::csv_header() << "\n" << cert.csv_row() << "\n";
  if (config.frequency.kind != FrequencySpec::Kind::Vector) {
    const LiouvilleanFrequency lf = build_liouvillean(
        config.frequency.kind == FrequencySpec::Kind::Golden ? GrowthRule::None : GrowthRule::SuperExponential,
        config.frequency.kind == FrequencySpec::Kind::Golden ? 3 : config.frequency.depth);
    log << "alpha " << fmt(lf.alpha) << ", partial Brjuno sum " << fmt(lf.brjuno_partial_sum) << "\n";
    for (const Convergent& cv : lf.convergents) log << "  p/q = " << cv.p << "/" << cv.q << "\n";
  }
  return 0;
}

int do_spectrum(const Config& config, const std::filesystem::path& out, std::ostream& log) {
  const FrequencyVector omega = resolve_frequency(config);
  const ScheduleParams& p = config.schedule;
  const FourierField g = build_forcing(config, p.N0);
  const FourierField* fields[] = {&g};
  auto support = ModeBasis::spatial_support(fields);
  if (support.empty()) {
    support.emplace_back(static_cast<std::size_t>(p.d), 0);
    support.back()[0] = 1;
  }
  const ModeBasis basis = ModeBasis::with_spatial_support(p.nu, p.d, p.N0, support);
  std::vector<std::pair<double, std::size_t>> rows;
  for (std::size_t m = 0; m < basis.size(); ++m) {
    rows.emplace_back(std::abs(theta_symbol(p.epsilon, 0.0, omega, basis.mode(m).k, basis.mode(m).j)), m);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  {
    auto os = open_out(out / "spectrum.csv");
    for (int i = 0; i < p.nu; ++i) os << "k_" << i + 1 << ',';
    for (int i = 0; i < p.d; ++i) os << "j_" << i + 1 << ',';
    os << "re,im,abs\n";
    for (const auto& [a, m] : rows) {
      const ModeIndex& mi = basis.mode(m);
      const cplx t = theta_symbol(p.epsilon, 0.0, omega, mi.k, mi.j);
      for (int x : mi.k) os << x << ',';
      for (int x : mi.j) os << x << ',';
      os << fmt(t.real()) << ',' << fmt(t.imag()) << ',' << fmt(a) << '\n';
    }
  }
  auto os = open_out(out / "symbol_floor.csv");
  os << "epsilon,mu,delta,J0,points,min_theta,min_margin,k0_bound_ok,preconditions_ok,violations\n";
  bool ok = true;
  for (double mu : {0.0, 0.2}) {
    const SymbolFloorReport r = symbol_floor(p.epsilon, mu, p.delta, 4, 6.0, 8, p.d);
    os << fmt(r.epsilon) << ',' << fmt(r.mu) << ',' << fmt(r.delta) << ',' << r.J0 << ',' << r.points << ','
       << fmt(r.min_theta) << ',' << fmt(r.min_margin) << ',' << (r.k0_bound_ok ? 1 : 0) << ','
       << (r.preconditions_ok ? 1 : 0) << ',' << r.violations.size() << '\n';
    log << "symbol floor mu=" << mu << ": min|Theta| " << fmt(r.min_theta) << ", "
        << (r.ok() ? "all bounds hold" : "bound check failed") << "\n";
    ok = ok && r.ok();
  }
  return ok ? 0 : 1;
}

int do_verify(const Config& config, std::ostream& log) {
  const FrequencyVector omega = resolve_frequency(config);
  const ScheduleParams& p = config.schedule;
  const int N = 8;
  const std::vector<std::vector<int>> js = {[&] {
    std::vector<int> j(static_cast<std::size_t>(p.d), 0);
    j[0] = 1;
    return j;
  }()};
  bool all = true;
  auto report = [&](const std::string& name, double value, double limit) {
    const bool pass = value <= limit;
    all = all && pass;
    log << (pass ? "PASS " : "FAIL ") << name << " " << fmt(value) << " (limit " << fmt(limit) << ")\n";
  };

  const NormSpec strong{0.0, sobolev_s0(p.nu, p.d) + 4.0};
  FourierField v = random_field(p.nu, p.d, N, js, 1.0, 0.8, 11);
  FourierField h = random_field(p.nu, p.d, N, js, 1.0, 0.8, 12);
  v *= 0.05 / sobolev_norm(v, strong);
  h *= 0.05 / sobolev_norm(h, strong);
  report("fd_derivative", fd_derivative_check(v, h, omega, 1e-4, p.s), 1e-6);

  const TaylorRemainder tr = taylor_remainder(v, h, omega);
  report("taylor_routes", tr.discrepancy / std::max(tr.direct.max_abs(), 1e-300), 1e-10);

  const ReductionData rd = compute_beta(v, omega, p.epsilon);
  report("homological_residual", homological_residual(rd, p.s), 1e-8);

  LinearizedOptions direct;
  direct.method = LinearMethod::Direct;
  direct.s = p.s;
  LinearizedOptions conj;
  conj.s = p.s;
  const FourierField x1 = invert_linearized(v, omega, p.epsilon, N, h, direct);
  const FourierField x2 = invert_linearized(v, omega, p.epsilon, N, h, conj);
  const NormSpec ns{0.0, p.s};
  report("linearized_methods", sobolev_norm(x1 - x2, ns) / sobolev_norm(x1, ns), 1e-8);

  const DiagonalSymbol L{p.epsilon, 0.0, omega};
  report("diagonal_round_trip", (L.apply(invert_diagonal(L, h)) - h).max_abs() / h.max_abs(), 1e-13);

  const SymbolFloorReport sf = symbol_floor(p.epsilon, 0.0, p.delta, 4, 6.0, 8, p.d);
  report("symbol_floor_violations", static_cast<double>(sf.violations.size() + (sf.ok() ? 0 : 1)), 0.0);

  const FourierField g0 = random_phase_field(p.nu, p.d, N, 1.0, 0.5, 13);
  report("average_residual", residual_average(solve_average(g0, omega, p.epsilon), g0, omega, p.epsilon, p.s), 1e-12);
  return all ? 0 : 1;
}

}  // namespace

int dispatch(const std::string& command, const Config& config, const std::string& out_dir, std::ostream& log) {
  const std::filesystem::path out(out_dir);
  if (command == "solve" || command == "check-frequency" || command == "spectrum") {
    std::filesystem::create_directories(out);
  }
  if (command == "solve") return do_solve(config, out, log);
  if (command == "check-frequency") return do_check_frequency(config, out, log);
  if (command == "spectrum") return do_spectrum(config, out, log);
  if (command == "verify") return do_verify(config, log);
  throw Error("unknown command '" + command + "'");
}

}  // namespace qpbeam
