#include "avgh/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "avgh/demos.hpp"
#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/gramian.hpp"
#include "avgh/hautus.hpp"
#include "avgh/linalg.hpp"
#include "avgh/mintime.hpp"
#include "avgh/perturbation.hpp"
#include "avgh/report.hpp"

namespace avgh {

namespace {

constexpr double skew_tol = 1e-10;

struct Run {
  const ParsedConfig& pc;
  std::ostringstream report;
  std::vector<ComparisonRow> rows;
  std::vector<std::string> warnings;
  RunArtifacts out;

  const KeyValueFile& kv() const { return pc.keys; }
  const SystemSpec& sys() const { return *pc.system; }

  void add_csv(const std::string& name, const std::string& content) { out.files[name] = content; }
  void row(std::string quantity, double predicted, double measured, std::string status) {
    rows.push_back({std::move(quantity), predicted, measured, std::move(status)});
  }
};

std::string verdict(bool ok) { return ok ? "CONSISTENT" : "VIOLATION"; }

void write_system_summary(Run& r) {
  const SystemSpec& s = r.sys();
  r.report << "dim = " << s.dim() << "\nfield = " << (s.is_complex ? "complex" : "real") << "\n";
  r.report << "tau = " << format_number(s.grid.tau()) << "\nn_steps = " << s.grid.n_steps() << "\n";
  r.report << "A.kind = " << to_string(s.A.kind()) << "\n";
}

void cmd_propagate(Run& r) {
  const SystemSpec& sys = r.sys();
  write_system_summary(r);
  const EvolutionTable u = propagate(sys);
  const GrowthBounds g = growth_bounds(u);
  const double L = lipschitz_bound(sys.A, sys.grid);
  const double defect = skew_defect(sys.A, sys.grid);
  const auto final_sv = singular_extremes(u.from_origin(u.n_steps()));
  r.report << "L = " << format_number(L) << "\nskew_defect = " << format_number(defect) << "\n";
  r.report << "growth k = " << format_number(g.k) << " K = " << format_number(g.K) << " alpha = "
           << format_number(g.alpha) << " beta = " << format_number(g.beta) << "\n";
  r.report << "U(tau,0) sigma_min = " << format_number(final_sv.min) << " sigma_max = " << format_number(final_sv.max)
           << "\n";

  std::ostringstream csv;
  csv << "t,sigma_min,sigma_max\n";
  for (std::size_t j : strided_nodes(u.n_steps(), 513)) {
    const auto sv = singular_extremes(u.from_origin(j));
    csv << format_number(sys.grid.node(j)) << ',' << format_number(sv.min) << ',' << format_number(sv.max) << '\n';
  }
  r.add_csv("propagator_norms.csv", csv.str());
  if (r.pc.run.emit_matrices) {
    std::ostringstream dump;
    u.write(dump);
    r.add_csv("evolution.txt", dump.str());
  }
  if (defect <= skew_tol) {
    const double dev = std::max(std::abs(g.K - 1.0), std::abs(g.k - 1.0));
    r.row("skew generator => unitary evolution (max |k-1|, |K-1|)", 0.0, dev, verdict(dev <= 1e-8));
  }
}

void cmd_gramian(Run& r) {
  const SystemSpec& sys = r.sys();
  write_system_summary(r);
  const EvolutionTable u = propagate(sys);
  const std::size_t s = r.kv().get_size("gramian.s", 0);
  if (s > sys.grid.n_steps()) throw IndexOrder("gramian.s: node index beyond n_steps");
  const std::size_t stride = std::max<std::size_t>(1, r.kv().get_size("gramian.stride", 1));
  const bool emit = r.pc.run.emit_matrices;

  const GramianReport obs = observability_gramian(sys, u, s);
  r.report << "[observability]\n";
  write_report(r.report, obs, emit);
  const AdmissibilityResult adm = admissibility_constant(sys, u, stride);
  r.report << "M_tau = " << format_number(adm.M_tau) << "\n";
  std::ostringstream sweep;
  write_sweep_csv(sweep, adm.rows);
  r.add_csv("gramian_sweep.csv", sweep.str());
  try {
    r.report << "kappa_final = " << format_number(final_time_constant(sys, u)) << "\n";
  } catch (const SingularFinalState& e) {
    r.warnings.push_back(e.what());
  }
  const GramianReport avg = averaged_gramian(sys, u);
  r.report << "[averaged]\n";
  write_report(r.report, avg, emit);

  const double kappa0 = s == 0 ? obs.lambda_min : observability_gramian(sys, u, 0).lambda_min;
  if (kappa0 > 0.0) {
    // observability on [0, tau] bounds the squared final state from its output
    r.row("kappa > 0 => kappa_final > 0", kappa0, 0.0, "NOT-PREDICTED");
    try {
      const double kf = final_time_constant(sys, u);
      r.rows.back().measured = kf;
      r.rows.back().status = verdict(kf > 0.0);
    } catch (const SingularFinalState&) {
    }
  }
  if (sys.B) {
    const GramianReport ctrl = controllability_gramian(sys, u);
    r.report << "[controllability]\n";
    write_report(r.report, ctrl, emit);
    const double d = duality_defect(sys, u, stride);
    r.report << "duality_defect = " << format_number(d) << "\n";
    r.row("controllability/observability duality defect", 0.0, d, verdict(d <= 1e-8));
  }
}

std::vector<double> m_grid_from(const Run& r, const MomentMatrices& mm) {
  std::vector<double> g = r.kv().get_list("hautus.m_grid");
  if (g.empty())
    g = default_m_grid(mm, r.kv().get_size("hautus.m_count", r.pc.run.profile == DemoProfile::quick ? 4 : 8));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(g[i] > 0.0) || (i > 0 && !(g[i] > g[i - 1])))
      throw ValidationError("hautus.m_grid: entries must be positive and increasing");
  return g;
}

void cmd_hautus(Run& r) {
  const SystemSpec& sys = r.sys();
  write_system_summary(r);
  AH2Options opts;
  opts.tol = r.kv().get_double("hautus.tol", opts.tol);
  const MomentMatrices mm = moment_matrices(sys);
  const HautusReport h =
      hautus_report(sys, m_grid_from(r, mm), r.kv().get_double("hautus.m", -1.0), r.kv().get_double("hautus.M", -1.0), opts);
  write_report(r.report, h, r.pc.run.emit_matrices);
  std::ostringstream scan, curve;
  write_scan_csv(scan, h.verdict.scan);
  write_curve_csv(curve, h.curve);
  r.add_csv("ah2_scan.csv", scan.str());
  r.add_csv("hautus_curve.csv", curve.str());

  AH1Options a1;
  a1.seed = r.pc.run.seed;
  a1.n_samples = r.kv().get_size("hautus.ah1_samples", a1.n_samples);
  const std::size_t n_xi = r.kv().get_size("hautus.ah1_xi_points", r.pc.run.profile == DemoProfile::quick ? 21 : 101);
  if (h.M_query > 0.0 || h.verdict.holds) {
    const AH1Verdict v1 = verify_AH1(sys, h.m_query, h.M_query, default_lambda_grid(mm, h.M_query, h.sigma_max, n_xi), a1);
    r.report << "AH1 query violation_found = " << (v1.violation_found ? "true" : "false")
             << " min_margin = " << format_number(v1.min_margin) << " lambdas = " << v1.lambdas_checked << "\n";
  }

  // necessity direction: measured observability yields constants that must pass both tests
  const EvolutionTable u = propagate(sys);
  const double kappa = observability_gramian(sys, u).lambda_min;
  const double M_tau = admissibility_constant(sys, u, std::max<std::size_t>(1, sys.grid.n_steps() / 256)).M_tau;
  r.report << "kappa = " << format_number(kappa) << "\nM_tau = " << format_number(M_tau) << "\n";
  if (kappa > 0.0) {
    const NecessaryConstants nc = constants_from_observability(kappa, M_tau, sys.grid.tau());
    r.report << "necessary m = " << format_number(nc.m) << " M = " << format_number(nc.M) << "\n";
    const AH2Verdict v2 = verify_AH2(mm, nc.m, nc.M, h.sigma_max, opts);
    r.row("constants from kappa pass AH.2", 0.0, v2.min_margin, verdict(v2.holds));
    const AH1Verdict v1 = verify_AH1(sys, nc.m, nc.M, default_lambda_grid(mm, nc.M, h.sigma_max, n_xi), a1);
    r.row("constants from kappa: no AH.1 violation found", 0.0, v1.min_margin, verdict(!v1.violation_found));
  } else {
    r.row("constants from kappa pass AH.2", 0.0, kappa, "NOT-PREDICTED");
  }
}

MintimeInput mintime_input(const KeyValueFile& kv, const std::string& section) {
  MintimeInput in;
  in.M = kv.get_double(section + ".M", in.M);
  in.L = kv.get_double(section + ".L", in.L);
  in.k = kv.get_double(section + ".k", in.k);
  in.K = kv.get_double(section + ".K", in.K);
  in.omega = kv.get_double(section + ".omega", in.omega);
  in.tau = kv.get_double(section + ".tau", in.tau);
  in.hardy_resolution = kv.get_size(section + ".resolution", in.hardy_resolution);
  in.basis_size = kv.get_size(section + ".basis_size", in.basis_size);
  for (const auto& [name, v] : {std::pair{"M", in.M}, {"L", in.L}, {"k", in.k}, {"K", in.K}, {"omega", in.omega}})
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(section + "." + name + ": must be finite and non-negative");
  if (!(in.k > 0.0) || !(in.K > 0.0)) throw ValidationError(section + ": k and K must be positive");
  if (in.tau < 0.0) throw ValidationError(section + ".tau: must be positive, or 0 for automatic");
  if (in.hardy_resolution < 4) throw ValidationError(section + ".resolution: must be at least 4");
  if (in.basis_size < 1) throw ValidationError(section + ".basis_size: must be at least 1");
  return in;
}

void cmd_mintime(Run& r) {
  const MintimeInput in = mintime_input(r.kv(), "mintime");
  const MinimalTimeReport m = minimal_time_report(in);
  write_report(r.report, m);
  std::ostringstream csv;
  write_sweep_header(csv);
  write_sweep_row(csv, m);
  for (double M : r.kv().get_list("mintime.sweep_M")) {
    MintimeInput s = in;
    s.M = M;
    write_sweep_row(csv, minimal_time_report(s));
  }
  r.add_csv("mintime.csv", csv.str());

  if (m.tau_star.feasible && m.tau > m.tau_star.value)
    r.row("tau > tau* => kappa(sine) > 0", m.tau_star.value, m.kappa_phi, verdict(m.kappa_phi > 0.0));
  if (m.hardy_available && std::abs(m.f.f_max - 2.0) > 1e-6)
    r.row("f criterion agrees with the Hardy route", m.f.satisfied ? 1.0 : 0.0, m.hardy.sqrt_B,
          verdict(m.f.satisfied == (m.hardy.sqrt_B > std::sqrt(2.0))));
  if (m.f.satisfied)
    r.row("f criterion => positive best test kappa", m.f.f_max, m.best.kappa, verdict(m.best.kappa > 0.0));
}

Weight weight_from(const KeyValueFile& kv, const std::string& prefix, double fallback_value) {
  const std::string form = kv.get_string(prefix + ".form", "constant");
  const double value = kv.get_double(prefix + ".value", fallback_value);
  if (form == "constant") return [value](double) { return value; };
  if (form == "exp") {
    const double rate = kv.require_double(prefix + ".rate");
    return [value, rate](double t) { return value * std::exp(rate * t); };
  }
  if (form == "power") {
    const double p = kv.require_double(prefix + ".power");
    return [value, p](double t) { return value * std::pow(t, p); };
  }
  if (form == "weight_w") return weight_w(kv.get_double("hardy.k", 1.0), kv.get_double("hardy.K", 1.0),
                                          kv.get_double("hardy.M", 1.0), kv.get_double("hardy.L", 0.0),
                                          kv.get_double("hardy.omega", 0.0));
  throw ValidationError(prefix + ".form: unknown weight form '" + form + "'");
}

void cmd_hardy(Run& r) {
  const KeyValueFile& kv = r.kv();
  const double tau = kv.require_double("hardy.tau");
  if (!(tau > 0.0)) throw ValidationError("hardy.tau: must be positive");
  const std::size_t resolution = kv.get_size("hardy.resolution", 400);
  const Weight w = weight_from(kv, "hardy.w", 1.0);
  const Weight v = weight_from(kv, "hardy.v", 1.0);
  const HardyResult h = hardy_B(w, v, tau, resolution);
  r.report << "tau = " << format_number(tau) << "\nresolution = " << resolution << "\n";
  r.report << "B = " << format_number(h.B) << "\nsqrt_B = " << format_number(h.sqrt_B) << "\n";
  r.report << "x = " << format_number(h.x) << "\ny = " << format_number(h.y) << "\n";
  std::ostringstream csv;
  csv << "tau,B,sqrt_B,x,y\n"
      << format_number(tau) << ',' << format_number(h.B) << ',' << format_number(h.sqrt_B) << ','
      << format_number(h.x) << ',' << format_number(h.y) << '\n';
  r.add_csv("hardy.csv", csv.str());

  if (kv.get_string("hardy.w.form", "constant") == "weight_w" && kv.get_string("hardy.v.form", "constant") == "constant" &&
      kv.get_double("hardy.v.value", 1.0) == 1.0) {
    const FCriterion f = f_criterion(kv.get_double("hardy.k", 1.0), kv.get_double("hardy.K", 1.0),
                                     kv.get_double("hardy.M", 1.0), kv.get_double("hardy.L", 0.0),
                                     kv.get_double("hardy.omega", 0.0), tau);
    r.report << "f_max = " << format_number(f.f_max) << "\n";
    if (std::abs(f.f_max - 2.0) > 1e-6)
      r.row("Hardy route agrees with the f criterion", f.f_max, h.sqrt_B,
            verdict(f.satisfied == (h.sqrt_B > std::sqrt(2.0))));
  }
}

std::vector<double> amplitude_scales(const Run& r, const SystemSpec& sys, const std::string& section) {
  std::vector<double> scales = r.kv().get_list(section + ".amplitude_scales");
  const std::vector<double> targets = r.kv().get_list(section + ".mu_targets");
  if (!targets.empty()) {
    const auto extra = amplitude_scales_for_mu(sys, targets, r.pc.run.profile);
    scales.insert(scales.end(), extra.begin(), extra.end());
  }
  return scales;
}

void finish_demo(Run& r, const DemoReport& d, const SystemSpec& sys, const std::string& section) {
  write_report(r.report, d, false);
  std::ostringstream csv;
  write_comparison_csv(csv, d);
  r.add_csv("demo_comparison.csv", csv.str());
  r.rows.insert(r.rows.end(), d.rows.begin(), d.rows.end());
  if (sys.A.kind() == MatrixFamily::Kind::base_plus_perturbation) {
    const auto scales = amplitude_scales(r, sys, section);
    if (!scales.empty()) {
      const auto rows = amplitude_sweep(sys, scales, r.pc.run.profile);
      std::ostringstream amp;
      write_amplitude_csv(amp, rows);
      r.add_csv("amplitude_sweep.csv", amp.str());
      for (const auto& a : rows) {
        r.report << "amplitude scale = " << format_number(a.scale) << " mu = " << format_number(a.mu);
        if (a.transfer_defined) r.report << " m' = " << format_number(a.m_prime) << " M' = " << format_number(a.M_prime);
        else r.report << " refused: " << a.refusal;
        r.report << " measured = " << format_number(a.measured_kappa) << "\n";
        if (a.transfer_defined != (a.mu < 1.0))
          r.row("transfer refused exactly when mu >= 1", 1.0, a.mu, "VIOLATION");
        if (a.transfer_defined && a.predicted_floor > 0.0)
          r.row("amplitude " + format_number(a.scale) + ": transferred floor <= lambda_min(G_avg)", a.predicted_floor,
                a.measured_kappa,
                verdict(a.measured_kappa >= a.predicted_floor - 1e-8 * std::max(1.0, a.predicted_floor)));
      }
    }
  }
}

void cmd_demo(Run& r) {
  const std::string kind = r.kv().require_string("demo.kind");
  SystemSpec sys = [&] {
    if (kind == "schrodinger") return build_schrodinger(schrodinger_from_keys(r.kv()));
    if (kind == "wave") return build_wave(wave_from_keys(r.kv()), r.pc.run.profile);
    throw ValidationError("demo.kind: must be schrodinger or wave, got '" + kind + "'");
  }();
  const DemoReport d = run_demo(kind, sys, r.pc.run.profile);
  finish_demo(r, d, sys, "demo");
}

void cmd_perturb(Run& r) {
  const SystemSpec& sys = r.sys();
  if (sys.A.kind() != MatrixFamily::Kind::base_plus_perturbation)
    throw ValidationError("A.kind: perturb needs a perturbed family (A.base plus A.perturbation.N.*)");
  write_system_summary(r);
  const EvolutionTable u = propagate(sys);
  const double dt_res = duhamel_residual(sys.A.base(), sys.A.perturbation(), u, 0, u.n_steps(),
                                         Vec::Ones(sys.dim()) / std::sqrt(static_cast<double>(sys.dim())));
  r.report << "duhamel_residual(0, tau) = " << format_number(dt_res) << "\n";
  const DemoReport d = run_demo("perturb", sys, r.pc.run.profile);
  finish_demo(r, d, sys, "perturb");
}

void cmd_report(Run& r) {
  write_system_summary(r);
  const DemoReport d = run_demo("system", r.sys(), r.pc.run.profile);
  finish_demo(r, d, r.sys(), "report");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string manifest(const ParsedConfig& pc, const RunArtifacts& a) {
  std::ostringstream m;
  m << "avgh_version = " << AVGH_VERSION << "\n";
  m << "eigen_version = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << "\n";
#if defined(__clang__)
  m << "compiler = clang " << __clang_major__ << '.' << __clang_minor__ << "\n";
#elif defined(__GNUC__)
  m << "compiler = gcc " << __GNUC__ << '.' << __GNUC_MINOR__ << "\n";
#endif
  m << "command = " << pc.run.command << "\n";
  m << "config = " << pc.run.input.generic_string() << "\n";
  std::string text;
  for (const auto& [k, v] : pc.run.overrides) text += k + "=" + v + "\n";
  m << "config_fnv1a = " << hex(fnv1a(text)) << "\n";
  m << "seed = " << pc.run.seed << "\nprofile = " << to_string(pc.run.profile) << "\n";
  m << "tol.skew = 1e-10\ntol.ah2 = " << format_number(pc.keys.get_double("hautus.tol", 1e-9))
    << "\ntol.eig_clamp = 1e-10\ntol.floor_rel = 1e-8\n";
  for (const auto& [k, v] : pc.run.overrides) m << "input " << k << " = " << v << "\n";
  for (const auto& [name, content] : a.files) m << "file " << name << " " << hex(fnv1a(content)) << "\n";
  return m.str();
}

}  // namespace

RunArtifacts run_command(const ParsedConfig& pc) {
  Run r{pc, {}, {}, {}, {}};
  r.report << "avgh " << AVGH_VERSION << "\ncommand = " << pc.run.command << "\nseed = " << pc.run.seed
           << "\nprofile = " << to_string(pc.run.profile) << "\n";
  const std::string& c = pc.run.command;
  if (c == "propagate") cmd_propagate(r);
  else if (c == "gramian") cmd_gramian(r);
  else if (c == "hautus") cmd_hautus(r);
  else if (c == "mintime") cmd_mintime(r);
  else if (c == "hardy") cmd_hardy(r);
  else if (c == "perturb") cmd_perturb(r);
  else if (c == "demo") cmd_demo(r);
  else if (c == "report") cmd_report(r);
  else throw ValidationError("command: unknown command '" + c + "'");

  for (const auto& key : pc.keys.unused_keys()) r.warnings.push_back("unused key '" + key + "'");
  r.report << "comparison:\n";
  std::ostringstream csv;
  csv << "quantity,predicted,measured,status\n";
  for (const auto& row : r.rows) {
    r.report << "  " << row.status << " | " << row.quantity << " | predicted " << format_number(row.predicted)
             << " | measured " << format_number(row.measured) << "\n";
    csv << '"' << row.quantity << "\"," << format_number(row.predicted) << ',' << format_number(row.measured) << ','
        << row.status << '\n';
    if (row.status == "VIOLATION") ++r.out.violations;
  }
  r.report << "violations = " << r.out.violations << "\n";
  for (const auto& w : r.warnings) r.report << "warning: " << w << "\n";
  r.out.files["comparison.csv"] = csv.str();
  r.out.files["report.txt"] = r.report.str();
  r.out.files["manifest"] = manifest(pc, r.out);
  return std::move(r.out);
}

int run(const ParsedConfig& pc) {
  const RunArtifacts a = run_command(pc);
  std::filesystem::create_directories(pc.run.out);
  for (const auto& [name, content] : a.files) write_file_atomic(pc.run.out / name, content);
  return 0;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Averaged Hautus observability toolkit"};
  std::string command, config, out = "avgh-out", profile;
  std::uint64_t seed = 42;
  bool emit = false;
  app.add_option("command", command, "propagate, gramian, hautus, mintime, hardy, perturb, demo or report");
  app.add_option("--config", config, "Configuration file")->required();
  app.add_option("--out", out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (default 42)");
  app.add_option("--profile", profile, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  app.add_flag("--emit-matrices", emit, "Include matrices in the report");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    ParsedConfig pc = parse_config(config, command.empty() ? std::nullopt : std::optional(command),
                                   seed_opt->count() ? std::optional(seed) : std::nullopt,
                                   profile.empty() ? std::nullopt : std::optional(profile));
    pc.run.out = out;
    if (emit) pc.run.emit_matrices = true;
    const int code = run(pc);
    std::cout << "wrote " << pc.run.out.string() << "\n";
    return code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure in " << e.operation() << ": " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace avgh
