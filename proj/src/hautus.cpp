#include "avgh/hautus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>

#include "avgh/errors.hpp"
#include "avgh/linalg.hpp"
#include "avgh/parallel.hpp"
#include "avgh/report.hpp"

namespace avgh {

Mat MomentMatrices::Q(double xi) const {
  Mat q = S_bar + cplx(0.0, xi) * (A_bar.adjoint() - A_bar);
  q.diagonal().array() += xi * xi;
  return hermitian_part(q);
}

std::vector<double> MomentMatrices::candidate_frequencies() const {
  Eigen::ComplexEigenSolver<Mat> es(A_bar, false);
  std::vector<double> out;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) out.push_back(-es.eigenvalues()(k).imag());
  std::sort(out.begin(), out.end());
  return out;
}

MomentMatrices moment_matrices(const SystemSpec& sys) {
  const MatrixFamily& c = sys.observation();
  const Index n = sys.dim();
  const std::size_t steps = sys.grid.n_steps();
  const double h = sys.grid.dt();
  const double tau = sys.grid.tau();
  const Mat zero = Mat::Zero(n, n);
  MomentMatrices mm;
  mm.tau = tau;
  mm.P_bar = hermitian_part(integrate_nodes(0, steps, h, zero, [&](std::size_t j, Side side) -> Mat {
                              const Mat cj = c.at_node(sys.grid, j, side);
                              return cj.adjoint() * cj;
                            }) /
                            tau);
  mm.A_bar = integrate_nodes(0, steps, h, zero, [&](std::size_t j, Side side) -> Mat {
               return sys.A.at_node(sys.grid, j, side);
             }) /
             tau;
  mm.S_bar = hermitian_part(integrate_nodes(0, steps, h, zero, [&](std::size_t j, Side side) -> Mat {
                              const Mat aj = sys.A.at_node(sys.grid, j, side);
                              return aj.adjoint() * aj;
                            }) /
                            tau);
  return mm;
}

std::string HautusBound::to_string() const { return finite ? format_number(value) : "infinite"; }

namespace {

double lambda_min_of(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Mat margin_matrix(const MomentMatrices& mm, double m, double M, double xi) {
  Mat g = m * m * mm.P_bar + M * M * mm.Q(xi);
  g.diagonal().array() -= 1.0;
  return g;
}

struct ScanResult {
  bool budget_exhausted = false;
  double min_margin = std::numeric_limits<double>::infinity();
  double xi_star = 0.0;
  std::size_t points = 0;
  std::vector<XiSample> samples;
};

// Adaptive scan of [a, b]. Between samples the margin cannot drop more than
// the Lipschitz bound of lambda_min allows, so a positive margin buys a wider step.
ScanResult scan_interval(const MomentMatrices& mm, double m, double M, double a, double b, double floor_step,
                         double skew_norm, const AH2Options& opts, std::size_t budget, bool stop_early) {
  ScanResult r;
  double xi = a;
  const double m2 = M * M;
  while (true) {
    const double g = lambda_min_of(margin_matrix(mm, m, M, xi));
    ++r.points;
    if (opts.keep_scan) r.samples.push_back({xi, g});
    if (g < r.min_margin) {
      r.min_margin = g;
      r.xi_star = xi;
    }
    if (stop_early && g < -opts.tol) break;
    if (xi >= b) break;
    if (r.points >= budget) {
      r.budget_exhausted = true;
      break;
    }
    double step = floor_step;
    if (g > 0.0) {
      // 2 M^2 d^2 + M^2 (2|xi| + ||D||) d <= g + tol
      const double lin = m2 * (2.0 * std::abs(xi) + skew_norm);
      const double rhs = g + opts.tol;
      const double cert = (-lin + std::sqrt(lin * lin + 8.0 * m2 * rhs)) / (4.0 * m2);
      step = std::max(step, cert);
    }
    xi = std::min(b, xi + step);
  }
  return r;
}

AH2Verdict run_ah2(const MomentMatrices& mm, double m, double M, double sigma_max, const AH2Options& opts,
                   bool stop_early) {
  if (m < 0.0 || M < 0.0) throw ValidationError("verify_AH2: m and M must be nonnegative");
  AH2Verdict v;
  if (M == 0.0) {
    const auto ext = hermitian_extremes(margin_matrix(mm, m, 0.0, 0.0));
    v.min_margin = ext.lambda_min;
    v.x_star = ext.v_min;
    v.points = 1;
    v.holds = v.min_margin >= -opts.tol;
    if (!v.holds) v.reason = "M = 0 and m^2 P_bar - I is not PSD; no tail certificate without M > 0";
    if (opts.keep_scan) v.scan.push_back({0.0, v.min_margin});
    return v;
  }
  const double s_max = std::sqrt(std::max(0.0, hermitian_extremes(mm.S_bar).lambda_max));
  if (sigma_max < s_max * (1.0 - 1e-9))
    throw ValidationError("verify_AH2: sigma_max " + format_number(sigma_max) + " is below the averaged norm " +
                          format_number(s_max));

  v.Xi = sigma_max + 1.0 / M;
  v.tail_certified = true;
  const double floor_step = std::min(opts.max_spacing, 1.0 / (10.0 * M * sigma_max + 1.0));
  const double skew_norm = op_norm(mm.A_bar.adjoint() - mm.A_bar);
  const std::size_t chunks = std::max<std::size_t>(1, opts.chunks);
  const std::size_t budget = std::max<std::size_t>(2, opts.max_points / chunks);

  std::vector<ScanResult> parts(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const double a = -v.Xi + 2.0 * v.Xi * static_cast<double>(c) / static_cast<double>(chunks);
    const double b = c + 1 == chunks ? v.Xi : -v.Xi + 2.0 * v.Xi * static_cast<double>(c + 1) / static_cast<double>(chunks);
    parts[c] = scan_interval(mm, m, M, a, b, floor_step, skew_norm, opts, budget, stop_early);
  });

  double best = std::numeric_limits<double>::infinity();
  bool exhausted = false;
  for (const auto& p : parts) {
    v.points += p.points;
    exhausted = exhausted || p.budget_exhausted;
    if (p.min_margin < best) {
      best = p.min_margin;
      v.xi_star = p.xi_star;
    }
    if (opts.keep_scan) v.scan.insert(v.scan.end(), p.samples.begin(), p.samples.end());
  }
  for (double xc : mm.candidate_frequencies()) {
    if (std::abs(xc) > v.Xi) continue;
    const double g = lambda_min_of(margin_matrix(mm, m, M, xc));
    ++v.points;
    if (opts.keep_scan) v.scan.push_back({xc, g});
    if (g < best) {
      best = g;
      v.xi_star = xc;
    }
  }

  // sharpen the witness around the best sample
  if (!(stop_early && best < -opts.tol)) {
    double lo = std::max(-v.Xi, v.xi_star - floor_step);
    double hi = std::min(v.Xi, v.xi_star + floor_step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = lambda_min_of(margin_matrix(mm, m, M, x1));
    double f2 = lambda_min_of(margin_matrix(mm, m, M, x2));
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = lambda_min_of(margin_matrix(mm, m, M, x1));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = lambda_min_of(margin_matrix(mm, m, M, x2));
      }
    }
    v.points += 42;
    const double xr = f1 < f2 ? x1 : x2;
    const double fr = std::min(f1, f2);
    if (fr < best) {
      best = fr;
      v.xi_star = xr;
    }
  }
  if (opts.keep_scan)
    std::sort(v.scan.begin(), v.scan.end(), [](const XiSample& a, const XiSample& b) { return a.xi < b.xi; });

  const auto ext = hermitian_extremes(margin_matrix(mm, m, M, v.xi_star));
  v.min_margin = std::min(best, ext.lambda_min);
  v.x_star = ext.v_min;
  v.holds = v.min_margin >= -opts.tol && !exhausted;
  if (exhausted) v.reason = "scan budget exhausted before covering [-Xi, Xi]";
  else if (!v.holds) v.reason = "margin " + format_number(v.min_margin) + " at xi = " + format_number(v.xi_star);
  return v;
}

}  // namespace

double ah2_margin(const MomentMatrices& mm, double m, double M, double xi, Vec* x_min) {
  const auto ext = hermitian_extremes(margin_matrix(mm, m, M, xi));
  if (x_min) *x_min = ext.v_min;
  return ext.lambda_min;
}

AH2Verdict verify_AH2(const MomentMatrices& mm, double m, double M, double sigma_max, const AH2Options& opts) {
  return run_ah2(mm, m, M, sigma_max, opts, false);
}

std::vector<CurvePoint> fit_constants(const MomentMatrices& mm, const std::vector<double>& m_grid,
                                      double sigma_max, const AH2Options& opts) {
  for (std::size_t k = 0; k < m_grid.size(); ++k) {
    if (!(m_grid[k] > 0.0)) throw ValidationError("fit_constants: m values must be positive");
    if (k > 0 && !(m_grid[k] > m_grid[k - 1])) throw ValidationError("fit_constants: m grid must be ascending");
  }
  const Index n = mm.dim();
  const double cap = 1e12;
  AH2Options scan_opts = opts;
  scan_opts.keep_scan = false;
  auto ok = [&](double m, double M) { return run_ah2(mm, m, M, sigma_max, scan_opts, true).holds; };

  // kernel of Q at the candidate frequencies: directions no M can reach
  std::vector<Mat> kernels;
  for (double xc : mm.candidate_frequencies()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(mm.Q(xc));
    const double scale = std::max(1.0, std::abs(es.eigenvalues()(n - 1)));
    Index dim_ker = 0;
    while (dim_ker < n && es.eigenvalues()(dim_ker) <= 1e-9 * scale) ++dim_ker;
    if (dim_ker > 0) kernels.push_back(es.eigenvectors().leftCols(dim_ker));
  }

  std::vector<CurvePoint> curve;
  std::optional<double> previous;
  for (double m : m_grid) {
    Mat e = -m * m * mm.P_bar;
    e.diagonal().array() += 1.0;
    if (hermitian_extremes(e).lambda_max <= opts.tol) {
      curve.push_back({m, HautusBound::of(0.0)});
      previous = 0.0;
      continue;
    }
    bool blocked = false;
    for (const Mat& k : kernels)
      if (hermitian_extremes(k.adjoint() * e * k).lambda_max > opts.tol) blocked = true;
    if (blocked) {
      curve.push_back({m, HautusBound::infinite()});
      continue;
    }

    double lo = 0.0;
    double hi = previous && *previous > 0.0 ? *previous : 1.0;
    bool found = ok(m, hi);
    while (!found && hi < cap) {
      lo = hi;
      hi *= 2.0;
      found = ok(m, hi);
    }
    if (!found) {
      curve.push_back({m, HautusBound::infinite()});
      continue;
    }
    if (lo == 0.0) {
      // geometric descent to bracket from below
      double probe = hi / 2.0;
      while (probe > 1e-12 && ok(m, probe)) {
        hi = probe;
        probe /= 2.0;
      }
      lo = probe;
    }
    while (hi - lo > 1e-7 * hi) {
      const double mid = 0.5 * (lo + hi);
      if (ok(m, mid)) hi = mid;
      else lo = mid;
    }
    curve.push_back({m, HautusBound::of(hi)});
    previous = hi;
  }
  return curve;
}

std::vector<double> default_m_grid(const MomentMatrices& mm, std::size_t count) {
  const auto ext = hermitian_extremes(mm.P_bar);
  if (!(ext.lambda_max > 0.0)) return {1.0};
  const double m0 = 1.0 / std::sqrt(ext.lambda_max);
  double m1 = 8.0 * m0;
  if (ext.lambda_min > 1e-12 * ext.lambda_max) {
    m1 = 1.0 / std::sqrt(ext.lambda_min);
  } else {
    // Q loses rank along eigenvectors of A_bar; there I - m^2 P_bar must turn negative
    Eigen::ComplexEigenSolver<Mat> es(mm.A_bar);
    for (Index k = 0; k < es.eigenvectors().cols(); ++k) {
      const Vec v = es.eigenvectors().col(k).normalized();
      const double seen = (v.adjoint() * mm.P_bar * v)(0, 0).real();
      if (seen > 1e-12 * ext.lambda_max) m1 = std::max(m1, 2.0 / std::sqrt(seen));
    }
  }
  m1 = std::max(m1, 2.0 * m0);
  std::vector<double> out;
  count = std::max<std::size_t>(2, count);
  for (std::size_t k = 0; k < count; ++k)
    out.push_back(m0 * std::pow(m1 / m0, static_cast<double>(k) / static_cast<double>(count - 1)));
  return out;
}

CurvePoint best_curve_point(const std::vector<CurvePoint>& curve) {
  const CurvePoint* best = nullptr;
  for (const auto& p : curve) {
    if (!p.M.finite) continue;
    if (!best || p.M.value < best->M.value) best = &p;
  }
  if (!best) return curve.empty() ? CurvePoint{} : curve.front();
  return *best;
}

double ah3_factor(double re_lambda, double tau) {
  const double x = 2.0 * tau * re_lambda;
  if (std::abs(x) < 1e-8) return 1.0 + x / 2.0;
  return std::expm1(x) / x;
}

namespace {

struct QuadNode {
  double weight;  // includes 1/tau
  double t;
  Mat A;
  Mat CtC;
};

std::vector<QuadNode> ah1_nodes(const SystemSpec& sys, std::size_t panels) {
  panels = std::max<std::size_t>(2, panels + (panels % 2));
  const double tau = sys.grid.tau();
  const double h = tau / static_cast<double>(panels);
  const MatrixFamily& c = sys.observation();
  std::vector<QuadNode> out;
  for (const PanelGroup& g : panel_groups(0, panels)) {
    const auto w = group_weights(g, h);
    for (std::size_t j = g.first; j <= g.last; ++j) {
      const double t = j == panels ? tau : h * static_cast<double>(j);
      const Side side = group_side(g, j);
      const Mat cj = c(t, side);
      out.push_back({w[j - g.first] / tau, t, sys.A(t, side), cj.adjoint() * cj});
    }
  }
  return out;
}

struct AH1Problem {
  double m2, M2;
  Mat P;                     // averaged e^{2 sigma t} C^* C
  std::vector<Mat> B;        // lambda + A(t_j)
  std::vector<double> c;     // weight e^{sigma t_j} / tau

  AH1Problem(const std::vector<QuadNode>& nodes, double m, double M, cplx lambda) : m2(m * m), M2(M * M) {
    const Index n = nodes.front().A.rows();
    P = Mat::Zero(n, n);
    for (const auto& q : nodes) {
      const double e = std::exp(lambda.real() * q.t);
      P += q.weight * e * e * q.CtC;
      Mat b = q.A;
      b.diagonal().array() += lambda;
      B.push_back(std::move(b));
      c.push_back(q.weight * e);
    }
  }

  double term2_root(const Vec& x) const {
    double f = 0.0;
    for (std::size_t j = 0; j < B.size(); ++j) f += c[j] * (B[j] * x).norm();
    return f;
  }

  double margin(const Vec& x) const {
    const double f = term2_root(x);
    return m2 * x.dot(P * x).real() + M2 * f * f - x.squaredNorm();
  }

  Vec gradient(const Vec& x) const {
    const double f = term2_root(x);
    Vec g = 2.0 * m2 * (P * x) - 2.0 * x;
    Vec acc = Vec::Zero(x.size());
    for (std::size_t j = 0; j < B.size(); ++j) {
      const Vec bx = B[j] * x;
      const double nb = bx.norm();
      if (nb > 0.0) acc += (c[j] / nb) * (B[j].adjoint() * bx);
    }
    return g + 2.0 * M2 * f * acc;
  }

  Mat surrogate() const {
    // (sum c_j a_j)^2 <= (sum c_j) (sum c_j a_j^2)
    double total = 0.0;
    Mat s = Mat::Zero(P.rows(), P.cols());
    for (std::size_t j = 0; j < B.size(); ++j) {
      total += c[j];
      s += c[j] * (B[j].adjoint() * B[j]);
    }
    return m2 * P + M2 * total * s;
  }
};

Vec random_unit(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec x(n);
  for (Index k = 0; k < n; ++k) {
    const double re = nd(rng);
    const double im = nd(rng);
    x(k) = cplx(re, im);
  }
  const double nrm = x.norm();
  if (nrm == 0.0) x(0) = 1.0;
  return x / std::max(nrm, 1e-300);
}

struct Descent {
  double value;
  Vec x;
};

Descent descend(const AH1Problem& p, Vec x, std::size_t steps) {
  double value = p.margin(x);
  double eta = -1.0;
  for (std::size_t it = 0; it < steps; ++it) {
    Vec g = p.gradient(x);
    g -= x.dot(g).real() * x;
    const double gn = g.norm();
    if (!(gn > 1e-14)) break;
    if (eta < 0.0) eta = 0.25 / gn;
    bool improved = false;
    for (int bt = 0; bt < 30; ++bt) {
      Vec trial = x - eta * g;
      trial /= trial.norm();
      const double tv = p.margin(trial);
      if (tv < value) {
        x = std::move(trial);
        value = tv;
        improved = true;
        eta *= 2.0;
        break;
      }
      eta *= 0.5;
    }
    if (!improved) break;
  }
  return {value, x};
}

}  // namespace

double ah1_margin(const SystemSpec& sys, double m, double M, cplx lambda, const Vec& x, std::size_t quad_panels) {
  const auto nodes = ah1_nodes(sys, quad_panels);
  return AH1Problem(nodes, m, M, lambda).margin(x);
}

AH1Verdict verify_AH1(const SystemSpec& sys, double m, double M, const std::vector<cplx>& lambda_grid,
                      const AH1Options& opts) {
  AH1Verdict out;
  out.min_margin = std::numeric_limits<double>::infinity();
  if (lambda_grid.empty()) return out;
  const auto nodes = ah1_nodes(sys, opts.quad_panels);
  const Index n = sys.dim();
  std::vector<Descent> best(lambda_grid.size(), Descent{0.0, Vec()});
  parallel_for(lambda_grid.size(), [&](std::size_t k) {
    const AH1Problem p(nodes, m, M, lambda_grid[k]);
    std::mt19937_64 rng(opts.seed + 0x9E3779B97F4A7C15ULL * (k + 1));
    Vec start = hermitian_extremes(p.surrogate()).v_min;
    double start_val = p.margin(start);
    for (std::size_t s = 0; s < opts.n_samples; ++s) {
      Vec x = random_unit(rng, n);
      const double v = p.margin(x);
      if (v < start_val) {
        start_val = v;
        start = x;
      }
    }
    best[k] = descend(p, start, opts.descent_steps);
  });
  out.lambdas_checked = lambda_grid.size();
  for (std::size_t k = 0; k < best.size(); ++k) {
    if (best[k].value < out.min_margin) {
      out.min_margin = best[k].value;
      out.lambda = lambda_grid[k];
      out.x = best[k].x;
    }
  }
  out.violation_found = out.min_margin < -opts.tol;
  return out;
}

std::vector<cplx> default_lambda_grid(const MomentMatrices& mm, double M, double sigma_max, std::size_t n_xi) {
  const double Xi = sigma_max + (M > 0.0 ? 1.0 / M : 1.0);
  std::vector<double> xis;
  n_xi = std::max<std::size_t>(2, n_xi);
  for (std::size_t k = 0; k < n_xi; ++k)
    xis.push_back(-Xi + 2.0 * Xi * static_cast<double>(k) / static_cast<double>(n_xi - 1));
  for (double xc : mm.candidate_frequencies())
    if (std::abs(xc) <= Xi) xis.push_back(xc);
  std::vector<cplx> out;
  for (double s : {-1.0, -0.1, 0.0, 0.1, 1.0})
    for (double xi : xis) out.emplace_back(s / mm.tau, xi);
  return out;
}

NecessaryConstants constants_from_observability(double kappa, double K_adm, double tau) {
  if (!(kappa > 0.0)) throw NonPositiveKappa("constants_from_observability: kappa must be positive, got " +
                                             format_number(kappa));
  if (!(K_adm >= 0.0)) throw ValidationError("constants_from_observability: K_adm must be nonnegative");
  if (!(tau > 0.0)) throw ValidationError("constants_from_observability: tau must be positive");
  return {std::sqrt(2.0 * tau / kappa), K_adm * tau * std::sqrt(2.0 / kappa)};
}

HautusReport hautus_report(const SystemSpec& sys, const std::vector<double>& m_grid, double m_query,
                           double M_query, const AH2Options& opts) {
  HautusReport r;
  r.moments = moment_matrices(sys);
  r.sigma_max = max_norm(sys.A, sys.grid);
  r.curve = fit_constants(r.moments, m_grid.empty() ? default_m_grid(r.moments) : m_grid, r.sigma_max, opts);
  if (m_query < 0.0 || M_query < 0.0) {
    const CurvePoint p = best_curve_point(r.curve);
    m_query = p.m;
    M_query = p.M.finite ? p.M.value : 0.0;
  }
  r.m_query = m_query;
  r.M_query = M_query;
  AH2Options scan_opts = opts;
  scan_opts.keep_scan = true;
  r.verdict = verify_AH2(r.moments, m_query, M_query, r.sigma_max, scan_opts);
  return r;
}

void write_report(std::ostream& os, const HautusReport& r, bool emit_matrices) {
  os << "tau = " << format_number(r.moments.tau) << "\n";
  os << "sigma_max = " << format_number(r.sigma_max) << "\n";
  if (emit_matrices) {
    os << "P_bar = " << format_matrix(r.moments.P_bar) << "\n";
    os << "A_bar = " << format_matrix(r.moments.A_bar) << "\n";
    os << "S_bar = " << format_matrix(r.moments.S_bar) << "\n";
  }
  for (const auto& p : r.curve) os << "curve m = " << format_number(p.m) << " M = " << p.M.to_string() << "\n";
  os << "query m = " << format_number(r.m_query) << " M = " << format_number(r.M_query) << "\n";
  os << "AH2 verdict = " << (r.verdict.holds ? "true" : "false") << "\n";
  os << "AH2 min_margin = " << format_number(r.verdict.min_margin) << "\n";
  os << "AH2 Xi = " << format_number(r.verdict.Xi) << "\n";
  os << "AH2 tail_certified = " << (r.verdict.tail_certified ? "true" : "false") << "\n";
  os << "AH2 witness xi = " << format_number(r.verdict.xi_star) << "\n";
  os << "AH2 witness x = " << format_vector(r.verdict.x_star) << "\n";
  if (!r.verdict.reason.empty()) os << "AH2 reason = " << r.verdict.reason << "\n";
}

void write_scan_csv(std::ostream& os, const std::vector<XiSample>& scan) {
  os << "xi,lambda_min_margin\n";
  for (const auto& s : scan) os << format_number(s.xi) << ',' << format_number(s.margin) << '\n';
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
  os << "m,M\n";
  for (const auto& p : curve) os << format_number(p.m) << ',' << p.M.to_string() << '\n';
}

}  // namespace avgh
