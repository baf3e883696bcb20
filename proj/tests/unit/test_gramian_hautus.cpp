#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "../oracles.hpp"
#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/gramian.hpp"
#include "avgh/hautus.hpp"
#include "avgh/linalg.hpp"

using namespace avgh;
using std::numbers::pi;

namespace {

SystemSpec constant_system(const Mat& A, std::optional<Mat> C, std::optional<Mat> B, double tau, std::size_t n) {
  std::optional<MatrixFamily> c, b;
  if (C) c = MatrixFamily::constant(*C);
  if (B) b = MatrixFamily::constant(*B);
  return SystemSpec{MatrixFamily::constant(A), c, b, TimeGrid(tau, n), std::nullopt, true};
}

Mat rotation() {
  Mat a(2, 2);
  a << 0.0, -1.0, 1.0, 0.0;
  return a;
}

Mat row(std::initializer_list<cplx> v) {
  Mat m(1, static_cast<Index>(v.size()));
  Index k = 0;
  for (cplx x : v) m(0, k++) = x;
  return m;
}

}  // namespace

TEST_SUITE("gramian") {
  TEST_CASE("rotation over one period gives pi I") {
    const auto sys = constant_system(rotation(), row({1.0, 0.0}), std::nullopt, 2 * pi, 2000);
    const auto g = observability_gramian(sys, propagate(sys));
    CHECK((g.G - pi * Mat::Identity(2, 2)).norm() < 1e-8);
    CHECK(g.lambda_min == doctest::Approx(pi).epsilon(1e-9));
  }

  TEST_CASE("zero generator with identity observation") {
    const double tau = 1.7;
    const auto sys = constant_system(Mat::Zero(3, 3), Mat::Identity(3, 3), std::nullopt, tau, 10);
    const auto u = propagate(sys);
    CHECK(std::abs(observability_gramian(sys, u).lambda_min - tau) < 1e-10);
    CHECK(final_time_constant(sys, u) == doctest::Approx(tau).epsilon(1e-12));
    CHECK(admissibility_constant(sys, u).M_tau == doctest::Approx(std::sqrt(tau)).epsilon(1e-12));
  }

  TEST_CASE("random constant pairs against the quadrature oracle") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
      const Mat A = oracle::random_matrix(rng, 3, 3) * 0.5, C = oracle::random_matrix(rng, 2, 3);
      const auto sys = constant_system(A, C, std::nullopt, 1.3, 400);
      const Mat ref = oracle::constant_gramian(A, C, 1.3);
      CHECK((observability_gramian(sys, propagate(sys)).G - ref).norm() / ref.norm() < 1e-9);
    }
  }

  TEST_CASE("sweep agrees with direct Gramians from later start nodes") {
    std::mt19937_64 rng(23);
    const auto fam = MatrixFamily::perturbed(oracle::random_matrix(rng, 3, 3) * 0.3,
                                             {{TimeProfile::sinusoid(1.0, 2.0), oracle::random_matrix(rng, 3, 3) * 0.3}});
    SystemSpec sys{fam, MatrixFamily::constant(oracle::random_matrix(rng, 1, 3)), std::nullopt, TimeGrid(1.0, 51),
                   std::nullopt, true};
    const auto u = propagate(sys);
    const auto sweep = observability_sweep(sys, u);
    for (std::size_t s : {0u, 1u, 2u, 10u, 33u, 50u, 51u}) {
      const Mat direct = observability_gramian(sys, u, s).G;
      CHECK((sweep[s] - direct).norm() <= 1e-12 * std::max(1.0, direct.norm()));
    }
  }

  TEST_CASE("averaged Gramian equals the Gramian for a constant observation") {
    const auto sys = constant_system(rotation() * 0.7, row({1.0, 2.0}), std::nullopt, 3.0, 300);
    const auto u = propagate(sys);
    CHECK((averaged_gramian(sys, u).G - observability_gramian(sys, u).G).norm() < 1e-10);
  }

  TEST_CASE("controllability Gramian and duality") {
    std::mt19937_64 rng(31);
    const Mat A = oracle::random_matrix(rng, 3, 3) * 0.4, B = oracle::random_matrix(rng, 3, 1);
    const auto sys = constant_system(A, std::nullopt, B, 1.0, 400);
    const auto u = propagate(sys);
    const Mat ref = oracle::gauss_matrix(
        [&](double r) {
          const Mat e = oracle::taylor_expm(-(1.0 - r) * A);
          return Mat(e * B * B.adjoint() * e.adjoint());
        },
        0.0, 1.0, 400);
    CHECK((controllability_gramian(sys, u).G - ref).norm() / ref.norm() < 1e-9);
    CHECK(duality_defect(sys, u) < 1e-10);
    const auto sweep = controllability_sweep(sys, u);
    CHECK((sweep[100] - controllability_gramian(sys, u, 100).G).norm() < 1e-12);
  }

  TEST_CASE("missing families are reported") {
    const auto sys = constant_system(rotation(), std::nullopt, std::nullopt, 1.0, 10);
    const auto u = propagate(sys);
    CHECK_THROWS_AS(observability_gramian(sys, u), MissingObservation);
    CHECK_THROWS_AS(controllability_gramian(sys, u), MissingControl);
  }

  TEST_CASE("report text") {
    const auto sys = constant_system(rotation(), row({1.0, 0.0}), std::nullopt, 2 * pi, 200);
    std::ostringstream os;
    write_report(os, observability_gramian(sys, propagate(sys)), true);
    CHECK(os.str().find("lambda_min = ") != std::string::npos);
    CHECK(os.str().find("matrix = ") != std::string::npos);
  }
}

TEST_SUITE("hautus") {
  TEST_CASE("moment matrices and Q") {
    const auto z = constant_system(Mat::Zero(2, 2), Mat::Identity(2, 2), std::nullopt, 1.0, 10);
    const auto mz = moment_matrices(z);
    CHECK((mz.Q(3.0) - 9.0 * Mat::Identity(2, 2)).norm() < 1e-14);

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = cplx(0, -1);
    const auto m = moment_matrices(constant_system(d, Mat::Identity(2, 2), std::nullopt, 1.0, 10));
    const double xi = 0.37;
    CHECK(m.Q(xi)(0, 0).real() == doctest::Approx((xi + 1) * (xi + 1)));
    CHECK(m.Q(xi)(1, 1).real() == doctest::Approx((xi - 1) * (xi - 1)));

    // A(t) = i c(t) I
    const auto fam = MatrixFamily::perturbed(Mat::Zero(1, 1), {{TimeProfile::sinusoid(1.0, 1.0), Mat::Constant(1, 1, cplx(0, 1))}});
    SystemSpec s{fam, MatrixFamily::constant(Mat::Ones(1, 1)), std::nullopt, TimeGrid(2.0, 400), std::nullopt, true};
    const auto mm = moment_matrices(s);
    const double cbar = (1 - std::cos(2.0)) / 2.0, c2bar = (1.0 - std::sin(4.0) / 4.0) / 2.0;
    CHECK(mm.Q(0.5)(0, 0).real() == doctest::Approx(0.25 + 2 * 0.5 * cbar + c2bar).epsilon(1e-10));
  }

  TEST_CASE("AH.2 margin closed forms") {
    const auto m = moment_matrices(constant_system(Mat::Zero(1, 1), Mat::Ones(1, 1), std::nullopt, 1.0, 10));
    for (double xi : {-2.0, 0.0, 0.5}) CHECK(ah2_margin(m, 1.0, 1.0, xi) == doctest::Approx(xi * xi).epsilon(1e-12));
    CHECK(verify_AH2(m, 1.0, 1.0, 0.0).holds);

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = cplx(0, -1);
    const auto m2 = moment_matrices(constant_system(d, row({1.0, 1.0}), std::nullopt, 1.0, 10));
    // at xi = -1: [[1, 1], [1, 5]] - I
    const double ev = (4 - std::sqrt(16.0 + 4.0)) / 2.0;
    CHECK(ah2_margin(m2, 1.0, 1.0, -1.0) == doctest::Approx(ev).epsilon(1e-12));
    const auto v = verify_AH2(m2, 1.0, 1.0, 1.0);
    CHECK_FALSE(v.holds);
    CHECK(v.min_margin <= ev + 1e-12);
  }

  TEST_CASE("unobserved systems never verify") {
    std::mt19937_64 rng(5);
    const Mat a = oracle::random_skew(rng, 3);
    const auto m = moment_matrices(constant_system(a, Mat::Zero(1, 3), std::nullopt, 1.0, 10));
    for (double M : {0.5, 2.0, 10.0}) {
      const auto v = verify_AH2(m, 3.0, M, 1.0);
      CHECK_FALSE(v.holds);
      CHECK(v.min_margin < 0.0);
    }
  }

  TEST_CASE("fitted curves") {
    const auto m = moment_matrices(constant_system(Mat::Zero(2, 2), Mat::Identity(2, 2), std::nullopt, 1.0, 10));
    auto c = fit_constants(m, {0.5, 1.0}, 0.0);
    REQUIRE(c.size() == 2);
    CHECK_FALSE(c[0].M.finite);
    CHECK(c[1].M.finite);
    CHECK(c[1].M.value == 0.0);

    Mat d = Mat::Zero(2, 2);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = cplx(0, -1);
    const auto ms = moment_matrices(constant_system(d, Mat::Identity(2, 2), std::nullopt, 1.0, 10));
    c = fit_constants(ms, {1.0}, 1.0);
    CHECK(c[0].M.value == 0.0);
    const auto mu = moment_matrices(constant_system(d, row({1.0, 0.0}), std::nullopt, 1.0, 10));
    c = fit_constants(mu, {1.0, 4.0}, 1.0);
    CHECK_FALSE(c[0].M.finite);
    CHECK_FALSE(c[1].M.finite);
  }

  TEST_CASE("fitted constants verify and decrease along m") {
    std::mt19937_64 rng(13);
    const Mat a = oracle::random_skew(rng, 3, 2.0);
    const auto sys = constant_system(a, oracle::random_matrix(rng, 1, 3), std::nullopt, 2.0, 200);
    const auto m = moment_matrices(sys);
    const double sigma = op_norm(a);
    const auto curve = fit_constants(m, default_m_grid(m, 5), sigma);
    double last = INFINITY;
    for (const auto& p : curve) {
      if (!p.M.finite) continue;
      CHECK(verify_AH2(m, p.m, p.M.value, sigma).holds);
      CHECK(p.M.value <= last * (1 + 1e-6));
      last = p.M.value;
    }
    CHECK(std::isfinite(last));
  }

  TEST_CASE("AH.1 margins") {
    const auto sys = constant_system(Mat::Zero(1, 1), Mat::Ones(1, 1), std::nullopt, 1.0, 10);
    const Vec x = Vec::Ones(1);
    const double e = std::exp(1.0);
    const double m = 0.8, M = 0.6;
    const double expected = m * m * (e * e - 1) / 2 + M * M * (e - 1) * (e - 1) - 1;
    CHECK(ah1_margin(sys, m, M, 1.0, x) == doctest::Approx(expected).epsilon(1e-8));
    CHECK(ah1_margin(sys, m, M, 1.0, x, 1024) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ah1_margin(sys, 0.0, 0.0, cplx(0, 3), x) == doctest::Approx(-1.0));
    const auto v = verify_AH1(sys, 0.0, 0.0, {cplx(0, 1)});
    CHECK(v.violation_found);
    CHECK(v.x.norm() == doctest::Approx(1.0));
  }

  TEST_CASE("AH.2 verdict implies no AH.1 violation on the imaginary axis") {
    std::mt19937_64 rng(19);
    const Mat a = oracle::random_skew(rng, 2, 1.5);
    const auto sys = constant_system(a, oracle::random_matrix(rng, 1, 2), std::nullopt, 3.0, 300);
    const auto m = moment_matrices(sys);
    const auto p = best_curve_point(fit_constants(m, default_m_grid(m, 4), 1.5));
    REQUIRE(p.M.finite);
    std::vector<cplx> axis;
    for (int k = -20; k <= 20; ++k) axis.push_back(cplx(0, 0.2 * k));
    CHECK_FALSE(verify_AH1(sys, p.m, p.M.value, axis).violation_found);
  }

  TEST_CASE("AH.3 factor") {
    CHECK(ah3_factor(0.0, 2.0) == 1.0);
    CHECK(ah3_factor(0.5, 2.0) == doctest::Approx((std::exp(2.0) - 1) / 2.0));
  }

  TEST_CASE("necessary constants") {
    const auto a = constants_from_observability(1.0, 1.0, 1.0);
    const auto b = constants_from_observability(2.0, 1.0, 1.0);
    CHECK(b.m == doctest::Approx(a.m / std::sqrt(2.0)));
    CHECK(b.M == doctest::Approx(a.M / std::sqrt(2.0)));
    CHECK_THROWS_AS(constants_from_observability(0.0, 1.0, 1.0), NonPositiveKappa);

    const auto sys = constant_system(Mat::Zero(2, 2), Mat::Identity(2, 2), std::nullopt, 1.0, 10);
    const auto mm = moment_matrices(sys);
    CHECK(verify_AH2(mm, a.m, a.M, 0.0).holds);
    CHECK_FALSE(verify_AH1(sys, a.m, a.M, default_lambda_grid(mm, a.M, 0.0, 21)).violation_found);

    const auto rot = constant_system(rotation(), row({1.0, 0.0}), std::nullopt, 2 * pi, 1000);
    const auto u = propagate(rot);
    const auto c = constants_from_observability(observability_gramian(rot, u).lambda_min,
                                                admissibility_constant(rot, u).M_tau, 2 * pi);
    CHECK(verify_AH2(moment_matrices(rot), c.m, c.M, 1.0).holds);
  }

  TEST_CASE("report and CSV") {
    const auto sys = constant_system(rotation(), row({1.0, 0.0}), std::nullopt, 2 * pi, 400);
    const auto r = hautus_report(sys, {}, -1, -1);
    std::ostringstream a, b;
    write_scan_csv(a, r.verdict.scan);
    write_curve_csv(b, r.curve);
    CHECK(a.str().rfind("xi,lambda_min_margin\n", 0) == 0);
    CHECK(b.str().rfind("m,M\n", 0) == 0);
    CHECK(r.verdict.holds);
  }
}
