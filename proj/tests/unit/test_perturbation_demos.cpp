#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "avgh/demos.hpp"
#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/gramian.hpp"
#include "avgh/linalg.hpp"
#include "avgh/perturbation.hpp"

using namespace avgh;
using std::numbers::pi;

TEST_SUITE("perturbation") {
  TEST_CASE("mu and transferred constants") {
    const TimeGrid g(2.0, 100);
    const auto R = MatrixFamily::constant(0.3 * Mat::Identity(2, 2));
    CHECK(mu(R, 1.5, g) == doctest::Approx(2 * 1.5 * 1.5 * 0.09).epsilon(1e-12));
    CHECK(beta_sup(R, g) == doctest::Approx(0.3));
    const auto s = MatrixFamily::perturbed(Mat::Zero(1, 1), {{TimeProfile::sinusoid(1.0, pi), Mat::Ones(1, 1)}});
    CHECK(mu(s, 1.0, g) == doctest::Approx(1.0).epsilon(1e-8));  // 2 * mean(sin^2) = 1
    const auto t = transferred_constants(1.0, 2.0, 0.75);
    CHECK(t.m == doctest::Approx(2.0));
    CHECK(t.M == doctest::Approx(2.0 * std::sqrt(2.0) * 2.0));
    CHECK(t.weak);
    CHECK_FALSE(transferred_constants(1.0, 2.0, 0.2).weak);
    CHECK_THROWS_AS(transferred_constants(1.0, 1.0, 1.0), MuTooLarge);
  }

  TEST_CASE("Duhamel identity") {
    std::mt19937_64 rng(41);
    const Mat a0 = oracle::random_matrix(rng, 3, 3) * 0.5;
    const auto fam = MatrixFamily::perturbed(a0, {{TimeProfile::sinusoid(1.0, 2.0), oracle::random_matrix(rng, 3, 3) * 0.3}});
    const auto u = propagate(fam, TimeGrid(1.0, 1000));
    const Vec x = oracle::random_matrix(rng, 3, 1).normalized();
    CHECK(duhamel_residual(a0, fam.perturbation(), u, 0, 1000, x) < 1e-7);
    CHECK(duhamel_residual(a0, fam.perturbation(), u, 250, 700, x) < 1e-7);
  }

  TEST_CASE("quasi-contraction for skew bases") {
    std::mt19937_64 rng(43);
    const auto R = MatrixFamily::perturbed(Mat::Zero(3, 3), {{TimeProfile::sinusoid(1.0, 1.0), oracle::random_matrix(rng, 3, 3) * 0.2}});
    const auto fam = MatrixFamily::perturbed(oracle::random_skew(rng, 3, 2.0), R.terms());
    const TimeGrid g(2.0, 400);
    const auto u = propagate(fam, g);
    CHECK(quasi_contraction_check(u, beta_sup(R, g)) <= 1e-8);
  }

  TEST_CASE("admissibility transfer bounds the perturbed constant") {
    std::mt19937_64 rng(47);
    const Mat a0 = oracle::random_skew(rng, 3, 1.0);
    const Mat C = oracle::random_matrix(rng, 1, 3);
    const auto terms = std::vector<PerturbationTerm>{{TimeProfile::sinusoid(1.0, 1.0), oracle::random_matrix(rng, 3, 3) * 0.3}};
    const TimeGrid g(2.0, 400);
    SystemSpec s0{MatrixFamily::constant(a0), MatrixFamily::constant(C), std::nullopt, g, std::nullopt, true};
    SystemSpec s1{MatrixFamily::perturbed(a0, terms), MatrixFamily::constant(C), std::nullopt, g, std::nullopt, true};
    const double K = std::pow(admissibility_constant(s0, propagate(s0)).M_tau, 2);
    const auto u1 = propagate(s1);
    const double Kp = admissibility_transfer(K, s1.A.perturbation(), u1);
    CHECK(Kp >= std::pow(admissibility_constant(s1, u1).M_tau, 2));
  }

  TEST_CASE("Holder route") {
    CHECK(holder_floor(4.0, 0.0, 0.5, 2.0) == doctest::Approx(1.0));
    const double c = 10, L0 = 0.3, alpha = 0.5, tau = 2.0;
    const double expected = (c - 2 * L0 * L0 * std::pow(tau, 2 * alpha + 2) / ((2 * alpha + 1) * (alpha + 1))) / (2 * tau);
    CHECK(holder_floor(c, L0, alpha, tau) == doctest::Approx(expected));
    const auto C = MatrixFamily::perturbed(Mat::Zero(1, 1), {{TimeProfile::sinusoid(1.0, 1.0), Mat::Ones(1, 1)}});
    CHECK(holder_constant(C, TimeGrid(1.0, 200), 1.0) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_SUITE("demos") {
  TEST_CASE("projections of spatial shapes") {
    CHECK((project_shape(SpatialShape{}, 5) - RMat::Identity(5, 5)).norm() < 1e-12);
    SpatialShape bump{SpatialShape::Kind::bump, 0.3, 0.1};
    const RMat p = project_shape(bump, 4);
    CHECK((p - p.transpose()).norm() == 0.0);
    // entry (1, 2) by an independent fine trapezoid rule
    double ref = 0.0;
    const int n = 200000;
    for (int i = 0; i <= n; ++i) {
      const double x = static_cast<double>(i) / n;
      const double w = (i == 0 || i == n) ? 0.5 : 1.0;
      ref += w * bump(x) * 2 * std::sin(2 * pi * x) * std::sin(3 * pi * x) / n;
    }
    CHECK(p(1, 2) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(parse_shape_kind("cosine") == SpatialShape::Kind::cosine);
    CHECK_THROWS_AS(parse_shape_kind("triangle"), ValidationError);
  }

  TEST_CASE("Schrodinger single mode closed form") {
    SchrodingerSpec spec;
    spec.n_modes = 1;
    spec.tau = 1.5;
    const auto sys = build_schrodinger(spec);
    const auto g = observability_gramian(sys, propagate(sys));
    CHECK(g.lambda_min == doctest::Approx(2 * pi * pi * 1.5).epsilon(1e-10));
  }

  TEST_CASE("Schrodinger generator is skew with a separable potential") {
    SchrodingerSpec spec;
    spec.n_modes = 5;
    spec.potential = {{TimeProfile::sinusoid(2.0, 3.0), {SpatialShape::Kind::linear}}};
    const auto sys = build_schrodinger(spec);
    CHECK(skew_defect(sys.A, sys.grid) <= 1e-12);
    // constant potential shifts the spectrum by c
    SchrodingerSpec c = spec;
    c.potential = {{TimeProfile::constant(0.7), {}}};
    const Mat a = build_schrodinger(c).A(0.2);
    CHECK((a - build_schrodinger(SchrodingerSpec{5, 2.0, 0, {}}).A(0.2) - cplx(0, -0.7) * Mat::Identity(5, 5)).norm() < 1e-12);
    // separability: A(t) - A(0)-base equals a(t) times the fixed projection
    const Mat r = sys.A.perturbation()(0.4);
    const Mat fixed = cplx(0, -1) * project_shape({SpatialShape::Kind::linear}, 5).cast<cplx>();
    CHECK((r - 2.0 * std::sin(1.2) * fixed).norm() < 1e-12);
  }

  TEST_CASE("wave energy coordinates") {
    WaveSpec spec;
    spec.n_modes = 1;
    const auto sys = build_wave(spec, 2.0);
    const Mat a = sys.A(0.0);
    CHECK((a + a.transpose()).norm() == 0.0);
    CHECK(!sys.is_complex);
    const auto g = observability_gramian(sys, propagate(sys));
    CHECK((g.G - 2.0 * Mat::Identity(2, 2)).norm() < 1e-9);

    WaveSpec damped;
    damped.n_modes = 3;
    damped.damping = {{TimeProfile::constant(0.25), {}}};
    const auto ds = build_wave(damped, 2.0);
    CHECK(op_norm(ds.A.perturbation()(0.5)) == doctest::Approx(0.25).epsilon(1e-12));
    const Mat a0 = ds.A.base();
    for (Index i = 0; i < a0.rows(); ++i)
      for (Index j = 0; j < a0.cols(); ++j) CHECK(a0(i, j) == -a0(j, i));
  }

  TEST_CASE("truncated perturbation: mu scales with t0") {
    WaveSpec a, b;
    a.n_modes = b.n_modes = 2;
    a.damping = {{TimeProfile::constant(0.2).truncated(0.5), {}}};
    b.damping = {{TimeProfile::constant(0.2).truncated(1.0), {}}};
    const auto sa = build_wave(a, 4.0), sb = build_wave(b, 4.0);
    const double ma = mu(sa.A.perturbation(), 1.0, sa.grid), mb = mu(sb.A.perturbation(), 1.0, sb.grid);
    CHECK(mb / ma == doctest::Approx(2.0).epsilon(1e-2));
  }

  TEST_CASE("mode truncation consistency") {
    SchrodingerSpec s4{4, 2.0, 0, {{TimeProfile::sinusoid(1.0, 1.0), {SpatialShape::Kind::cosine}}}};
    SchrodingerSpec s8 = s4;
    s8.n_modes = 8;
    const auto a = build_schrodinger(s4), b = build_schrodinger(s8);
    const double ka = observability_gramian(a, propagate(a)).lambda_min;
    const double kb = observability_gramian(b, propagate(b)).lambda_min;
    CHECK(std::abs(ka - kb) <= 0.1 * std::max(ka, kb));
  }

  TEST_CASE("truncated observation check") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = cplx(0, 1);
    d(1, 1) = cplx(0, -2);
    Mat c(1, 2);
    c << 1.0, 1.0;
    SystemSpec sys{MatrixFamily::constant(d), MatrixFamily::constant(c), std::nullopt, TimeGrid(4.0, 400), std::nullopt, true};
    const auto t = truncated_observation_check(sys, 2.0, {1.5, 2.0, 3.0}, 200);
    CHECK(t.kappa_tau0 > 0.0);
    CHECK(t.independent);
    CHECK(t.max_rel_deviation <= 1e-8);
  }
}
