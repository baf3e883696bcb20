#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "../oracles.hpp"
#include "avgh/errors.hpp"
#include "avgh/evolution.hpp"
#include "avgh/linalg.hpp"
#include "avgh/system.hpp"

using namespace avgh;
using std::numbers::pi;

namespace {

Mat diag2(cplx a, cplx b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE("system") {
  TEST_CASE("time grid nodes") {
    const TimeGrid g(2.0, 8);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(8) == 2.0);
    CHECK(g.dt() == 0.25);
    CHECK(g.n_nodes() == 9);
  }

  TEST_CASE("Lipschitz bound") {
    const TimeGrid g(pi, 10000);
    CHECK(lipschitz_bound(MatrixFamily::constant(Mat::Identity(2, 2)), g) == 0.0);
    const auto f = MatrixFamily::perturbed(Mat::Zero(2, 2), {{TimeProfile::sinusoid(1.0, 1.0), diag2(1.0, 0.0)}});
    CHECK(lipschitz_bound(f, g) == doctest::Approx(1.0).epsilon(1e-6));
    // time reversal symmetry: sin(pi - t) = sin t, so the reversed family is the same set of matrices
    const auto r = MatrixFamily::perturbed(Mat::Zero(2, 2), {{TimeProfile::sinusoid(1.0, -1.0, pi), diag2(1.0, 0.0)}});
    CHECK(lipschitz_bound(r, g) == doctest::Approx(lipschitz_bound(f, g)).epsilon(1e-12));
  }

  TEST_CASE("growth bounds for scalar and diagonal generators") {
    const double a = 0.7;
    auto u = propagate(MatrixFamily::constant(a * Mat::Identity(2, 2)), TimeGrid(2.0, 100));
    auto g = growth_bounds(u);
    CHECK(g.k == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.K == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.alpha == doctest::Approx(-a).epsilon(1e-9));
    CHECK(g.beta == doctest::Approx(-a).epsilon(1e-9));

    u = propagate(MatrixFamily::constant(diag2(1.0, -1.0)), TimeGrid(1.0, 64));
    g = growth_bounds(u);
    CHECK(g.alpha == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(g.beta == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.k == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(g.K == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("growth bounds hold on every grid pair") {
    std::mt19937_64 rng(11);
    const Mat a0 = oracle::random_matrix(rng, 3, 3) * 0.5;
    const auto fam = MatrixFamily::perturbed(a0, {{TimeProfile::sinusoid(1.0, 2.0), oracle::random_matrix(rng, 3, 3) * 0.3}});
    const auto u = propagate(fam, TimeGrid(2.0, 60));
    const auto g = growth_bounds(u);
    for (std::size_t i = 0; i <= 60; ++i)
      for (std::size_t j = i; j <= 60; ++j) {
        const auto s = singular_extremes(u.between(j, i));
        const double dt = u.grid().node(j) - u.grid().node(i);
        CHECK(g.lower(dt) <= s.min * (1 + 1e-12));
        CHECK(s.max <= g.upper(dt) * (1 + 1e-12));
      }
  }

  TEST_CASE("skew family gives unit growth constants") {
    std::mt19937_64 rng(3);
    const auto fam = MatrixFamily::perturbed(oracle::random_skew(rng, 4), {{TimeProfile::sinusoid(1.0, 1.0), oracle::random_skew(rng, 4, 0.5)}});
    const auto g = growth_bounds(propagate(fam, TimeGrid(3.0, 300)));
    CHECK(std::abs(g.k - 1) < 1e-8);
    CHECK(std::abs(g.K - 1) < 1e-8);
    CHECK(std::abs(g.alpha) < 1e-8);
    CHECK(std::abs(g.beta) < 1e-8);
  }

  TEST_CASE("system validation") {
    Mat a = Mat::Identity(2, 2);
    SystemSpec bad{MatrixFamily::constant(a).claim_skew(), MatrixFamily::constant(Mat::Ones(1, 2)), std::nullopt,
                   TimeGrid(1.0, 10), std::nullopt, true};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    SystemSpec shape{MatrixFamily::constant(a), MatrixFamily::constant(Mat::Ones(1, 3)), std::nullopt,
                     TimeGrid(1.0, 10), std::nullopt, true};
    CHECK_THROWS_AS(shape.validate(), ValidationError);
    SystemSpec none{MatrixFamily::constant(a), std::nullopt, std::nullopt, TimeGrid(1.0, 10), std::nullopt, true};
    CHECK_THROWS_AS(none.observation(), MissingObservation);
    CHECK_THROWS(TimeGrid(-1.0, 10));
    CHECK_THROWS(TimeGrid(1.0, 0));
  }

  TEST_CASE("sampled family interpolates linearly") {
    const auto f = MatrixFamily::sampled({0.0, 1.0}, {Mat::Zero(1, 1), Mat::Constant(1, 1, 2.0)});
    CHECK(f(0.25)(0, 0).real() == doctest::Approx(0.5));
    CHECK(f.kind() == MatrixFamily::Kind::sampled);
  }

  TEST_CASE("perturbation parts") {
    const auto f = MatrixFamily::perturbed(Mat::Identity(2, 2), {{TimeProfile::constant(2.0), diag2(1.0, 0.0)}});
    CHECK(f(0.3)(0, 0).real() == doctest::Approx(3.0));
    CHECK(f.perturbation()(0.3)(0, 0).real() == doctest::Approx(2.0));
    CHECK(f.unperturbed()(0.3)(0, 0).real() == doctest::Approx(1.0));
    CHECK(f.with_perturbation_scaled(0.5)(0.3)(0, 0).real() == doctest::Approx(2.0));
  }
}

TEST_SUITE("evolution") {
  TEST_CASE("constant generator steps are exact exponentials") {
    std::mt19937_64 rng(5);
    const Mat a = oracle::random_matrix(rng, 3, 3);
    const auto u = propagate(MatrixFamily::constant(a), TimeGrid(1.0, 10));
    CHECK((u.from_origin(10) - oracle::taylor_expm(-a)).norm() < 1e-12);
  }

  TEST_CASE("cocycle law, apply and retrograde states") {
    std::mt19937_64 rng(9);
    const auto fam = MatrixFamily::perturbed(oracle::random_matrix(rng, 3, 3) * 0.4,
                                             {{TimeProfile::sinusoid(1.0, 3.0), oracle::random_matrix(rng, 3, 3) * 0.4}});
    const auto u = propagate(fam, TimeGrid(1.0, 40));
    const Mat lhs = u.between(40, 5);
    const Mat rhs = u.between(40, 17) * u.between(17, 5);
    CHECK((lhs - rhs).norm() / lhs.norm() < 1e-13);
    CHECK((u.between(17, 0) - u.from_origin(17)).norm() < 1e-13);
    CHECK((u.between(40, 17) - u.to_final(17)).norm() < 1e-13);
    CHECK((u.between(7, 7) - Mat::Identity(3, 3)).norm() == 0.0);
    const Vec x = oracle::random_matrix(rng, 3, 1);
    CHECK((u.apply(30, 4, x) - u.between(30, 4) * x).norm() < 1e-13);
    CHECK((u.retrograde_state(x, 12) - u.to_final(12).adjoint() * x).norm() < 1e-13);
    CHECK_THROWS_AS(u.between(3, 5), IndexOrder);
    CHECK_THROWS_AS(u.apply(3, 5, x), IndexOrder);
  }

  TEST_CASE("fourth order against an RK4 reference") {
    std::mt19937_64 rng(21);
    const Mat a0 = oracle::random_matrix(rng, 3, 3) * 0.5, r = oracle::random_matrix(rng, 3, 3) * 0.5;
    const auto fam = MatrixFamily::perturbed(a0, {{TimeProfile::sinusoid(1.0, 2.0), r}});
    const Mat ref = oracle::rk4_propagator([&](double t) { return fam(t); }, 0.0, 1.0, 20000);
    double e1 = 0, e2 = 0;
    e1 = (propagate(fam, TimeGrid(1.0, 10)).from_origin(10) - ref).norm();
    e2 = (propagate(fam, TimeGrid(1.0, 20)).from_origin(20) - ref).norm();
    const double slope = std::log2(e1 / e2);
    CHECK(slope > 3.7);
    CHECK(slope < 4.3);
  }

  TEST_CASE("skew families are unitary") {
    std::mt19937_64 rng(2);
    const auto fam = MatrixFamily::perturbed(oracle::random_skew(rng, 4, 2.0), {{TimeProfile::sinusoid(1.0, 5.0), oracle::random_skew(rng, 4)}});
    const auto u = propagate(fam, TimeGrid(2.0, 200));
    const Mat uu = u.from_origin(200);
    CHECK((uu.adjoint() * uu - Mat::Identity(4, 4)).norm() < 1e-10);
  }

  TEST_CASE("large steps are refused") {
    const auto fam = MatrixFamily::perturbed(diag2(0.0, cplx(0, 5)), {{TimeProfile::sinusoid(100.0, 50.0), Mat::Ones(2, 2) * cplx(0, 1)}});
    CHECK_THROWS_AS(step_propagator(fam, 0.0, 1.0), StepTooLarge);
  }

  TEST_CASE("text dump round trip") {
    std::mt19937_64 rng(4);
    const auto u = propagate(MatrixFamily::constant(oracle::random_matrix(rng, 2, 2)), TimeGrid(0.5, 6));
    std::stringstream ss;
    u.write(ss);
    const auto v = EvolutionTable::read(ss);
    CHECK(v.n_steps() == 6);
    for (std::size_t j = 0; j < 6; ++j) CHECK((v.step(j) - u.step(j)).norm() <= 1e-15 * u.step(j).norm());
    std::stringstream bad("avgh-evolution 1\ndim 2\n");
    CHECK_THROWS_AS(EvolutionTable::read(bad), ParseError);
  }

  TEST_CASE("strided pair sampling matches direct products") {
    std::mt19937_64 rng(8);
    const auto fam = MatrixFamily::perturbed(oracle::random_matrix(rng, 2, 2), {{TimeProfile::sinusoid(1.0, 1.0), oracle::random_matrix(rng, 2, 2)}});
    const auto u = propagate(fam, TimeGrid(1.0, 100));
    const auto pairs = sample_pairs(u, 11);
    CHECK(pairs.size() == 55);
    for (const auto& p : pairs) {
      const auto s = singular_extremes(u.between(p.j, p.i));
      CHECK(p.s_max == doctest::Approx(s.max).epsilon(1e-12));
      CHECK(p.s_min == doctest::Approx(s.min).epsilon(1e-12));
    }
  }
}
