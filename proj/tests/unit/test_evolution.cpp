#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "gcclab/error.hpp"
#include "gcclab/evolution.hpp"
#include "gcclab/fft.hpp"

using namespace gcclab;
using namespace gcclab::evolution;

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(const std::vector<cplx>& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

std::vector<cplx> gaussian_hat(const spectral::GridSpec& g) {
  std::vector<cplx> u(g.n);
  const double h = g.period / static_cast<double>(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double x = h * static_cast<double>(i) - 0.5 * g.period;
    u[i] = std::exp(-x * x) * std::polar(1.0, 3.0 * x);
  }
  fft::forward(u, g.n, 1);
  return u;
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("propagator") {
  const spectral::GridSpec g{1, 256, 16.0};
  const PropagatorSpec spec{g, 1.0};
  auto u = gaussian_hat(g);
  const auto u0 = u;
  propagate(spec, u, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == u0[i]);

  // single mode k = 5
  std::vector<cplx> e(g.n, 0.0);
  e[5] = 1.0;
  const double xi = 2 * kPi / 16.0 * 5;
  for (double beta : {0.0, 0.5, 1.0}) {
    auto v = e;
    propagate({g, beta}, v, 0.37);
    CHECK(std::abs(v[5] - std::polar(1.0, -std::pow(xi, beta + 1) * 0.37)) < 1e-14);
    CHECK(std::abs(v[5]) == doctest::Approx(1.0).epsilon(1e-15));
  }

  const double n0 = norm2(u0);
  for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    auto v = u0;
    propagate(spec, v, t);
    CHECK(std::abs(norm2(v) - n0) <= 1e-12 * n0);
  }

  CHECK_THROWS_WITH_AS(check_beta(1.5), doctest::Contains("[0,1]"), UsageError);
  CHECK_THROWS_AS(check_beta(-0.1), UsageError);
}

TEST_CASE("property: group law") {
  const spectral::GridSpec g{1, 128, 8.0};
  for (int trial = 0; trial < 50; ++trial) {
    const double beta = testgen::uniform(0, 1), t1 = testgen::uniform(-2, 2), t2 = testgen::uniform(-2, 2);
    auto a = gaussian_hat(g), b = a;
    propagate({g, beta}, a, t1 + t2);
    propagate({g, beta}, b, t1);
    propagate({g, beta}, b, t2);
    double err = 0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    CHECK(err <= 1e-12 * std::sqrt(norm2(a)));
  }
}

TEST_CASE("quadrature nodes") {
  for (auto rule : {Quadrature::gauss_legendre, Quadrature::trapezoid}) {
    const auto n = time_nodes(rule, 2.5, 70);
    double s = 0;
    for (double w : n.w) s += w;
    CHECK(s == doctest::Approx(2.5).epsilon(1e-14));
  }
  CHECK(time_nodes(Quadrature::gauss_legendre, 1.0, 70).t.size() == 96);
  CHECK(time_nodes(Quadrature::trapezoid, 1.0, 70).t.size() == 70);
  // GL integrates cos(20 t) on [0,1]
  const auto n = time_nodes(Quadrature::gauss_legendre, 1.0, 64);
  double s = 0;
  for (std::size_t i = 0; i < n.t.size(); ++i) s += n.w[i] * std::cos(20 * n.t[i]);
  CHECK(s == doctest::Approx(std::sin(20.0) / 20.0).epsilon(1e-13));
  CHECK(nyquist_nodes(1.0, 32.0, 0.1) == static_cast<std::size_t>(std::ceil(4 * 1024 * 0.1 / (2 * kPi))));
}

TEST_CASE("gramian examples") {
  const auto one = make_constant(1, 1.0, 8.0, 128);
  for (double T : {0.05, 0.5, 2.0}) {
    const auto r = observability_gramian(one, 1.0, T, 12.0);
    CHECK(std::abs(r.lambda_min - T) <= 1e-10 * T);
    CHECK(r.kappa * r.lambda_min == doctest::Approx(1.0));
  }
  const auto zero = make_constant(1, 0.0, 8.0, 128);
  CHECK(observability_gramian(zero, 1.0, 0.5, 12.0).lambda_min == 0.0);
  CHECK(std::isinf(observability_gramian(zero, 1.0, 0.5, 12.0).kappa));

  const auto ps = make_periodic_square(1, 0.3, 8.0, 512);
  const auto r = observability_gramian(ps, 1.0, 0.1, 32.0);
  CHECK(r.lambda_min > 0.0);
  CHECK(r.lambda_min <= 0.1);

  GramianOptions few;
  few.n_nodes = 3;
  CHECK_THROWS_WITH_AS(observability_gramian(ps, 1.0, 1.0, 32.0, few), doctest::Contains("nodes"), UsageError);
  CHECK_THROWS_AS(observability_gramian(ps, 1.5, 1.0, 32.0), UsageError);
}

TEST_CASE("hadamard form matches FFT propagation") {
  const auto f = testgen::smooth_field(1, 8.0, 64);
  for (auto rule : {Quadrature::gauss_legendre, Quadrature::trapezoid}) {
    GramianOptions o;
    o.rule = rule;
    const auto a = gramian_matrix(f, 0.5, 0.7, 10.0, o);
    const auto b = gramian_by_propagation(f, 0.5, 0.7, 10.0, o);
    REQUIRE(a.size() == b.size());
    double err = 0;
    for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("property: gramian invariants") {
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = testgen::smooth_field(1, 8.0, 128);
    const double beta = testgen::uniform(0, 1);
    // quadrature convergence
    const auto base = observability_gramian(f, beta, 0.5, 10.0);
    GramianOptions dbl;
    dbl.n_nodes = 2 * base.nodes;
    CHECK(std::abs(observability_gramian(f, beta, 0.5, 10.0, dbl).lambda_min - base.lambda_min) < 1e-6);
    // cutoff monotonicity
    double prev = INFINITY;
    for (double K : {4.0, 8.0, 12.0}) {
      const double l = observability_gramian(f, beta, 0.5, K).lambda_min;
      CHECK(l <= prev + 1e-12);
      prev = l;
    }
    // time monotonicity and lambda_min <= T
    const auto c = cost_curve(f, beta, {0.1, 0.2, 0.4, 0.8}, 8.0);
    CHECK(c.monotone);
    for (const auto& p : c.points) CHECK(p.lambda_min <= p.T * (1 + 1e-12));
  }
}

TEST_CASE("miller cost") {
  CHECK(*miller_cost(0.0, 2.0, 4.0, 0.1) == doctest::Approx(0.5));
  const double M = 0.3, eps = 0.5, Tc = std::sqrt(M * (kPi * kPi + eps));
  CHECK_FALSE(miller_cost(M, 1.0, Tc, eps).has_value());
  CHECK_FALSE(miller_cost(M, 1.0, 0.5 * Tc, eps).has_value());
  CHECK(*miller_cost(M, 1.0, 2 * Tc, eps) == doctest::Approx(2 * Tc / (3 * Tc * Tc)));
  CHECK_THROWS_AS(miller_cost(M, 1.0, 1.0, 0.0), UsageError);
}

TEST_CASE("regression and shape fits") {
  const auto lf = fit_linear({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(lf.slope == doctest::Approx(2.0));
  CHECK(lf.intercept == doctest::Approx(1.0));
  CHECK(lf.r2 == doctest::Approx(1.0));

  // kappa = exp(T^-4): exact envelope fits, wrong exponent fits worse
  std::vector<GramianReport> pts;
  for (double T : {0.8, 0.9, 1.0, 1.1, 1.2, 1.3}) {
    GramianReport r;
    r.T = T;
    r.kappa = std::exp(std::pow(T, -4.0));
    pts.push_back(r);
  }
  const auto good = arb_time_shape_check(pts, 2.0 / 3.0);
  CHECK(good.exponent == doctest::Approx(-4.0));
  CHECK(good.pass);
  CHECK(good.fit.r2 == doctest::Approx(1.0));
  const auto bad = arb_time_shape_check(pts, 4.0 / 10.0);  // exponent -8
  CHECK(bad.exponent == doctest::Approx(-8.0));
  CHECK(bad.fit.r2 < good.fit.r2);

  // field == 1: kappa = 1/T decreases, slope against T^-4 is positive
  const auto one = make_constant(1, 1.0, 8.0, 64);
  const auto s = arb_time_shape_check(one, 1.0, 2.0 / 3.0, {0.5, 0.6, 0.7, 0.8}, 6.0);
  CHECK(s.fit.slope >= 0.0);
}

}
