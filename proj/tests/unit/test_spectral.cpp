#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "gcclab/error.hpp"
#include "gcclab/fft.hpp"
#include "gcclab/spectral.hpp"

using namespace gcclab;
using namespace gcclab::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd dense(const FrequencyMask& m, const ObservationField& f, Weight w = Weight::sqrt_a) {
  const auto c = compression_matrix(m, weight_coefficients(f, w));
  const auto r = static_cast<Eigen::Index>(m.rank());
  return Eigen::Map<const Eigen::MatrixXcd>(c.data(), r, r);
}

std::vector<cplx> random_vector(std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& z : v) z = {testgen::uniform(-1, 1), testgen::uniform(-1, 1)};
  return v;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid spec") {
  GridSpec g{2, 128, 2 * kPi};
  CHECK(g.spacing() == doctest::Approx(1.0));
  CHECK(g.aliasing_radius() == doctest::Approx(64.0));
  CHECK(g.size() == 128 * 128);
}

TEST_CASE("masks against lattice enumeration") {
  const GridSpec g{2, 128, 2 * kPi};
  const auto all = build_mask(g, MaskSpec::ball(INFINITY));
  CHECK(all.rank() == g.size());

  const auto ann = build_mask(g, MaskSpec::annulus(32.0, 2.0, 0.0));
  std::size_t count = 0;
  for (long kx = -64; kx < 64; ++kx)
    for (long ky = -64; ky < 64; ++ky) {
      const long r2 = kx * kx + ky * ky;
      if (r2 >= 900 && r2 <= 1156) ++count;
    }
  CHECK(ann.rank() == count);
  for (const auto& xi : ann.xi) {
    const double r = std::hypot(xi[0], xi[1]);
    CHECK(r >= 30.0 - 1e-12);
    CHECK(r <= 34.0 + 1e-12);
  }

  const GridSpec g1{1, 256, 2 * kPi};
  CHECK_THROWS_AS(build_mask(g1, MaskSpec::annulus(10.5, 0.1, 0.0)), UsageError);
  CHECK_THROWS_AS(build_mask(g1, MaskSpec::annulus(127.0, 2.0, 0.0)), UsageError);

  const auto sec = build_mask(g, MaskSpec::sector(0.0, 0.2));
  for (const auto& xi : sec.xi) {
    CHECK(std::abs(std::atan2(xi[1], xi[0])) <= 0.1 + 1e-12);
    CHECK((xi[0] != 0.0 || xi[1] != 0.0));
  }
  const auto rect = build_mask(g1, MaskSpec::rectangle({3.0, 0.0}, 4.0));
  CHECK(rect.rank() == 5);  // 3,4,5,6,7
}

TEST_CASE("compression: constant field and FFT application") {
  const auto one = make_constant(2, 1.0, 8.0, 32);
  const auto m = build_mask(grid_of(one), MaskSpec::ball(6.0));
  const auto rep = uncertainty_constant(one, m, Weight::sqrt_a);
  CHECK(rep.eigen == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.value == doctest::Approx(1.0).epsilon(1e-12));

  const auto f = testgen::smooth_field(2, 8.0, 32);
  const auto G = dense(m, f);
  for (int trial = 0; trial < 5; ++trial) {
    const auto v = random_vector(m.rank());
    const auto y = apply_compression(m, f.values(), v);
    const Eigen::VectorXcd yd = G * Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(y[i] - yd(static_cast<Eigen::Index>(i))) < 1e-12);
  }
}

TEST_CASE("lanczos agrees with the dense solve") {
  const auto f = testgen::smooth_field(1, 64.0, 1024);
  const auto m = build_mask(grid_of(f), MaskSpec::ball(25.0));
  REQUIRE(m.rank() > 400);
  const auto d = uncertainty_constant(f, m, Weight::full);
  SolverOptions o;
  o.dense_limit = 0;
  const auto l = uncertainty_constant(f, m, Weight::full, o);
  CHECK(d.solver == "dense");
  CHECK(l.solver == "lanczos");
  CHECK(l.residual <= 1e-8);
  CHECK(l.eigen == doctest::Approx(d.eigen).epsilon(1e-7));
}

TEST_CASE("property: compressions are PSD and monotone") {
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = testgen::smooth_field(2, 4.0, 32);
    const auto g = grid_of(f);
    double prev = INFINITY;
    for (double r : {4.0, 8.0, 12.0, 16.0}) {
      const auto m = build_mask(g, MaskSpec::ball(r));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense(m, f));
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
      CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
      const double c = es.eigenvalues().minCoeff();
      CHECK(c <= prev + 1e-12);  // nested masks
      prev = c;
    }
    // monotone in the weight: halve the field pointwise
    Axis ax{0.0, 4.0, 32, true};
    const auto half = make_custom(2, {ax, ax}, [&](Point p) { return 0.5 * f.evaluate(p); }, "half");
    const auto m = build_mask(g, MaskSpec::ball(8.0));
    CHECK(uncertainty_constant(half, m, Weight::sqrt_a).eigen <=
          uncertainty_constant(f, m, Weight::sqrt_a).eigen + 1e-12);
  }
}

TEST_CASE("translation of a rectangle mask keeps C stable") {
  const auto f = make_periodic_square(1, 0.3, 64.0, 1024);
  const auto g = grid_of(f);
  double lo = INFINITY, hi = 0;
  for (double z : {-40.0, -20.0, -5.0, 0.0, 7.0, 25.0, 40.0}) {
    const auto rep = uncertainty_constant(f, build_mask(g, MaskSpec::rectangle({z, 0.0}, 4.0)), Weight::sqrt_a);
    REQUIRE(std::isfinite(rep.value));
    lo = std::min(lo, rep.value);
    hi = std::max(hi, rep.value);
  }
  CHECK(hi / lo <= 5.0);
}

TEST_CASE("annulus containment") {
  const GridSpec g{2, 256, 2 * kPi};
  const auto c1 = annulus_containment(1.0, 0.0, 0.1, 60.0, g);
  CHECK(c1.eps == doctest::Approx(0.1));
  CHECK(c1.contained);
  const auto c1b = annulus_containment(1.0, 0.0, 2.0, 60.0, g);
  CHECK(c1b.eps == 0.25);
  const auto c2 = annulus_containment(2.0, 1.0, 0.5, 60.0, g);
  CHECK(c2.eps == 0.25);
  CHECK(c2.contained);
  CHECK(c2.checked > 0);
  const auto ch = annulus_containment(0.5, 0.0, 0.3, 60.0, g);
  CHECK(ch.eps == doctest::Approx(0.3 * 0.5 / 2.0));
  CHECK(ch.contained);
}

TEST_CASE("property: conversion consistency on random vectors") {
  const auto f = testgen::smooth_field(1, 32.0, 512);
  const auto g = grid_of(f);
  const double gamma = 2.0, beta = 0.0, lambda = 40.0, delta = 1.0;
  const auto ann = build_mask(g, MaskSpec::annulus(lambda, delta, beta));
  const auto con = annulus_containment(gamma, beta, delta, lambda, g);
  REQUIRE(con.contained);
  const auto rep = uncertainty_constant(f, ann, Weight::sqrt_a);
  const double C = rep.value;
  const Eigen::MatrixXcd G = dense(ann, f);
  const double lg = std::pow(lambda, gamma), w = con.eps * std::pow(lambda, gamma - beta - 1.0);
  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < ann.rank(); ++i) {
    const double rg = std::pow(std::abs(ann.xi[i][0]), gamma);
    if (rg >= lg - w && rg <= lg + w) inner.push_back(i);
  }
  REQUIRE(!inner.empty());
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ann.rank()));
    for (auto i : inner) v(static_cast<Eigen::Index>(i)) = {testgen::uniform(-1, 1), testgen::uniform(-1, 1)};
    v.normalize();
    const double au = std::sqrt(std::max(0.0, v.dot(G * v).real()));
    double res = 0.0;
    for (auto i : inner) res += std::norm((std::pow(std::abs(ann.xi[i][0]), gamma) - lg) * v(static_cast<Eigen::Index>(i)));
    CHECK(1.0 <= C * au + (C + 1.0) / w * std::sqrt(res) + 1e-12);
  }
}

TEST_CASE("plancherel for the shifted multiplier") {
  const std::size_t n = 256;
  const GridSpec g{1, n, 16.0};
  const auto m = build_mask(g, MaskSpec::ball(30.0));
  const double gamma = 1.5, lambda = 40.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto v = random_vector(m.rank());
    std::vector<cplx> d(n, 0.0);
    double freq = 0.0;
    for (std::size_t i = 0; i < m.rank(); ++i) {
      d[m.index[i]] = (std::pow(std::abs(m.xi[i][0]), gamma) - lambda) * v[i];
      freq += std::norm(d[m.index[i]]);
    }
    fft::backward(d, n, 1);
    double phys = 0.0;
    for (const auto& z : d) phys += std::norm(z);
    CHECK(phys / static_cast<double>(n) == doctest::Approx(freq).epsilon(1e-12));
  }
}

TEST_CASE("resolvent constants") {
  const auto one = make_constant(1, 1.0, 16.0, 128);
  CHECK(resolvent_constant(one, 1.5, 20.0, 1.0, 20.0).value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(resolvent_constant(one, 1.5, 20.0, 1.0, 20.0).value <= 1e-12);

  const auto f = testgen::smooth_field(1, 16.0, 128);
  for (double lam : {-1.0, -4.0, -20.0}) {
    const auto rep = resolvent_constant(f, 1.5, lam, 1.0, 20.0);
    CHECK(rep.value >= 0.0);
    CHECK(rep.value <= 1.0 / (lam * lam) * (1 + 1e-9));
  }
  CHECK_THROWS_AS(resolvent_constant(f, 1.5, 1.0, 0.0, 20.0), UsageError);
  CHECK_THROWS_AS(resolvent_constant(f, 1.5, 1.0, 1.0, 1e3), UsageError);

  // on a lattice eigenvalue the kernel vector forces M = inf unless m <a u,u> >= |u|^2
  const auto gap = make_custom(1, {Axis{0.0, 32.0, 256, true}, Axis{}}, [](Point p) { return p.x < 1.0 ? 1.0 : 0.0; }, "gap");
  const double xi = 2 * kPi / 32.0 * 5;
  CHECK(std::isinf(resolvent_constant(gap, 1.0, xi, 2.0, 10.0).value));
}

TEST_CASE("low-frequency extension") {
  const auto one = make_constant(1, 1.0, 16.0, 128);
  const auto r1 = low_freq_extension_check(one, 2.0, {-1.0, 0.0, 2.0, 5.0, 10.0}, 1.0, 20.0, 1.0);
  for (double M : r1.M) CHECK(M <= 1e-12);
  CHECK(r1.bounded);

  const auto ps = mollify(make_periodic_square(1, 0.3, 16.0, 256), 0.05);
  const double m = calibrate_m(ps, 2.0, 10.0);
  CHECK(m > 0.0);
  std::vector<double> lams;
  for (int i = 0; i <= 11; ++i) lams.push_back(-1.0 + i);
  const auto r2 = low_freq_extension_check(ps, 2.0, lams, m, 20.0, 1e6);
  CHECK(r2.bounded);
  for (double M : r2.M) CHECK(std::isfinite(M));

  const auto gap = make_custom(1, {Axis{0.0, 32.0, 256, true}, Axis{}}, [](Point p) { return p.x < 1.0 ? 1.0 : 0.0; }, "gap");
  std::vector<double> lat;
  for (int k = 0; k <= 8; ++k) lat.push_back(std::pow(2 * kPi / 32.0 * k, 2.0));
  CHECK_FALSE(low_freq_extension_check(gap, 2.0, lat, m, 10.0, 1e6).bounded);
}

}
