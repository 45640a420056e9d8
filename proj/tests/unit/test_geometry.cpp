#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "generators.hpp"
#include "gcclab/error.hpp"
#include "gcclab/geometry.hpp"

using namespace gcclab;
using namespace gcclab::geometry;

namespace {

constexpr double kPi = std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

// Analytic E_beta membership, independent of the grid builder.
bool in_e_beta(double x, double y, double beta) {
  const double e = (beta - 1.0) / (2.0 * beta);
  const double ax = std::abs(x), ay = std::abs(y);
  if (ax > 1.0) return ay > std::pow(ax, e);
  if (ax < 1.0) return std::pow(ay, e) < ax;
  return false;
}

}  // namespace

TEST_SUITE("field") {

TEST_CASE("samples stay in [0,1] and indicator families are exactly 0/1") {
  for (const auto& f : {make_periodic_square(2, 0.3, 1.0, 32), make_e_beta(0.5, 8.0, 128, 1.0),
                        make_half_strip_comb(10.0, 16, 64, 1.0),
                        make_product({{0.0, 0.6}}, {{0.0, 0.6}}, 1.0, 32)}) {
    CHECK(f.is_indicator_family());
    for (double v : f.values()) CHECK((v == 0.0 || v == 1.0));
  }
  auto m = mollify(make_periodic_square(2, 0.3, 1.0, 64), 0.1);
  CHECK(m.modulus() == 0.1);
  for (double v : m.values()) CHECK((v >= 0.0 && v <= 1.0));
  CHECK_THROWS_AS(ObservationField(1, {Axis{0, 1, 4, true}, Axis{}}, {0.0, 0.5, 1.5, 0.0}, {}), UsageError);
}

TEST_CASE("evaluate on built-in families") {
  CHECK(make_constant(2, 1.0, 1.0, 8).evaluate({0.37, 12.9}) == 1.0);
  const auto hs = make_half_strip_comb(10.0, 64, 256, 1.0);
  CHECK(hs.evaluate({0.25, 5.0}) == 1.0);
  CHECK(hs.evaluate({0.25, -5.0}) == 0.0);
  CHECK(hs.evaluate({0.75, -5.0}) == 1.0);
  const auto ps = make_periodic_square(2, 0.25, 1.0, 64);
  CHECK(ps.evaluate({0.125, 0.125}) == ps.evaluate({0.125 + 1.0, 0.125 - 3.0}));
}

TEST_CASE("mollified indicator keeps its mean") {
  const auto f = make_periodic_square(1, 0.3, 1.0, 256);
  const auto m = mollify(f, 0.05);
  double a = 0.0, b = 0.0;
  for (double v : f.values()) a += v;
  for (double v : m.values()) b += v;
  CHECK(b == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("grid files round-trip") {
  const auto f = mollify(make_periodic_square(2, 0.4, 2.0, 32), 0.1);
  const std::string path = "gcclab_unit_grid.bin";
  write_grid_file(path, f);
  const auto g = read_grid_file(path);
  CHECK(g.dim() == 2);
  CHECK(g.axis(0).n == 32);
  CHECK(g.axis(0).extent == 2.0);
  CHECK(g.values() == f.values());
  CHECK(g.family().kind == FamilyKind::custom_grid);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_grid_file("does-not-exist.bin"), UsageError);
}

TEST_CASE("family names round-trip") {
  for (auto k : {FamilyKind::constant, FamilyKind::periodic_square, FamilyKind::product, FamilyKind::e_beta,
                 FamilyKind::half_strip_comb, FamilyKind::custom_grid}) {
    CHECK(family_from_name(family_name(k)) == k);
  }
  CHECK_THROWS_AS(family_from_name("nope"), UsageError);
}

}

TEST_SUITE("geometry") {

TEST_CASE("directions are unit vectors and axis angles are exact") {
  for (int k = 0; k < 100; ++k) {
    const auto d = Direction::from_angle(testgen::uniform(-10, 10));
    CHECK(std::hypot(d.x, d.y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((d.angle >= 0.0 && d.angle < 2 * kPi));
  }
  const auto v = Direction::from_angle(kPi / 2);
  CHECK(v.x == 0.0);
  CHECK(v.y == 1.0);
  CHECK_THROWS_AS(Direction::from_vector(0, 0), UsageError);
}

TEST_CASE("rectangle sides follow the anisotropic dilation") {
  RectangleSpec r;
  r.L = 3.0;
  r.lambda = 9.0;
  r.beta = 0.5;
  CHECK(r.s() == doctest::Approx(3.0 * std::pow(9.0, -0.25)));
  CHECK(r.t() == doctest::Approx(9.0));
  r.beta = 0.0;
  CHECK(r.s() == doctest::Approx(1.0));
  CHECK(r.t() == doctest::Approx(3.0));
}

TEST_CASE("line averages") {
  const auto one = make_constant(2, 1.0, 1.0, 16);
  CHECK(line_average(one, {{0.3, 0.1}, Direction::from_angle(1.1), 7.0}, 100) == doctest::Approx(1.0));
  CHECK_THROWS_AS(line_average(one, {{0, 0}, Direction{}, 0.0}, 10), UsageError);

  const auto eb = make_e_beta(0.5, 16.0, 1024, 1.0);
  CHECK(line_average(eb, {{2.0, 0.0}, Direction::from_angle(0.0), 10.0}, 4000) == 0.0);
  CHECK(line_average(eb, {{0.0, 2.0}, Direction::from_angle(kPi / 2), 10.0}, 4000) == 0.0);

  // periodic square along (2,5)/sqrt(29), oracle by dense quadrature of the analytic set
  const double d = 0.3, T = std::sqrt(29.0), L = T + 2.0;
  const Point start{0.05, 0.05};
  const auto dir = Direction::from_vector(2, 5);
  const std::size_t n = 1000000;
  double hits = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * L / static_cast<double>(n);
    hits += (frac(start.x + t * dir.x) <= d && frac(start.y + t * dir.y) <= d) ? 1.0 : 0.0;
  }
  const double oracle = hits / static_cast<double>(n);
  CHECK(oracle * L >= d * d * T / 2.0);
  const auto ps = make_periodic_square(2, d, 1.0, 1024);
  CHECK(line_average(ps, {start, dir, L}, 20000) == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("gcc constant") {
  CHECK(gcc_constant(make_constant(2, 1.0, 1.0, 16), 5.0).value == doctest::Approx(1.0));

  const auto prod = make_product({{0.0, 0.6}}, {{0.0, 0.6}}, 1.0, 64);
  GccSearch s;
  s.arcs = off_axis_arcs(0.25);
  s.anchors = 8;
  s.directions = 48;
  CHECK(gcc_constant(prod, 40.0, s).value >= 0.1);

  const auto hs = make_half_strip_comb(20.0, 32, 1280, 1.0);
  GccSearch v;
  v.arcs = {{kPi / 2, kPi / 2}};
  v.anchors = 16;
  CHECK(gcc_constant(hs, 5.0, v).value == 0.0);
}

TEST_CASE("rectangle densities") {
  CHECK(rectangle_density_inf(make_constant(2, 1.0, 1.0, 16), 0.5, 2.0).value == doctest::Approx(1.0));

  // axis-aligned unit squares carry exactly delta^2 of the periodic square
  const auto ps = make_periodic_square(2, 0.3, 1.0, 256);
  RectSearch one_dir;
  one_dir.directions = 1;
  one_dir.spacing = 1.0 / 512.0;
  const auto r = rectangle_density_inf(ps, 1.0, 1.0, one_dir);
  CHECK(r.value == doctest::Approx(0.09).epsilon(0.05));

  // long thin E_beta rectangle: oracle by direct quadrature of the analytic set
  const auto eb = make_e_beta(0.5, 16.0, 1024, 1.0);
  RectangleSpec rect;
  rect.theta = Direction::from_angle(kPi / 2);
  rect.L = 3.0;
  rect.lambda = 3.0;
  rect.beta = 0.5;
  rect.anchor = {1.5, -rect.t() / 2.0};
  const std::size_t m = 1000;
  double hits = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double u = rect.s() * (static_cast<double>(i) + 0.5) / m, w = rect.t() * (static_cast<double>(j) + 0.5) / m;
      const Point p{rect.anchor.x + u * rect.theta.normal().x + w * rect.theta.x,
                    rect.anchor.y + u * rect.theta.normal().y + w * rect.theta.y};
      hits += in_e_beta(p.x, p.y, 0.5) ? 1.0 : 0.0;
    }
  }
  const double oracle = hits / static_cast<double>(m * m);
  CHECK(oracle > 0.0);
  CHECK(rectangle_density(eb, rect) == doctest::Approx(oracle).epsilon(0.03));

  RectSearch sweep;
  sweep.lambdas = {1.25, std::sqrt(3.0), 3.0, 9.0};
  sweep.directions = 8;
  sweep.anchors = 5;
  CHECK(rectangle_density_inf(eb, 0.5, 3.0, sweep).value > 0.01);
}

TEST_CASE("comb profiles and relative density") {
  const auto one = make_constant(2, 1.0, 1.0, 16);
  CombOptions box;
  box.search_extent = 1.0;
  box.x_extent = 1.0;
  const auto p1 = comb_profile(one, Direction::from_angle(0.7), 2.0, box);
  for (double v : p1.values) CHECK(v == doctest::Approx(1.0));

  const auto prod = make_product({{0.0, 0.6}}, {{0.0, 0.6}}, 1.0, 64);
  CombOptions vert;
  vert.rational = std::array<long, 2>{0, 1};
  const auto pv = comb_profile(prod, Direction::from_angle(kPi / 2), 1.0, vert);
  for (std::size_t i = 0; i < pv.values.size(); ++i) {
    const Point p{pv.base.x + (pv.x0 + pv.dx * static_cast<double>(i)) * Direction::from_angle(kPi / 2).normal().x, 0.0};
    const double f1 = frac(p.x) <= 0.6 ? 1.0 : 0.0;
    CHECK(pv.values[i] >= f1 * 0.6 - 0.02);
  }
  const auto cc = comb_gcc_check(prod, Direction::from_angle(kPi / 2), 1.0, 1.0, vert);
  CHECK(cc.pass);
  CHECK(cc.eta == doctest::Approx(0.36).epsilon(0.05));

  const auto hs = make_half_strip_comb(20.0, 32, 1280, 1.0);
  CombOptions win;
  win.search_extent = 4.0;
  const auto ph = comb_profile(hs, Direction::from_angle(kPi / 2), 4.0, win);
  for (double v : ph.values) CHECK(std::abs(v) <= 1e-12);
  const auto hc = comb_gcc_check(hs, Direction::from_angle(kPi / 2), 4.0, 1.0, win);
  CHECK_FALSE(hc.pass);
  CHECK(hc.eta == 0.0);

  CombProfile stripes;
  stripes.dx = 0.01;
  stripes.periodic = true;
  stripes.values.assign(100, 0.0);
  for (int i = 0; i < 60; ++i) stripes.values[static_cast<std::size_t>(i)] = 1.0;
  CHECK(relative_density_1d(stripes, 1.0) == doctest::Approx(0.6));
  stripes.values.assign(100, 0.25);
  CHECK(relative_density_1d(stripes, 0.37) == doctest::Approx(0.25));
  stripes.values.assign(100, 0.0);
  CHECK(relative_density_1d(stripes, 1.0) == 0.0);
}

TEST_CASE("window minimum agrees with brute force") {
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(testgen::integer(3, 40));
    const auto g = testgen::samples(n);
    const bool periodic = trial % 2 == 0;
    const auto w = static_cast<std::size_t>(testgen::integer(1, periodic ? 3 * static_cast<long>(n) : static_cast<long>(n)));
    double best = INFINITY;
    for (std::size_t j = 0; periodic ? j < n : j + w <= n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < w; ++k) s += g[(j + k) % n];
      best = std::min(best, s / static_cast<double>(w));
    }
    CHECK(min_window_average(g, static_cast<double>(w), periodic) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("property: functionals are monotone in the field") {
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = testgen::smooth_field(2, 1.0, 32);
    std::vector<double> bv = a.values();
    for (double& v : bv) v = std::min(1.0, v + testgen::uniform(0.0, 0.2));
    const ObservationField b(2, {a.axis(0), a.axis(1)}, bv, a.family());
    const LineSegment seg{{testgen::uniform(0, 1), testgen::uniform(0, 1)}, Direction::from_angle(testgen::uniform(0, 6)), 3.0};
    CHECK(line_average(a, seg, 200) <= line_average(b, seg, 200) + 1e-15);
    RectangleSpec r;
    r.theta = seg.dir;
    r.anchor = seg.start;
    r.L = 2.0;
    r.lambda = 2.0;
    r.beta = 0.5;
    CHECK(rectangle_density(a, r) <= rectangle_density(b, r) + 1e-15);
    CombOptions o;
    o.search_extent = 1.0;
    o.x_extent = 1.0;
    const auto pa = comb_profile(a, seg.dir, 1.5, o), pb = comb_profile(b, seg.dir, 1.5, o);
    for (std::size_t i = 0; i < pa.values.size(); ++i) CHECK(pa.values[i] <= pb.values[i] + 1e-15);
  }
}

TEST_CASE("property: level-set switch on sampled windows") {
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testgen::smooth_field(2, 1.0, 16);
    const double eps = testgen::uniform(0.05, 0.5);
    const auto e = level_set(a, eps);
    const auto lo = static_cast<std::size_t>(testgen::integer(0, 100)), len = static_cast<std::size_t>(testgen::integer(1, 150));
    double sa = 0.0, se = 0.0;
    for (std::size_t k = lo; k < lo + len; ++k) {
      sa += a.values()[k % a.size()];
      se += e.values()[k % a.size()];
    }
    CHECK(se / static_cast<double>(len) >= sa / static_cast<double>(len) - eps - 1e-15);
  }
}

TEST_CASE("property: comb profile is below every sampled window") {
  const auto a = testgen::smooth_field(2, 1.0, 128);
  const auto theta = Direction::from_angle(0.4);
  CombOptions o;
  o.search_extent = 1.0;
  o.x_extent = 0.5;
  o.x_samples = 5;
  const double M = 1.0;
  const auto p = comb_profile(a, theta, M, o);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double x = p.x0 + p.dx * static_cast<double>(i);
    for (int k = 0; k < 20; ++k) {
      const double t = -1.0 + 0.05 * k;  // windows [t, t+M] inside the searched range
      const Point start{p.base.x + x * theta.normal().x + t * theta.x, p.base.y + x * theta.normal().y + t * theta.y};
      CHECK(p.values[i] <= line_average(a, {start, theta, M}, 400) + 1e-2);
    }
  }
}

TEST_CASE("property: comb profile is rotation covariant") {
  const double th = 0.6;
  const auto theta = Direction::from_angle(th);
  const Point nrm = theta.normal();
  auto fa = [](Point p) { return 0.5 + 0.3 * std::sin(1.3 * p.x) * std::cos(0.9 * p.y); };
  const Axis box{-12.0, 24.0, 480, false};
  const auto a = make_custom(2, {box, box}, fa, "smooth", 1.0);
  const auto b = make_custom(2, {box, box}, [&](Point q) { return fa({q.x * nrm.x + q.y * theta.x, q.x * nrm.y + q.y * theta.y}); },
                             "rotated", 1.0);
  CombOptions o;
  o.center = Point{0.0, 0.0};
  o.search_extent = 3.0;
  o.x_extent = 6.0;
  o.x_samples = 25;
  const auto pa = comb_profile(a, theta, 2.0, o);
  const auto pb = comb_profile(b, Direction::from_angle(kPi / 2), 2.0, o);
  for (std::size_t i = 0; i < pa.values.size(); ++i) CHECK(pa.values[i] == doctest::Approx(pb.values[i]).epsilon(1e-2));
}

TEST_CASE("property: comb profile inherits the field modulus") {
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testgen::smooth_field(2, 1.0, 64);
    CombOptions o;
    o.search_extent = 1.0;
    o.x_extent = 1.0;
    const auto p = comb_profile(a, Direction::from_angle(testgen::uniform(0, 6)), 1.0, o);
    CHECK(lipschitz_bound(p) <= lipschitz_bound(a) * (1.0 + 1e-9));
  }
}

TEST_CASE("property: gcc constant bounds rectangle densities from below") {
  for (int trial = 0; trial < 3; ++trial) {
    const auto a = mollify(make_periodic_square(2, testgen::uniform(0.3, 0.6), 1.0, 64), 0.1);
    GccSearch gs;
    gs.anchors = 8;
    gs.directions = 32;
    const double L = 2.0;
    const double g = gcc_constant(a, L, gs).value;
    for (double beta : {0.0, 0.5, 1.0}) {
      RectSearch rs;
      rs.lambdas = {1.0, 4.0};
      rs.anchors = 4;
      rs.directions = 8;
      CHECK(rectangle_density_inf(a, beta, L, rs).value >= g - 0.02);
    }
  }
}

}
