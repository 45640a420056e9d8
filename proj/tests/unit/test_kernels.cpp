#include <doctest.h>

#include <complex>
#include <cstring>
#include <vector>

#include "generators.hpp"
#include "gcclab/kernels.hpp"

using namespace gcclab;

namespace {

kernels::GridView grid(const std::vector<double>& v, std::size_t nx, std::size_t ny) {
  return {v.data(), nx, ny, -0.75, 0.25, 1.0 / static_cast<double>(nx), 2.0 / static_cast<double>(ny)};
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("bilinear sampling is exact at nodes and wraps periodically") {
  const std::size_t nx = 16, ny = 8;
  const auto v = testgen::samples(nx * ny);
  const auto g = grid(v, nx, ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double out = -1.0;
      const double x = g.x0 + g.hx * static_cast<double>(ix), y = g.y0 + g.hy * static_cast<double>(iy);
      kernels::scalar::sample_line(g, x, y, 0.0, 0.0, 1, &out);
      CHECK(out == v[iy * nx + ix]);
      kernels::scalar::sample_line(g, x + 3.0, y - 4.0, 0.0, 0.0, 1, &out);  // whole periods
      CHECK(out == v[iy * nx + ix]);
    }
  }
}

TEST_CASE("bilinear sampling matches a direct formula") {
  const std::size_t nx = 5, ny = 3;
  const auto v = testgen::samples(nx * ny);
  const auto g = grid(v, nx, ny);
  for (int k = 0; k < 200; ++k) {
    const double x = testgen::uniform(-3.0, 3.0), y = testgen::uniform(-3.0, 3.0);
    // oracle: explicit floor/mod arithmetic
    const double fx = (x - g.x0) / g.hx, fy = (y - g.y0) / g.hy;
    const double ix = std::floor(fx), iy = std::floor(fy);
    const double tx = fx - ix, ty = fy - iy;
    auto at = [&](double i, double j) {
      const long a = static_cast<long>(i) % static_cast<long>(nx), b = static_cast<long>(j) % static_cast<long>(ny);
      return v[static_cast<std::size_t>((b + static_cast<long>(ny)) % static_cast<long>(ny)) * nx +
               static_cast<std::size_t>((a + static_cast<long>(nx)) % static_cast<long>(nx))];
    };
    const double want = (1 - ty) * ((1 - tx) * at(ix, iy) + tx * at(ix + 1, iy)) +
                        ty * ((1 - tx) * at(ix, iy + 1) + tx * at(ix + 1, iy + 1));
    double got;
    kernels::scalar::sample_line(g, x, y, 0.0, 0.0, 1, &got);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::avx2)) {
    MESSAGE("avx2 not available; equivalence skipped");
    return;
  }
  for (int trial = 0; trial < 50; ++trial) {
    const auto nx = static_cast<std::size_t>(testgen::integer(2, 70));
    const auto ny = static_cast<std::size_t>(testgen::integer(1, 40));
    const auto v = testgen::samples(nx * ny);
    const auto g = grid(v, nx, ny);
    const auto n = static_cast<std::size_t>(testgen::integer(1, 301));
    const double x = testgen::uniform(-10, 10), y = testgen::uniform(-10, 10);
    const double dx = testgen::uniform(-0.3, 0.3), dy = testgen::uniform(-0.3, 0.3);
    std::vector<double> a(n), b(n);
    kernels::scalar::sample_line(g, x, y, dx, dy, n, a.data());
    kernels::avx2::sample_line(g, x, y, dx, dy, n, b.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(same_bits(a[i], b[i]));

    std::vector<std::complex<double>> z1(n), z2, p(n);
    for (std::size_t i = 0; i < n; ++i) {
      z1[i] = {testgen::uniform(-1, 1), testgen::uniform(-1, 1)};
      p[i] = {testgen::uniform(-1, 1), testgen::uniform(-1, 1)};
    }
    z2 = z1;
    kernels::scalar::multiply_complex(z1.data(), p.data(), n);
    kernels::avx2::multiply_complex(z2.data(), p.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(same_bits(z1[i].real(), z2[i].real()));
      CHECK(same_bits(z1[i].imag(), z2[i].imag()));
    }
    z2 = z1;
    kernels::scalar::scale_complex(z1.data(), a.data(), n);
    kernels::avx2::scale_complex(z2.data(), a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(z1[i] == z2[i]);

    const double s1 = kernels::scalar::sum(a.data(), n), s2 = kernels::avx2::sum(a.data(), n);
    CHECK(s2 == doctest::Approx(s1).epsilon(1e-13));
    CHECK(kernels::avx2::sum(a.data(), n) == s2);  // same order every call
    CHECK(kernels::avx2::norm2(z1.data(), n) == doctest::Approx(kernels::scalar::norm2(z1.data(), n)).epsilon(1e-13));
  }
}

TEST_CASE("dispatch can be pinned to the scalar path") {
  const auto before = kernels::active_isa();
  kernels::set_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  const auto v = testgen::samples(64);
  const auto g = grid(v, 8, 8);
  std::vector<double> a(33), b(33);
  kernels::sample_line(g, 0.1, 0.2, 0.05, 0.07, 33, a.data());
  kernels::scalar::sample_line(g, 0.1, 0.2, 0.05, 0.07, 33, b.data());
  CHECK(a == b);
  kernels::set_isa(before);
  CHECK(kernels::isa_name(kernels::Isa::avx2) == "avx2");
}

}
