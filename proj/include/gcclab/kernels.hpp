#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace gcclab::kernels {

enum class Isa { scalar, avx2 };

// Read-only view of a periodic grid; ny == 1 for one-dimensional data.
// Sample (ix, iy) sits at (x0 + ix*hx, y0 + iy*hy) and is stored at values[iy*nx + ix].
struct GridView {
  const double* values;
  std::size_t nx, ny;
  double x0, y0, hx, hy;
};

// Bilinear samples at (x + k*dx, y + k*dy), k = 0..n-1, with periodic wrap.
void sample_line(const GridView& g, double x, double y, double dx, double dy, std::size_t n,
                 double* out);

// z[i] *= w[i]
void scale_complex(std::complex<double>* z, const double* w, std::size_t n);

// z[i] *= p[i]
void multiply_complex(std::complex<double>* z, const std::complex<double>* p, std::size_t n);

// Sum with a fixed association order per ISA.
double sum(const double* x, std::size_t n);

// Sum of |z[i]|^2.
double norm2(const std::complex<double>* z, std::size_t n);

// The ISA currently used by the dispatching entry points above.
Isa active_isa();
std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
// Forces an ISA (tests and benchmarks). Throws UsageError if unavailable.
void set_isa(Isa isa);

namespace scalar {
void sample_line(const GridView& g, double x, double y, double dx, double dy, std::size_t n,
                 double* out);
void scale_complex(std::complex<double>* z, const double* w, std::size_t n);
void multiply_complex(std::complex<double>* z, const std::complex<double>* p, std::size_t n);
double sum(const double* x, std::size_t n);
double norm2(const std::complex<double>* z, std::size_t n);
}  // namespace scalar

namespace avx2 {
void sample_line(const GridView& g, double x, double y, double dx, double dy, std::size_t n,
                 double* out);
void scale_complex(std::complex<double>* z, const double* w, std::size_t n);
void multiply_complex(std::complex<double>* z, const std::complex<double>* p, std::size_t n);
double sum(const double* x, std::size_t n);
double norm2(const std::complex<double>* z, std::size_t n);
}  // namespace avx2

}  // namespace gcclab::kernels
