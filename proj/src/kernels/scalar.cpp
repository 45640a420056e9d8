#include <cmath>

#include "gcclab/kernels.hpp"

namespace gcclab::kernels::scalar {

namespace {

// Cell index in [0, n) and fractional offset of coordinate c on a periodic axis.
inline void locate(double c, double origin, double h, std::size_t n, std::size_t& i0,
                   std::size_t& i1, double& t) {
  const double f = (c - origin) / h;
  double fi = std::floor(f);
  t = f - fi;
  const double nd = static_cast<double>(n);
  fi = fi - nd * std::floor(fi / nd);
  i0 = static_cast<std::size_t>(fi);
  if (i0 >= n) i0 = 0;
  i1 = (i0 + 1 == n) ? 0 : i0 + 1;
}

}  // namespace

void sample_line(const GridView& g, double x, double y, double dx, double dy, std::size_t n,
                 double* out) {
  for (std::size_t k = 0; k < n; ++k) {
    const double kd = static_cast<double>(k);
    const double px = x + kd * dx;
    std::size_t ix0, ix1;
    double tx;
    locate(px, g.x0, g.hx, g.nx, ix0, ix1, tx);
    if (g.ny == 1) {
      out[k] = (1.0 - tx) * g.values[ix0] + tx * g.values[ix1];
      continue;
    }
    const double py = y + kd * dy;
    std::size_t iy0, iy1;
    double ty;
    locate(py, g.y0, g.hy, g.ny, iy0, iy1, ty);
    const double* r0 = g.values + iy0 * g.nx;
    const double* r1 = g.values + iy1 * g.nx;
    const double a0 = (1.0 - tx) * r0[ix0] + tx * r0[ix1];
    const double a1 = (1.0 - tx) * r1[ix0] + tx * r1[ix1];
    out[k] = (1.0 - ty) * a0 + ty * a1;
  }
}

void scale_complex(std::complex<double>* z, const double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = {z[i].real() * w[i], z[i].imag() * w[i]};
}

void multiply_complex(std::complex<double>* z, const std::complex<double>* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z[i].real(), b = z[i].imag(), c = p[i].real(), d = p[i].imag();
    z[i] = {a * c - b * d, a * d + b * c};
  }
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double norm2(const std::complex<double>* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

}  // namespace gcclab::kernels::scalar
