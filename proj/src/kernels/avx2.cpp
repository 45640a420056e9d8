#include <immintrin.h>

#include <cmath>

#include "gcclab/kernels.hpp"

namespace gcclab::kernels::avx2 {

namespace {

// Same arithmetic as the scalar locate(), four lanes at a time.
inline void locate4(__m256d c, double origin, double h, std::size_t n, __m256d& i0, __m256d& i1,
                    __m256d& t) {
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(c, _mm256_set1_pd(origin)), _mm256_set1_pd(h));
  __m256d fi = _mm256_floor_pd(f);
  t = _mm256_sub_pd(f, fi);
  const __m256d nd = _mm256_set1_pd(static_cast<double>(n));
  fi = _mm256_sub_pd(fi, _mm256_mul_pd(nd, _mm256_floor_pd(_mm256_div_pd(fi, nd))));
  // fi may round up to n for tiny negative offsets; fold it back to 0.
  fi = _mm256_andnot_pd(_mm256_cmp_pd(fi, nd, _CMP_GE_OQ), fi);
  i0 = fi;
  __m256d next = _mm256_add_pd(fi, _mm256_set1_pd(1.0));
  i1 = _mm256_andnot_pd(_mm256_cmp_pd(next, nd, _CMP_EQ_OQ), next);
}

inline __m256d gather(const double* base, __m256d idx) {
  return _mm256_i32gather_pd(base, _mm256_cvtpd_epi32(idx), 8);
}

inline __m256d lerp(__m256d a, __m256d b, __m256d t) {
  const __m256d one = _mm256_set1_pd(1.0);
  return _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(one, t), a), _mm256_mul_pd(t, b));
}

}  // namespace

void sample_line(const GridView& g, double x, double y, double dx, double dy, std::size_t n,
                 double* out) {
  std::size_t k = 0;
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d vx = _mm256_set1_pd(x), vy = _mm256_set1_pd(y);
  const __m256d vdx = _mm256_set1_pd(dx), vdy = _mm256_set1_pd(dy);
  for (; k + 4 <= n; k += 4) {
    const __m256d kd = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(k)), lane);
    const __m256d px = _mm256_add_pd(vx, _mm256_mul_pd(kd, vdx));
    __m256d ix0, ix1, tx;
    locate4(px, g.x0, g.hx, g.nx, ix0, ix1, tx);
    if (g.ny == 1) {
      _mm256_storeu_pd(out + k, lerp(gather(g.values, ix0), gather(g.values, ix1), tx));
      continue;
    }
    const __m256d py = _mm256_add_pd(vy, _mm256_mul_pd(kd, vdy));
    __m256d iy0, iy1, ty;
    locate4(py, g.y0, g.hy, g.ny, iy0, iy1, ty);
    const __m256d nx = _mm256_set1_pd(static_cast<double>(g.nx));
    const __m256d r0 = _mm256_mul_pd(iy0, nx), r1 = _mm256_mul_pd(iy1, nx);
    const __m256d a0 = lerp(gather(g.values, _mm256_add_pd(r0, ix0)),
                            gather(g.values, _mm256_add_pd(r0, ix1)), tx);
    const __m256d a1 = lerp(gather(g.values, _mm256_add_pd(r1, ix0)),
                            gather(g.values, _mm256_add_pd(r1, ix1)), tx);
    _mm256_storeu_pd(out + k, lerp(a0, a1, ty));
  }
  // one point at a time so the positions match the scalar loop bit for bit
  for (; k < n; ++k) {
    const double kd = static_cast<double>(k);
    scalar::sample_line(g, x + kd * dx, y + kd * dy, 0.0, 0.0, 1, out + k);
  }
}

void scale_complex(std::complex<double>* z, const double* w, std::size_t n) {
  double* p = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d wv = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
    _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(p + 2 * i), wv));
  }
  for (; i < n; ++i) z[i] = {z[i].real() * w[i], z[i].imag() * w[i]};
}

void multiply_complex(std::complex<double>* z, const std::complex<double>* p, std::size_t n) {
  double* zd = reinterpret_cast<double*>(z);
  const double* pd = reinterpret_cast<const double*>(p);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(zd + 2 * i);   // (ar, ai, br, bi)
    const __m256d c = _mm256_loadu_pd(pd + 2 * i);   // (cr, ci, dr, di)
    const __m256d cre = _mm256_movedup_pd(c);        // (cr, cr, dr, dr)
    const __m256d cim = _mm256_permute_pd(c, 0xF);   // (ci, ci, di, di)
    const __m256d asw = _mm256_permute_pd(a, 0x5);   // (ai, ar, bi, br)
    // (ar*cr - ai*ci, ai*cr + ar*ci)
    _mm256_storeu_pd(zd + 2 * i, _mm256_addsub_pd(_mm256_mul_pd(a, cre), _mm256_mul_pd(asw, cim)));
  }
  for (; i < n; ++i) {
    const double a = z[i].real(), b = z[i].imag(), c = p[i].real(), d = p[i].imag();
    z[i] = {a * c - b * d, a * d + b * c};
  }
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i];
  return s;
}

double norm2(const std::complex<double>* z, std::size_t n) {
  const double* p = reinterpret_cast<const double*>(z);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(p + 2 * i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

}  // namespace gcclab::kernels::avx2
