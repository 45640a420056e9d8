#include <cstdlib>
#include <cstring>

#include "gcclab/error.hpp"
#include "gcclab/kernels.hpp"

namespace gcclab::kernels {

namespace {

Isa detect() {
  if (const char* env = std::getenv("GCCLAB_ISA"); env && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa& current() {
  static Isa isa = detect();
  return isa;
}

}  // namespace

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(GCCLAB_BUILD_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current(); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw UsageError("ISA " + std::string(isa_name(isa)) + " is not available on this machine");
  }
  current() = isa;
}

#if defined(GCCLAB_BUILD_AVX2)
#define GCCLAB_DISPATCH(call) \
  return current() == Isa::avx2 ? avx2::call : scalar::call
#else
#define GCCLAB_DISPATCH(call) return scalar::call
#endif

void sample_line(const GridView& g, double x, double y, double dx, double dy, std::size_t n,
                 double* out) {
  GCCLAB_DISPATCH(sample_line(g, x, y, dx, dy, n, out));
}

void scale_complex(std::complex<double>* z, const double* w, std::size_t n) {
  GCCLAB_DISPATCH(scale_complex(z, w, n));
}

void multiply_complex(std::complex<double>* z, const std::complex<double>* p, std::size_t n) {
  GCCLAB_DISPATCH(multiply_complex(z, p, n));
}

double sum(const double* x, std::size_t n) { GCCLAB_DISPATCH(sum(x, n)); }

double norm2(const std::complex<double>* z, std::size_t n) { GCCLAB_DISPATCH(norm2(z, n)); }

#undef GCCLAB_DISPATCH

}  // namespace gcclab::kernels
