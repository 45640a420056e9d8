#include "gcclab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace gcclab::fft {

namespace {

// FFTW_ESTIMATE keeps plan selection independent of timing, so results are reproducible.
fftw_plan plan_for(std::size_t nx, std::size_t ny, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(nx, ny, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  std::vector<cplx> scratch(nx * ny);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan p = ny == 1 ? fftw_plan_dft_1d(static_cast<int>(nx), buf, buf, sign, flags)
                        : fftw_plan_dft_2d(static_cast<int>(ny), static_cast<int>(nx), buf, buf,
                                           sign, flags);
  if (!p) throw std::runtime_error("fftw plan creation failed");
  plans.emplace(key, p);
  return p;
}

void run(std::vector<cplx>& data, std::size_t nx, std::size_t ny, int sign) {
  if (data.size() != nx * ny) throw std::invalid_argument("fft: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(nx, ny, sign), buf, buf);
}

}  // namespace

void forward(std::vector<cplx>& data, std::size_t nx, std::size_t ny) {
  run(data, nx, ny, FFTW_FORWARD);
}

void backward(std::vector<cplx>& data, std::size_t nx, std::size_t ny) {
  run(data, nx, ny, FFTW_BACKWARD);
}

}  // namespace gcclab::fft
