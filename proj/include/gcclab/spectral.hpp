#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gcclab/field.hpp"

namespace gcclab::spectral {

using cplx = std::complex<double>;

// Torus of side `period` with n samples per axis. Frequencies are (2pi/period) k,
// k in [-n/2, n/2), so the aliasing radius is pi n / period.
struct GridSpec {
  int dim = 1;
  std::size_t n = 64;
  double period = 1.0;

  double spacing() const;  // frequency lattice step 2pi/period
  double aliasing_radius() const;
  std::size_t size() const { return dim == 1 ? n : n * n; }
};

GridSpec grid_of(const ObservationField& field);

enum class MaskKind { ball, annulus, sector, annulus_sector, rectangle };

struct MaskSpec {
  MaskKind kind = MaskKind::ball;
  double radius = 0.0;                     // ball; infinity selects everything
  double lambda = 1.0, delta = 1.0, beta = 0.0;  // annulus
  double theta = 0.0, eps0 = 0.1;          // sector: |arg xi - theta| <= eps0/2
  std::array<double, 2> zeta{0.0, 0.0};    // rectangle corner
  double sigma = 1.0;                      // rectangle side

  static MaskSpec ball(double radius);
  static MaskSpec annulus(double lambda, double delta, double beta);
  static MaskSpec sector(double theta, double eps0);
  static MaskSpec annulus_sector(double lambda, double delta, double beta, double theta, double eps0);
  static MaskSpec rectangle(std::array<double, 2> zeta, double sigma);
};

std::string describe(const MaskSpec& spec);

struct FrequencyMask {
  GridSpec grid;
  MaskSpec spec;
  std::vector<std::size_t> index;           // flat FFT index of each selected point
  std::vector<std::array<double, 2>> xi;    // its frequency
  std::size_t rank() const { return index.size(); }
};

FrequencyMask build_mask(const GridSpec& grid, const MaskSpec& spec);

enum class Weight { sqrt_a, full };  // compression weight a or a^2
enum class ConstantKind { uncertainty_sqrt, uncertainty_full, resolvent_M };
std::string constant_name(ConstantKind k);

struct SpectralReport {
  GridSpec grid;
  std::string mask;
  std::string field;
  ConstantKind kind = ConstantKind::uncertainty_sqrt;
  double value = 0.0;     // C (uncertainty) or M (resolvent); may be +inf
  double eigen = 0.0;     // smallest (uncertainty) or largest (resolvent) eigenvalue
  double residual = 0.0;
  std::size_t rank = 0;
  std::string solver;     // "dense" | "lanczos"
  double lambda = 0.0;    // resolvent only
  double m = 0.0;         // resolvent only
};

struct SolverOptions {
  std::size_t dense_limit = 2000;
  double tolerance = 1e-8;
  std::size_t max_krylov = 400;
  std::size_t max_restarts = 30;
};

// Fourier coefficients of w on the torus, w_hat[k] = (1/N^d) sum_x w(x) e^{-i k x}.
std::vector<cplx> weight_coefficients(const ObservationField& field, Weight weight);

// Dense Hermitian compression of multiplication by w onto the mask.
std::vector<cplx> compression_matrix(const FrequencyMask& mask, const std::vector<cplx>& w_hat);

// Matrix-free application of the same compression via FFT.
std::vector<cplx> apply_compression(const FrequencyMask& mask, const std::vector<double>& w,
                                    const std::vector<cplx>& v);

SpectralReport uncertainty_constant(const ObservationField& field, const FrequencyMask& mask,
                                    Weight weight, const SolverOptions& opts = {});

struct Containment {
  double eps = 0.0;
  std::size_t checked = 0;   // lattice points inside the inner shell
  bool contained = false;
};

// Largest eps <= 1/4 with eps 2^{|1-gamma|/gamma} / gamma <= delta, and a lattice check that
// lambda^g - eps lambda^{g-beta-1} <= |xi|^g <= lambda^g + eps lambda^{g-beta-1} lies in the annulus.
Containment annulus_containment(double gamma, double beta, double delta, double lambda,
                                const GridSpec& grid);

// Smallest M with |u|^2 <= M |(A - lambda) u|^2 + m <a u, u> on |xi| <= cutoff, A = |xi|^gamma.
SpectralReport resolvent_constant(const ObservationField& field, double gamma, double lambda,
                                  double m, double cutoff);

// m = 2 / c where c is the sqrt-weight constant on the ball of radius (lambda0 + 2)^{1/gamma}.
double calibrate_m(const ObservationField& field, double gamma, double lambda0);

struct LowFreqReport {
  std::vector<double> lambdas;
  std::vector<double> M;
  double max_M = 0.0;
  double ceiling = 0.0;
  bool bounded = false;
};

LowFreqReport low_freq_extension_check(const ObservationField& field, double gamma,
                                       const std::vector<double>& lambdas, double m, double cutoff,
                                       double ceiling);

}  // namespace gcclab::spectral
