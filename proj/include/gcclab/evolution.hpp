#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gcclab/field.hpp"
#include "gcclab/spectral.hpp"

namespace gcclab::evolution {

using cplx = std::complex<double>;

// exp(-i |xi|^{beta+1} t) on the full FFT array of `grid`.
struct PropagatorSpec {
  spectral::GridSpec grid;
  double beta = 1.0;

  double exponent() const { return beta + 1.0; }
};

void check_beta(double beta);

// In place: u_hat <- exp(-i |xi|^{beta+1} t) u_hat.
void propagate(const PropagatorSpec& spec, std::vector<cplx>& u_hat, double t);

enum class Quadrature { gauss_legendre, trapezoid };
std::string quadrature_name(Quadrature q);

struct TimeNodes {
  std::vector<double> t;
  std::vector<double> w;
};

// Nodes on [0, T]. Gauss-Legendre uses 32-node panels (n rounded up to a multiple of 32).
TimeNodes time_nodes(Quadrature rule, double T, std::size_t n);

// Smallest node count allowed for the fastest phase at cutoff K.
std::size_t nyquist_nodes(double beta, double K, double T);

struct GramianReport {
  double T = 0.0;
  double beta = 0.0;
  double K = 0.0;
  std::size_t rank = 0;
  std::size_t nodes = 0;
  Quadrature rule = Quadrature::gauss_legendre;
  double lambda_min = 0.0;
  double kappa = 0.0;       // 1 / lambda_min (lower bound of the continuum cost); +inf when 0
  double residual = 0.0;
};

struct GramianOptions {
  Quadrature rule = Quadrature::gauss_legendre;
  std::size_t n_nodes = 0;  // 0: twice the Nyquist count, at least 64
};

GramianReport observability_gramian(const ObservationField& field, double beta, double T, double K,
                                    const GramianOptions& opts = {});

// G_T assembled column by column with FFT propagation (slow; cross-check of the Hadamard form).
std::vector<cplx> gramian_by_propagation(const ObservationField& field, double beta, double T,
                                         double K, const GramianOptions& opts = {});
std::vector<cplx> gramian_matrix(const ObservationField& field, double beta, double T, double K,
                                 const GramianOptions& opts = {});

struct CostCurve {
  std::vector<GramianReport> points;
  bool monotone = false;  // kappa non-increasing in T
};

CostCurve cost_curve(const ObservationField& field, double beta, const std::vector<double>& T_list,
                     double K, const GramianOptions& opts = {});

// m T / (T^2 - M (pi^2 + eps)) above the threshold, none at or below it. The unknown
// constant factor is taken as 1 (a shape prediction).
std::optional<double> miller_cost(double M, double m, double T, double eps);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double rms = 0.0;
};

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

struct ShapeFit {
  double eps = 0.0;
  double exponent = 0.0;  // 2 - 4/eps
  LinearFit fit;          // log kappa against T^exponent
  bool pass = false;
};

// Regression of log kappa against T^{2 - 4/eps}; passes when the slope is >= 0 and R^2 >= r2_min.
ShapeFit arb_time_shape_check(const std::vector<GramianReport>& points, double eps,
                              double r2_min = 0.9);
ShapeFit arb_time_shape_check(const ObservationField& field, double beta, double eps,
                              const std::vector<double>& T_list, double K, double r2_min = 0.9);

}  // namespace gcclab::evolution
