#include "gcclab/evolution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gcclab/error.hpp"
#include "gcclab/fft.hpp"
#include "gcclab/kernels.hpp"

namespace gcclab::evolution {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kPanel = 32;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
void legendre_rule(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = nn * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::vector<double> mode_frequencies(const spectral::FrequencyMask& mask, double beta) {
  std::vector<double> om(mask.rank());
  for (std::size_t j = 0; j < om.size(); ++j) {
    om[j] = std::pow(std::hypot(mask.xi[j][0], mask.xi[j][1]), beta + 1.0);
  }
  return om;
}

spectral::FrequencyMask cutoff_mask(const ObservationField& field, double K) {
  const auto g = spectral::grid_of(field);
  if (!(K >= 0.0) || K >= g.aliasing_radius()) {
    throw UsageError("frequency cutoff " + fmt(K) + " must lie in [0, " + fmt(g.aliasing_radius()) + ")");
  }
  return spectral::build_mask(g, spectral::MaskSpec::ball(K));
}

TimeNodes checked_nodes(double beta, double T, double K, const GramianOptions& opts) {
  if (!(T > 0.0)) throw UsageError("horizon T must be positive");
  const std::size_t need = nyquist_nodes(beta, K, T);
  const std::size_t n = opts.n_nodes == 0 ? std::max<std::size_t>(64, 2 * need) : opts.n_nodes;
  if (n < need) {
    throw UsageError("time quadrature under-resolves the fastest phase: " + std::to_string(n) +
                     " nodes given, at least " + std::to_string(need) + " required");
  }
  return time_nodes(opts.rule, T, n);
}

}  // namespace

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw UsageError("beta = " + fmt(beta) + " is outside the valid range [0,1]");
  }
}

void propagate(const PropagatorSpec& spec, std::vector<cplx>& u_hat, double t) {
  const auto& g = spec.grid;
  if (u_hat.size() != g.size()) throw UsageError("spectral array size does not match the grid");
  const std::size_t ny = g.dim == 1 ? 1 : g.n;
  const double step = g.spacing();
  std::vector<cplx> phase(u_hat.size());
  for (std::size_t iy = 0; iy < ny; ++iy) {
    const long ky = g.dim == 1 ? 0 : (static_cast<long>(iy) < static_cast<long>(g.n) / 2 ? static_cast<long>(iy) : static_cast<long>(iy) - static_cast<long>(g.n));
    for (std::size_t ix = 0; ix < g.n; ++ix) {
      const long kx = static_cast<long>(ix) < static_cast<long>(g.n) / 2 ? static_cast<long>(ix) : static_cast<long>(ix) - static_cast<long>(g.n);
      const double r = step * std::hypot(static_cast<double>(kx), static_cast<double>(ky));
      phase[iy * g.n + ix] = std::polar(1.0, -std::pow(r, spec.exponent()) * t);
    }
  }
  kernels::multiply_complex(u_hat.data(), phase.data(), u_hat.size());
}

std::string quadrature_name(Quadrature q) {
  return q == Quadrature::gauss_legendre ? "gauss-legendre" : "trapezoid";
}

TimeNodes time_nodes(Quadrature rule, double T, std::size_t n) {
  if (n < 2) throw UsageError("need at least two quadrature nodes");
  TimeNodes out;
  if (rule == Quadrature::trapezoid) {
    const double h = T / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      out.t.push_back(h * static_cast<double>(i));
      out.w.push_back(i == 0 || i + 1 == n ? 0.5 * h : h);
    }
    return out;
  }
  const std::size_t panels = (n + kPanel - 1) / kPanel;
  std::vector<double> x, w;
  legendre_rule(kPanel, x, w);
  const double len = T / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = len * static_cast<double>(p);
    for (std::size_t i = 0; i < kPanel; ++i) {
      out.t.push_back(a + 0.5 * len * (x[i] + 1.0));
      out.w.push_back(0.5 * len * w[i]);
    }
  }
  return out;
}

std::size_t nyquist_nodes(double beta, double K, double T) {
  return static_cast<std::size_t>(std::ceil(4.0 * std::pow(K, beta + 1.0) * T / (2.0 * kPi)));
}

std::vector<cplx> gramian_matrix(const ObservationField& field, double beta, double T, double K,
                                 const GramianOptions& opts) {
  check_beta(beta);
  const auto mask = cutoff_mask(field, K);
  const auto nodes = checked_nodes(beta, T, K, opts);
  const auto r = static_cast<Eigen::Index>(mask.rank());
  const auto nt = static_cast<Eigen::Index>(nodes.t.size());
  const auto om = mode_frequencies(mask, beta);

  Eigen::MatrixXcd P(r, nt);
  for (Eigen::Index j = 0; j < r; ++j)
    for (Eigen::Index i = 0; i < nt; ++i) P(j, i) = std::polar(1.0, om[static_cast<std::size_t>(j)] * nodes.t[static_cast<std::size_t>(i)]);
  Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(nodes.w.data(), nt);
  const Eigen::MatrixXcd Q = P * wv.asDiagonal() * P.adjoint();

  const auto A = spectral::compression_matrix(mask, spectral::weight_coefficients(field, spectral::Weight::sqrt_a));
  std::vector<cplx> G(static_cast<std::size_t>(r * r));
  for (Eigen::Index k = 0; k < r; ++k)
    for (Eigen::Index j = 0; j < r; ++j) {
      const auto idx = static_cast<std::size_t>(k * r + j);
      G[idx] = A[idx] * Q(j, k);
    }
  return G;
}

std::vector<cplx> gramian_by_propagation(const ObservationField& field, double beta, double T,
                                         double K, const GramianOptions& opts) {
  check_beta(beta);
  const auto mask = cutoff_mask(field, K);
  const auto nodes = checked_nodes(beta, T, K, opts);
  const auto& g = mask.grid;
  const std::size_t ny = g.dim == 1 ? 1 : g.n;
  const std::size_t r = mask.rank();
  const PropagatorSpec spec{g, beta};
  const double inv = 1.0 / static_cast<double>(g.size());
  std::vector<cplx> G(r * r, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < nodes.t.size(); ++i) {
      std::vector<cplx> u(g.size(), cplx(0.0, 0.0));
      u[mask.index[k]] = 1.0;
      propagate(spec, u, nodes.t[i]);
      fft::backward(u, g.n, ny);
      kernels::scale_complex(u.data(), field.values().data(), u.size());
      fft::forward(u, g.n, ny);
      propagate(spec, u, -nodes.t[i]);
      for (std::size_t j = 0; j < r; ++j) G[k * r + j] += nodes.w[i] * inv * u[mask.index[j]];
    }
  }
  return G;
}

GramianReport observability_gramian(const ObservationField& field, double beta, double T, double K,
                                    const GramianOptions& opts) {
  const auto G = gramian_matrix(field, beta, T, K, opts);
  const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(G.size()))));
  Eigen::MatrixXcd M = Eigen::Map<const Eigen::MatrixXcd>(G.data(), r, r);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success) throw NumericalError("Gramian eigensolve did not converge");
  GramianReport rep;
  rep.T = T;
  rep.beta = beta;
  rep.K = K;
  rep.rank = static_cast<std::size_t>(r);
  rep.rule = opts.rule;
  rep.nodes = checked_nodes(beta, T, K, opts).t.size();
  const double lmin = es.eigenvalues()(0);
  const Eigen::VectorXcd v = es.eigenvectors().col(0);
  rep.residual = (M * v - lmin * v).norm();
  if (rep.residual > 1e-8 * std::max(1.0, T)) {
    throw NumericalError("Gramian eigensolve residual " + fmt(rep.residual));
  }
  if (lmin < -1e-10 * T) throw NumericalError("Gramian has a negative eigenvalue " + fmt(lmin));
  rep.lambda_min = std::max(0.0, lmin);
  rep.kappa = rep.lambda_min > 1e-14 * T ? 1.0 / rep.lambda_min : INFINITY;
  return rep;
}

CostCurve cost_curve(const ObservationField& field, double beta, const std::vector<double>& T_list,
                     double K, const GramianOptions& opts) {
  CostCurve out;
  for (double T : T_list) out.points.push_back(observability_gramian(field, beta, T, K, opts));
  std::vector<std::size_t> order(out.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.points[a].T < out.points[b].T; });
  out.monotone = true;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double prev = out.points[order[i - 1]].kappa, cur = out.points[order[i]].kappa;
    if (std::isinf(prev)) continue;
    if (cur > prev * (1.0 + 1e-9)) out.monotone = false;
  }
  return out;
}

std::optional<double> miller_cost(double M, double m, double T, double eps) {
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  if (!(T > 0.0)) throw UsageError("T must be positive");
  const double denom = T * T - M * (kPi * kPi + eps);
  if (!(denom > 0.0)) return std::nullopt;
  return m * T / denom;
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("regression needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw UsageError("regression abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  f.r2 = syy > 0.0 ? 1.0 - ss / syy : 1.0;
  return f;
}

ShapeFit arb_time_shape_check(const std::vector<GramianReport>& points, double eps, double r2_min) {
  if (!(eps > 0.0 && eps <= 1.0)) throw UsageError("decay exponent eps must lie in (0,1]");
  ShapeFit s;
  s.eps = eps;
  s.exponent = 2.0 - 4.0 / eps;
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!std::isfinite(p.kappa)) throw CheckFailure("cost is infinite at T = " + fmt(p.T));
    x.push_back(std::pow(p.T, s.exponent));
    y.push_back(std::log(p.kappa));
  }
  s.fit = fit_linear(x, y);
  s.pass = s.fit.slope >= 0.0 && s.fit.r2 >= r2_min;
  return s;
}

ShapeFit arb_time_shape_check(const ObservationField& field, double beta, double eps,
                              const std::vector<double>& T_list, double K, double r2_min) {
  return arb_time_shape_check(cost_curve(field, beta, T_list, K).points, eps, r2_min);
}

}  // namespace gcclab::evolution
