#include "gcclab/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gcclab/error.hpp"
#include "gcclab/fft.hpp"
#include "gcclab/kernels.hpp"

namespace gcclab::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

long signed_index(std::size_t k, std::size_t n) {
  const auto kk = static_cast<long>(k);
  const auto nn = static_cast<long>(n);
  return kk < nn / 2 ? kk : kk - nn;
}

std::size_t wrap(long k, std::size_t n) {
  const auto nn = static_cast<long>(n);
  return static_cast<std::size_t>(((k % nn) + nn) % nn);
}

struct Hermitian {
  double value;
  Eigen::VectorXcd vector;
  double residual;
};

Eigen::MatrixXcd to_eigen(const std::vector<cplx>& m, std::size_t r) {
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
  for (std::size_t j = 0; j < r; ++j) {
    for (std::size_t i = 0; i < r; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[j * r + i];
  }
  return A;
}

// Extreme eigenpair of a dense Hermitian matrix: smallest when `lowest`, else largest.
Hermitian dense_extreme(const Eigen::MatrixXcd& A, bool lowest) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
  if (es.info() != Eigen::Success) throw NumericalError("dense Hermitian eigensolver did not converge");
  const Eigen::Index i = lowest ? 0 : A.rows() - 1;
  Hermitian h{es.eigenvalues()(i), es.eigenvectors().col(i), 0.0};
  h.residual = (A * h.vector - h.value * h.vector).norm();
  return h;
}

}  // namespace

double GridSpec::spacing() const { return 2.0 * kPi / period; }
double GridSpec::aliasing_radius() const { return kPi * static_cast<double>(n) / period; }

GridSpec grid_of(const ObservationField& field) {
  GridSpec g;
  g.dim = field.dim();
  g.n = field.axis(0).n;
  g.period = field.axis(0).extent;
  if (g.dim == 2 && (field.axis(1).n != g.n || std::abs(field.axis(1).extent - g.period) > 1e-12 * g.period)) {
    throw UsageError("spectral computations need a square grid with equal periods");
  }
  return g;
}

MaskSpec MaskSpec::ball(double radius) {
  MaskSpec s;
  s.kind = MaskKind::ball;
  s.radius = radius;
  return s;
}

MaskSpec MaskSpec::annulus(double lambda, double delta, double beta) {
  MaskSpec s;
  s.kind = MaskKind::annulus;
  s.lambda = lambda;
  s.delta = delta;
  s.beta = beta;
  return s;
}

MaskSpec MaskSpec::sector(double theta, double eps0) {
  MaskSpec s;
  s.kind = MaskKind::sector;
  s.theta = theta;
  s.eps0 = eps0;
  return s;
}

MaskSpec MaskSpec::annulus_sector(double lambda, double delta, double beta, double theta, double eps0) {
  MaskSpec s = annulus(lambda, delta, beta);
  s.kind = MaskKind::annulus_sector;
  s.theta = theta;
  s.eps0 = eps0;
  return s;
}

MaskSpec MaskSpec::rectangle(std::array<double, 2> zeta, double sigma) {
  MaskSpec s;
  s.kind = MaskKind::rectangle;
  s.zeta = zeta;
  s.sigma = sigma;
  return s;
}

std::string describe(const MaskSpec& s) {
  switch (s.kind) {
    case MaskKind::ball:
      return "ball(radius=" + fmt(s.radius) + ")";
    case MaskKind::annulus:
      return "annulus(lambda=" + fmt(s.lambda) + ",delta=" + fmt(s.delta) + ",beta=" + fmt(s.beta) + ")";
    case MaskKind::sector:
      return "sector(theta=" + fmt(s.theta) + ",eps0=" + fmt(s.eps0) + ")";
    case MaskKind::annulus_sector:
      return "annulus_sector(lambda=" + fmt(s.lambda) + ",delta=" + fmt(s.delta) + ",beta=" + fmt(s.beta) +
             ",theta=" + fmt(s.theta) + ",eps0=" + fmt(s.eps0) + ")";
    case MaskKind::rectangle:
      return "rectangle(zeta=[" + fmt(s.zeta[0]) + "," + fmt(s.zeta[1]) + "],sigma=" + fmt(s.sigma) + ")";
  }
  return "?";
}

std::string constant_name(ConstantKind k) {
  switch (k) {
    case ConstantKind::uncertainty_sqrt: return "uncertainty-sqrt";
    case ConstantKind::uncertainty_full: return "uncertainty-full";
    case ConstantKind::resolvent_M: return "resolvent-M";
  }
  return "?";
}

FrequencyMask build_mask(const GridSpec& grid, const MaskSpec& spec) {
  if (grid.dim != 1 && grid.dim != 2) throw UsageError("grid dimension must be 1 or 2");
  if (grid.n < 2 || !(grid.period > 0.0)) throw UsageError("grid needs n >= 2 and a positive period");
  const double R = grid.aliasing_radius();
  const double step = grid.spacing();
  const bool annular = spec.kind == MaskKind::annulus || spec.kind == MaskKind::annulus_sector;
  const bool sectored = spec.kind == MaskKind::sector || spec.kind == MaskKind::annulus_sector;
  double lo2 = 0.0, hi2 = 0.0;
  if (annular) {
    if (!(spec.lambda > 0.0) || !(spec.delta > 0.0)) throw UsageError("annulus needs lambda > 0 and delta > 0");
    const double w = spec.delta * std::pow(spec.lambda, -spec.beta);
    if (spec.lambda + w >= R) {
      throw UsageError("annulus radius " + fmt(spec.lambda + w) + " touches the aliasing radius " + fmt(R));
    }
    const double lo = std::max(0.0, spec.lambda - w);
    lo2 = lo * lo;
    hi2 = (spec.lambda + w) * (spec.lambda + w);
  }
  if (spec.kind == MaskKind::rectangle) {
    if (!(spec.sigma > 0.0)) throw UsageError("rectangle side must be positive");
    for (int a = 0; a < grid.dim; ++a) {
      if (spec.zeta[static_cast<std::size_t>(a)] < -R || spec.zeta[static_cast<std::size_t>(a)] + spec.sigma >= R) {
        throw UsageError("rectangle mask leaves the aliasing window [-" + fmt(R) + ", " + fmt(R) + ")");
      }
    }
  }
  if (spec.kind == MaskKind::ball && !(spec.radius >= 0.0)) throw UsageError("ball radius must be >= 0");

  FrequencyMask mask;
  mask.grid = grid;
  mask.spec = spec;
  const std::size_t ny = grid.dim == 1 ? 1 : grid.n;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.n; ++ix) {
      const double kx = static_cast<double>(signed_index(ix, grid.n));
      const double ky = grid.dim == 1 ? 0.0 : static_cast<double>(signed_index(iy, grid.n));
      const double x = step * kx, y = step * ky;
      const double r2 = x * x + y * y;
      bool in = true;
      switch (spec.kind) {
        case MaskKind::ball:
          in = std::isinf(spec.radius) || r2 <= spec.radius * spec.radius;
          break;
        case MaskKind::rectangle:
          in = x >= spec.zeta[0] && x <= spec.zeta[0] + spec.sigma;
          if (grid.dim == 2) in = in && y >= spec.zeta[1] && y <= spec.zeta[1] + spec.sigma;
          break;
        default:
          break;
      }
      if (annular) in = r2 >= lo2 && r2 <= hi2;
      if (sectored && in) {
        if (r2 == 0.0) {
          in = false;
        } else {
          double d = std::atan2(y, x) - spec.theta;
          d = std::remainder(d, 2.0 * kPi);
          in = std::abs(d) <= 0.5 * spec.eps0;
        }
      }
      if (in) {
        mask.index.push_back(iy * grid.n + ix);
        mask.xi.push_back({x, y});
      }
    }
  }
  if (mask.index.empty()) throw UsageError("frequency mask " + describe(spec) + " is empty");
  return mask;
}

std::vector<cplx> weight_coefficients(const ObservationField& field, Weight weight) {
  const GridSpec g = grid_of(field);
  const std::size_t ny = g.dim == 1 ? 1 : g.n;
  std::vector<cplx> w(field.values().size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double a = field.values()[i];
    w[i] = weight == Weight::full ? a * a : a;
  }
  fft::forward(w, g.n, ny);
  const double inv = 1.0 / static_cast<double>(w.size());
  for (auto& z : w) z *= inv;
  return w;
}

std::vector<cplx> compression_matrix(const FrequencyMask& mask, const std::vector<cplx>& w_hat) {
  const std::size_t r = mask.rank();
  const std::size_t n = mask.grid.n;
  std::vector<cplx> G(r * r);
  for (std::size_t k = 0; k < r; ++k) {
    const long kx = static_cast<long>(mask.index[k] % n), ky = static_cast<long>(mask.index[k] / n);
    for (std::size_t j = 0; j < r; ++j) {
      const long jx = static_cast<long>(mask.index[j] % n), jy = static_cast<long>(mask.index[j] / n);
      const std::size_t d = wrap(jx - kx, n) + (mask.grid.dim == 1 ? 0 : n * wrap(jy - ky, n));
      G[k * r + j] = w_hat[d];
    }
  }
  return G;
}

std::vector<cplx> apply_compression(const FrequencyMask& mask, const std::vector<double>& w,
                                    const std::vector<cplx>& v) {
  const std::size_t n = mask.grid.n;
  const std::size_t ny = mask.grid.dim == 1 ? 1 : n;
  std::vector<cplx> buf(n * ny, cplx(0.0, 0.0));
  for (std::size_t k = 0; k < mask.rank(); ++k) buf[mask.index[k]] = v[k];
  fft::backward(buf, n, ny);
  kernels::scale_complex(buf.data(), w.data(), buf.size());
  fft::forward(buf, n, ny);
  const double inv = 1.0 / static_cast<double>(buf.size());
  std::vector<cplx> out(mask.rank());
  for (std::size_t k = 0; k < mask.rank(); ++k) out[k] = buf[mask.index[k]] * inv;
  return out;
}

namespace {

// Smallest eigenpair of a Hermitian operator by restarted Lanczos with full reorthogonalization.
Hermitian lanczos_smallest(const std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>& op,
                           std::size_t r, const SolverOptions& opts) {
  const auto rr = static_cast<Eigen::Index>(r);
  const auto kmax = static_cast<Eigen::Index>(std::min(r, opts.max_krylov));
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd start(rr);
  for (Eigen::Index i = 0; i < rr; ++i) start(i) = cplx(nd(rng), nd(rng));
  start.normalize();

  Hermitian best{INFINITY, start, INFINITY};
  for (std::size_t restart = 0; restart <= opts.max_restarts; ++restart) {
    Eigen::MatrixXcd V(rr, kmax);
    std::vector<double> alpha, beta;
    V.col(0) = start;
    for (Eigen::Index j = 0; j < kmax; ++j) {
      Eigen::VectorXcd w = op(V.col(j));
      const double a = V.col(j).dot(w).real();
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);
      }
      const double b = w.norm();
      const bool last = j + 1 == kmax || b < 1e-14;
      if (last || (j + 1) % 10 == 0) {
        const auto k = j + 1;
        Eigen::MatrixXd Tm = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
          Tm(i, i) = alpha[static_cast<std::size_t>(i)];
          if (i + 1 < k) Tm(i, i + 1) = Tm(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Tm);
        const double theta = es.eigenvalues()(0);
        const Eigen::VectorXd y = es.eigenvectors().col(0);
        const double est = b * std::abs(y(k - 1));
        if (est <= 0.1 * opts.tolerance || last) {
          Eigen::VectorXcd x = V.leftCols(k) * y.cast<cplx>();
          x.normalize();
          const double res = (op(x) - theta * x).norm();
          if (res < best.residual) best = {theta, x, res};
          if (res <= opts.tolerance) return best;
          start = x;
          break;
        }
      }
      if (b < 1e-14) break;
      beta.push_back(b);
      V.col(j + 1) = w / b;
    }
  }
  throw NumericalError("Lanczos did not reach residual " + fmt(opts.tolerance) + " (best " + fmt(best.residual) + ")");
}

}  // namespace

SpectralReport uncertainty_constant(const ObservationField& field, const FrequencyMask& mask,
                                    Weight weight, const SolverOptions& opts) {
  const GridSpec g = grid_of(field);
  if (g.dim != mask.grid.dim || g.n != mask.grid.n || std::abs(g.period - mask.grid.period) > 1e-12 * g.period) {
    throw UsageError("mask grid does not match the field grid");
  }
  SpectralReport rep;
  rep.grid = g;
  rep.mask = describe(mask.spec);
  rep.field = family_name(field.family().kind);
  rep.kind = weight == Weight::full ? ConstantKind::uncertainty_full : ConstantKind::uncertainty_sqrt;
  rep.rank = mask.rank();

  Hermitian h;
  if (mask.rank() <= opts.dense_limit) {
    const auto w_hat = weight_coefficients(field, weight);
    h = dense_extreme(to_eigen(compression_matrix(mask, w_hat), mask.rank()), true);
    rep.solver = "dense";
  } else {
    std::vector<double> w(field.values());
    if (weight == Weight::full) for (double& v : w) v *= v;
    auto op = [&](const Eigen::VectorXcd& x) {
      std::vector<cplx> v(x.data(), x.data() + x.size());
      auto y = apply_compression(mask, w, v);
      return Eigen::VectorXcd(Eigen::Map<Eigen::VectorXcd>(y.data(), static_cast<Eigen::Index>(y.size())));
    };
    h = lanczos_smallest(op, mask.rank(), opts);
    rep.solver = "lanczos";
  }
  if (h.residual > opts.tolerance) {
    throw NumericalError("eigensolver residual " + fmt(h.residual) + " exceeds " + fmt(opts.tolerance));
  }
  if (h.value < -1e-10) throw NumericalError("compression has a negative eigenvalue " + fmt(h.value));
  rep.eigen = std::max(0.0, h.value);
  rep.residual = h.residual;
  const double floor = std::max(1e-14, h.residual);
  rep.value = rep.eigen <= floor ? INFINITY : 1.0 / std::sqrt(rep.eigen);
  return rep;
}

Containment annulus_containment(double gamma, double beta, double delta, double lambda,
                                const GridSpec& grid) {
  if (!(gamma > 0.0)) throw UsageError("gamma must be positive");
  if (!(lambda >= 1.0)) throw UsageError("lambda must be at least 1");
  if (!(delta > 0.0)) throw UsageError("delta must be positive");
  Containment c;
  c.eps = std::min(0.25, delta * gamma / std::pow(2.0, std::abs(1.0 - gamma) / gamma));
  const double g = std::pow(lambda, gamma);
  const double w = c.eps * std::pow(lambda, gamma - beta - 1.0);
  const double aw = delta * std::pow(lambda, -beta);
  const double alo = (lambda - aw) * (1.0 - 1e-13), ahi = (lambda + aw) * (1.0 + 1e-13);
  const double step = grid.spacing();
  const std::size_t ny = grid.dim == 1 ? 1 : grid.n;
  c.contained = true;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.n; ++ix) {
      const double x = step * static_cast<double>(signed_index(ix, grid.n));
      const double y = grid.dim == 1 ? 0.0 : step * static_cast<double>(signed_index(iy, grid.n));
      const double r = std::hypot(x, y);
      const double rg = std::pow(r, gamma);
      if (rg < g - w || rg > g + w) continue;
      ++c.checked;
      if (r < alo || r > ahi) c.contained = false;
    }
  }
  return c;
}

SpectralReport resolvent_constant(const ObservationField& field, double gamma, double lambda,
                                  double m, double cutoff) {
  if (!(m > 0.0)) throw UsageError("m must be positive");
  if (!(gamma > 0.0)) throw UsageError("gamma must be positive");
  const GridSpec g = grid_of(field);
  if (!(cutoff > 0.0) || cutoff >= g.aliasing_radius()) {
    throw UsageError("frequency cutoff " + fmt(cutoff) + " must lie in (0, " + fmt(g.aliasing_radius()) + ")");
  }
  const FrequencyMask mask = build_mask(g, MaskSpec::ball(cutoff));
  const std::size_t r = mask.rank();
  const Eigen::MatrixXcd Ga = to_eigen(compression_matrix(mask, weight_coefficients(field, Weight::sqrt_a)), r);
  const Eigen::MatrixXcd K = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) - m * Ga;

  std::vector<Eigen::Index> Z, N;
  std::vector<double> d(r);
  const double ztol = 1e-12 * std::max(1.0, std::abs(lambda));
  for (std::size_t j = 0; j < r; ++j) {
    d[j] = std::pow(std::hypot(mask.xi[j][0], mask.xi[j][1]), gamma) - lambda;
    (std::abs(d[j]) <= ztol ? Z : N).push_back(static_cast<Eigen::Index>(j));
  }

  SpectralReport rep;
  rep.grid = g;
  rep.mask = describe(mask.spec);
  rep.field = family_name(field.family().kind);
  rep.kind = ConstantKind::resolvent_M;
  rep.rank = r;
  rep.solver = "dense";
  rep.lambda = lambda;
  rep.m = m;

  const auto nz = static_cast<Eigen::Index>(Z.size()), nn = static_cast<Eigen::Index>(N.size());
  Eigen::MatrixXcd S(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i)
    for (Eigen::Index j = 0; j < nn; ++j) S(i, j) = K(N[static_cast<std::size_t>(i)], N[static_cast<std::size_t>(j)]);

  if (nz > 0) {
    Eigen::MatrixXcd Kzz(nz, nz), Kzn(nz, nn);
    for (Eigen::Index i = 0; i < nz; ++i) {
      for (Eigen::Index j = 0; j < nz; ++j) Kzz(i, j) = K(Z[static_cast<std::size_t>(i)], Z[static_cast<std::size_t>(j)]);
      for (Eigen::Index j = 0; j < nn; ++j) Kzn(i, j) = K(Z[static_cast<std::size_t>(i)], N[static_cast<std::size_t>(j)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Kzz);
    if (es.info() != Eigen::Success) throw NumericalError("kernel block eigensolve failed");
    const double etol = 1e-10 * std::max(1.0, m);
    for (Eigen::Index i = 0; i < nz; ++i) {
      const double mu = es.eigenvalues()(i);
      const Eigen::VectorXcd v = es.eigenvectors().col(i);
      const Eigen::RowVectorXcd coupling = v.adjoint() * Kzn;
      if (mu > etol || (mu >= -etol && coupling.norm() > etol)) {
        rep.value = INFINITY;
        rep.eigen = INFINITY;
        return rep;
      }
      if (mu < -etol) S -= coupling.adjoint() * coupling / mu;
    }
  }
  if (nn == 0) {
    rep.value = 0.0;
    return rep;
  }
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double di = 1.0 / d[static_cast<std::size_t>(N[static_cast<std::size_t>(i)])];
    S.row(i) *= di;
    S.col(i) *= di;
  }
  const Hermitian h = dense_extreme(S, false);
  rep.eigen = h.value;
  rep.residual = h.residual / std::max(1.0, S.norm());
  if (rep.residual > 1e-8) throw NumericalError("resolvent eigensolve residual " + fmt(rep.residual));
  rep.value = std::max(0.0, h.value);
  return rep;
}

double calibrate_m(const ObservationField& field, double gamma, double lambda0) {
  const GridSpec g = grid_of(field);
  double radius = std::pow(lambda0 + 2.0, 1.0 / gamma);
  radius = std::min(radius, 0.999 * g.aliasing_radius());
  const auto rep = uncertainty_constant(field, build_mask(g, MaskSpec::ball(radius)), Weight::sqrt_a);
  if (!(rep.eigen > 1e-12)) {
    throw NumericalError("field is not observable on the calibration ball (c = " + fmt(rep.eigen) + ")");
  }
  return 2.0 / rep.eigen;
}

LowFreqReport low_freq_extension_check(const ObservationField& field, double gamma,
                                       const std::vector<double>& lambdas, double m, double cutoff,
                                       double ceiling) {
  LowFreqReport rep;
  rep.ceiling = ceiling;
  rep.lambdas = lambdas;
  for (double l : lambdas) {
    const double M = resolvent_constant(field, gamma, l, m, cutoff).value;
    rep.M.push_back(M);
    rep.max_M = std::max(rep.max_M, M);
  }
  rep.bounded = rep.max_M <= ceiling;
  return rep;
}

}  // namespace gcclab::spectral
