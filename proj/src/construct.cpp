#include "gcclab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gcclab/error.hpp"

namespace gcclab::construct {

namespace {

// Antiderivative of the smoothstep S(u) = 6u^5 - 15u^4 + 10u^3, zero at u = 0.
double smoothstep_integral(double u) {
  const double u2 = u * u;
  return u2 * u2 * (u2 - 3.0 * u + 2.5);
}

double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double positive_mod(double x, double w) {
  double r = std::fmod(x, w);
  if (r < 0.0) r += w;
  return r;
}

}  // namespace

double bump(double y, double centre, double half_width) {
  const double r = half_width;
  const double d = std::abs(y - centre);
  if (d >= r) return 0.0;
  if (d <= 0.5 * r) return 1.0;
  return smoothstep((r - d) / (0.5 * r));
}

double bump_cdf(double y, double centre, double half_width) {
  const double r = half_width;
  const double half = 0.5 * r;
  const double d = y - centre;
  if (d <= -r) return 0.0;
  if (d < -half) return half * smoothstep_integral((d + r) / half);
  if (d <= half) return 0.25 * r + (d + half);
  if (d < r) return 1.5 * r - half * smoothstep_integral((r - d) / half);
  return 1.5 * r;
}

// --- Sampled1D ---------------------------------------------------------------

double Sampled1D::integral(double a, double b) const {
  if (values.empty()) return 0.0;
  auto F = [&](double x) {
    const double f = (x - x0) / h;
    if (f <= 0.0) return 0.0;
    const auto n = values.size();
    if (f >= static_cast<double>(n)) {
      double s = 0.0;
      for (double v : values) s += v;
      return s * h;
    }
    const auto i = static_cast<std::size_t>(std::floor(f));
    double s = 0.0;
    for (std::size_t k = 0; k < i; ++k) s += values[k];
    return s * h + (x - (x0 + h * static_cast<double>(i))) * values[i];
  };
  return F(b) - F(a);
}

double Sampled1D::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

// --- BallSystem --------------------------------------------------------------

bool BallSystem::contains(double y) const {
  auto it = std::lower_bound(centres.begin(), centres.end(), y - delta);
  for (; it != centres.end() && *it - delta < y; ++it) {
    if (std::abs(y - *it) < delta) return true;
  }
  return false;
}

double BallSystem::measure(double a, double b) const {
  if (b <= a) return 0.0;
  double m = 0.0;
  auto it = std::lower_bound(centres.begin(), centres.end(), a - delta);
  for (; it != centres.end() && *it - delta < b; ++it) {
    const double lo = std::max(a, *it - delta);
    const double hi = std::min(b, *it + delta);
    if (hi > lo) m += hi - lo;
  }
  return m;
}

namespace {

double next_exterior(const BallSystem& Y, double y) {
  auto it = std::lower_bound(Y.centres.begin(), Y.centres.end(), y - Y.delta);
  for (; it != Y.centres.end() && *it - Y.delta < y; ++it) {
    if (std::abs(y - *it) < Y.delta) {
      y = *it + Y.delta;
      while (std::abs(y - *it) < Y.delta) y = std::nextafter(y, INFINITY);  // rounding
    }
  }
  return y;
}

void check_balls(const BallSystem& Y) {
  if (!(Y.delta > 0.0)) throw UsageError("ball radius must be positive");
  if (!(Y.hi > Y.lo)) throw UsageError("ball system interval is empty");
  for (std::size_t i = 1; i < Y.centres.size(); ++i) {
    if (Y.centres[i] - Y.centres[i - 1] < 2.0 * Y.delta) {
      throw UsageError("balls must be disjoint and sorted (centres " + fmt(Y.centres[i - 1]) +
                       ", " + fmt(Y.centres[i]) + ")");
    }
  }
}

}  // namespace

// --- partitions --------------------------------------------------------------

AlmostPeriodicPartition build_partition(const BallSystem& Y, double M) {
  check_balls(Y);
  if (!(M > 0.0)) throw UsageError("partition length M must be positive");
  if (2.0 * Y.delta > M) throw UsageError("ball diameter 2*delta must not exceed M");
  AlmostPeriodicPartition p;
  const double s0 = next_exterior(Y, Y.lo);
  if (s0 > Y.hi) throw UsageError("ball system covers the whole interval; no exterior point");
  p.breakpoints.push_back(s0);
  for (;;) {
    const double s = next_exterior(Y, p.breakpoints.back() + M);
    if (s > Y.hi) break;
    p.breakpoints.push_back(s);
  }
  if (p.breakpoints.size() < 2) {
    throw UsageError("interval too short for one partition cell of length " + fmt(M));
  }
  p.min_gap = INFINITY;
  for (std::size_t k = 1; k < p.breakpoints.size(); ++k) {
    const double g = p.breakpoints[k] - p.breakpoints[k - 1];
    p.max_gap = std::max(p.max_gap, g);
    p.min_gap = std::min(p.min_gap, g);
  }
  return p;
}

AlmostPeriodicPartition attach(const Sampled1D& b, std::vector<double> breakpoints) {
  if (breakpoints.size() < 2) throw UsageError("partition needs at least two breakpoints");
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > breakpoints[k - 1])) throw UsageError("breakpoints must increase");
  }
  const double tol = 1e-9 * b.h;
  if (breakpoints.front() < b.x0 - tol || breakpoints.back() > b.end() + tol) {
    throw UsageError("partition extends beyond the sampled function");
  }
  for (double v : b.values) {
    if (v < 0.0) throw UsageError("attached function must be non-negative");
  }
  AlmostPeriodicPartition p;
  p.breakpoints = std::move(breakpoints);
  p.rho = b.integral(p.breakpoints.front(), p.breakpoints.back()) / p.circumference();
  p.min_gap = INFINITY;
  for (std::size_t k = 1; k < p.breakpoints.size(); ++k) {
    const double lo = p.breakpoints[k - 1], hi = p.breakpoints[k];
    p.max_gap = std::max(p.max_gap, hi - lo);
    p.min_gap = std::min(p.min_gap, hi - lo);
    p.max_cell_deviation = std::max(p.max_cell_deviation, std::abs(b.integral(lo, hi) / (hi - lo) - p.rho));
  }
  return p;
}

AlmostPeriodicPartition build_partition(const Sampled1D& b, const BallSystem& Y, double M) {
  return attach(b, build_partition(Y, M).breakpoints);
}

// --- transfer function -------------------------------------------------------

TransferFunction transfer_function(const Sampled1D& b, double rho,
                                   const AlmostPeriodicPartition& partition, double tol) {
  const auto& s = partition.breakpoints;
  if (s.size() < 2) throw UsageError("partition needs at least two breakpoints");
  double worst = 0.0, worst_at = s.front();
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double avg = b.integral(s[k - 1], s[k]) / (s[k] - s[k - 1]);
    if (std::abs(avg - rho) > worst) {
      worst = std::abs(avg - rho);
      worst_at = s[k - 1];
    }
  }
  if (worst > tol * std::max(1.0, std::abs(rho))) {
    throw UsageError("cell average deviates from rho by " + fmt(worst) + " on the cell starting at " +
                     fmt(worst_at) + "; input does not have almost periodic density");
  }
  TransferFunction tf;
  tf.b_grid = b;
  const auto n = b.values.size();
  tf.nodes.resize(n + 1);
  tf.nodes[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) tf.nodes[i + 1] = tf.nodes[i] + b.h * (b.values[i] - rho);

  auto B = [&](double y) { return b.integral(b.x0, y) - rho * (y - b.x0); };
  for (double sk : s) tf.at_breaks.push_back(B(sk));
  const double b0 = tf.at_breaks.front();
  for (double v : tf.at_breaks) tf.break_spread = std::max(tf.break_spread, std::abs(v - b0));

  for (std::size_t i = 0; i <= n; ++i) {
    const double x = b.x0 + b.h * static_cast<double>(i);
    if (x < s.front() - 1e-12 * b.h || x > s.back() + 1e-12 * b.h) continue;
    tf.max_abs = std::max(tf.max_abs, std::abs(tf.nodes[i]));
    tf.max_dev_from_start = std::max(tf.max_dev_from_start, std::abs(tf.nodes[i] - b0));
  }
  const double bn = b.sup_norm();
  tf.bound = 4.0 * partition.max_gap * bn;
  tf.sharp_bound = 2.0 * partition.max_gap * bn;
  return tf;
}

// --- smooth minorant ---------------------------------------------------------

std::pair<double, double> ball_density(const BallSystem& Y, double circle_lo, double circle_hi,
                                       double M) {
  const double W = circle_hi - circle_lo;
  if (!(M > 0.0) || !(M < W)) throw UsageError("window length must lie in (0, circumference)");
  auto window = [&](double x) {
    const double a = circle_lo + positive_mod(x - circle_lo, W);
    const double b = a + M;
    if (b <= circle_hi) return Y.measure(a, b);
    return Y.measure(a, circle_hi) + Y.measure(circle_lo, circle_lo + (b - circle_hi));
  };
  std::vector<double> cand{circle_lo};
  for (double c : Y.centres) {
    if (c < circle_lo || c > circle_hi) continue;
    for (double e : {c - Y.delta, c + Y.delta}) {
      cand.push_back(e);
      cand.push_back(e - M);
    }
  }
  double best = INFINITY, at = circle_lo;
  for (double x : cand) {
    const double v = window(x) / M;
    if (v < best) {
      best = v;
      at = circle_lo + positive_mod(x - circle_lo, W);
    }
  }
  return {best, at};
}

double SmoothMinorant::integral(double u, double v) const {
  const double lo = partition.breakpoints.front();
  const double W = partition.circumference();
  const double total = bump_prefix.empty() ? 0.0 : bump_prefix.back();
  // Cumulative mass from lo to x, x in [lo, lo + W].
  auto cum = [&](double x) {
    auto it = std::lower_bound(bumps.begin(), bumps.end(), x,
                               [](const std::array<double, 2>& bp, double y) { return bp[0] + bp[1] <= y; });
    const auto j = static_cast<std::size_t>(it - bumps.begin());
    double m = bump_prefix[j];
    for (auto k = j; k < bumps.size() && bumps[k][0] - bumps[k][1] < x; ++k) {
      m += bump_cdf(x, bumps[k][0], bumps[k][1]);
    }
    return m;
  };
  if (v < u) return -integral(v, u);
  double out = 0.0;
  const double span = v - u;
  const double whole = std::floor(span / W);
  out += whole * total;
  const double a = lo + positive_mod(u - lo, W);
  const double b = a + (span - whole * W);
  if (b <= lo + W) {
    out += cum(b) - cum(a);
  } else {
    out += (total - cum(a)) + cum(lo + (b - lo - W));
  }
  return out;
}

SmoothMinorant smooth_minorant(const BallSystem& Y, double M, double rho, double delta,
                               double grid_step) {
  if (!(rho > 0.0 && rho <= 1.0)) throw UsageError("rho must lie in (0,1]");
  if (std::abs(Y.delta - delta) > 1e-14 * std::max(1.0, delta)) {
    throw UsageError("ball system radius does not match delta");
  }
  if (!(delta < 0.5 * M)) throw UsageError("delta must be below M/2");
  SmoothMinorant sm;
  sm.Y = Y;
  sm.partition = build_partition(Y, M);
  const auto& s = sm.partition.breakpoints;
  const double lo = s.front(), hi = s.back();
  const double W = hi - lo;
  if (W <= M) throw UsageError("working circle shorter than one window");

  const auto [dens, at] = ball_density(Y, lo, hi, M);
  if (dens < rho * (1.0 - 1e-12)) {
    throw UsageError("ball system is not (M, rho) relatively dense: window [" + fmt(at) + ", " +
                     fmt(at + M) + "] carries fraction " + fmt(dens) + " < " + fmt(rho));
  }

  sm.eta = kBumpMass * rho / 2.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double len = s[k] - s[k - 1];
    const double occ = Y.measure(s[k - 1], s[k]);
    const double tk = 0.5 * rho * len / occ;
    sm.t.push_back(tk);
    for (double c : Y.centres) {
      if (c > s[k - 1] && c < s[k]) sm.bumps.push_back({c, tk * delta});
    }
  }
  sm.bump_prefix.assign(sm.bumps.size() + 1, 0.0);
  for (std::size_t j = 0; j < sm.bumps.size(); ++j) {
    sm.bump_prefix[j + 1] = sm.bump_prefix[j] + 1.5 * sm.bumps[j][1];
  }

  const double target = grid_step > 0.0 ? grid_step : rho * delta / 40.0;
  const auto n = static_cast<std::size_t>(std::ceil(W / target));
  sm.a.x0 = lo;
  sm.a.h = W / static_cast<double>(n);
  sm.a.values.assign(n, 0.0);
  for (const auto& bp : sm.bumps) {
    const double c = bp[0], r = bp[1];
    auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((c - r - lo) / sm.a.h)));
    auto i1 = std::min(n, static_cast<std::size_t>(std::ceil((c + r - lo) / sm.a.h)) + 1);
    for (auto i = i0; i < i1; ++i) {
      const double x = lo + sm.a.h * static_cast<double>(i);
      sm.a.values[i] += (bump_cdf(x + sm.a.h, c, r) - bump_cdf(x, c, r)) / sm.a.h;
    }
  }
  for (double& v : sm.a.values) v = std::clamp(v, 0.0, 1.0);
  return sm;
}

MinorantChecks check_minorant(const SmoothMinorant& sm, double M, double rho, double delta) {
  MinorantChecks out;
  out.eta = sm.eta;
  const auto& s = sm.partition.breakpoints;
  const auto& a = sm.a;
  const auto n = a.values.size();
  const double h = a.h;

  out.min_t = *std::min_element(sm.t.begin(), sm.t.end());
  out.max_t = *std::max_element(sm.t.begin(), sm.t.end());

  bool ok = out.max_t <= 1.0;
  for (std::size_t i = 0; i < n && ok; ++i) {
    const double x = a.x0 + h * static_cast<double>(i);
    const double occ = sm.Y.measure(x, x + h) / h;
    if (occ == 0.0 ? a.values[i] != 0.0 : a.values[i] > occ + 1e-12) ok = false;
  }
  out.support_ok = ok;

  for (std::size_t k = 1; k < s.size(); ++k) {
    const double avg = sm.integral(s[k - 1], s[k]) / (s[k] - s[k - 1]);
    out.cell_deviation = std::max(out.cell_deviation, std::abs(avg - sm.eta));
  }

  out.density_2M = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a.x0 + h * static_cast<double>(i);
    out.density_2M = std::min(out.density_2M, sm.integral(x, x + 2.0 * M) / (2.0 * M));
  }

  auto v = [&](long i) {
    const long nn = static_cast<long>(n);
    return a.values[static_cast<std::size_t>(((i % nn) + nn) % nn)];
  };
  std::vector<double> A(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) A[i + 1] = A[i] + h * (a.values[i] - sm.eta);
  // The circle closes up: A(s_K) = A(s_0) up to rounding.
  auto An = [&](long i) {
    const long nn = static_cast<long>(n);
    return A[static_cast<std::size_t>(((i % nn) + nn) % nn)];
  };

  const double scale = 0.5 * rho * delta;
  const double c2 = kBumpDerivative;
  for (int m = 0; m < 3; ++m) out.deriv_bound[static_cast<std::size_t>(m)] = std::pow(c2 / scale, m + 1);
  out.transfer_deriv_bound[0] = std::max(sm.eta, 1.0 - sm.eta) / M;
  out.transfer_deriv_bound[1] = (c2 / scale) / M;
  out.transfer_deriv_bound[2] = std::pow(c2 / scale, 2) / M;

  for (long i = 0; i < static_cast<long>(n); ++i) {
    const double d1 = (v(i + 1) - v(i - 1)) / (2.0 * h);
    const double d2 = (v(i + 1) - 2.0 * v(i) + v(i - 1)) / (h * h);
    const double d3 = (v(i + 2) - 2.0 * v(i + 1) + 2.0 * v(i - 1) - v(i - 2)) / (2.0 * h * h * h);
    out.deriv[0] = std::max(out.deriv[0], std::abs(d1));
    out.deriv[1] = std::max(out.deriv[1], std::abs(d2));
    out.deriv[2] = std::max(out.deriv[2], std::abs(d3));

    out.transfer_max = std::max(out.transfer_max, std::abs(An(i)) / M);
    // same stencils on A, written in terms of its increments h (a - eta)
    const double e1 = 0.5 * ((v(i) - sm.eta) + (v(i - 1) - sm.eta));
    const double e2 = (v(i) - v(i - 1)) / h;
    const double e3 = (v(i + 1) - v(i) - v(i - 1) + v(i - 2)) / (2.0 * h * h);
    out.transfer_deriv[0] = std::max(out.transfer_deriv[0], std::abs(e1) / M);
    out.transfer_deriv[1] = std::max(out.transfer_deriv[1], std::abs(e2) / M);
    out.transfer_deriv[2] = std::max(out.transfer_deriv[2], std::abs(e3) / M);
  }
  return out;
}

BallSystem random_ball_system(std::mt19937_64& rng, double M, double rho, double delta,
                              double length) {
  if (!(delta > 0.0 && delta < 0.5 * M)) throw UsageError("delta must lie in (0, M/2)");
  if (!(rho > 0.0 && rho < 1.0)) throw UsageError("rho must lie in (0,1)");
  if (length < 4.0 * M) throw UsageError("length must be at least 4M");
  double gmax = 4.0 * delta * (1.0 - rho) / rho;
  for (int attempt = 0; attempt < 400; ++attempt) {
    if (attempt > 0 && attempt % 20 == 0) gmax *= 0.85;
    std::uniform_real_distribution<double> gap(0.0, gmax);
    BallSystem Y;
    Y.delta = delta;
    Y.lo = 0.0;
    Y.hi = length;
    double x = 0.0;
    for (;;) {
      const double c = x + gap(rng) + delta;
      if (c + delta > length) break;
      Y.centres.push_back(c);
      x = c + delta;
    }
    if (Y.centres.empty()) continue;
    const auto p = build_partition(Y, M);
    if (p.circumference() <= 2.0 * M) continue;
    if (ball_density(Y, p.breakpoints.front(), p.breakpoints.back(), M).first >= rho) return Y;
  }
  throw NumericalError("could not draw a relatively dense ball system");
}

ObservationField to_field(const Sampled1D& s, const std::string& label) {
  Axis ax{s.x0, s.h * static_cast<double>(s.values.size()), s.values.size(), true};
  FamilyDescriptor fam;
  fam.kind = FamilyKind::custom_grid;
  fam.label = label;
  std::vector<double> vals = s.values;
  for (double& v : vals) v = std::clamp(v, 0.0, 1.0);
  return ObservationField(1, {ax, Axis{}}, std::move(vals), fam);
}

}  // namespace gcclab::construct
