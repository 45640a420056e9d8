#include "gcclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcclab/error.hpp"
#include "gcclab/kernels.hpp"

namespace gcclab::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

Point add(Point p, Point q, double s) { return {p.x + s * q.x, p.y + s * q.y}; }
Point vec(const Direction& d) { return {d.x, d.y}; }

double min_spacing(const ObservationField& f) {
  return f.dim() == 1 ? f.axis(0).spacing() : std::min(f.axis(0).spacing(), f.axis(1).spacing());
}

bool in_arcs(double angle, const std::vector<Interval>& arcs) {
  if (arcs.empty()) return true;
  for (const auto& a : arcs) {
    const double rel = wrap_angle(angle - a.lo);
    if (rel <= a.hi - a.lo + 1e-15) return true;
  }
  return false;
}

std::vector<double> direction_grid(std::size_t nd, const std::vector<Interval>& arcs) {
  std::vector<double> out;
  if (arcs.empty()) {
    for (std::size_t i = 0; i < nd; ++i) out.push_back(kTwoPi * static_cast<double>(i) / static_cast<double>(nd));
    return out;
  }
  double total = 0.0;
  for (const auto& a : arcs) total += a.hi - a.lo;
  for (const auto& a : arcs) {
    const double len = a.hi - a.lo;
    if (len <= 0.0 || total <= 0.0) {
      out.push_back(wrap_angle(a.lo));
      continue;
    }
    const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(static_cast<double>(nd) * len / total)));
    for (std::size_t i = 0; i < k; ++i) {
      out.push_back(wrap_angle(a.lo + len * static_cast<double>(i) / static_cast<double>(k - 1)));
    }
  }
  return out;
}

// Grid of admissible centres on one axis for objects reaching `reach` from their centre.
std::vector<double> centre_grid(const ObservationField& f, int axis, std::size_t count, double reach) {
  const Axis& a = f.axis(axis);
  std::vector<double> out;
  if (a.periodic) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(a.origin + a.extent * static_cast<double>(i) / static_cast<double>(count));
    return out;
  }
  const Interval u = f.usable(axis);
  const double lo = u.lo + reach, hi = u.hi - reach;
  if (hi < lo) throw UsageError("object does not fit inside the truncated box minus margin");
  if (count == 1) return {0.5 * (lo + hi)};
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

double sampled_mean(const ObservationField& f, Point start, Point step, std::size_t n,
                    std::vector<double>& buf) {
  buf.resize(n);
  kernels::sample_line(f.view(), start.x, start.y, step.x, step.y, n, buf.data());
  return kernels::sum(buf.data(), n) / static_cast<double>(n);
}

double snap(double w) {
  const double r = std::round(w);
  return std::abs(w - r) < 1e-9 * std::max(1.0, r) ? r : w;
}

}  // namespace

Direction Direction::from_angle(double angle) {
  angle = wrap_angle(angle);
  const double quarter = std::numbers::pi / 2.0;
  const double k = std::round(angle / quarter);
  if (std::abs(angle - k * quarter) < 1e-14) {
    static const double cs[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int i = static_cast<int>(k) % 4;
    return Direction{i * quarter, cs[i][0], cs[i][1]};
  }
  return Direction{angle, std::cos(angle), std::sin(angle)};
}

Direction Direction::from_vector(double x, double y) {
  const double n = std::hypot(x, y);
  if (!(n > 0.0)) throw UsageError("direction vector must be non-zero");
  return Direction{wrap_angle(std::atan2(y, x)), x / n, y / n};
}

double RectangleSpec::s() const { return L * std::pow(lambda, (beta - 1.0) / 2.0); }
double RectangleSpec::t() const { return L * std::pow(lambda, beta); }
Point RectangleSpec::center() const {
  return add(add(anchor, theta.normal(), 0.5 * s()), vec(theta), 0.5 * t());
}

double line_average(const ObservationField& field, const LineSegment& seg, std::size_t n_samples) {
  if (!(seg.length > 0.0)) throw UsageError("line segment must have positive length");
  if (n_samples < 2) throw UsageError("line average needs at least two samples");
  const double h = seg.length / static_cast<double>(n_samples);
  const Point step{h * seg.dir.x, field.dim() == 2 ? h * seg.dir.y : 0.0};
  std::vector<double> buf;
  return sampled_mean(field, add(seg.start, step, 0.5), step, n_samples, buf);
}

std::vector<Interval> off_axis_arcs(double m) {
  if (m <= 0.0) return {};
  if (m > std::sqrt(0.5)) return {};
  const double a = std::asin(m);
  const double q = std::numbers::pi / 2.0;
  std::vector<Interval> out;
  for (int k = 0; k < 4; ++k) out.push_back({k * q + a, (k + 1) * q - a});
  return out;
}

GccResult gcc_constant(const ObservationField& field, double L, const GccSearch& search) {
  if (!(L > 0.0)) throw UsageError("gcc_constant requires L > 0");
  if (search.directions < 1 || search.anchors < 1) throw UsageError("gcc_constant grids must be non-empty");
  const int dim = field.dim();
  const double spu = search.samples_per_unit > 0.0 ? search.samples_per_unit : 2.0 / min_spacing(field);
  const auto ns = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(L * spu)));
  const std::vector<double> angles = dim == 1 ? std::vector<double>{0.0} : direction_grid(search.directions, search.arcs);
  const std::vector<double> cx = centre_grid(field, 0, search.anchors, 0.5 * L);
  const std::vector<double> cy = dim == 2 ? centre_grid(field, 1, search.anchors, 0.5 * L) : std::vector<double>{0.0};

  std::vector<double> buf;
  GccResult res;
  res.value = std::numeric_limits<double>::infinity();
  auto eval = [&](double ang, double x, double y) {
    const Direction d = Direction::from_angle(ang);
    const LineSegment seg{add({x, y}, vec(d), -0.5 * L), d, L};
    ++res.evaluations;
    const double h = L / static_cast<double>(ns);
    const Point step{h * d.x, dim == 2 ? h * d.y : 0.0};
    return std::pair{sampled_mean(field, add(seg.start, step, 0.5), step, ns, buf), seg};
  };

  std::array<double, 3> best_p{};
  for (double ang : angles) {
    for (double y : cy) {
      for (double x : cx) {
        auto [v, seg] = eval(ang, x, y);
        if (v < res.value) {
          res.value = v;
          res.argmin = seg;
          best_p = {ang, x, y};
        }
      }
    }
  }

  if (search.refine) {
    std::array<double, 3> step{
        dim == 1 ? 0.0 : (angles.size() > 1 ? kTwoPi / static_cast<double>(std::max<std::size_t>(search.directions, 2)) / 2.0 : 0.0),
        field.axis(0).extent / static_cast<double>(search.anchors) / 2.0,
        dim == 2 ? field.axis(1).extent / static_cast<double>(search.anchors) / 2.0 : 0.0};
    auto admissible = [&](const std::array<double, 3>& p) {
      if (!in_arcs(p[0], search.arcs)) return false;
      for (int a = 0; a < dim; ++a) {
        if (field.axis(a).periodic) continue;
        const Interval u = field.usable(a);
        const double c = p[static_cast<std::size_t>(a) + 1];
        if (c - 0.5 * L < u.lo || c + 0.5 * L > u.hi) return false;
      }
      return true;
    };
    for (int round = 0; round < 8; ++round) {
      for (std::size_t c = 0; c < 3; ++c) {
        if (step[c] == 0.0) continue;
        for (double sgn : {-1.0, 1.0}) {
          auto p = best_p;
          p[c] += sgn * step[c];
          if (!admissible(p)) continue;
          auto [v, seg] = eval(p[0], p[1], p[2]);
          if (v < res.value) {
            res.value = v;
            res.argmin = seg;
            best_p = p;
          }
        }
      }
      for (auto& s : step) s *= 0.5;
    }
  }
  return res;
}

double rectangle_density(const ObservationField& field, const RectangleSpec& rect, double spacing) {
  const double s = rect.s(), t = rect.t();
  if (!(s > 0.0 && t > 0.0)) throw UsageError("rectangle sides must be positive");
  const double sp = spacing > 0.0 ? spacing : 2.0 * min_spacing(field);
  const auto nv = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(t / sp)));
  const double dv = t / static_cast<double>(nv);
  const Point along{dv * rect.theta.x, field.dim() == 2 ? dv * rect.theta.y : 0.0};
  std::vector<double> buf;
  if (field.dim() == 1) return sampled_mean(field, add(rect.anchor, along, 0.5), along, nv, buf);
  const auto nu = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(s / sp)));
  const double du = s / static_cast<double>(nu);
  const Point nrm = rect.theta.normal();
  double total = 0.0;
  for (std::size_t i = 0; i < nu; ++i) {
    const Point row = add(add(rect.anchor, nrm, du * (static_cast<double>(i) + 0.5)), along, 0.5);
    total += sampled_mean(field, row, along, nv, buf);
  }
  return total / static_cast<double>(nu);
}

RectResult rectangle_density_inf(const ObservationField& field, double beta, double L,
                                 const RectSearch& search) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw UsageError("beta must lie in [0,1]");
  if (!(L > 0.0)) throw UsageError("rectangle length L must be positive");
  RectResult res;
  res.value = std::numeric_limits<double>::infinity();
  const std::size_t nd = field.dim() == 1 ? 1 : search.directions;
  for (double lam : search.lambdas) {
    if (!(lam >= 1.0)) throw UsageError("rectangle lambda must be at least 1");
    for (std::size_t k = 0; k < nd; ++k) {
      RectangleSpec r;
      r.theta = Direction::from_angle(std::numbers::pi * static_cast<double>(k) / static_cast<double>(nd));
      r.L = L;
      r.lambda = lam;
      r.beta = beta;
      const double reach = field.dim() == 1 ? 0.5 * r.t() : 0.5 * std::hypot(r.s(), r.t());
      const auto cx = centre_grid(field, 0, search.anchors, reach);
      const auto cy = field.dim() == 2 ? centre_grid(field, 1, search.anchors, reach) : std::vector<double>{0.0};
      for (double y : cy) {
        for (double x : cx) {
          const Point c{x, y};
          r.anchor = field.dim() == 1 ? add(c, vec(r.theta), -0.5 * r.t())
                                      : add(add(c, r.theta.normal(), -0.5 * r.s()), vec(r.theta), -0.5 * r.t());
          const double v = rectangle_density(field, r, search.spacing);
          ++res.count;
          if (v < res.value) {
            res.value = v;
            res.argmin = r;
          }
        }
      }
    }
  }
  return res;
}

double min_window_average(const std::vector<double>& g, double w, bool periodic, std::size_t* argmin) {
  const std::size_t n = g.size();
  if (n == 0 || !(w > 0.0)) throw UsageError("window search needs samples and a positive window");
  w = snap(w);
  const auto full = static_cast<std::size_t>(std::floor(w));
  const double fr = w - static_cast<double>(full);
  std::vector<double> pre(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + g[i];
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  if (periodic) {
    const double total = pre[n];
    const std::size_t q = full / n, r = full % n;
    for (std::size_t j = 0; j < n; ++j) {
      double s = static_cast<double>(q) * total;
      const std::size_t e = j + r;
      s += e <= n ? pre[e] - pre[j] : (pre[n] - pre[j]) + pre[e - n];
      if (fr > 0.0) s += fr * g[e % n];
      const double avg = s / w;
      if (avg < best) { best = avg; arg = j; }
    }
  } else {
    const auto need = static_cast<std::size_t>(std::ceil(w));
    if (need > n) throw UsageError("window longer than the sampled range");
    for (std::size_t j = 0; j + need <= n; ++j) {
      double s = pre[j + full] - pre[j];
      if (fr > 0.0) s += fr * g[j + full];
      const double avg = s / w;
      if (avg < best) { best = avg; arg = j; }
    }
  }
  if (argmin) *argmin = arg;
  return best;
}

CombProfile comb_profile(const ObservationField& field, const Direction& theta, double M,
                         const CombOptions& opts) {
  if (field.dim() != 2) throw UsageError("comb profiles are defined for two-dimensional fields");
  if (!(M > 0.0)) throw UsageError("comb window M must be positive");
  const double h = min_spacing(field);
  const double hy_req = opts.y_spacing > 0.0 ? opts.y_spacing : h;
  CombProfile prof;
  prof.theta = theta;
  prof.M = M;
  const Point nrm = theta.normal();
  std::size_t nx = 0, ny = 0;
  double hy = 0.0;
  Point origin{};
  double y_start = 0.0;
  bool line_periodic = false;

  if (opts.rational) {
    if (!field.fully_periodic() || field.axis(0).extent != field.axis(1).extent) {
      throw UsageError("rational comb profiles need a field periodic with equal periods");
    }
    const double P = static_cast<double>((*opts.rational)[0]), Q = static_cast<double>((*opts.rational)[1]);
    const double T = std::hypot(P, Q);
    if (std::abs(theta.x - P / T) > 1e-9 || std::abs(theta.y - Q / T) > 1e-9) {
      throw UsageError("rational hint does not match the direction");
    }
    const double p = field.axis(0).extent;
    const double Y = p * T, X = p / T;
    ny = static_cast<std::size_t>(std::ceil(Y / hy_req - 1e-9));
    hy = Y / static_cast<double>(ny);
    nx = opts.x_samples ? opts.x_samples : std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(X / h - 1e-9)));
    prof.dx = X / static_cast<double>(nx);
    prof.x0 = 0.0;
    prof.periodic = true;
    origin = {field.axis(0).origin, field.axis(1).origin};
    line_periodic = true;
  } else {
    const double Y = M + std::max(0.0, opts.search_extent);
    ny = static_cast<std::size_t>(std::ceil(Y / hy_req - 1e-9));
    hy = Y / static_cast<double>(ny);
    const Interval u0 = field.usable(0), u1 = field.usable(1);
    const double X = opts.x_extent > 0.0 ? opts.x_extent : (u0.hi - u0.lo);
    nx = opts.x_samples ? opts.x_samples : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(X / h - 1e-9)));
    prof.dx = X / static_cast<double>(nx);
    prof.x0 = -0.5 * X;
    prof.periodic = false;
    origin = opts.center ? *opts.center : Point{0.5 * (u0.lo + u0.hi), 0.5 * (u1.lo + u1.hi)};
    y_start = -0.5 * Y;
    for (double sx : {-0.5 * X, 0.5 * X}) {
      for (double sy : {-0.5 * Y, 0.5 * Y}) {
        const Point c = add(add(origin, nrm, sx), vec(theta), sy);
        for (int a = 0; a < 2; ++a) {
          if (field.axis(a).periodic) continue;
          const Interval u = field.usable(a);
          const double v = a == 0 ? c.x : c.y;
          if (v < u.lo - 1e-12 || v > u.hi + 1e-12) {
            throw UsageError("comb profile region leaves the truncated box minus margin");
          }
        }
      }
    }
  }
  prof.base = origin;
  prof.window_cells = ny;
  const double w = M / hy;
  std::vector<double> g(ny);
  prof.values.resize(nx);
  const Point step{hy * theta.x, hy * theta.y};
  for (std::size_t i = 0; i < nx; ++i) {
    const double xi = prof.x0 + prof.dx * static_cast<double>(i);
    const Point start = add(add(origin, nrm, xi), vec(theta), y_start);
    kernels::sample_line(field.view(), start.x, start.y, step.x, step.y, ny, g.data());
    prof.values[i] = std::clamp(min_window_average(g, w, line_periodic), 0.0, 1.0);
  }
  return prof;
}

double relative_density_1d(const CombProfile& profile, double L) {
  if (!(L > 0.0)) throw UsageError("relative density window L must be positive");
  return min_window_average(profile.values, L / profile.dx, profile.periodic);
}

double relative_density_1d(const ObservationField& field, double L) {
  if (field.dim() != 1) throw UsageError("relative_density_1d expects a one-dimensional field");
  if (!(L > 0.0)) throw UsageError("relative density window L must be positive");
  return min_window_average(field.values(), L / field.axis(0).spacing(), field.axis(0).periodic);
}

CombCheck comb_gcc_check(const ObservationField& field, const Direction& theta, double M, double L,
                         const CombOptions& opts, double floor) {
  if (!(L > 0.0)) throw UsageError("comb check requires L > 0");
  const CombProfile prof = comb_profile(field, theta, M, opts);
  CombCheck out;
  out.eta = relative_density_1d(prof, L);
  out.pass = out.eta > floor;
  out.profile_min = *std::min_element(prof.values.begin(), prof.values.end());
  return out;
}

double directional_gcc(const ObservationField& field, const Direction& theta, double M,
                       const CombOptions& opts) {
  const CombProfile prof = comb_profile(field, theta, M, opts);
  return *std::min_element(prof.values.begin(), prof.values.end());
}

double lipschitz_bound(const ObservationField& field) {
  const std::size_t nx = field.axis(0).n, ny = field.axis(1).n;
  double best = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double v = field.at(ix, iy);
      best = std::max(best, std::abs(field.at((ix + 1) % nx, iy) - v) / field.axis(0).spacing());
      if (field.dim() == 2) {
        best = std::max(best, std::abs(field.at(ix, (iy + 1) % ny) - v) / field.axis(1).spacing());
      }
    }
  }
  return field.dim() == 2 ? std::sqrt(2.0) * best : best;
}

double lipschitz_bound(const CombProfile& profile) {
  const auto& v = profile.values;
  double best = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i + 1 < n; ++i) best = std::max(best, std::abs(v[i + 1] - v[i]));
  if (profile.periodic && n > 1) best = std::max(best, std::abs(v[0] - v[n - 1]));
  return best / profile.dx;
}

}  // namespace gcclab::geometry
