#include "gcclab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>

#include "gcclab/error.hpp"

namespace gcclab::covering {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

long sgn(long v) { return v < 0 ? -1 : 1; }

// Extended Euclid: returns (x, y) with x*p + y*q = gcd(p, q).
std::pair<long, long> ext_gcd(long p, long q) {
  long old_r = p, r = q, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const long quo = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - quo * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - quo * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - quo * t);
  }
  return {old_s, old_t};
}

long ceil_div(long a, long b) {  // b > 0
  long q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

}  // namespace

double RationalDirection::T() const {
  return std::hypot(static_cast<double>(P), static_cast<double>(Q));
}

geometry::Direction RationalDirection::direction() const {
  return geometry::Direction::from_vector(static_cast<double>(P), static_cast<double>(Q));
}

BezoutPair bezout_bounded(long P, long Q, long n) {
  const long p = std::labs(P), q = std::labs(Q);
  if (p == 0 || q == 0 || std::gcd(p, q) != 1) {
    throw UsageError("bezout_bounded requires gcd(|P|,|Q|) = 1 with P, Q non-zero");
  }
  if (n < 1 || n > p * q) {
    throw UsageError("bezout_bounded requires 1 <= n <= |PQ| (got n = " + std::to_string(n) + ")");
  }
  auto [a, b] = ext_gcd(p, q);
  if (a <= 0) {  // move to the solution with a > 0
    const long k = (-a) / q + 1;
    a += k * q;
    b -= k * p;
  }
  const long k = ceil_div(n * a, q);
  long a2 = n * a - k * q;  // in [-q, 0]
  long b2 = n * b + k * p;  // in [n/q, n/q + p]
  if (b2 > p) {             // one step back keeps |a| <= q and lands b in (-p, p)
    a2 += q;
    b2 -= p;
  }
  return {a2 * sgn(P), b2 * sgn(Q)};
}

double angular_distance(const geometry::Direction& a, const geometry::Direction& b) {
  const double cross = a.x * b.y - a.y * b.x;
  const double dot = a.x * b.x + a.y * b.y;
  return std::abs(std::atan2(cross, dot));
}

RationalDirection dirichlet_direction(const geometry::Direction& phi, double lambda, double gamma) {
  if (!(lambda >= 1.0)) throw UsageError("dirichlet_direction requires lambda >= 1");
  if (!(gamma > 0.0 && gamma < 0.5)) throw UsageError("gamma must lie in (0, 1/2)");
  const long cap = std::max(1L, static_cast<long>(std::floor(std::pow(lambda, gamma) + 1e-12)));
  const double u = std::abs(phi.x), v = std::abs(phi.y);
  const bool swap = v > u;
  const double alpha = swap ? u / v : v / u;  // in [0, 1]
  // convergents h/k of alpha with k <= cap
  long h_prev = 0, h = 1, k_prev = 1, k = 0;
  long best_h = 0, best_k = 1;
  double x = alpha;
  double a = std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    const long ai = static_cast<long>(a);
    const long hn = ai * h + h_prev, kn = ai * k + k_prev;
    if (kn > cap) break;
    h_prev = h; h = hn; k_prev = k; k = kn;
    best_h = h; best_k = k;
    if (std::abs(alpha * static_cast<double>(k) - static_cast<double>(h)) < 1e-12) break;
    const double r = x - a;
    if (r < 1e-15) break;
    x = 1.0 / r;
    a = std::floor(x);
  }
  long big = best_k, small = best_h;
  if (small == 0) big = 1;
  RationalDirection out;
  const double sx = phi.x < 0 ? -1.0 : 1.0, sy = phi.y < 0 ? -1.0 : 1.0;
  if (!swap) {
    out.P = static_cast<long>(sx) * big;
    out.Q = static_cast<long>(sy) * small;
  } else {
    out.P = static_cast<long>(sx) * small;
    out.Q = static_cast<long>(sy) * big;
  }
  return out;
}

double arc_half_width(double eps) {
  if (eps >= 2.0) return std::numbers::pi;
  return 2.0 * std::asin(eps / 2.0);
}

double periodic_lambda0(double rho, double gamma) { return std::pow(20.0 / rho, 1.0 / gamma); }

EffectiveCovering periodic_effective_covering(double delta_level, double rho, double lambda,
                                              double gamma) {
  if (!(delta_level > 0.0 && delta_level < 1.0)) throw UsageError("delta_level must lie in (0,1)");
  if (!(rho > 0.0)) throw UsageError("rho must be positive");
  if (!(gamma > 0.0 && gamma < 0.5)) throw UsageError("gamma must lie in (0, 1/2)");
  const double lam0 = periodic_lambda0(rho, gamma);
  if (lambda < lam0) {
    throw UsageError("periodic covering requires lambda >= lambda0 = " + std::to_string(lam0) +
                     " for rho = " + std::to_string(rho));
  }
  EffectiveCovering cov;
  cov.kind = "periodic";
  cov.rho = rho;
  cov.lambda = lambda;
  cov.gamma = gamma;
  cov.delta_level = delta_level;
  const double lg = std::pow(lambda, gamma);
  const double tmax = 2.0 * lg;
  const long r = static_cast<long>(std::floor(tmax));
  const double t0 = 1.0 / delta_level;
  for (long P = -r; P <= r; ++P) {
    for (long Q = -r; Q <= r; ++Q) {
      if (P == 0 && Q == 0) continue;
      if (std::gcd(std::labs(P), std::labs(Q)) != 1) continue;
      const double T = std::hypot(static_cast<double>(P), static_cast<double>(Q));
      if (T > tmax * (1.0 + 1e-12)) continue;
      CoveringEntry e;
      e.rational = RationalDirection{P, Q};
      e.theta = e.rational->direction();
      e.eps = 4.0 / (lg * T);
      if (T >= t0) {
        e.M = T + 2.0;
        e.certificate = CertificateKind::gcc;
      } else if (T == 1.0) {
        // axis directions: product-type argument gives a (1, 1, delta^2) comb certificate
        e.M = 1.0;
        e.certificate = CertificateKind::comb;
        e.comb_L = 1.0;
      } else {
        e.M = 2.0 * T + 4.0;
        e.certificate = CertificateKind::comb;
        e.comb_L = 1.0 / T;
      }
      cov.entries.push_back(e);
    }
  }
  std::sort(cov.entries.begin(), cov.entries.end(), [](const CoveringEntry& a, const CoveringEntry& b) {
    const double ta = a.rational->T(), tb = b.rational->T();
    if (ta != tb) return ta < tb;
    return a.theta.angle < b.theta.angle;
  });
  return cov;
}

double product_lambda0(double M, double L_diag, double rho) {
  return 8.0 * std::max(L_diag, M) / (rho * rho);
}

EffectiveCovering product_effective_covering(double M, double L_diag, double rho, double lambda) {
  if (!(M > 0.0 && L_diag > 0.0)) throw UsageError("product covering needs M > 0 and L_diag > 0");
  if (!(rho > 0.0)) throw UsageError("rho must be positive");
  const double lam0 = product_lambda0(M, L_diag, rho);
  if (lambda < lam0) {
    throw UsageError("product covering requires lambda >= lambda0 = " + std::to_string(lam0));
  }
  EffectiveCovering cov;
  cov.kind = "product";
  cov.rho = rho;
  cov.lambda = lambda;
  cov.product_M = M;
  cov.product_L_diag = L_diag;
  const double eps1 = rho / (4.0 * M), eps2 = rho / (4.0 * L_diag);
  for (auto [P, Q] : {std::pair{1L, 0L}, {0L, 1L}, {-1L, 0L}, {0L, -1L}}) {
    CoveringEntry e;
    e.rational = RationalDirection{P, Q};
    e.theta = e.rational->direction();
    e.eps = eps1;
    e.M = M;
    e.certificate = CertificateKind::comb;
    e.comb_L = M;
    cov.entries.push_back(e);
  }
  if (eps1 / 2.0 <= std::sqrt(0.5)) {
    const double lo = std::asin(eps1 / 2.0);
    const double span = std::numbers::pi / 2.0 - 2.0 * lo;
    const auto count = static_cast<std::size_t>(std::ceil(span / eps2)) + 1;
    for (int quad = 0; quad < 4; ++quad) {
      for (std::size_t i = 0; i < count; ++i) {
        const double ang = quad * std::numbers::pi / 2.0 + lo +
                           (count > 1 ? span * static_cast<double>(i) / static_cast<double>(count - 1) : 0.5 * span);
        CoveringEntry e;
        e.theta = geometry::Direction::from_angle(ang);
        e.eps = eps2;
        e.M = L_diag;
        e.certificate = CertificateKind::gcc;
        cov.entries.push_back(e);
      }
    }
  }
  return cov;
}

CoverReport verify_covering(const EffectiveCovering& cov) {
  CoverReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<Interval> arcs;
  bool full = false;
  for (std::size_t i = 0; i < cov.entries.size(); ++i) {
    const auto& e = cov.entries[i];
    const double margin = cov.rho - (e.eps * e.M + 1.0 / (e.eps * cov.lambda));
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_entry = i;
    }
    const double w = arc_half_width(e.eps);
    if (w >= std::numbers::pi) {
      full = true;
      continue;
    }
    double lo = std::fmod(e.theta.angle - w, kTwoPi);
    if (lo < 0.0) lo += kTwoPi;
    const double hi = lo + 2.0 * w;
    if (hi > kTwoPi) {
      arcs.push_back({lo, kTwoPi});
      arcs.push_back({0.0, hi - kTwoPi});
    } else {
      arcs.push_back({lo, hi});
    }
  }
  rep.budget_ok = !cov.entries.empty() && rep.worst_margin > 0.0;
  if (full) {
    rep.covers = true;
    return rep;
  }
  std::sort(arcs.begin(), arcs.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  constexpr double tol = 1e-12;
  double reach = 0.0;
  for (const auto& a : arcs) {
    if (a.lo > reach + tol) {
      rep.gap = Interval{reach, a.lo};
      rep.covers = false;
      return rep;
    }
    reach = std::max(reach, a.hi);
  }
  if (reach < kTwoPi - tol) {
    rep.gap = Interval{reach, kTwoPi};
    rep.covers = false;
    return rep;
  }
  rep.covers = true;
  return rep;
}

double product_diagonal_length(double delta1, double delta2, double eps) {
  const double s = delta1 + delta2;
  if (!(s > 1.0)) throw UsageError("product GCC needs delta1 + delta2 > 1");
  const double alpha = (s + 1.0) / (2.0 * s);
  return 1.0 / ((1.0 - alpha) * eps);
}

namespace {

double measure_of(const std::vector<Interval>& set) {
  double m = 0.0;
  for (const auto& iv : set) m += iv.hi - iv.lo;
  return m;
}

struct FamilyPlan {
  std::string covering;  // periodic | product
  double delta = 0.0;    // periodic certificates
  double d1 = 0.0, d2 = 0.0;
  double level = 1.0;    // constant field
  bool constant = false;
};

FamilyPlan plan_for(const ObservationField& field, const CertifyOptions& opts) {
  FamilyPlan plan;
  const auto& fam = field.family();
  switch (fam.kind) {
    case FamilyKind::constant:
      plan.covering = "periodic";
      plan.constant = true;
      plan.level = fam.level;
      plan.delta = opts.delta_level > 0.0 ? opts.delta_level : 0.5;
      break;
    case FamilyKind::periodic_square:
      plan.covering = "periodic";
      plan.delta = opts.delta_level > 0.0 ? opts.delta_level : fam.delta;
      break;
    case FamilyKind::half_strip_comb:
      plan.covering = "periodic";
      plan.delta = opts.delta_level > 0.0 ? opts.delta_level : 0.5;
      break;
    case FamilyKind::product:
      plan.covering = "product";
      plan.d1 = measure_of(fam.e_set);
      plan.d2 = measure_of(fam.f_set);
      break;
    default:
      throw UsageError("comb_gcc_certify does not support family '" + family_name(fam.kind) +
                       "'; build an EffectiveCovering for it and validate entries with "
                       "geometry::comb_gcc_check / geometry::directional_gcc instead");
  }
  if (field.dim() != 2) throw UsageError("comb_gcc_certify expects a two-dimensional field");
  return plan;
}

double floor_for(const FamilyPlan& plan, const CoveringEntry& e, double safety) {
  if (plan.constant) return safety * plan.level;
  if (plan.covering == "product") {
    return e.certificate == CertificateKind::comb ? safety * plan.d1 * plan.d2
                                                  : safety * (plan.d1 + plan.d2 - 1.0) / 2.0;
  }
  const double d = plan.delta, T = e.rational->T();
  if (T == 1.0) return safety * d * d;
  // the GCC bound is on the integral over length T+2; compare averages
  return e.certificate == CertificateKind::gcc ? safety * d * d * T / (2.0 * (T + 2.0))
                                               : safety * T * d * d / (2.0 * T + 4.0);
}

double measure_entry(const ObservationField& field, const CoveringEntry& e, bool use_rational) {
  geometry::CombOptions opts;
  if (use_rational && e.rational) {
    opts.rational = std::array<long, 2>{e.rational->P, e.rational->Q};
  } else if (field.fully_periodic()) {
    opts.search_extent = e.M;
    opts.x_extent = field.axis(0).extent;
    opts.x_samples = 2;
  } else {
    // truncated box: largest region along theta whose corners stay in the usable box
    const Point n = e.theta.normal();
    const double nc[2] = {n.x, n.y}, tc[2] = {e.theta.x, e.theta.y};
    double X = INFINITY;
    for (int a = 0; a < 2; ++a) {
      if (field.axis(a).periodic) X = std::min(X, field.axis(a).extent);
    }
    if (!std::isfinite(X)) X = 0.5 * (field.usable(0).hi - field.usable(0).lo);
    double Y = e.M + 64.0;
    for (int a = 0; a < 2; ++a) {
      if (field.axis(a).periodic) continue;
      const Interval u = field.usable(a);
      const double room = (u.hi - u.lo) - X * std::abs(nc[a]) - 1e-9;
      if (room <= 0.0) throw UsageError("usable box too small for the comb search");
      if (std::abs(tc[a]) > 1e-12) Y = std::min(Y, room / std::abs(tc[a]));
    }
    if (Y <= e.M) throw UsageError("usable box shorter than the window M = " + std::to_string(e.M));
    opts.search_extent = Y - e.M;
    opts.x_extent = X;
  }
  if (e.certificate == CertificateKind::comb) {
    return geometry::comb_gcc_check(field, e.theta, e.M, e.comb_L, opts).eta;
  }
  return geometry::directional_gcc(field, e.theta, e.M, opts);
}

}  // namespace

CertifyReport comb_gcc_certify(const ObservationField& field, double rho,
                               const std::vector<double>& lambdas, const CertifyOptions& opts) {
  const FamilyPlan plan = plan_for(field, opts);
  const bool rational_ok = field.fully_periodic() && field.axis(0).extent == field.axis(1).extent;
  CertifyReport rep;
  rep.family = family_name(field.family().kind);
  rep.pass = true;
  std::map<std::tuple<double, double, int, double>, double> memo;
  for (double lam : lambdas) {
    LambdaResult lr;
    lr.lambda = lam;
    if (plan.covering == "periodic") {
      lr.covering = periodic_effective_covering(plan.delta, rho, lam, opts.gamma);
    } else {
      const double M = 1.0;
      const double L = product_diagonal_length(plan.d1, plan.d2, rho / (8.0 * M));
      lr.covering = product_effective_covering(M, L, rho, lam);
    }
    lr.cover_report = verify_covering(lr.covering);
    lr.all_pass = lr.cover_report.covers && lr.cover_report.budget_ok;
    for (std::size_t i = 0; i < lr.covering.entries.size(); ++i) {
      const auto& e = lr.covering.entries[i];
      EntryResult er;
      er.index = i;
      er.entry = e;
      er.floor = floor_for(plan, e, opts.safety);
      const auto key = std::make_tuple(e.theta.angle, e.M, static_cast<int>(e.certificate), e.comb_L);
      if (auto it = memo.find(key); it != memo.end()) {
        er.measured = it->second;
      } else {
        er.measured = measure_entry(field, e, rational_ok);
        memo.emplace(key, er.measured);
      }
      er.pass = er.measured >= er.floor && er.measured > 0.0;
      if (!er.pass && opts.probe_neighbors) {
        bool any = false;
        const std::size_t k = std::max<std::size_t>(2, opts.neighbor_count);
        for (std::size_t j = 0; j < k; ++j) {
          const double off = opts.neighbor_radius / e.M * (2.0 * static_cast<double>(j) / static_cast<double>(k - 1) - 1.0);
          CoveringEntry probe = e;
          probe.theta = geometry::Direction::from_angle(e.theta.angle + off);
          probe.rational.reset();
          if (measure_entry(field, probe, false) >= er.floor) any = true;
        }
        er.neighbor_pass = any;
      }
      lr.all_pass = lr.all_pass && er.pass;
      lr.entries.push_back(er);
      if (!er.pass && opts.fail_fast) break;
    }
    rep.pass = rep.pass && lr.all_pass;
    rep.results.push_back(std::move(lr));
    if (!rep.pass && opts.fail_fast) break;
  }
  return rep;
}

}  // namespace gcclab::covering
