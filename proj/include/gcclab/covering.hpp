#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gcclab/geometry.hpp"

namespace gcclab::covering {

struct RationalDirection {
  long P = 1;
  long Q = 0;

  double T() const;
  geometry::Direction direction() const;
};

struct BezoutPair {
  long a = 0;
  long b = 0;
};

// aP + bQ = n with |a| <= |Q| and |b| <= |P|.
BezoutPair bezout_bounded(long P, long Q, long n);

// Rational direction (P,Q)/T with T <= 2 lambda^gamma within 2/(lambda^gamma T) of phi,
// from continued-fraction convergents of the slope (after swapping so |slope| <= 1).
RationalDirection dirichlet_direction(const geometry::Direction& phi, double lambda,
                                      double gamma = 0.25);

// Angle between two directions, in [0, pi].
double angular_distance(const geometry::Direction& a, const geometry::Direction& b);

enum class CertificateKind { gcc, comb };

struct CoveringEntry {
  geometry::Direction theta;
  std::optional<RationalDirection> rational;
  double eps = 0.0;  // chord half-width of the arc |phi - theta| <= eps
  double M = 1.0;    // window length M_theta
  CertificateKind certificate = CertificateKind::gcc;
  double comb_L = 0.0;  // comb certificates only
};

struct EffectiveCovering {
  std::string kind;  // "periodic" | "product" | "custom"
  double rho = 1.0;
  double lambda = 1.0;
  double gamma = 0.25;
  double delta_level = 0.0;       // periodic
  double product_M = 0.0;         // product
  double product_L_diag = 0.0;    // product
  std::vector<CoveringEntry> entries;
};

double periodic_lambda0(double rho, double gamma = 0.25);
EffectiveCovering periodic_effective_covering(double delta_level, double rho, double lambda,
                                              double gamma = 0.25);

double product_lambda0(double M, double L_diag, double rho);
EffectiveCovering product_effective_covering(double M, double L_diag, double rho, double lambda);

struct CoverReport {
  bool covers = false;
  bool budget_ok = false;
  std::size_t worst_entry = 0;
  double worst_margin = 0.0;          // rho - (eps M + 1/(eps lambda)) at the worst entry
  std::optional<Interval> gap;        // first uncovered angle range
};

CoverReport verify_covering(const EffectiveCovering& cov);

// Angular half-width of the arc of chord radius eps.
double arc_half_width(double eps);

// ---- certification ------------------------------------------------------

struct EntryResult {
  std::size_t index = 0;
  CoveringEntry entry;
  double measured = 0.0;
  double floor = 0.0;
  bool pass = false;
  std::optional<bool> neighbor_pass;  // set for failed entries when probed
};

struct LambdaResult {
  double lambda = 0.0;
  EffectiveCovering covering;
  CoverReport cover_report;
  std::vector<EntryResult> entries;
  bool all_pass = false;
};

struct CertifyOptions {
  double gamma = 0.25;
  double safety = 0.9;
  bool fail_fast = false;
  bool probe_neighbors = true;
  std::size_t neighbor_count = 9;
  double neighbor_radius = 0.25;  // probed angles within neighbor_radius / M of a failed entry
  double delta_level = 0.0;       // override the family's certified square side
};

struct CertifyReport {
  std::string family;
  std::vector<LambdaResult> results;
  bool pass = false;
};

CertifyReport comb_gcc_certify(const ObservationField& field, double rho,
                               const std::vector<double>& lambdas, const CertifyOptions& opts = {});

// Product-set diagonal length L = 1/((1 - alpha) eps), alpha = (d1+d2+1)/(2(d1+d2)).
double product_diagonal_length(double delta1, double delta2, double eps);

}  // namespace gcclab::covering
