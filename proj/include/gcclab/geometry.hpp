#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "gcclab/field.hpp"

namespace gcclab::geometry {

// Unit direction; in one dimension only angles 0 and pi are meaningful.
struct Direction {
  double angle = 0.0;  // in [0, 2pi)
  double x = 1.0;
  double y = 0.0;

  static Direction from_angle(double angle);
  static Direction from_vector(double x, double y);
  // Image of e1 under the rotation taking e2 to this direction.
  Point normal() const { return {y, -x}; }
};

struct LineSegment {
  Point start;
  Direction dir;
  double length = 1.0;
};

// Member of the rectangle family: side s across theta, side t along theta.
struct RectangleSpec {
  Direction theta;
  Point anchor;  // corner: points are anchor + u*normal + v*theta, u in [0,s], v in [0,t]
  double L = 1.0;
  double lambda = 1.0;
  double beta = 0.0;

  double s() const;
  double t() const;
  Point center() const;
};

// Sampled comb profile x -> inf_t (1/M) int_t^{t+M} a(base + x*normal + y*theta) dy.
struct CombProfile {
  Direction theta;
  double M = 1.0;
  Point base;
  double x0 = 0.0;  // transverse coordinate of the first sample
  double dx = 1.0;
  bool periodic = false;
  std::vector<double> values;
  std::size_t window_cells = 0;  // samples per line used in the window search
};

double line_average(const ObservationField& field, const LineSegment& seg, std::size_t n_samples);

struct GccSearch {
  std::size_t directions = 32;
  std::size_t anchors = 16;           // per axis
  double samples_per_unit = 0.0;      // 0: two samples per grid step
  std::vector<Interval> arcs;         // admissible angle ranges; empty: whole circle
  bool refine = true;
};

struct GccResult {
  double value = 1.0;
  LineSegment argmin;
  std::size_t evaluations = 0;
};

GccResult gcc_constant(const ObservationField& field, double L, const GccSearch& search = {});

// Angle ranges of directions with min(|cos|,|sin|) >= m.
std::vector<Interval> off_axis_arcs(double m);

double rectangle_density(const ObservationField& field, const RectangleSpec& rect,
                         double spacing = 0.0);

struct RectSearch {
  std::vector<double> lambdas{1.0};
  std::size_t directions = 16;
  std::size_t anchors = 8;  // per axis
  double spacing = 0.0;     // quadrature step; 0: two grid steps
};

struct RectResult {
  double value = 1.0;
  RectangleSpec argmin;
  std::size_t count = 0;
};

RectResult rectangle_density_inf(const ObservationField& field, double beta, double L,
                                 const RectSearch& search = {});

struct CombOptions {
  // Exact rational slope (P, Q) of theta relative to a square period: the lifted
  // function is then periodic and the window search runs over one full period.
  std::optional<std::array<long, 2>> rational;
  double search_extent = 0.0;   // extra line length beyond one window (non-rational case)
  double x_extent = 0.0;        // transverse range; 0 picks one period / the usable box
  std::size_t x_samples = 0;    // 0: one per grid step
  double y_spacing = 0.0;       // 0: one grid step
  std::optional<Point> center;  // centre of the sampled region (non-rational case)
};

CombProfile comb_profile(const ObservationField& field, const Direction& theta, double M,
                         const CombOptions& opts = {});

// Inf over window anchors of length-L window averages (piecewise-constant samples).
double relative_density_1d(const CombProfile& profile, double L);
double relative_density_1d(const ObservationField& field_1d, double L);

struct CombCheck {
  double eta = 0.0;
  bool pass = false;
  double profile_min = 0.0;
};

CombCheck comb_gcc_check(const ObservationField& field, const Direction& theta, double M, double L,
                         const CombOptions& opts = {}, double floor = 1e-3);

// Minimum over the sampled profile: the GCC constant restricted to direction theta at length M.
double directional_gcc(const ObservationField& field, const Direction& theta, double M,
                       const CombOptions& opts = {});

// Minimum over start cells of the average of a piecewise-constant signal over `w` cells.
double min_window_average(const std::vector<double>& g, double w, bool periodic,
                          std::size_t* argmin = nullptr);

// Largest |difference| / distance between neighbouring samples, scaled to bound the
// gradient of the bilinear interpolant.
double lipschitz_bound(const ObservationField& field);
double lipschitz_bound(const CombProfile& profile);

}  // namespace gcclab::geometry
