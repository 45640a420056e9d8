#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gcclab/field.hpp"

namespace gcclab::construct {

// Bump template: quintic-smoothstep plateau, flat on the middle half of I.
inline constexpr double kBumpMass = 0.75;  // c1: integral of b_I over |I|
inline constexpr double kBumpDerivative = 16.0;  // c2: |d^m b_I| <= c2^m |I|^-m, m <= 3

double bump(double y, double centre, double half_width);
// Integral of the bump over (-inf, y].
double bump_cdf(double y, double centre, double half_width);

// Piecewise-constant function: values[i] on [x0 + i h, x0 + (i+1) h).
struct Sampled1D {
  double x0 = 0.0;
  double h = 1.0;
  std::vector<double> values;

  double end() const { return x0 + h * static_cast<double>(values.size()); }
  // Exact integral over [a, b] within [x0, end()].
  double integral(double a, double b) const;
  double sup_norm() const;
};

// Disjoint open balls (c - delta, c + delta) on the raw interval [lo, hi].
struct BallSystem {
  std::vector<double> centres;  // increasing
  double delta = 0.1;
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double y) const;
  // Measure of Y within [a, b].
  double measure(double a, double b) const;
};

struct AlmostPeriodicPartition {
  std::vector<double> breakpoints;  // s_0 < ... < s_K; the working circle is [s_0, s_K)
  double rho = 0.0;                 // mean of the attached function (0 when none)
  double max_gap = 0.0;
  double min_gap = 0.0;
  double max_cell_deviation = 0.0;  // max |cell average - rho|

  double circumference() const { return breakpoints.back() - breakpoints.front(); }
};

AlmostPeriodicPartition build_partition(const BallSystem& Y, double M);
AlmostPeriodicPartition build_partition(const Sampled1D& b, const BallSystem& Y, double M);
// Partition with prescribed breakpoints (e.g. grid-aligned cells) and attached function.
AlmostPeriodicPartition attach(const Sampled1D& b, std::vector<double> breakpoints);

struct TransferFunction {
  Sampled1D b_grid;               // grid of the source function
  std::vector<double> nodes;      // B at grid nodes x0 + i h, i = 0..n
  std::vector<double> at_breaks;  // B(s_k)
  double max_abs = 0.0;           // over nodes inside the working circle
  double max_dev_from_start = 0.0;  // max |B(y) - B(s_0)| over the same nodes
  double bound = 0.0;             // 4 M ||b||_inf
  double sharp_bound = 0.0;       // 2 M ||b||_inf
  double break_spread = 0.0;      // max_k |B(s_k) - B(s_0)|
};

TransferFunction transfer_function(const Sampled1D& b, double rho,
                                   const AlmostPeriodicPartition& partition, double tol = 1e-10);

struct SmoothMinorant {
  Sampled1D a;                  // exact cell averages on the working circle
  double eta = 0.0;
  BallSystem Y;
  AlmostPeriodicPartition partition;
  std::vector<double> t;        // scaling per partition cell
  std::vector<std::array<double, 2>> bumps;  // (centre, half-width), sorted by centre
  std::vector<double> bump_prefix;           // total mass of bumps before index j

  // Exact integral of the continuous minorant over [u, v] on the circle.
  double integral(double u, double v) const;
};

SmoothMinorant smooth_minorant(const BallSystem& Y, double M, double rho, double delta,
                               double grid_step = 0.0);

struct MinorantChecks {
  bool support_ok = false;
  double min_t = 0.0, max_t = 0.0;
  double eta = 0.0;
  double cell_deviation = 0.0;     // max |cell average - eta|
  double density_2M = 0.0;         // min window average over length 2M
  std::array<double, 3> deriv{};   // max |finite difference| of order 1..3
  std::array<double, 3> deriv_bound{};
  double transfer_max = 0.0;       // max |A / M|
  std::array<double, 3> transfer_deriv{};
  std::array<double, 3> transfer_deriv_bound{};
};

MinorantChecks check_minorant(const SmoothMinorant& sm, double M, double rho, double delta);

// Minimum (over the circle) measure fraction of Y in windows of length M, with the
// anchor that attains it.
std::pair<double, double> ball_density(const BallSystem& Y, double circle_lo, double circle_hi,
                                       double M);

// Random (M, rho)-relatively dense ball system of radius delta on [0, length].
BallSystem random_ball_system(std::mt19937_64& rng, double M, double rho, double delta,
                              double length);

// 1D observation field built from a sampled minorant (periodic on its circle).
ObservationField to_field(const Sampled1D& s, const std::string& label);

}  // namespace gcclab::construct
