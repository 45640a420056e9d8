#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gcclab/kernels.hpp"

namespace gcclab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class FamilyKind { constant, periodic_square, product, e_beta, half_strip_comb, custom_grid };

std::string family_name(FamilyKind kind);
FamilyKind family_from_name(const std::string& name);

// Analytic description of how a field was produced.
struct FamilyDescriptor {
  FamilyKind kind = FamilyKind::constant;
  double level = 1.0;               // constant
  double delta = 0.0;               // periodic-square side
  std::vector<Interval> e_set;      // product, first axis, within one period
  std::vector<Interval> f_set;      // product, second axis
  double beta = 0.5;                // e-beta
  std::string label;                // custom-grid provenance
};

// One axis of the sampling grid. Truncated axes are periodized windows of a
// non-periodic set; sweeps keep `margin` away from their ends.
struct Axis {
  double origin = 0.0;
  double extent = 1.0;
  std::size_t n = 64;
  bool periodic = true;

  double spacing() const { return extent / static_cast<double>(n); }
  double node(std::size_t i) const { return origin + spacing() * static_cast<double>(i); }
};

class ObservationField {
 public:
  ObservationField() = default;
  ObservationField(int dim, std::array<Axis, 2> axes, std::vector<double> values,
                   FamilyDescriptor family, double modulus = 0.0, double margin = 0.0);

  int dim() const { return dim_; }
  const Axis& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }
  const FamilyDescriptor& family() const { return family_; }
  double modulus() const { return modulus_; }
  double margin() const { return margin_; }
  bool fully_periodic() const;
  bool is_indicator_family() const;
  std::size_t size() const { return values_.size(); }
  double at(std::size_t ix, std::size_t iy = 0) const { return values_[iy * axes_[0].n + ix]; }

  // Bilinear interpolation with periodic wrap; exact at grid nodes.
  double evaluate(Point p) const;
  kernels::GridView view() const;

  // Axis-aligned region where sweeps may place segments and rectangles.
  Interval usable(int axis) const;

 private:
  int dim_ = 1;
  std::array<Axis, 2> axes_{};
  std::vector<double> values_;
  FamilyDescriptor family_;
  double modulus_ = 0.0;
  double margin_ = 0.0;
};

// Builders for the built-in families. `n` is the per-axis sample count.
ObservationField make_constant(int dim, double level, double period, std::size_t n);
ObservationField make_periodic_square(int dim, double delta, double period, std::size_t n);
ObservationField make_product(std::vector<Interval> e_set, std::vector<Interval> f_set,
                              double period, std::size_t n);
ObservationField make_e_beta(double beta, double box_half_width, std::size_t n, double margin);
ObservationField make_half_strip_comb(double box_half_height, std::size_t nx, std::size_t ny,
                                      double margin);
ObservationField make_custom(int dim, std::array<Axis, 2> axes,
                             const std::function<double(Point)>& fn, std::string label,
                             double margin = 0.0);

// Average over balls of radius r (periodic convolution on the grid), clipped to [0,1].
ObservationField mollify(const ObservationField& field, double radius);

// Threshold to the level set {a >= eps}.
ObservationField level_set(const ObservationField& field, double eps);

// Raw grid files: 8-byte magic "GCLGRID1", uint32 dim, uint32 N, float64 period,
// then N^dim little-endian float64 samples, row-major (x fastest).
void write_grid_file(const std::string& path, const ObservationField& field);
ObservationField read_grid_file(const std::string& path);

}  // namespace gcclab
