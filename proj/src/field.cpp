#include "gcclab/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "gcclab/error.hpp"
#include "gcclab/fft.hpp"

namespace gcclab {

namespace {

double frac(double x) { return x - std::floor(x); }

bool in_any(double u, const std::vector<Interval>& set) {
  return std::any_of(set.begin(), set.end(),
                     [u](const Interval& iv) { return u >= iv.lo && u <= iv.hi; });
}

Axis periodic_axis(double period, std::size_t n) { return Axis{0.0, period, n, true}; }

void check_n(std::size_t n) {
  if (n < 2) throw UsageError("grid sample count must be at least 2");
}

}  // namespace

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::constant: return "constant";
    case FamilyKind::periodic_square: return "periodic-square";
    case FamilyKind::product: return "product";
    case FamilyKind::e_beta: return "e-beta";
    case FamilyKind::half_strip_comb: return "half-strip-comb";
    case FamilyKind::custom_grid: return "custom-grid";
  }
  return "unknown";
}

FamilyKind family_from_name(const std::string& name) {
  for (auto k : {FamilyKind::constant, FamilyKind::periodic_square, FamilyKind::product,
                 FamilyKind::e_beta, FamilyKind::half_strip_comb, FamilyKind::custom_grid}) {
    if (family_name(k) == name) return k;
  }
  throw UsageError("unknown field family '" + name +
                   "' (expected constant, periodic-square, product, e-beta, half-strip-comb or "
                   "custom-grid)");
}

ObservationField::ObservationField(int dim, std::array<Axis, 2> axes, std::vector<double> values,
                                   FamilyDescriptor family, double modulus, double margin)
    : dim_(dim), axes_(axes), values_(std::move(values)), family_(std::move(family)),
      modulus_(modulus), margin_(margin) {
  if (dim_ != 1 && dim_ != 2) throw UsageError("field dimension must be 1 or 2");
  if (dim_ == 1) axes_[1] = Axis{0.0, 1.0, 1, true};
  for (int i = 0; i < dim_; ++i) {
    check_n(axes_[i].n);
    if (!(axes_[i].extent > 0.0)) throw UsageError("field period must be positive");
  }
  if (values_.size() != axes_[0].n * axes_[1].n) throw UsageError("field sample count mismatch");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw UsageError("field samples must lie in [0,1]");
  }
}

bool ObservationField::fully_periodic() const {
  return axes_[0].periodic && (dim_ == 1 || axes_[1].periodic);
}

bool ObservationField::is_indicator_family() const {
  switch (family_.kind) {
    case FamilyKind::periodic_square:
    case FamilyKind::product:
    case FamilyKind::e_beta:
    case FamilyKind::half_strip_comb:
      return true;
    default:
      return false;
  }
}

kernels::GridView ObservationField::view() const {
  return kernels::GridView{values_.data(),      axes_[0].n,           axes_[1].n,
                           axes_[0].origin,     axes_[1].origin,      axes_[0].spacing(),
                           axes_[1].spacing()};
}

double ObservationField::evaluate(Point p) const {
  double out;
  kernels::scalar::sample_line(view(), p.x, p.y, 0.0, 0.0, 1, &out);
  return out;
}

Interval ObservationField::usable(int axis) const {
  const Axis& a = axes_[static_cast<std::size_t>(axis)];
  if (a.periodic) return {a.origin, a.origin + a.extent};
  return {a.origin + margin_, a.origin + a.extent - margin_};
}

ObservationField make_custom(int dim, std::array<Axis, 2> axes,
                             const std::function<double(Point)>& fn, std::string label,
                             double margin) {
  if (dim == 1) axes[1] = Axis{0.0, 1.0, 1, true};
  check_n(axes[0].n);
  std::vector<double> v(axes[0].n * axes[1].n);
  for (std::size_t iy = 0; iy < axes[1].n; ++iy) {
    for (std::size_t ix = 0; ix < axes[0].n; ++ix) {
      const Point p{axes[0].node(ix), dim == 2 ? axes[1].node(iy) : 0.0};
      v[iy * axes[0].n + ix] = std::clamp(fn(p), 0.0, 1.0);
    }
  }
  FamilyDescriptor fam;
  fam.kind = FamilyKind::custom_grid;
  fam.label = std::move(label);
  return ObservationField(dim, axes, std::move(v), fam, 0.0, margin);
}

namespace {

ObservationField sample_family(int dim, std::array<Axis, 2> axes, FamilyDescriptor fam,
                               const std::function<double(Point)>& fn, double margin = 0.0) {
  ObservationField f = make_custom(dim, axes, fn, "", margin);
  return ObservationField(dim, axes, f.values(), std::move(fam), 0.0, margin);
}

}  // namespace

ObservationField make_constant(int dim, double level, double period, std::size_t n) {
  if (!(level >= 0.0 && level <= 1.0)) throw UsageError("constant level must lie in [0,1]");
  FamilyDescriptor fam;
  fam.kind = FamilyKind::constant;
  fam.level = level;
  return sample_family(dim, {periodic_axis(period, n), periodic_axis(period, n)}, fam,
                       [level](Point) { return level; });
}

ObservationField make_periodic_square(int dim, double delta, double period, std::size_t n) {
  if (!(delta > 0.0 && delta < 1.0)) throw UsageError("periodic-square side must lie in (0,1)");
  FamilyDescriptor fam;
  fam.kind = FamilyKind::periodic_square;
  fam.delta = delta;
  return sample_family(dim, {periodic_axis(period, n), periodic_axis(period, n)}, fam,
                       [delta, dim](Point p) {
                         const bool in_x = frac(p.x) <= delta;
                         const bool in_y = dim == 1 || frac(p.y) <= delta;
                         return (in_x && in_y) ? 1.0 : 0.0;
                       });
}

ObservationField make_product(std::vector<Interval> e_set, std::vector<Interval> f_set,
                              double period, std::size_t n) {
  for (const auto* set : {&e_set, &f_set}) {
    for (const auto& iv : *set) {
      if (!(iv.lo >= 0.0 && iv.hi <= 1.0 && iv.lo <= iv.hi)) {
        throw UsageError("product intervals must lie inside the unit cell [0,1]");
      }
    }
  }
  FamilyDescriptor fam;
  fam.kind = FamilyKind::product;
  fam.e_set = e_set;
  fam.f_set = f_set;
  return sample_family(2, {periodic_axis(period, n), periodic_axis(period, n)}, fam,
                       [e_set, f_set](Point p) {
                         return (in_any(frac(p.x), e_set) && in_any(frac(p.y), f_set)) ? 1.0 : 0.0;
                       });
}

ObservationField make_e_beta(double beta, double box_half_width, std::size_t n, double margin) {
  if (!(beta > 0.0 && beta <= 1.0)) throw UsageError("e-beta requires beta in (0,1]");
  FamilyDescriptor fam;
  fam.kind = FamilyKind::e_beta;
  fam.beta = beta;
  const double e = (beta - 1.0) / (2.0 * beta);
  const Axis ax{-box_half_width, 2.0 * box_half_width, n, false};
  return sample_family(2, {ax, ax}, fam,
                       [e](Point p) {
                         const double ax_ = std::abs(p.x), ay = std::abs(p.y);
                         if (ax_ > 1.0) return ay > std::pow(ax_, e) ? 1.0 : 0.0;
                         if (ax_ < 1.0) return std::pow(ay, e) < ax_ ? 1.0 : 0.0;
                         return 0.0;
                       },
                       margin);
}

ObservationField make_half_strip_comb(double box_half_height, std::size_t nx, std::size_t ny,
                                      double margin) {
  FamilyDescriptor fam;
  fam.kind = FamilyKind::half_strip_comb;
  const Axis ax{0.0, 1.0, nx, true};
  const Axis ay{-box_half_height, 2.0 * box_half_height, ny, false};
  return sample_family(2, {ax, ay}, fam,
                       [](Point p) {
                         const double u = frac(p.x);
                         if (p.y > 0.0) return u < 0.5 ? 1.0 : 0.0;
                         if (p.y < 0.0) return u >= 0.5 ? 1.0 : 0.0;
                         return 0.0;
                       },
                       margin);
}

ObservationField mollify(const ObservationField& field, double radius) {
  if (radius < 0.0) throw UsageError("mollification radius must be non-negative");
  if (radius == 0.0) return field;
  const int dim = field.dim();
  const Axis ax = field.axis(0), ay = field.axis(1);
  const std::size_t nx = ax.n, ny = ay.n;
  std::vector<fft::cplx> kern(nx * ny, 0.0), data(nx * ny);
  double mass = 0.0;
  for (std::size_t iy = 0; iy < ny; ++iy) {
    // signed offsets so the ball is centred at the origin node
    const double oy = dim == 2 ? ay.spacing() * static_cast<double>(iy <= ny / 2 ? static_cast<long>(iy)
                                                                            : static_cast<long>(iy) - static_cast<long>(ny))
                               : 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double ox = ax.spacing() * static_cast<double>(
                                           ix <= nx / 2 ? static_cast<long>(ix)
                                                        : static_cast<long>(ix) - static_cast<long>(nx));
      if (ox * ox + oy * oy <= radius * radius) {
        kern[iy * nx + ix] = 1.0;
        mass += 1.0;
      }
    }
  }
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = field.values()[i];
  fft::forward(kern, nx, ny);
  fft::forward(data, nx, ny);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= kern[i];
  fft::backward(data, nx, ny);
  std::vector<double> out(data.size());
  const double scale = 1.0 / (mass * static_cast<double>(nx * ny));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(data[i].real() * scale, 0.0, 1.0);
  return ObservationField(dim, {ax, ay}, std::move(out), field.family(), radius, field.margin());
}

ObservationField level_set(const ObservationField& field, double eps) {
  std::vector<double> out(field.values().size());
  std::transform(field.values().begin(), field.values().end(), out.begin(),
                 [eps](double v) { return v >= eps ? 1.0 : 0.0; });
  FamilyDescriptor fam;
  fam.kind = FamilyKind::custom_grid;
  fam.label = "level set of " + family_name(field.family().kind);
  return ObservationField(field.dim(), {field.axis(0), field.axis(1)}, std::move(out), fam, 0.0,
                          field.margin());
}

namespace {

constexpr char kMagic[8] = {'G', 'C', 'L', 'G', 'R', 'I', 'D', '1'};

template <typename T>
void put_le(std::ofstream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get_le(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_grid_file(const std::string& path, const ObservationField& field) {
  const Axis& ax = field.axis(0);
  if (field.dim() == 2 && (field.axis(1).n != ax.n || field.axis(1).extent != ax.extent)) {
    throw UsageError("grid files require equal period and sample count on both axes");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open grid file for writing: " + path);
  os.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(field.dim()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ax.n));
  put_le<double>(os, ax.extent);
  for (double v : field.values()) put_le<double>(os, v);
}

ObservationField read_grid_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open grid file: " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw UsageError("not a grid file (bad magic): " + path);
  }
  const auto dim = get_le<std::uint32_t>(is);
  const auto n = get_le<std::uint32_t>(is);
  const auto period = get_le<double>(is);
  if (!is || (dim != 1 && dim != 2) || n < 2 || !(period > 0.0)) {
    throw UsageError("malformed grid file header: " + path);
  }
  const std::size_t count = dim == 1 ? n : static_cast<std::size_t>(n) * n;
  std::vector<double> v(count);
  for (auto& x : v) x = get_le<double>(is);
  if (!is) throw UsageError("grid file truncated: " + path);
  FamilyDescriptor fam;
  fam.kind = FamilyKind::custom_grid;
  fam.label = path;
  const Axis a{0.0, period, n, true};
  return ObservationField(static_cast<int>(dim), {a, a}, std::move(v), fam);
}

}  // namespace gcclab
