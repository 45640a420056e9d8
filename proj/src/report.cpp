#include "gcclab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gcclab/error.hpp"

namespace gcclab::report {

std::string version() { return "0.1.0"; }

ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ordered_json to_json(const spectral::GridSpec& g) {
  return {{"dim", g.dim}, {"n", g.n}, {"period", g.period}};
}

ordered_json to_json(const spectral::SpectralReport& r) {
  ordered_json j{{"kind", spectral::constant_name(r.kind)},
                 {"field", r.field},
                 {"mask", r.mask},
                 {"grid", to_json(r.grid)},
                 {"rank", r.rank},
                 {"solver", r.solver},
                 {"eigenvalue", number(r.eigen)},
                 {"value", number(r.value)},
                 {"residual", number(r.residual)}};
  if (r.kind == spectral::ConstantKind::resolvent_M) {
    j["lambda"] = number(r.lambda);
    j["m"] = number(r.m);
  }
  return j;
}

ordered_json to_json(const evolution::GramianReport& r) {
  return {{"T", r.T},
          {"beta", r.beta},
          {"K", r.K},
          {"rank", r.rank},
          {"quadrature", evolution::quadrature_name(r.rule)},
          {"nodes", r.nodes},
          {"lambda_min", number(r.lambda_min)},
          {"kappa_lower_bound", number(r.kappa)},
          {"residual", number(r.residual)}};
}

ordered_json to_json(const evolution::LinearFit& f) {
  return {{"slope", number(f.slope)}, {"intercept", number(f.intercept)}, {"r2", number(f.r2)},
          {"rms", number(f.rms)}};
}

ordered_json to_json(const covering::EffectiveCovering& c) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : c.entries) {
    ordered_json je{{"angle", e.theta.angle},
                    {"eps", e.eps},
                    {"M", e.M},
                    {"certificate", e.certificate == covering::CertificateKind::gcc ? "gcc" : "comb"}};
    if (e.rational) je["rational"] = {e.rational->P, e.rational->Q};
    if (e.certificate == covering::CertificateKind::comb) je["L"] = e.comb_L;
    entries.push_back(je);
  }
  ordered_json j{{"kind", c.kind}, {"rho", c.rho}, {"lambda", c.lambda}, {"gamma", c.gamma}};
  if (c.kind == "periodic") j["delta_level"] = c.delta_level;
  if (c.kind == "product") {
    j["M"] = c.product_M;
    j["L_diag"] = c.product_L_diag;
  }
  j["entries"] = entries;
  return j;
}

ordered_json to_json(const covering::CoverReport& c) {
  ordered_json j{{"covers", c.covers},
                 {"budget_ok", c.budget_ok},
                 {"worst_entry", c.worst_entry},
                 {"worst_margin", number(c.worst_margin)}};
  if (c.gap) j["gap"] = {c.gap->lo, c.gap->hi};
  return j;
}

ordered_json to_json(const covering::CertifyReport& c) {
  ordered_json results = ordered_json::array();
  for (const auto& lr : c.results) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : lr.entries) {
      ordered_json je{{"index", e.index},
                      {"angle", e.entry.theta.angle},
                      {"M", e.entry.M},
                      {"certificate", e.entry.certificate == covering::CertificateKind::gcc ? "gcc" : "comb"},
                      {"measured", number(e.measured)},
                      {"floor", number(e.floor)},
                      {"pass", e.pass}};
      if (e.neighbor_pass) je["neighbor_pass"] = *e.neighbor_pass;
      entries.push_back(je);
    }
    results.push_back({{"lambda", lr.lambda},
                       {"entries_total", lr.covering.entries.size()},
                       {"cover", to_json(lr.cover_report)},
                       {"all_pass", lr.all_pass},
                       {"entries", entries}});
  }
  return {{"family", c.family}, {"pass", c.pass}, {"results", results}};
}

ordered_json to_json(const construct::MinorantChecks& c) {
  auto arr = [](const std::array<double, 3>& a) {
    return ordered_json::array({number(a[0]), number(a[1]), number(a[2])});
  };
  return {{"support_ok", c.support_ok},
          {"t_range", {c.min_t, c.max_t}},
          {"eta", c.eta},
          {"cell_deviation", number(c.cell_deviation)},
          {"density_2M", number(c.density_2M)},
          {"derivatives", arr(c.deriv)},
          {"derivative_bounds", arr(c.deriv_bound)},
          {"transfer_max", number(c.transfer_max)},
          {"transfer_derivatives", arr(c.transfer_deriv)},
          {"transfer_derivative_bounds", arr(c.transfer_deriv_bound)}};
}

ordered_json to_json(const FamilyDescriptor& f) {
  ordered_json j{{"family", family_name(f.kind)}};
  auto intervals = [](const std::vector<Interval>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& i : v) a.push_back({i.lo, i.hi});
    return a;
  };
  switch (f.kind) {
    case FamilyKind::constant: j["level"] = f.level; break;
    case FamilyKind::periodic_square: j["delta"] = f.delta; break;
    case FamilyKind::product:
      j["e_set"] = intervals(f.e_set);
      j["f_set"] = intervals(f.f_set);
      break;
    case FamilyKind::e_beta: j["beta"] = f.beta; break;
    case FamilyKind::half_strip_comb: break;
    case FamilyKind::custom_grid: j["label"] = f.label; break;
  }
  return j;
}

std::string cell(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
    out += "\n";
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open " + path + " for writing");
  os << text;
  if (!os) throw UsageError("failed writing " + path);
}

}  // namespace gcclab::report
