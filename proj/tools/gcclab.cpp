// gcclab: batch front end. One subcommand per experiment; every run writes
// <out>/<command>.json and <out>/<command>.csv and prints one line per point.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gcclab/construct.hpp"
#include "gcclab/covering.hpp"
#include "gcclab/error.hpp"
#include "gcclab/evolution.hpp"
#include "gcclab/field.hpp"
#include "gcclab/geometry.hpp"
#include "gcclab/report.hpp"
#include "gcclab/spectral.hpp"

using namespace gcclab;
using report::ordered_json;

namespace {

struct FieldArgs {
  std::string family = "constant";
  int dim = 2;
  double level = 1.0;
  double delta = 0.3;
  double delta1 = 0.6, delta2 = 0.6;
  double set_beta = 0.5;
  double period = 1.0;
  std::size_t n = 64;
  double box = 16.0;
  double margin = 1.0;
  std::string grid_file;
  double mollify = 0.0;
};

void add_field_options(CLI::App* app, FieldArgs& f) {
  app->add_option("--family", f.family, "constant | periodic-square | product | e-beta | half-strip-comb | custom-grid")
      ->capture_default_str();
  app->add_option("--dim", f.dim, "dimension (1 or 2)")->check(CLI::IsMember({1, 2}))->capture_default_str();
  app->add_option("--level", f.level, "constant field value")->capture_default_str();
  app->add_option("--delta", f.delta, "periodic-square side")->capture_default_str();
  app->add_option("--delta1", f.delta1, "product: measure of E per unit cell")->capture_default_str();
  app->add_option("--delta2", f.delta2, "product: measure of F per unit cell")->capture_default_str();
  app->add_option("--set-beta", f.set_beta, "e-beta exponent")->capture_default_str();
  app->add_option("--period", f.period, "torus side for periodic families")->capture_default_str();
  app->add_option("--n", f.n, "samples per axis")->capture_default_str();
  app->add_option("--box", f.box, "half width of the box for non-periodic families")->capture_default_str();
  app->add_option("--margin", f.margin, "sweep margin inside the box")->capture_default_str();
  app->add_option("--grid-file", f.grid_file, "raw grid file for custom-grid");
  app->add_option("--mollify", f.mollify, "ball-average radius applied after building (0: none)")
      ->capture_default_str();
}

ObservationField build_field(const FieldArgs& a) {
  ObservationField f;
  switch (family_from_name(a.family)) {
    case FamilyKind::constant:
      f = make_constant(a.dim, a.level, a.period, a.n);
      break;
    case FamilyKind::periodic_square:
      f = make_periodic_square(a.dim, a.delta, a.period, a.n);
      break;
    case FamilyKind::product:
      f = make_product({{0.0, a.delta1}}, {{0.0, a.delta2}}, a.period, a.n);
      break;
    case FamilyKind::e_beta:
      f = make_e_beta(a.set_beta, a.box, a.n, a.margin);
      break;
    case FamilyKind::half_strip_comb:
      f = make_half_strip_comb(a.box, a.n, a.n * static_cast<std::size_t>(std::ceil(2.0 * a.box)), a.margin);
      break;
    case FamilyKind::custom_grid:
      if (a.grid_file.empty()) throw UsageError("custom-grid needs --grid-file");
      f = read_grid_file(a.grid_file);
      break;
  }
  if (a.mollify > 0.0) f = mollify(f, a.mollify);
  return f;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

// Every option of `app` with its resolved value (given, from config, or default).
ordered_json resolved(const CLI::App* app) {
  ordered_json j = ordered_json::object();
  for (const CLI::Option* o : app->get_options()) {
    if (o->get_name() == "--help" || o->get_name() == "-h" || o->get_name().empty()) continue;
    if (o->get_lnames().empty()) continue;
    const std::string key = o->get_lnames().front();
    if (key == "help" || key == "config") continue;
    std::string v = o->count() ? join(o->reduced_results()) : o->get_default_str();
    if (o->get_type_size() == 0 && !o->count()) v = "false";
    j[key] = v;
  }
  return j;
}

struct Output {
  std::string dir;
  std::uint64_t seed = 1;
  std::string command;
  ordered_json config;
  ordered_json results = ordered_json::array();
  report::Table table;

  void line(const std::string& s) const { std::cout << command << ": " << s << "\n"; }

  void write(const ordered_json& extra) const {
    std::filesystem::create_directories(dir);
    ordered_json doc;
    doc["tool"] = "gcclab";
    doc["version"] = report::version();
    doc["command"] = command;
    doc["seed"] = seed;
    doc["config"] = config;
    for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
    doc["results"] = results;
    report::write_text(dir + "/" + command + ".json", doc.dump(2) + "\n");
    if (!table.columns.empty()) report::write_text(dir + "/" + command + ".csv", table.csv());
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- subcommands -------------------------------------------------------------

struct CertifyArgs {
  FieldArgs field;
  double rho = 0.5;
  std::vector<double> lambdas;
  double gamma = 0.25;
  double safety = 0.9;
  bool fail_fast = false;
  double delta_level = 0.0;
};

int run_certify(const CertifyArgs& a, Output& out) {
  const auto field = build_field(a.field);
  std::vector<double> lambdas = a.lambdas;
  if (lambdas.empty()) {
    // two smallest admissible frequencies
    double lam0 = 0.0;
    if (field.family().kind == FamilyKind::product) {
      const double d1 = field.family().e_set.empty() ? 0.0 : field.family().e_set[0].hi - field.family().e_set[0].lo;
      const double d2 = field.family().f_set.empty() ? 0.0 : field.family().f_set[0].hi - field.family().f_set[0].lo;
      lam0 = covering::product_lambda0(1.0, covering::product_diagonal_length(d1, d2, a.rho / 8.0), a.rho);
    } else {
      lam0 = covering::periodic_lambda0(a.rho, a.gamma);
    }
    lambdas = {lam0, 2.0 * lam0};
  }
  covering::CertifyOptions o;
  o.gamma = a.gamma;
  o.safety = a.safety;
  o.fail_fast = a.fail_fast;
  o.delta_level = a.delta_level;
  const auto rep = covering::comb_gcc_certify(field, a.rho, lambdas, o);
  out.table.columns = {"lambda", "index", "angle", "M", "certificate", "measured", "floor", "pass"};
  for (const auto& lr : rep.results) {
    std::size_t passed = 0;
    for (const auto& e : lr.entries) {
      passed += e.pass;
      out.table.rows.push_back({report::cell(lr.lambda), std::to_string(e.index), report::cell(e.entry.theta.angle),
                                report::cell(e.entry.M),
                                e.entry.certificate == covering::CertificateKind::gcc ? "gcc" : "comb",
                                report::cell(e.measured), report::cell(e.floor), e.pass ? "1" : "0"});
    }
    out.line("lambda=" + fmt(lr.lambda) + " entries=" + std::to_string(lr.entries.size()) + " passed=" +
             std::to_string(passed) + " covers=" + (lr.cover_report.covers ? "yes" : "no") +
             " budget=" + (lr.cover_report.budget_ok ? "ok" : "violated") + (lr.all_pass ? " PASS" : " FAIL"));
  }
  out.results.push_back(report::to_json(rep));
  out.write({{"pass", rep.pass}});
  return rep.pass ? 0 : 1;
}

struct CoverArgs {
  std::string kind = "periodic";
  double rho = 1.0;
  double lambda = 160000.0;
  double gamma = 0.25;
  double delta_level = 0.5;
  double M = 1.0;
  double L_diag = 20.0;
};

int run_cover(const CoverArgs& a, Output& out) {
  covering::EffectiveCovering cov;
  if (a.kind == "periodic") {
    cov = covering::periodic_effective_covering(a.delta_level, a.rho, a.lambda, a.gamma);
  } else if (a.kind == "product") {
    cov = covering::product_effective_covering(a.M, a.L_diag, a.rho, a.lambda);
  } else {
    throw UsageError("cover --family must be periodic or product, got '" + a.kind + "'");
  }
  const auto rep = covering::verify_covering(cov);
  out.table.columns = {"index", "angle", "P", "Q", "eps", "M", "certificate", "budget"};
  for (std::size_t i = 0; i < cov.entries.size(); ++i) {
    const auto& e = cov.entries[i];
    out.table.rows.push_back({std::to_string(i), report::cell(e.theta.angle),
                              e.rational ? std::to_string(e.rational->P) : "", e.rational ? std::to_string(e.rational->Q) : "",
                              report::cell(e.eps), report::cell(e.M),
                              e.certificate == covering::CertificateKind::gcc ? "gcc" : "comb",
                              report::cell(e.eps * e.M + 1.0 / (e.eps * cov.lambda))});
  }
  out.line("entries=" + std::to_string(cov.entries.size()) + " covers=" + (rep.covers ? "yes" : "no") +
           " budget=" + (rep.budget_ok ? "ok" : "violated") + " worst_margin=" + fmt(rep.worst_margin));
  out.results.push_back({{"covering", report::to_json(cov)}, {"verify", report::to_json(rep)}});
  out.write({{"pass", rep.covers && rep.budget_ok}});
  return rep.covers && rep.budget_ok ? 0 : 1;
}

struct UncertaintyArgs {
  FieldArgs field;
  std::string mask = "annulus";
  std::vector<double> lambdas{8.0};
  double delta = 1.0;
  double beta = 1.0;
  double theta = 0.0;
  double eps0 = 0.2;
  double radius = 8.0;
  std::vector<double> zeta{0.0};
  double sigma = 4.0;
  std::string weight = "sqrt";
};

spectral::MaskSpec mask_spec(const UncertaintyArgs& a, double lambda, double zeta) {
  if (a.mask == "ball") return spectral::MaskSpec::ball(a.radius);
  if (a.mask == "annulus") return spectral::MaskSpec::annulus(lambda, a.delta, a.beta);
  if (a.mask == "sector") return spectral::MaskSpec::sector(a.theta, a.eps0);
  if (a.mask == "annulus-sector") return spectral::MaskSpec::annulus_sector(lambda, a.delta, a.beta, a.theta, a.eps0);
  if (a.mask == "rectangle") return spectral::MaskSpec::rectangle({zeta, zeta}, a.sigma);
  throw UsageError("unknown mask '" + a.mask + "' (ball | annulus | sector | annulus-sector | rectangle)");
}

int run_uncertainty(const UncertaintyArgs& a, Output& out) {
  const auto field = build_field(a.field);
  const auto grid = spectral::grid_of(field);
  spectral::Weight w;
  if (a.weight == "sqrt") {
    w = spectral::Weight::sqrt_a;
  } else if (a.weight == "full") {
    w = spectral::Weight::full;
  } else {
    throw UsageError("--weight must be sqrt or full");
  }
  out.table.columns = {"lambda", "zeta", "rank", "c", "C", "residual", "solver"};
  const bool rect = a.mask == "rectangle";
  const std::vector<double> sweep = rect ? a.zeta : a.lambdas;
  for (double s : sweep) {
    const double lambda = rect ? 0.0 : s, zeta = rect ? s : 0.0;
    const auto m = spectral::build_mask(grid, mask_spec(a, lambda, zeta));
    const auto rep = spectral::uncertainty_constant(field, m, w);
    out.table.rows.push_back({report::cell(lambda), report::cell(zeta), std::to_string(rep.rank), report::cell(rep.eigen),
                              report::cell(rep.value), report::cell(rep.residual), rep.solver});
    out.line(rep.mask + " rank=" + std::to_string(rep.rank) + " c=" + fmt(rep.eigen) + " C=" + fmt(rep.value));
    out.results.push_back(report::to_json(rep));
  }
  out.write({{"grid", report::to_json(grid)}});
  return 0;
}

struct ResolventArgs {
  FieldArgs field;
  double gamma = 1.5;
  std::vector<double> lambdas{8.0, 16.0, 32.0};
  double m = 0.0;
  double lambda0 = 4.0;
  double cutoff = 40.0;
  double ceiling = 0.0;
};

int run_resolvent(const ResolventArgs& a, Output& out) {
  const auto field = build_field(a.field);
  const double m = a.m > 0.0 ? a.m : spectral::calibrate_m(field, a.gamma, a.lambda0);
  out.line("m=" + fmt(m) + (a.m > 0.0 ? " (given)" : " (calibrated)"));
  out.table.columns = {"lambda", "rank", "M", "residual"};
  double worst = 0.0;
  std::vector<double> xs, ys;
  for (double l : a.lambdas) {
    const auto rep = spectral::resolvent_constant(field, a.gamma, l, m, a.cutoff);
    out.table.rows.push_back({report::cell(l), std::to_string(rep.rank), report::cell(rep.value), report::cell(rep.residual)});
    out.line("lambda=" + fmt(l) + " rank=" + std::to_string(rep.rank) + " M=" + fmt(rep.value));
    out.results.push_back(report::to_json(rep));
    worst = std::max(worst, rep.value);
    if (l > 0.0 && std::isfinite(rep.value) && rep.value > 0.0) {
      xs.push_back(std::log(l));
      ys.push_back(std::log(rep.value));
    }
  }
  ordered_json extra{{"m", m}, {"max_M", report::number(worst)}};
  if (xs.size() >= 2) {
    const auto fit = evolution::fit_linear(xs, ys);
    extra["loglog_fit"] = report::to_json(fit);
    out.line("loglog slope=" + fmt(fit.slope) + " r2=" + fmt(fit.r2));
  }
  const bool bounded = a.ceiling <= 0.0 || worst <= a.ceiling;
  extra["bounded"] = bounded;
  out.write(extra);
  return bounded ? 0 : 1;
}

struct ObserveArgs {
  FieldArgs field;
  double beta = 1.0;
  std::vector<double> T{0.1, 0.2, 0.4};
  double K = 16.0;
  std::size_t nodes = 0;
  std::string rule = "gauss-legendre";
  double eps = 0.0;
};

int run_observe(const ObserveArgs& a, Output& out) {
  try {
    evolution::check_beta(a.beta);
  } catch (const UsageError& e) {
    throw UsageError(std::string("observe --beta: ") + e.what());
  }
  const auto field = build_field(a.field);
  evolution::GramianOptions o;
  o.n_nodes = a.nodes;
  if (a.rule == "gauss-legendre") {
    o.rule = evolution::Quadrature::gauss_legendre;
  } else if (a.rule == "trapezoid") {
    o.rule = evolution::Quadrature::trapezoid;
  } else {
    throw UsageError("--rule must be gauss-legendre or trapezoid");
  }
  const auto curve = evolution::cost_curve(field, a.beta, a.T, a.K, o);
  out.table.columns = {"T", "K", "n_nodes", "lambda_min", "kappa"};
  for (const auto& p : curve.points) {
    out.table.rows.push_back({report::cell(p.T), report::cell(p.K), std::to_string(p.nodes), report::cell(p.lambda_min),
                              report::cell(p.kappa)});
    out.line("T=" + fmt(p.T) + " rank=" + std::to_string(p.rank) + " lambda_min=" + fmt(p.lambda_min) + " kappa=" + fmt(p.kappa));
    out.results.push_back(report::to_json(p));
  }
  ordered_json extra{{"monotone", curve.monotone}, {"kappa_is", "lower bound on the frequency-truncated data class"}};
  if (a.eps > 0.0) {
    const auto s = evolution::arb_time_shape_check(curve.points, a.eps);
    extra["shape_fit"] = {{"eps", s.eps}, {"exponent", s.exponent}, {"fit", report::to_json(s.fit)}, {"pass", s.pass}};
    out.line("shape exponent=" + fmt(s.exponent) + " slope=" + fmt(s.fit.slope) + " r2=" + fmt(s.fit.r2) +
             (s.pass ? " PASS" : " FAIL"));
  }
  out.write(extra);
  return curve.monotone ? 0 : 1;
}

struct ConstructArgs {
  double rho = 0.4;
  double delta = 0.05;
  double M = 1.0;
  double length = 40.0;
  double grid_step = 0.0;
};

int run_construct(const ConstructArgs& a, Output& out) {
  std::mt19937_64 rng(out.seed);
  const auto Y = construct::random_ball_system(rng, a.M, a.rho, a.delta, a.length);
  const auto sm = construct::smooth_minorant(Y, a.M, a.rho, a.delta, a.grid_step);
  const auto c = construct::check_minorant(sm, a.M, a.rho, a.delta);
  bool ok = c.support_ok && c.min_t >= a.rho / 2 - 1e-12 && c.max_t <= 1.0 && sm.eta >= a.rho / 4 &&
            c.cell_deviation < 1e-10 && c.density_2M >= a.rho / 8 * 0.99;
  for (std::size_t k = 0; k < 3; ++k) ok = ok && c.deriv[k] <= c.deriv_bound[k] && c.transfer_deriv[k] <= c.transfer_deriv_bound[k];
  out.table.columns = {"x", "a"};
  const std::size_t stride = std::max<std::size_t>(1, sm.a.values.size() / 2000);
  for (std::size_t i = 0; i < sm.a.values.size(); i += stride) {
    out.table.rows.push_back({report::cell(sm.a.x0 + sm.a.h * static_cast<double>(i)), report::cell(sm.a.values[i])});
  }
  out.line("balls=" + std::to_string(Y.centres.size()) + " cells=" + std::to_string(sm.partition.breakpoints.size() - 1) +
           " eta=" + fmt(sm.eta) + " density_2M=" + fmt(c.density_2M) + (ok ? " PASS" : " FAIL"));
  out.results.push_back({{"balls", Y.centres.size()}, {"breakpoints", sm.partition.breakpoints}, {"checks", report::to_json(c)}});
  out.write({{"pass", ok}});
  return ok ? 0 : 1;
}

struct FamilyEntry {
  const char* name;
  const char* params;
  const char* picture;
};

int run_list(Output& out) {
  static const FamilyEntry entries[] = {
      {"constant", "--level --dim --period --n", "a(x) = level everywhere"},
      {"periodic-square", "--delta --dim --period --n",
       "unit-periodic squares of side delta; fails GCC on a measure-zero set of rational lines, passes on the "
       "horizontal lines through the squares"},
      {"product", "--delta1 --delta2 --period --n", "indicator of E x F with E = F + Z periodic intervals [0, delta_i)"},
      {"e-beta", "--set-beta --box --n --margin",
       "union of thin rectangles around the axes, widths shrinking like |t|^-beta; every axis line misses it, yet "
       "long rectangles of the matching aspect catch mass"},
      {"half-strip-comb", "--box --n --margin",
       "left halves of the vertical integer strips above the x-axis, right halves below; relatively dense but fails "
       "comb GCC vertically"},
      {"custom-grid", "--grid-file",
       "raw grid file: 8-byte magic GCLGRID1, uint32 dim, uint32 N, float64 period, then N^dim little-endian "
       "float64 samples, x fastest"},
  };
  out.table.columns = {"name", "parameters", "picture"};
  for (const auto& e : entries) {
    std::cout << e.name << "\n  parameters: " << e.params << "\n  picture: " << e.picture << "\n";
    out.table.rows.push_back({e.name, e.params, e.picture});
    out.results.push_back({{"name", e.name}, {"parameters", e.params}, {"picture", e.picture}});
  }
  out.write(ordered_json::object());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gcclab: geometric control, uncertainty and observability experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI file; section per subcommand, flags override it");
  std::string out_dir;
  std::uint64_t seed = 1;
  app.add_option("--out", out_dir, "output directory (default: $GCCLAB_OUT_DIR or gcclab_out)");
  app.add_option("--seed", seed, "seed for every random choice")->capture_default_str();

  CertifyArgs certify;
  auto* c_certify = app.add_subcommand("certify", "certify an effective covering entry by entry on a field");
  add_field_options(c_certify, certify.field);
  c_certify->add_option("--rho", certify.rho, "covering budget")->capture_default_str();
  c_certify->add_option("--lambda", certify.lambdas, "frequencies (default: lambda0 and 2 lambda0)");
  c_certify->add_option("--gamma", certify.gamma, "Dirichlet exponent")->capture_default_str();
  c_certify->add_option("--safety", certify.safety, "fraction of the certified constant required")->capture_default_str();
  c_certify->add_flag("--fail-fast", certify.fail_fast, "stop at the first failing entry");
  c_certify->add_option("--delta-level", certify.delta_level, "override the certified square side")->capture_default_str();

  CoverArgs cover;
  auto* c_cover = app.add_subcommand("cover", "build and verify an effective covering");
  c_cover->add_option("--family", cover.kind, "periodic | product")->capture_default_str();
  c_cover->add_option("--rho", cover.rho)->capture_default_str();
  c_cover->add_option("--lambda", cover.lambda)->capture_default_str();
  c_cover->add_option("--gamma", cover.gamma)->capture_default_str();
  c_cover->add_option("--delta-level", cover.delta_level)->capture_default_str();
  c_cover->add_option("--M", cover.M, "product: axis window")->capture_default_str();
  c_cover->add_option("--L-diag", cover.L_diag, "product: diagonal GCC length")->capture_default_str();

  UncertaintyArgs unc;
  auto* c_unc = app.add_subcommand("uncertainty", "uncertainty constants over a mask sweep");
  add_field_options(c_unc, unc.field);
  c_unc->add_option("--mask", unc.mask, "ball | annulus | sector | annulus-sector | rectangle")->capture_default_str();
  c_unc->add_option("--lambda", unc.lambdas, "annulus radii to sweep")->capture_default_str();
  c_unc->add_option("--width", unc.delta, "annulus width factor delta")->capture_default_str();
  c_unc->add_option("--beta", unc.beta, "annulus width exponent")->capture_default_str();
  c_unc->add_option("--theta", unc.theta, "sector direction")->capture_default_str();
  c_unc->add_option("--eps0", unc.eps0, "sector width")->capture_default_str();
  c_unc->add_option("--radius", unc.radius, "ball radius")->capture_default_str();
  c_unc->add_option("--zeta", unc.zeta, "rectangle corners to sweep")->capture_default_str();
  c_unc->add_option("--sigma", unc.sigma, "rectangle side")->capture_default_str();
  c_unc->add_option("--weight", unc.weight, "sqrt | full")->capture_default_str();

  ResolventArgs res;
  auto* c_res = app.add_subcommand("resolvent", "resolvent constants M(lambda) on a frequency ball");
  add_field_options(c_res, res.field);
  c_res->add_option("--gamma", res.gamma, "symbol exponent of A = |xi|^gamma")->capture_default_str();
  c_res->add_option("--lambda", res.lambdas, "spectral values")->capture_default_str();
  c_res->add_option("--m", res.m, "observation weight (0: calibrate)")->capture_default_str();
  c_res->add_option("--lambda0", res.lambda0, "calibration frequency")->capture_default_str();
  c_res->add_option("--cutoff", res.cutoff, "frequency cutoff")->capture_default_str();
  c_res->add_option("--ceiling", res.ceiling, "fail when M exceeds this (0: no check)")->capture_default_str();

  ObserveArgs obs;
  auto* c_obs = app.add_subcommand("observe", "Gramian observability cost over a time list");
  add_field_options(c_obs, obs.field);
  c_obs->add_option("--beta", obs.beta, "fractional exponent in [0,1]")->capture_default_str();
  c_obs->add_option("--T", obs.T, "observation times")->capture_default_str();
  c_obs->add_option("--K", obs.K, "frequency cutoff")->capture_default_str();
  c_obs->add_option("--nodes", obs.nodes, "time nodes (0: twice the Nyquist count)")->capture_default_str();
  c_obs->add_option("--rule", obs.rule, "gauss-legendre | trapezoid")->capture_default_str();
  c_obs->add_option("--eps", obs.eps, "decay exponent for the cost shape fit (0: skip)")->capture_default_str();

  ConstructArgs con;
  auto* c_con = app.add_subcommand("construct-demo", "smooth minorant on a random ball system");
  c_con->add_option("--rho", con.rho)->capture_default_str();
  c_con->add_option("--delta", con.delta, "ball radius")->capture_default_str();
  c_con->add_option("--M", con.M, "partition length")->capture_default_str();
  c_con->add_option("--length", con.length)->capture_default_str();
  c_con->add_option("--grid-step", con.grid_step, "sampling step (0: rho delta / 40)")->capture_default_str();

  auto* c_list = app.add_subcommand("list-families", "built-in observation families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Output out;
  out.seed = seed;
  if (!out_dir.empty()) {
    out.dir = out_dir;
  } else if (const char* env = std::getenv("GCCLAB_OUT_DIR"); env && *env) {
    out.dir = env;
  } else {
    out.dir = "gcclab_out";
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      out.command = sub->get_name();
      out.config = resolved(sub);
    }
    if (c_certify->parsed()) return run_certify(certify, out);
    if (c_cover->parsed()) return run_cover(cover, out);
    if (c_unc->parsed()) return run_uncertainty(unc, out);
    if (c_res->parsed()) return run_resolvent(res, out);
    if (c_obs->parsed()) return run_observe(obs, out);
    if (c_con->parsed()) return run_construct(con, out);
    if (c_list->parsed()) return run_list(out);
  } catch (const Error& e) {
    std::cerr << "gcclab " << out.command << ": " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gcclab " << out.command << ": " << e.what() << "\n";
    return 3;
  }
  return 2;
}
