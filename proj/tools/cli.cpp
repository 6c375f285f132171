#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sscat/born.hpp"
#include "sscat/errors.hpp"
#include "sscat/exact_solver.hpp"
#include "sscat/io.hpp"
#include "sscat/localization.hpp"
#include "sscat/regime_map.hpp"
#include "sscat/wkb.hpp"

namespace sscat::cli {

namespace {

using nlohmann::json;

struct Potential {
  std::string family = "fermi";
  double delta = 0.0;
  double eps = 1.0;
  std::string input;  // tabulated text or FourierSeries JSON
};

void add_potential(CLI::App* app, Potential& p) {
  app->add_option("--family", p.family, "fermi | sech2 | gauss | series | tabulated")->capture_default_str();
  app->add_option("--delta", p.delta, "dimensionless amplitude, 0 <= delta < 1")->required();
  app->add_option("--eps", p.eps, "dimensionless inverse scale, eps > 0")->capture_default_str();
  app->add_option("--input", p.input, "shape file: two-column (z, U) text for tabulated, JSON for series");
}

PotentialSpec build(const Potential& p) {
  const Family f = family_from_string(p.family);
  if (f == Family::Tabulated) {
    if (p.input.empty()) throw UsageError("--family tabulated needs --input");
    return read_tabulated_file(p.input, p.delta, p.eps);
  }
  if (f == Family::FourierSeries) {
    if (p.input.empty()) throw UsageError("--family series needs --input (a FourierSeries JSON document)");
    std::ifstream in(p.input);
    if (!in) throw ConfigError("cannot open " + p.input);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad JSON in ") + p.input + ": " + e.what());
    }
    // flags override the document's own δ, ε
    doc["delta"] = p.delta;
    doc["eps"] = p.eps;
    return series_from_json(doc);
  }
  if (!p.input.empty()) throw UsageError("--input applies to series and tabulated families only");
  PotentialSpec s = make_spec(f, p.delta, p.eps);
  validate(s);
  return s;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- reflect ----------------------------------------------------------------

struct ReflectArgs {
  Potential pot;
  std::string method = "exact";
  std::string backend = "auto";
  std::string born_method = "auto";
  std::string incidence = "left";
  std::string dump_shape;
  double z_min = NAN, z_max = NAN;
  std::size_t points = 801;
};

int reflect(const ReflectArgs& a, const std::string& out_path, std::ostream& out) {
  const PotentialSpec spec = build(a.pot);
  if (!a.dump_shape.empty()) {
    double lo = a.z_min, hi = a.z_max;
    if (std::isnan(lo) || std::isnan(hi)) {
      if (spec.family == Family::FourierSeries) {
        lo = 0.0;
        hi = spec.series.length;
      } else if (spec.family == Family::Tabulated) {
        lo = spec.table.z.front();
        hi = spec.table.z.back();
      } else {
        lo = -6.0 / spec.eps;
        hi = 6.0 / spec.eps;
      }
    }
    emit(shape_csv(spec, lo, hi, a.points), a.dump_shape, out);
  }

  json j;
  int code = kOk;
  if (a.method == "exact") {
    SolveOptions o;
    o.backend = backend_from_string(a.backend);
    if (a.incidence == "right") o.incidence = Incidence::FromRight;
    else if (a.incidence != "left") throw UsageError("--incidence must be left or right");
    const ScatterResult r = reflectance_exact(spec, o);
    j = scatter_json(spec, r, "exact");
    if (r.status != SolveStatus::Ok) code = kNumeric;
  } else if (a.method == "closed-form") {
    j = scatter_json(spec, closed_form_result(spec), "closed-form");
  } else if (a.method == "born") {
    BornOptions o;
    o.method = born_method_from_string(a.born_method);
    const BornResult r = reflectance_born(spec, o);
    j = born_json(spec, r);
    if (r.status != BornStatus::Ok) code = kNumeric;
  } else if (a.method == "wkb") {
    j = wkb_json(spec, reflectance_wkb(spec));
  } else {
    throw UsageError("--method must be exact, closed-form, born or wkb");
  }
  emit(dump(j), out_path, out);
  return code;
}

// ---- turning-points -----------------------------------------------------------

int turning_points(const Potential& p, bool seed_grid, const std::string& out_path, std::ostream& out) {
  const PotentialSpec spec = build(p);
  WkbOptions o;
  o.seed_grid = seed_grid;
  const TurningPointSearch s = find_turning_points(spec, o);
  json j{{"method", "wkb"}, {"family", std::string(to_string(spec.family))}, {"delta", spec.delta}, {"eps", spec.eps}};
  j["status"] = s.points.empty() ? "Empty" : "OK";
  j["turning_points"] = json::array();
  for (const auto& tp : s.points) j["turning_points"].push_back(turning_point_json(tp));
  if (!s.diagnostic.empty()) j["diagnostic"] = s.diagnostic;
  j["unverified"] = s.unverified;
  j["action_failures"] = s.action_failures;
  emit(dump(j), out_path, out);
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string family = "fermi";
  double eps_min = 0.05, eps_max = 2.0;
  std::size_t eps_n = 24;
  double delta_min = 0.0, delta_max = 0.9;  // delta_min 0 → family default
  std::size_t delta_n = 32;
  std::string cells_path, line_path;
  std::string crossover = "ridge";
  double s_lo = 1.0 / 3.0, s_hi = 3.0;
};

int sweep_cmd(const SweepArgs& a, unsigned threads, std::ostream& out) {
  const Family f = family_from_string(a.family);
  if (a.eps_n < 1 || a.delta_n < 1) throw UsageError("grid sizes must be positive");
  if (!(a.eps_min > 0.0) || !(a.eps_max >= a.eps_min)) throw DomainError("need 0 < eps-min <= eps-max");
  const auto def = default_delta_grid(f);
  const double dmin = a.delta_min > 0.0 ? a.delta_min : def.front();
  if (!(a.delta_max < 1.0)) throw DomainError("above-barrier only: delta-max must be below 1");
  if (!(dmin <= a.delta_max)) throw DomainError("need delta-min <= delta-max");
  SweepOptions so;
  so.threads = threads;
  so.S_lo = a.s_lo;
  so.S_hi = a.s_hi;
  const auto cells = sweep(f, log_grid(dmin, a.delta_max, a.delta_n), log_grid(a.eps_min, a.eps_max, a.eps_n), so);
  CrossoverOptions co;
  if (a.crossover == "ridge") co.method = CrossoverMethod::Ridge;
  else if (a.crossover == "equality") co.method = CrossoverMethod::Equality;
  else throw UsageError("--crossover must be ridge or equality");
  const CrossoverLine line = crossover_line(cells, co);

  if (!a.cells_path.empty()) emit(cells_csv(cells), a.cells_path, out);
  if (!a.line_path.empty()) emit(line_csv(line), a.line_path, out);

  std::size_t failed = 0;
  json counts = json::object();
  for (const auto& c : cells) {
    if (!c.error.empty()) ++failed;
    const std::string k(to_string(c.regime));
    counts[k] = counts.value(k, 0) + 1;
  }
  json j{{"method", "sweep"},
         {"status", failed ? "PartialFailure" : "OK"},
         {"family", std::string(to_string(f))},
         {"cells", cells.size()},
         {"failed_cells", failed},
         {"regimes", counts},
         {"crossover_method", a.crossover},
         {"line_points", line.points.size()},
         {"slope", line.slope},
         {"intercept", line.intercept},
         {"r_squared", line.r_squared},
         {"rms_residual", line.rms_residual},
         {"fit_x", f == Family::GaussianBump ? "inv_eps_squared" : "ln_inv_eps"},
         {"skipped", line.skipped}};
  out << dump(j);
  return kOk;
}

// ---- localize -----------------------------------------------------------------

struct LocalizeArgs {
  std::string correlation = "gaussian";
  double eps = 1.0, delta = 0.0, L0 = 0.0, taper = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string method = "ensemble";
  std::string lnT_csv, dump_realization;
  std::size_t bins = 64;
  bool no_real = false;
};

int localize(const LocalizeArgs& a, unsigned threads, const std::string& out_path, std::ostream& out) {
  if (a.correlation != "gaussian") throw UsageError("only --correlation gaussian is available");
  EnsembleConfig c;
  c.correlation.eps = a.eps;
  c.delta = a.delta;
  c.L0 = a.L0;
  c.n = a.n;
  c.seed = a.seed;
  c.taper_width = a.taper;
  c.threads = threads;
  if (a.method == "born") {
    if (!(a.eps > 0.0)) throw DomainError("eps must be positive");
    if (!(a.delta >= 0.0 && a.delta < 1.0)) throw DomainError("above-barrier only: delta must lie in [0, 1)");
    json j{{"method", "born"}, {"correlation", "gaussian"}, {"eps", a.eps}, {"delta", a.delta},
           {"status", "OK"},   {"lloc_inv", born_lloc(c)},   {"w2", correlation_fourier(c.correlation)}};
    emit(dump(j), out_path, out);
    return kOk;
  }
  validate(c);
  if (!a.dump_realization.empty()) emit(dump(series_to_json(ensemble_realization(c, 0))), a.dump_realization, out);
  if (a.method == "ensemble") {
    const LocalizationEstimate e = estimate_lloc(c);
    if (!a.lnT_csv.empty()) {
      std::ostringstream os;
      os << std::setprecision(17) << "index,seed,lnT\n";
      for (std::size_t i = 0; i < e.lnT.size(); ++i) os << i << ',' << derive_seed(c.seed, i) << ',' << e.lnT[i] << '\n';
      emit(os.str(), a.lnT_csv, out);
    }
    emit(dump(localization_json(c, e)), out_path, out);
    return kOk;
  }
  if (a.method == "wkb-hist") {
    HistogramOptions ho;
    ho.bins = a.bins;
    ho.include_real = !a.no_real;
    const MGammaHistogram h = turning_point_histogram(c, ho);
    const double est = h.points ? wkb_lloc_estimate(h) : 0.0;
    emit(dump(histogram_json(c, h, est)), out_path, out);
    return kOk;
  }
  throw UsageError("--method must be ensemble, born or wkb-hist");
}

// ---- validate -----------------------------------------------------------------

int validate_cmd(const std::string& family, std::ostream& out) {
  const Family f = family_from_string(family);
  struct Row {
    std::string what;
    double delta, eps, ref, got, err, tol;
    std::string status;
    bool pass;
  };
  std::vector<Row> rows;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

  if (f == Family::FermiStep || f == Family::SechSquared) {
    std::vector<std::pair<double, double>> grid;
    for (double d : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double e : {0.3, 0.5, 1.0, 2.0}) grid.emplace_back(d, e);
    if (f == Family::SechSquared)
      for (double r : {0.95, 1.0, 1.05}) grid.emplace_back(0.25 * r * r, 1.0);  // 4δ = ε² and either side
    for (auto [d, e] : grid) {
      const PotentialSpec s = make_spec(f, d, e);
      SolveOptions o;
      o.backend = Backend::InvariantEmbedding;
      const ScatterResult r = reflectance_exact(s, o);
      const double ref = reflectance_closed_form(s);
      Row row{"exact-vs-closed", d, e, ref, r.R, rel(r.R, ref), 1e-6, std::string(to_string(r.status)), true};
      row.pass = r.status != SolveStatus::Ok || row.err <= row.tol;
      rows.push_back(row);
    }
  } else if (f == Family::GaussianBump) {
    for (double d : {1e-3, 1e-2})
      for (double e : {0.5, 1.0, 2.0}) {
        const PotentialSpec s = make_spec(f, d, e);
        const BornResult b = reflectance_born(s);
        const double ref = born_closed_form(s);
        rows.push_back({"born-vs-closed", d, e, ref, b.R, rel(b.R, ref), 1e-8, std::string(to_string(b.status)),
                        rel(b.R, ref) <= 1e-8});
      }
    for (double d : {0.1, 0.5, 0.9})
      for (double e : {0.5, 1.0, 2.0}) {
        const PotentialSpec s = make_spec(f, d, e);
        SolveOptions o;
        o.backend = Backend::InvariantEmbedding;
        const ScatterResult ie = reflectance_exact(s, o);
        o.backend = Backend::TransferMatrix;
        const ScatterResult tm = reflectance_exact(s, o);
        const bool ok = ie.status == SolveStatus::Ok && tm.status == SolveStatus::Ok;
        Row row{"ie-vs-tm", d, e, ie.R, tm.R, rel(tm.R, ie.R), 1e-6, std::string(to_string(tm.status)), true};
        row.pass = !ok || row.err <= row.tol;
        rows.push_back(row);
      }
  } else {
    throw UsageError("validate covers fermi, sech2 and gauss");
  }

  bool all = true;
  out << std::left << std::setw(16) << "check" << std::setw(10) << "delta" << std::setw(8) << "eps" << std::setw(14)
      << "reference" << std::setw(14) << "computed" << std::setw(11) << "rel_err" << std::setw(19) << "status"
      << "result\n";
  for (const auto& r : rows) {
    all = all && r.pass;
    std::ostringstream ref, got, err;
    ref << std::setprecision(6) << r.ref;
    got << std::setprecision(6) << r.got;
    err << std::setprecision(2) << r.err;
    out << std::left << std::setw(16) << r.what << std::setw(10) << r.delta << std::setw(8) << r.eps << std::setw(14)
        << ref.str() << std::setw(14) << got.str() << std::setw(11) << err.str() << std::setw(19) << r.status
        << (r.pass ? "PASS" : "FAIL") << '\n';
  }
  out << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? kOk : kNumeric;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Above-barrier reflection: exact, Born and WKB; regime maps; localization"};
  app.require_subcommand(1);
  app.set_config("--config", "", "structured-text (TOML/INI) file mirroring the flags; sections per subcommand");
  unsigned threads = 0;
  std::string out_path;
  app.add_option("--threads", threads, "worker threads, 0 = auto")->capture_default_str();
  app.add_option("--out", out_path, "write the JSON record here instead of stdout");
  app.footer(
      "CSV outputs:\n"
      "  sweep --out cells.csv: delta,eps,R_exact,R_born,R_wkb,S,regime,log_R_exact,log_R_born,log_R_wkb,"
      "exact_source,error\n"
      "  sweep --line line.csv: ln_inv_eps,ln_inv_delta,eps,delta,ratio_born_wkb,in_fit\n"
      "  reflect --dump-shape shape.csv: z,U\n"
      "  localize --lnT-csv lnT.csv: index,seed,lnT\n"
      "Exit codes: 0 ok, 1 domain error, 2 numeric failure, 64 usage error.");

  ReflectArgs ra;
  auto* reflect_cmd = app.add_subcommand("reflect", "reflection coefficient of one potential");
  add_potential(reflect_cmd, ra.pot);
  reflect_cmd->add_option("--method", ra.method, "exact | closed-form | born | wkb")->capture_default_str();
  reflect_cmd->add_option("--backend", ra.backend, "auto | tm | ie (exact method)")->capture_default_str();
  reflect_cmd->add_option("--born-method", ra.born_method, "auto | contour | filon")->capture_default_str();
  reflect_cmd->add_option("--incidence", ra.incidence, "left | right")->capture_default_str();
  reflect_cmd->add_option("--dump-shape", ra.dump_shape, "write the shape U(z) as CSV (z,U)");
  reflect_cmd->add_option("--z-min", ra.z_min, "shape dump range start");
  reflect_cmd->add_option("--z-max", ra.z_max, "shape dump range end");
  reflect_cmd->add_option("--points", ra.points, "shape dump points")->capture_default_str();

  Potential tp;
  bool seed_grid = false;
  auto* tp_cmd = app.add_subcommand("turning-points", "complex turning points with their actions");
  add_potential(tp_cmd, tp);
  tp_cmd->add_flag("--seed-grid", seed_grid, "also run Newton from a rectangular seed grid");

  SweepArgs sa;
  auto* sweep_sub = app.add_subcommand("sweep", "(delta, eps) sweep, regime classes and the Born/WKB dividing line");
  sweep_sub->add_option("--family", sa.family, "fermi | sech2 | gauss")->capture_default_str();
  sweep_sub->add_option("--eps-min", sa.eps_min)->capture_default_str();
  sweep_sub->add_option("--eps-max", sa.eps_max)->capture_default_str();
  sweep_sub->add_option("--eps-n", sa.eps_n)->capture_default_str();
  sweep_sub->add_option("--delta-min", sa.delta_min, "0 = family default (1e-4; 1e-25 for gauss)")->capture_default_str();
  sweep_sub->add_option("--delta-max", sa.delta_max)->capture_default_str();
  sweep_sub->add_option("--delta-n", sa.delta_n)->capture_default_str();
  sweep_sub->add_option("--line", sa.line_path, "crossover line CSV path");
  sweep_sub->add_option("--crossover", sa.crossover, "ridge | equality")->capture_default_str();
  sweep_sub->add_option("--s-lo", sa.s_lo)->capture_default_str();
  sweep_sub->add_option("--s-hi", sa.s_hi)->capture_default_str();

  LocalizeArgs la;
  auto* loc_cmd = app.add_subcommand("localize", "localization length of a random ensemble");
  loc_cmd->add_option("--correlation", la.correlation, "gaussian")->capture_default_str();
  loc_cmd->add_option("--eps", la.eps)->capture_default_str();
  loc_cmd->add_option("--delta", la.delta)->required();
  loc_cmd->add_option("--L0", la.L0, "sample length");
  loc_cmd->add_option("--n", la.n, "realizations");
  loc_cmd->add_option("--seed", la.seed)->capture_default_str();
  loc_cmd->add_option("--taper", la.taper, "taper width, 0 = 5/eps")->capture_default_str();
  loc_cmd->add_option("--method", la.method, "ensemble | born | wkb-hist")->capture_default_str();
  loc_cmd->add_option("--lnT-csv", la.lnT_csv, "per-realization ln T as CSV (ensemble)");
  loc_cmd->add_option("--dump-realization", la.dump_realization, "write realization 0 as a FourierSeries JSON");
  loc_cmd->add_option("--bins", la.bins, "gamma bins (wkb-hist)")->capture_default_str();
  loc_cmd->add_flag("--no-real", la.no_real, "leave real-axis zeros out of the histogram");

  std::string vfam = "fermi";
  auto* val_cmd = app.add_subcommand("validate", "closed-form regression grid with a pass/fail table");
  val_cmd->add_option("--family", vfam, "fermi | sech2 | gauss")->capture_default_str();

  sweep_sub->add_option("--out", sa.cells_path, "cells CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*reflect_cmd) return reflect(ra, out_path, out);
    if (*tp_cmd) return turning_points(tp, seed_grid, out_path, out);
    if (*sweep_sub) return sweep_cmd(sa, threads, out);
    if (*loc_cmd) return localize(la, threads, out_path, out);
    if (*val_cmd) return validate_cmd(vfam, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}

}  // namespace sscat::cli
