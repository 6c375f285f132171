#include "sscat/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sscat {

using nlohmann::json;

namespace {

// JSON has no inf/nan; emit null instead
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_json(Complex c) { return json{{"re", num(c.real())}, {"im", num(c.imag())}}; }

json header(const PotentialSpec& spec, const std::string& method) {
  return json{{"method", method}, {"family", std::string(to_string(spec.family))}, {"delta", spec.delta},
              {"eps", spec.eps}};
}

std::vector<double> number_list(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) throw ConfigError(std::string("FourierSeries document needs an array '") + key + "'");
  return doc[key].get<std::vector<double>>();
}

double number(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number()) throw ConfigError(std::string("FourierSeries document needs a number '") + key + "'");
  return doc[key].get<double>();
}

}  // namespace

PotentialSpec read_tabulated(std::istream& in, double delta, double eps) {
  PotentialSpec spec;
  spec.family = Family::Tabulated;
  spec.delta = delta;
  spec.eps = eps;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    double z, u;
    if (!(ls >> z)) {
      if (line.find_first_not_of(' ') == std::string::npos) continue;
      if (spec.table.z.empty() && !header_seen) {
        header_seen = true;  // a column header such as "z,U"
        continue;
      }
      throw ConfigError("tabulated input line " + std::to_string(lineno) + ": expected two numbers");
    }
    std::string rest;
    if (!(ls >> u) || (ls >> rest))
      throw ConfigError("tabulated input line " + std::to_string(lineno) + ": expected two numbers");
    spec.table.z.push_back(z);
    spec.table.u.push_back(u);
  }
  validate(spec);
  return spec;
}

PotentialSpec read_tabulated_file(const std::string& path, double delta, double eps) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_tabulated(in, delta, eps);
}

json series_to_json(const PotentialSpec& spec) {
  if (spec.family != Family::FourierSeries) throw UsageError("only FourierSeries specs have a series document");
  const auto& p = spec.series;
  return json{{"delta", spec.delta},         {"eps", spec.eps},
              {"amplitudes", p.amplitudes}, {"wavenumbers", p.wavenumbers},
              {"phases", p.phases},         {"taper_width", p.taper_width},
              {"length", p.length}};
}

PotentialSpec series_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("FourierSeries document must be a JSON object");
  PotentialSpec spec;
  spec.family = Family::FourierSeries;
  spec.delta = number(doc, "delta");
  spec.eps = number(doc, "eps");
  spec.series.amplitudes = number_list(doc, "amplitudes");
  spec.series.wavenumbers = number_list(doc, "wavenumbers");
  spec.series.phases = number_list(doc, "phases");
  spec.series.taper_width = number(doc, "taper_width");
  spec.series.length = number(doc, "length");
  validate(spec);
  return spec;
}

json scatter_json(const PotentialSpec& spec, const ScatterResult& r, const std::string& method) {
  json j = header(spec, method);
  j["backend"] = std::string(to_string(r.backend));
  j["status"] = std::string(to_string(r.status));
  j["R"] = num(r.R);
  j["T"] = num(r.T);
  j["log_R"] = num(r.log_R);
  j["log_T"] = num(r.log_T);
  j["r"] = complex_json(r.r);
  j["t"] = complex_json(r.t);
  j["k_minus"] = r.k_minus;
  j["k_plus"] = r.k_plus;
  j["noise"] = num(r.noise);
  j["steps"] = r.steps;
  return j;
}

json born_json(const PotentialSpec& spec, const BornResult& r) {
  json j = header(spec, "born");
  j["status"] = std::string(to_string(r.status));
  j["R"] = num(r.R);
  j["T"] = num(1.0 - r.R);
  j["log_R"] = num(r.log_R);
  j["amplitude"] = complex_json(r.amplitude);
  j["log_abs_amplitude"] = num(r.log_abs_amplitude);
  j["error_estimate"] = num(r.error_estimate);
  return j;
}

json turning_point_json(const TurningPoint& tp) {
  json j{{"z0", complex_json(tp.z0)},
         {"gamma", num(tp.gamma)},
         {"smoothness", num(tp.smoothness)},
         {"residual", num(tp.residual)},
         {"singularity_distance", num(tp.singularity_distance)}};
  j["nearest_singularity"] = tp.nearest_singularity ? complex_json(*tp.nearest_singularity) : json(nullptr);
  return j;
}

json wkb_json(const PotentialSpec& spec, const WkbResult& r) {
  json j = header(spec, "wkb");
  j["status"] = r.warning ? "Warning" : "OK";
  j["R"] = num(r.R);
  j["T"] = num(1.0 - r.R);
  j["log_R"] = num(r.log_R);
  j["gamma"] = num(r.dominant.gamma);
  j["S"] = num(r.dominant.smoothness);
  j["turning_point"] = turning_point_json(r.dominant);
  if (r.warning) j["warning"] = r.warning_text;
  return j;
}

namespace {
json ensemble_header(const EnsembleConfig& c, const std::string& method) {
  return json{{"method", method},   {"correlation", "gaussian"}, {"eps", c.correlation.eps},
              {"delta", c.delta},   {"L0", c.L0},                {"n_requested", c.n},
              {"seed", c.seed},     {"taper_width", c.taper_width > 0.0 ? c.taper_width : 5.0 / c.correlation.eps}};
}
}  // namespace

json localization_json(const EnsembleConfig& c, const LocalizationEstimate& e) {
  json j = ensemble_header(c, "ensemble");
  j["status"] = "OK";
  j["lloc_inv"] = num(e.lloc_inv);
  j["stderr"] = num(e.stderr_);
  j["born_pred"] = num(e.born_pred);
  j["n"] = e.n;
  j["failed"] = e.failed;
  j["lnT_mean"] = num(e.lnT_mean);
  j["lnT_var"] = num(e.lnT_var);
  if (!e.failures.empty()) j["failures"] = e.failures;
  return j;
}

json histogram_json(const EnsembleConfig& c, const MGammaHistogram& h, double estimate) {
  json j = ensemble_header(c, "wkb-hist");
  j["status"] = h.points ? "OK" : "Empty";
  j["up_to_constant"] = true;
  j["lloc_inv_estimate"] = h.points ? num(estimate) : json(nullptr);
  j["edges"] = h.edges;
  j["density"] = h.density;
  j["weighted"] = h.weighted;
  j["lambda"] = num(h.lambda);
  j["gamma_min"] = num(h.gamma_min);
  j["length"] = h.length;
  j["points"] = h.points;
  j["real_points"] = h.real_points;
  j["empty_realizations"] = h.empty_realizations;
  j["dropped"] = h.dropped;
  j["unverified"] = h.unverified;
  return j;
}

std::string shape_csv(const PotentialSpec& spec, double z_min, double z_max, std::size_t n) {
  if (n < 2 || !(z_max > z_min)) throw ConfigError("shape dump needs n >= 2 and z_max > z_min");
  std::ostringstream os;
  os << std::setprecision(12) << "z,U\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z_min + (z_max - z_min) * static_cast<double>(i) / static_cast<double>(n - 1);
    os << z << ',' << eval_shape(spec, z).real() << '\n';
  }
  return os.str();
}

}  // namespace sscat
