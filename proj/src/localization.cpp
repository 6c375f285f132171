#include "sscat/localization.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "parallel.hpp"

namespace sscat {

namespace {

double taper_of(const EnsembleConfig& c) {
  return c.taper_width > 0.0 ? c.taper_width : 5.0 / c.correlation.eps;
}

struct Harvest {
  std::vector<double> gammas;  // γ per point, real zeros first
  std::size_t real_points = 0;
  std::size_t dropped = 0;
  std::size_t unverified = 0;
};

// Real zeros of 1 − δU inside [a, b]: sign changes on a fine grid, then toms748.
std::vector<double> real_zeros(const PotentialSpec& spec, double a, double b) {
  const double eps = spec.eps;
  const SampledShape s = sample_series(spec.series, 0.05 / eps);
  auto g = [&](double x) { return 1.0 - spec.delta * eval_shape(spec, x).real(); };
  std::vector<double> out;
  for (std::size_t j = 0; j + 1 < s.u.size(); ++j) {
    const double x0 = s.z_first + static_cast<double>(j) * s.h;
    const double x1 = x0 + s.h;
    if (x1 < a || x0 > b) continue;
    const double f0 = 1.0 - spec.delta * s.u[j];
    const double f1 = 1.0 - spec.delta * s.u[j + 1];
    if ((f0 > 0.0) == (f1 > 0.0)) continue;
    // grid values come from the FFT; re-evaluate directly before bracketing
    double g0 = g(x0), g1 = g(x1);
    if ((g0 > 0.0) == (g1 > 0.0)) continue;
    std::uintmax_t iters = 100;
    const auto r = boost::math::tools::toms748_solve(g, x0, x1, g0, g1,
                                                     boost::math::tools::eps_tolerance<double>(45), iters);
    const double x = 0.5 * (r.first + r.second);
    if (x >= a && x <= b) out.push_back(x);
  }
  return out;
}

Harvest harvest(const PotentialSpec& spec, double a, double b, const HistogramOptions& opts) {
  Harvest h;
  if (spec.delta == 0.0) return h;
  if (opts.include_real) {
    const auto xs = real_zeros(spec, a, b);
    h.real_points = xs.size();
    h.gammas.assign(xs.size(), 0.0);
  }
  WkbOptions w = opts.wkb;
  w.re_min = a;
  w.re_max = b;
  w.compute_action = false;
  const TurningPointSearch search = find_turning_points(spec, w);
  h.unverified = search.unverified;
  for (const auto& tp : search.points) {
    try {
      h.gammas.push_back(wkb_action(spec, tp.z0, w));
    } catch (const NumericError&) {
      ++h.dropped;
    }
  }
  return h;
}

}  // namespace

void validate(const EnsembleConfig& c) {
  if (!std::isfinite(c.delta) || c.delta < 0.0 || c.delta >= 1.0) {
    std::ostringstream os;
    os << "above-barrier only: delta must lie in [0, 1), got " << c.delta;
    throw DomainError(os.str());
  }
  if (!(c.correlation.eps > 0.0) || !std::isfinite(c.correlation.eps)) throw DomainError("eps must be positive");
  if (!(c.L0 > 0.0)) throw ConfigError("L0 must be positive");
  if (c.n < 2) throw ConfigError("an ensemble needs at least two realizations");
  const double w = taper_of(c);
  if (w < 3.0 / c.correlation.eps * (1.0 - 1e-12)) throw ConfigError("taper width must be at least 3/eps");
  if (2.0 * w > c.L0) throw ConfigError("L0 must hold both tapers");
}

PotentialSpec ensemble_realization(const EnsembleConfig& c, std::size_t index) {
  SynthesisOptions so;
  so.length = c.L0;
  so.seed = derive_seed(c.seed, index);
  so.taper_width = taper_of(c);
  so.modes_per_corr_length = c.modes_per_corr_length;
  return synthesize_random(c.correlation, c.delta, so);
}

double measure_transmission(const PotentialSpec& realization, const SolveOptions& opts) {
  if (realization.delta == 0.0) return 0.0;
  const ScatterResult r = reflectance_exact(realization, opts);
  if (!std::isfinite(r.log_T)) throw NumericError("transmission not representable (ln T is not finite)");
  // a lossless sample cannot transmit more than it receives
  return std::min(r.log_T, 0.0);
}

LocalizationEstimate estimate_lloc(const EnsembleConfig& c) {
  validate(c);
  LocalizationEstimate est;
  est.born_pred = born_lloc(c);
  est.lnT.assign(c.n, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> why(c.n);
  detail::parallel_for(c.n, c.threads, [&](std::size_t i) {
    try {
      est.lnT[i] = measure_transmission(ensemble_realization(c, i), c.solve);
    } catch (const std::exception& e) {
      why[i] = e.what();
    }
  });

  double sum = 0.0;
  for (std::size_t i = 0; i < c.n; ++i) {
    if (std::isnan(est.lnT[i])) {
      ++est.failed;
      est.failures.push_back("realization " + std::to_string(i) + ": " + why[i]);
      continue;
    }
    sum += est.lnT[i];
    ++est.n;
  }
  if (10 * est.failed > c.n) {
    std::ostringstream os;
    os << est.failed << " of " << c.n << " realizations failed";
    if (!est.failures.empty()) os << "; first: " << est.failures.front();
    throw NumericError(os.str());
  }
  if (est.n == 0) throw NumericError("no realization could be solved");
  est.lnT_mean = sum / static_cast<double>(est.n);
  double ss = 0.0;
  for (double v : est.lnT)
    if (!std::isnan(v)) ss += (v - est.lnT_mean) * (v - est.lnT_mean);
  est.lnT_var = est.n > 1 ? ss / static_cast<double>(est.n - 1) : 0.0;
  est.lloc_inv = -est.lnT_mean / (2.0 * c.L0);
  est.stderr_ = std::sqrt(est.lnT_var / static_cast<double>(est.n)) / (2.0 * c.L0);
  return est;
}

double born_lloc(const EnsembleConfig& c) {
  return c.delta * c.delta * correlation_fourier(c.correlation) / 4.0;
}

MGammaHistogram turning_point_histogram(const EnsembleConfig& c, const HistogramOptions& opts) {
  validate(c);
  if (opts.bins == 0) throw ConfigError("histogram needs at least one bin");
  const double eps = c.correlation.eps;
  const double w = taper_of(c);
  const double a = w, b = c.L0 - w;

  std::vector<Harvest> per(c.n);
  detail::parallel_for(c.n, c.threads, [&](std::size_t i) { per[i] = harvest(ensemble_realization(c, i), a, b, opts); });

  MGammaHistogram h;
  const double top = opts.gamma_max > 0.0 ? opts.gamma_max : 4.0 / eps;
  h.edges.resize(opts.bins + 1);
  for (std::size_t k = 0; k <= opts.bins; ++k) h.edges[k] = top * static_cast<double>(k) / static_cast<double>(opts.bins);
  h.density.assign(opts.bins, 0.0);
  h.weighted.assign(opts.bins, 0.0);
  h.length = (b - a) * static_cast<double>(c.n);
  h.gamma_min = std::numeric_limits<double>::infinity();
  for (const Harvest& r : per) {
    if (r.gammas.empty()) ++h.empty_realizations;
    h.real_points += r.real_points;
    h.dropped += r.dropped;
    h.unverified += r.unverified;
    for (double g : r.gammas) {
      const auto k = std::min(opts.bins - 1, static_cast<std::size_t>(g / top * static_cast<double>(opts.bins)));
      h.density[k] += 1.0;
      h.weighted[k] += std::exp(-4.0 * g);
      h.gamma_min = std::min(h.gamma_min, g);
      ++h.points;
    }
  }
  for (std::size_t k = 0; k < opts.bins; ++k) {
    h.density[k] /= h.length;
    h.weighted[k] /= h.length;
  }
  h.lambda = h.points ? h.length / static_cast<double>(h.points) : std::numeric_limits<double>::infinity();
  return h;
}

double wkb_lloc_estimate(const MGammaHistogram& h) {
  if (h.points == 0) throw NumericError("empty turning-point histogram");
  double s = 0.0;
  for (double v : h.weighted) s += v;
  return s;
}

}  // namespace sscat
