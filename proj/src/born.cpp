#include "sscat/born.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sscat/exact_solver.hpp"

namespace sscat {

namespace {

constexpr double kPi = std::numbers::pi;

// ∫_a^b e^{iκz} dz, stable as κ → 0.
Complex exp_integral(double kappa, double a, double b) {
  const double half = 0.5 * (b - a);
  const double x = kappa * half;
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return std::polar(2.0 * half * sinc, kappa * 0.5 * (a + b));
}

// ∫_a^b (z − a) e^{iκz} dz
Complex ramp_exp_integral(double kappa, double a, double b) {
  const double h = b - a;
  if (std::abs(kappa * h) < 1e-4) {
    // series in κ about the midpoint phase
    const double x = kappa * h;
    const Complex base = std::polar(1.0, kappa * a);
    const Complex s = 0.5 + Complex(0.0, x / 3.0) - x * x / 8.0 - Complex(0.0, x * x * x / 30.0);
    return base * h * h * s;
  }
  const Complex ik(0.0, kappa);
  return (h * std::polar(1.0, kappa * b) - exp_integral(kappa, a, b)) / ik;
}

// Piecewise-linear Filon rule: ∫ g(z) e^{iκz} dz with g linear on each panel.
Complex filon_linear(const std::vector<double>& z, const std::vector<double>& g, double kappa) {
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double slope = (g[i + 1] - g[i]) / (z[i + 1] - z[i]);
    sum += g[i] * exp_integral(kappa, z[i], z[i + 1]) + slope * ramp_exp_integral(kappa, z[i], z[i + 1]);
  }
  return sum;
}

// Piecewise-constant density integrated against e^{iκz}: Σ s_i ∫ e^{iκz}.
Complex filon_constant(const std::vector<double>& z, const std::vector<double>& s, double kappa) {
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i + 1 < z.size(); ++i) sum += s[i] * exp_integral(kappa, z[i], z[i + 1]);
  return sum;
}

// Transform of the raised-cosine-tapered window on [0, L]: ∫ taper(z) e^{iκz} dz.
Complex taper_transform(double kappa, double length, double w) {
  if (w <= 0.0) return exp_integral(kappa, 0.0, length);
  const double p = kPi / w;
  const Complex up = 0.5 * exp_integral(kappa, 0.0, w) -
                     0.25 * (exp_integral(kappa + p, 0.0, w) + exp_integral(kappa - p, 0.0, w));
  const double a = length - w;
  const Complex down = 0.5 * exp_integral(kappa, a, length) -
                       0.25 * (std::polar(1.0, -p * length) * exp_integral(kappa + p, a, length) +
                               std::polar(1.0, p * length) * exp_integral(kappa - p, a, length));
  return up + exp_integral(kappa, w, a) + down;
}

// ln of the analytic-family amplitude |∫U e^{2iz}dz| by shifting the u = εz
// contour to Im u = y, where the integrand stops oscillating fast (Gaussian:
// the saddle) or sits a distance ~ε below the nearest pole (Fermi, sech²).
struct ShiftedIntegral {
  double log_abs = 0.0;
  double phase = 0.0;
  double rel_err = 0.0;
};

ShiftedIntegral contour_shift(const PotentialSpec& spec) {
  const double eps = spec.eps;
  const double k = 2.0 / eps;
  double y = 0.0;
  double pole_distance = std::numeric_limits<double>::infinity();
  double half = 0.0;
  switch (spec.family) {
    case Family::FermiStep:  // integrand U'(u), poles at iπ
      y = kPi - std::min(eps, 0.5 * kPi);
      pole_distance = kPi - y;
      half = 46.0;
      break;
    case Family::SechSquared:  // poles at iπ/2
      y = 0.5 * kPi - std::min(eps, 0.25 * kPi);
      pole_distance = 0.5 * kPi - y;
      half = 24.0;
      break;
    case Family::GaussianBump:
      y = 0.5 * k;
      half = 7.5;
      break;
    default:
      throw UsageError("contour-shift Born quadrature needs an analytic family");
  }

  // log of f(x + iy) e^{ik(x + iy)}
  auto log_integrand = [&](double x) -> Complex {
    const Complex u(x, y);
    if (spec.family == Family::GaussianBump) return -u * u + Complex(0.0, k) * u;
    const Complex zc = u / eps;
    const Complex f = spec.family == Family::FermiStep ? eval_shape_derivative(spec, zc) : eval_shape(spec, zc);
    return std::log(f) + Complex(0.0, k) * u;
  };
  const double scale = log_integrand(0.0).real();

  // Panels no wider than twice the distance to the pole and ~1.6 oscillations;
  // a 31-point Kronrod rule is then converged to round-off on every panel.
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  using G = boost::math::quadrature::gauss<double, 15>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& xg = G::abscissa();
  const auto& wg = G::weights();
  auto f = [&](double x) { return std::exp(log_integrand(x) - scale); };
  auto panel = [&](double a, double b, Complex& kron, Complex& gauss, double& mass) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    kron = gauss = Complex{};
    for (std::size_t i = 0; i < xk.size(); ++i) {
      const Complex s = xk[i] == 0.0 ? f(c) : f(c - r * xk[i]) + f(c + r * xk[i]);
      kron += wk[i] * s;
      mass += wk[i] * std::abs(s) * r;
    }
    for (std::size_t i = 0; i < xg.size(); ++i)
      gauss += wg[i] * (xg[i] == 0.0 ? f(c) : f(c - r * xg[i]) + f(c + r * xg[i]));
    kron *= r;
    gauss *= r;
  };
  // Breakpoints on x ≥ 0, mirrored; the pole sits above x = 0.
  const double h_osc = 10.0 / k;
  std::vector<double> cuts{0.0};
  while (cuts.back() < half) {
    const double t = cuts.back();
    cuts.push_back(std::min(half, t + std::min({h_osc, 2.0 * std::hypot(t, pole_distance), 2.0})));
  }
  double re = 0.0, im = 0.0, err = 0.0, mass = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    for (int side : {-1, 1}) {
      const double a = side < 0 ? -cuts[j + 1] : cuts[j];
      const double b = side < 0 ? -cuts[j] : cuts[j + 1];
      Complex kron, gauss;
      panel(a, b, kron, gauss, mass);
      re += kron.real();
      im += kron.imag();
      err += std::abs(kron - gauss);
    }
  }
  const double modulus = std::hypot(re, im);
  ShiftedIntegral out;
  out.log_abs = scale + std::log(modulus);
  out.phase = std::atan2(im, re);
  out.rel_err = (err + std::numeric_limits<double>::epsilon() * mass) / modulus;
  return out;
}

void finish(BornResult& res, double delta) {
  res.log_R = 2.0 * std::log(delta) - 2.0 * std::numbers::ln2 + 2.0 * res.log_abs_amplitude;
  const double amp = std::exp(res.log_abs_amplitude);
  if (res.log_R < std::log(std::numeric_limits<double>::min()) || !(amp > 0.0)) {
    res.R = 0.0;
    res.status = BornStatus::FirstOrderUnderflow;
    return;
  }
  // (δ|A|/2)² keeps R exactly quadratic in δ.
  const double half_amp = 0.5 * delta * amp;
  res.R = half_amp * half_amp;
  res.status = BornStatus::Ok;
}

bool step_like(const PotentialSpec& spec) {
  const TailValues tv = tail_values(spec);
  return tv.u_minus != tv.u_plus || tv.u_minus != 0.0;
}

// Linear Filon on a uniform grid equals the trapezoid sum times sinc²(κh/2);
// dividing that factor out leaves only the (exponentially small) aliasing error.
Complex filon_uniform(const PotentialSpec& spec, double w, std::size_t n) {
  std::vector<double> z(n + 1), g(n + 1);
  const bool by_parts = spec.family == Family::FermiStep;
  for (std::size_t i = 0; i <= n; ++i) {
    z[i] = -w + 2.0 * w * static_cast<double>(i) / static_cast<double>(n);
    g[i] = by_parts ? spec.eps * eval_shape_derivative(spec, z[i]).real() : eval_shape(spec, z[i]).real();
  }
  const double h = 2.0 * w / static_cast<double>(n);
  const double sinc = std::sin(h) / h;  // κ = 2
  Complex a = filon_linear(z, g, 2.0) / (sinc * sinc);
  if (by_parts) a *= Complex(0.0, 0.5);
  return a;
}

BornResult born_filon_analytic(const PotentialSpec& spec, const BornOptions& opts) {
  const double w = opts.window_halfwidth > 0.0 ? opts.window_halfwidth : auto_domain_halfwidth(spec, 1e-18 * spec.delta);
  const auto n = static_cast<std::size_t>(std::ceil(w / opts.filon_step)) * 2;
  const Complex a = filon_uniform(spec, w, n);
  const Complex coarse = filon_uniform(spec, w, n / 2);
  BornResult res;
  res.amplitude = a;
  res.log_abs_amplitude = std::log(std::abs(a));
  res.error_estimate = std::abs(a - coarse) / std::abs(a);
  return res;
}

}  // namespace

std::string_view to_string(BornStatus s) {
  return s == BornStatus::Ok ? "OK" : "FirstOrderUnderflow";
}

BornMethod born_method_from_string(std::string_view name) {
  if (name == "auto") return BornMethod::Auto;
  if (name == "contour" || name == "contour-shift") return BornMethod::ContourShift;
  if (name == "filon") return BornMethod::Filon;
  throw UsageError("unknown Born quadrature '" + std::string(name) + "'");
}

BornResult reflectance_born(const PotentialSpec& spec, const BornOptions& opts) {
  validate(spec);
  if (step_like(spec) && opts.tails == TailRegularization::Reject)
    throw UsageError("Born integral diverges for non-decaying tails; enable integration by parts");
  BornResult res;
  if (spec.delta == 0.0) {
    res.log_R = -std::numeric_limits<double>::infinity();
    res.log_abs_amplitude = 0.0;
    return res;
  }

  switch (spec.family) {
    case Family::FermiStep:
    case Family::SechSquared:
    case Family::GaussianBump: {
      if (opts.method == BornMethod::Filon) {
        res = born_filon_analytic(spec, opts);
        break;
      }
      const ShiftedIntegral s = contour_shift(spec);
      // FermiStep: A = (i/2)∫U'(u)e^{iku}du; otherwise A = ε⁻¹∫U(u)e^{iku}du.
      double log_abs = s.log_abs;
      double phase = s.phase;
      if (spec.family == Family::FermiStep) {
        log_abs -= std::numbers::ln2;
        phase += 0.5 * kPi;
      } else {
        log_abs -= std::log(spec.eps);
      }
      res.log_abs_amplitude = log_abs;
      res.amplitude = std::polar(std::exp(log_abs), phase);
      res.error_estimate = s.rel_err;
      if (!(s.rel_err <= opts.rel_tol)) {
        std::ostringstream os;
        os << "Born quadrature did not converge: relative error estimate " << s.rel_err;
        throw NumericError(os.str());
      }
      break;
    }
    case Family::FourierSeries: {
      if (opts.method == BornMethod::ContourShift)
        throw UsageError("contour-shift Born quadrature needs a closed-form analytic family");
      const auto& p = spec.series;
      Complex a(0.0, 0.0);
      for (std::size_t n = 0; n < p.amplitudes.size(); ++n) {
        const double q = p.wavenumbers[n];
        a += 0.5 * p.amplitudes[n] *
             (std::polar(1.0, p.phases[n]) * taper_transform(2.0 + q, p.length, p.taper_width) +
              std::polar(1.0, -p.phases[n]) * taper_transform(2.0 - q, p.length, p.taper_width));
      }
      res.amplitude = a;
      res.log_abs_amplitude = std::log(std::abs(a));
      res.error_estimate = std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(p.amplitudes.size()));
      break;
    }
    case Family::Tabulated: {
      if (opts.method == BornMethod::ContourShift)
        throw UsageError("tabulated shapes have no analytic continuation");
      // Integration by parts on the linear interpolant: A = (i/2)Σ slope_i ∫ e^{2iz}.
      const auto& t = spec.table;
      std::vector<double> slope(t.z.size() - 1);
      for (std::size_t i = 0; i + 1 < t.z.size(); ++i) slope[i] = (t.u[i + 1] - t.u[i]) / (t.z[i + 1] - t.z[i]);
      const Complex a = Complex(0.0, 0.5) * filon_constant(t.z, slope, 2.0);
      res.amplitude = a;
      res.log_abs_amplitude = std::log(std::abs(a));
      res.error_estimate = std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(t.z.size()));
      break;
    }
  }
  finish(res, spec.delta);
  return res;
}

double log_born_closed_form(const PotentialSpec& spec) {
  validate(spec);
  const double d = spec.delta;
  const double e = spec.eps;
  if (d == 0.0) return -std::numeric_limits<double>::infinity();
  const double ld = 2.0 * std::log(d);
  switch (spec.family) {
    case Family::FermiStep:
      return ld - 2.0 * std::numbers::ln2 + 2.0 * std::log(kPi / e) - 2.0 * log_sinh(2.0 * kPi / e);
    case Family::SechSquared:
      return ld + 2.0 * std::log(kPi) - 4.0 * std::log(e) - 2.0 * log_sinh(kPi / e);
    case Family::GaussianBump:
      return ld + std::log(kPi) - 2.0 * std::numbers::ln2 - 2.0 * std::log(e) - 2.0 / (e * e);
    default:
      throw UsageError("Born closed form exists only for FermiStep, SechSquared and GaussianBump");
  }
}

double born_closed_form(const PotentialSpec& spec) { return std::exp(log_born_closed_form(spec)); }

}  // namespace sscat
