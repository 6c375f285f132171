#include "sscat/exact_solver.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "sscat/random_potential.hpp"

namespace sscat {

namespace odeint = boost::numeric::odeint;

namespace {

using Real = long double;

// V(z) = δU(εz) on the real axis for the analytic families, optionally mirrored.
struct AnalyticProfile {
  Family family;
  Real delta;
  Real eps;
  bool mirror;

  void eval(Real z, Real& v, Real& dv) const {
    const Real u = eps * (mirror ? -z : z);
    Real s = 0, ds = 0;
    switch (family) {
      case Family::FermiStep:
        s = shape::fermi(u);
        ds = shape::fermi_derivative(u);
        break;
      case Family::SechSquared:
        s = shape::sech2(u);
        ds = shape::sech2_derivative(u);
        break;
      default:
        s = shape::gauss(u);
        ds = shape::gauss_derivative(u);
        break;
    }
    v = delta * s;
    dv = delta * eps * ds * (mirror ? Real(-1) : Real(1));
  }
};

// Coupling c = k'/(2k) of the WKB-decomposed field and the slaved (adiabatic)
// part of the local reflection amplitude, σ_ad = c/(2ik) + c'/(4k²). Starting
// and finishing on σ_ad removes the boundary term left by domain truncation.
Real coupling(const AnalyticProfile& prof, Real z, Real* k_out = nullptr) {
  Real v, dv;
  prof.eval(z, v, dv);
  const Real k2 = Real(1) - v;
  if (k_out) *k_out = std::sqrt(k2);
  return -dv / (Real(4) * k2);
}

std::complex<Real> adiabatic_sigma(const AnalyticProfile& prof, Real z) {
  Real k;
  const Real c = coupling(prof, z, &k);
  const Real eta = Real(1e-4);
  const Real dc = (coupling(prof, z + eta) - coupling(prof, z - eta)) / (Real(2) * eta);
  return {dc / (Real(4) * k * k), -c / (Real(2) * k)};
}

// Piecewise-constant V on cells [z_begin + j h, z_begin + (j+1) h].
struct CellProfile {
  double z_begin = 0.0;
  double h = 0.0;
  std::vector<double> v;
};

CellProfile cells_for(const PotentialSpec& spec, double max_step, bool mirror) {
  CellProfile c;
  if (spec.family == Family::FourierSeries) {
    const SampledShape s = sample_series(spec.series, max_step);
    c.z_begin = 0.0;
    c.h = s.h;
    c.v.resize(s.u.size());
    for (std::size_t j = 0; j < s.u.size(); ++j) c.v[j] = spec.delta * s.u[j];
  } else {
    const auto& t = spec.table;
    const double a = t.z.front();
    const double b = t.z.back();
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / max_step));
    c.z_begin = a;
    c.h = (b - a) / static_cast<double>(n);
    c.v.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double z = a + (static_cast<double>(j) + 0.5) * c.h;
      c.v[j] = spec.delta * eval_shape(spec, z).real();
    }
  }
  if (mirror) {
    // [z_begin, z_end] → [−z_end, −z_begin]
    c.z_begin = -(c.z_begin + c.h * static_cast<double>(c.v.size()));
    std::reverse(c.v.begin(), c.v.end());
  }
  return c;
}

struct Leads {
  double k_in;   // incident side
  double k_out;  // transmitted side
};

Leads leads_for(const PotentialSpec& spec, bool mirror) {
  const TailValues tv = tail_values(spec);
  const double km = std::sqrt(1.0 - spec.delta * tv.u_minus);
  const double kp = std::sqrt(1.0 - spec.delta * tv.u_plus);
  return mirror ? Leads{kp, km} : Leads{km, kp};
}

void finish(ScatterResult& res) {
  res.R = std::norm(res.r);
  res.log_R = res.R > 0.0 ? std::log(res.R) : 2.0 * std::log(std::abs(res.r));
  res.status = std::abs(res.r) > 100.0 * res.noise ? SolveStatus::Ok : SolveStatus::BelowNumericFloor;
}

template <class State>
struct StepGuard {
  std::size_t* steps;
  double* last_z;
  std::size_t max_steps;
  void operator()(const State&, Real z) const {
    *last_z = static_cast<double>(z);
    if (++*steps > max_steps) throw NumericError("step budget exhausted");
  }
};

// ---- Invariant embedding, analytic profile -----------------------------------

ScatterResult solve_ie_analytic(const AnalyticProfile& prof, double z_left, double z_right,
                                const Leads& leads, const SolveOptions& opts) {
  using State = std::array<Real, 5>;  // Re σ, Im σ, Re ln a, Im ln a, φ
  Real sigma_max = 0;
  auto rhs = [&](const State& x, State& dx, Real z) {
    Real v, dv;
    prof.eval(z, v, dv);
    const Real k2 = Real(1) - v;
    const Real k = std::sqrt(k2);
    const Real c = -dv / (Real(4) * k2);
    const Real sr = x[0], si = x[1];
    dx[0] = Real(2) * k * si + c * (Real(1) - sr * sr + si * si);
    dx[1] = -Real(2) * k * sr - Real(2) * c * sr * si;
    dx[2] = c * sr;
    dx[3] = c * si;
    dx[4] = k;
  };
  const std::complex<Real> sigma_right = adiabatic_sigma(prof, Real(z_right));
  State x{sigma_right.real(), sigma_right.imag(), 0, 0, Real(leads.k_out) * Real(z_right)};
  std::size_t steps = 0;
  double last_z = z_right;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State, Real>>(
      Real(opts.ie_atol), Real(opts.ie_rtol));
  auto observer = [&](const State& s, Real z) {
    sigma_max = std::max(sigma_max, std::hypot(s[0], s[1]));
    StepGuard<State>{&steps, &last_z, opts.max_steps}(s, z);
  };
  try {
    odeint::integrate_adaptive(stepper, rhs, x, Real(z_right), Real(z_left), Real(-0.05), observer);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "invariant-embedding integration failed near z = " << last_z << ": " << e.what();
    throw NumericError(os.str());
  }

  ScatterResult res;
  res.backend = Backend::InvariantEmbedding;
  res.steps = steps;
  const std::complex<Real> sigma_left = adiabatic_sigma(prof, Real(z_left));
  const Complex sigma(static_cast<double>(x[0] - sigma_left.real()),
                      static_cast<double>(x[1] - sigma_left.imag()));
  const Complex log_a(static_cast<double>(x[2]), static_cast<double>(x[3]));
  const double phi = static_cast<double>(x[4]);
  const double km = leads.k_in;
  const double kp = leads.k_out;
  res.r = sigma * std::polar(1.0, 2.0 * km * z_left);
  res.t = std::sqrt(km / kp) * std::exp(-log_a - Complex(0.0, phi - km * z_left));
  res.log_T = -2.0 * log_a.real();
  res.T = std::exp(res.log_T);
  // Round-off of the extended-precision state plus the tolerance-driven error,
  // both relative to the largest excursion of σ along the path.
  const double eps_ld = static_cast<double>(std::numeric_limits<Real>::epsilon());
  res.noise = static_cast<double>(sigma_max) *
                  (opts.ie_rtol * 10.0 + eps_ld * std::sqrt(static_cast<double>(steps)) * 10.0) +
              opts.ie_atol * std::sqrt(static_cast<double>(steps));
  finish(res);
  return res;
}

// ---- Transfer matrix, analytic profile ---------------------------------------

ScatterResult solve_tm_analytic(const AnalyticProfile& prof, double z_left, double z_right,
                                const Leads& leads, const SolveOptions& opts) {
  using State = std::array<Real, 4>;  // Re ψ, Im ψ, Re ψ', Im ψ'
  double psi_max = 0;
  auto rhs = [&](const State& x, State& dx, Real z) {
    Real v, dv;
    prof.eval(z, v, dv);
    const Real k2 = Real(1) - v;
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = -k2 * x[0];
    dx[3] = -k2 * x[1];
  };
  const double kp = leads.k_out;
  const double km = leads.k_in;
  // ψ = k^{-1/2}(A + B), ψ' = i k^{1/2}(A − B) with the local k at each end.
  Real k_end;
  coupling(prof, Real(z_right), &k_end);
  double sk = std::sqrt(static_cast<double>(k_end));
  const std::complex<Real> sig_r = adiabatic_sigma(prof, Real(z_right));
  const Complex a_right = std::polar(1.0, kp * z_right);
  const Complex b_right = Complex(static_cast<double>(sig_r.real()), static_cast<double>(sig_r.imag())) * a_right;
  const Complex psi0 = (a_right + b_right) / sk;
  const Complex dpsi0 = Complex(0.0, sk) * (a_right - b_right);
  State x{Real(psi0.real()), Real(psi0.imag()), Real(dpsi0.real()), Real(dpsi0.imag())};
  std::size_t steps = 0;
  double last_z = z_right;
  auto stepper =
      odeint::make_controlled<odeint::runge_kutta_fehlberg78<State, Real>>(Real(opts.rtol * 1e-3), Real(opts.rtol));
  auto observer = [&](const State& s, Real z) {
    psi_max = std::max(psi_max, static_cast<double>(std::hypot(s[0], s[1])));
    last_z = static_cast<double>(z);
    if (++steps > opts.max_steps) throw NumericError("step budget exhausted");
  };
  try {
    odeint::integrate_adaptive(stepper, rhs, x, Real(z_right), Real(z_left), Real(-0.05), observer);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "transfer-matrix integration failed near z = " << last_z << ": " << e.what();
    throw NumericError(os.str());
  }
  using CR = std::complex<Real>;
  const CR psi(x[0], x[1]);
  const CR dpsi(x[2], x[3]);
  coupling(prof, Real(z_left), &k_end);
  const Real skl = std::sqrt(k_end);
  const CR a_l = Real(0.5) * (skl * psi + dpsi / CR(0, skl));
  const CR b_l = Real(0.5) * (skl * psi - dpsi / CR(0, skl));
  const CR sig_l = adiabatic_sigma(prof, Real(z_left));
  const Complex a(static_cast<double>(a_l.real()), static_cast<double>(a_l.imag()));

  ScatterResult res;
  res.backend = Backend::TransferMatrix;
  res.steps = steps;
  const CR rl = (b_l / a_l - sig_l) * std::polar(Real(1), Real(2) * Real(km) * Real(z_left));
  res.r = Complex(static_cast<double>(rl.real()), static_cast<double>(rl.imag()));
  res.t = std::sqrt(km / kp) * std::polar(1.0, km * z_left) / a;
  res.log_T = -2.0 * std::log(std::abs(a));
  res.T = std::exp(res.log_T);
  res.noise = 10.0 * opts.rtol * psi_max / std::abs(a) +
              10.0 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(steps));
  finish(res);
  return res;
}

// ---- Cell grid backends ------------------------------------------------------

ScatterResult solve_tm_cells(const CellProfile& c, const Leads& leads) {
  const double kp = leads.k_out;
  const double km = leads.k_in;
  const std::size_t n = c.v.size();
  const double z_left = c.z_begin;
  const double z_right = c.z_begin + c.h * static_cast<double>(n);
  Complex psi = std::polar(1.0, kp * z_right);
  Complex dpsi = Complex(0.0, kp) * psi;
  double log_scale = 0.0;
  double growth_max = 1.0;
  for (std::size_t jj = n; jj-- > 0;) {
    const double q = 1.0 - c.v[jj];
    double m11, m12, m21;
    if (q > 0.0) {
      const double k = std::sqrt(q);
      const double cs = std::cos(k * c.h), sn = std::sin(k * c.h);
      m11 = cs;
      m12 = -sn / k;
      m21 = k * sn;
    } else if (q < 0.0) {
      const double kap = std::sqrt(-q);
      const double ch = std::cosh(kap * c.h), sh = std::sinh(kap * c.h);
      m11 = ch;
      m12 = -sh / kap;
      m21 = -kap * sh;
    } else {
      m11 = 1.0;
      m12 = -c.h;
      m21 = 0.0;
    }
    const Complex p = m11 * psi + m12 * dpsi;
    dpsi = m21 * psi + m11 * dpsi;
    psi = p;
    if ((jj & 63u) == 0) {
      const double s = std::max(std::abs(psi), std::abs(dpsi));
      psi /= s;
      dpsi /= s;
      log_scale += std::log(s);
      growth_max = std::max(growth_max, log_scale);
    }
  }
  const Complex ik(0.0, km);
  const Complex a = 0.5 * (psi + dpsi / ik) * std::polar(1.0, -km * z_left);
  const Complex b = 0.5 * (psi - dpsi / ik) * std::polar(1.0, km * z_left);

  ScatterResult res;
  res.backend = Backend::TransferMatrix;
  res.steps = n;
  res.r = b / a;
  const double log_abs_a = std::log(std::abs(a)) + log_scale;
  res.log_T = std::log(kp / km) - 2.0 * log_abs_a;
  res.T = std::exp(res.log_T);
  res.t = std::exp(Complex(-log_abs_a, -std::arg(a)));
  // Cancellation in the decomposition relative to the largest field excursion.
  const double excursion = std::exp(std::min(700.0, growth_max - log_abs_a));
  res.noise = 10.0 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(n) + 1.0) *
              std::max(1.0, excursion);
  finish(res);
  return res;
}

ScatterResult solve_ie_cells(const CellProfile& c, const Leads& leads) {
  const double kp = leads.k_out;
  const double km = leads.k_in;
  const std::size_t n = c.v.size();
  const double z_left = c.z_begin;
  const double z_right = c.z_begin + c.h * static_cast<double>(n);
  auto wavenumber = [](double v) { return std::sqrt(Complex(1.0 - v, 0.0)); };

  // Interface between medium `kl` (left) and medium `kr` (right), given the
  // reflection amplitude rho seen from the right medium at the interface.
  Complex rho(0.0, 0.0);
  Complex log_t(0.0, 0.0);
  Complex k_right(kp, 0.0);
  for (std::size_t jj = n + 1; jj-- > 0;) {
    const Complex kl = jj == 0 ? Complex(km, 0.0) : wavenumber(c.v[jj - 1]);
    const Complex f = (kl - k_right) / (kl + k_right);
    const Complex den = 1.0 + f * rho;
    const Complex r_here = (f + rho) / den;
    log_t += std::log((1.0 + f) / den);
    if (jj > 0) {
      const Complex phase = Complex(0.0, 1.0) * kl * c.h;
      rho = r_here * std::exp(2.0 * phase);
      log_t += phase;
    } else {
      rho = r_here;
    }
    k_right = kl;
  }

  ScatterResult res;
  res.backend = Backend::InvariantEmbedding;
  res.steps = n;
  res.r = rho * std::polar(1.0, 2.0 * km * z_left);
  const Complex log_t_ref = log_t + Complex(0.0, km * z_left - kp * z_right);
  res.t = std::exp(log_t_ref);
  res.log_T = std::log(kp / km) + 2.0 * log_t_ref.real();
  res.T = std::exp(res.log_T);
  res.noise = 10.0 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(n) + 1.0);
  finish(res);
  return res;
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::TransferMatrix: return "tm";
    case Backend::InvariantEmbedding: return "ie";
    case Backend::ClosedForm: return "closed-form";
  }
  return "?";
}

std::string_view to_string(SolveStatus s) {
  return s == SolveStatus::Ok ? "OK" : "BelowNumericFloor";
}

Backend backend_from_string(std::string_view name) {
  if (name == "auto") return Backend::Auto;
  if (name == "tm" || name == "transfer-matrix") return Backend::TransferMatrix;
  if (name == "ie" || name == "invariant-embedding") return Backend::InvariantEmbedding;
  throw UsageError("unknown backend '" + std::string(name) + "' (expected tm, ie or auto)");
}

double log_sinh(double x) {
  if (x < 20.0) return std::log(std::sinh(x));
  return x - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * x));
}

double log_cosh(double x) {
  x = std::abs(x);
  return x - std::numbers::ln2 + std::log1p(std::exp(-2.0 * x));
}

double auto_domain_halfwidth(const PotentialSpec& spec, double tail_tol) {
  const double ratio = std::max(spec.delta / tail_tol, 10.0);
  switch (spec.family) {
    case Family::FermiStep: return std::log(ratio) / spec.eps;
    case Family::SechSquared: return std::log(4.0 * ratio) / (2.0 * spec.eps);
    case Family::GaussianBump: return std::sqrt(std::log(ratio)) / spec.eps;
    default: return 0.0;
  }
}

ScatterResult reflectance_exact(const PotentialSpec& spec, const SolveOptions& opts) {
  validate(spec);
  if (!(opts.rtol > 0.0) || !(opts.ie_rtol > 0.0) || !(opts.ie_atol > 0.0) || !(opts.tail_tol > 0.0) ||
      !(opts.sample_step > 0.0) || opts.domain_halfwidth < 0.0)
    throw ConfigError("solver tolerances and cell width must be positive");
  const bool mirror = opts.incidence == Incidence::FromRight;
  const Leads leads = leads_for(spec, mirror);

  if (spec.delta == 0.0) {
    ScatterResult res;
    res.backend = opts.backend == Backend::Auto ? Backend::InvariantEmbedding : opts.backend;
    res.r = 0.0;
    res.t = 1.0;
    res.R = 0.0;
    res.T = 1.0;
    res.log_R = -std::numeric_limits<double>::infinity();
    res.log_T = 0.0;
    res.k_minus = res.k_plus = 1.0;
    res.status = SolveStatus::Ok;
    return res;
  }

  ScatterResult res;
  if (is_deterministic_closed_family(spec.family)) {
    const double w = opts.domain_halfwidth > 0.0 ? opts.domain_halfwidth
                                                 : auto_domain_halfwidth(spec, opts.tail_tol);
    const AnalyticProfile prof{spec.family, spec.delta, spec.eps, mirror};
    if (opts.backend == Backend::TransferMatrix)
      res = solve_tm_analytic(prof, -w, w, leads, opts);
    else
      res = solve_ie_analytic(prof, -w, w, leads, opts);
  } else {
    const CellProfile cells = cells_for(spec, opts.sample_step, mirror);
    if (opts.backend == Backend::TransferMatrix)
      res = solve_tm_cells(cells, leads);
    else
      res = solve_ie_cells(cells, leads);
  }
  const TailValues tv = tail_values(spec);
  res.k_minus = std::sqrt(1.0 - spec.delta * tv.u_minus);
  res.k_plus = std::sqrt(1.0 - spec.delta * tv.u_plus);
  return res;
}

double log_reflectance_closed_form(const PotentialSpec& spec) {
  validate(spec);
  const double d = spec.delta;
  const double e = spec.eps;
  const double pi = std::numbers::pi;
  if (d == 0.0) return -std::numeric_limits<double>::infinity();
  if (spec.family == Family::FermiStep) {
    // R = [sh(π(1 − s)/ε) / sh(π(1 + s)/ε)]², s = √(1 − δ)
    const double s = std::sqrt(1.0 - d);
    const double a = pi / e * (d / (1.0 + s));
    const double b = pi / e * (1.0 + s);
    return 2.0 * (log_sinh(a) - log_sinh(b));
  }
  if (spec.family == Family::SechSquared) {
    // R = C² / (sh²(π/ε) + C²), C = ch(½π √(4δ/ε² − 1)) (cos below the branch point)
    const double g = 4.0 * d / (e * e);
    double log_c;
    if (g >= 1.0) {
      log_c = log_cosh(0.5 * pi * std::sqrt(g - 1.0));
    } else {
      const double y = std::sqrt(1.0 - g);
      log_c = std::log(std::sin(0.5 * pi * g / (1.0 + y)));
    }
    const double u = 2.0 * (log_sinh(pi / e) - log_c);
    return u > 0.0 ? -(u + std::log1p(std::exp(-u))) : -std::log1p(std::exp(u));
  }
  throw UsageError("closed-form reflectance exists only for FermiStep and SechSquared");
}

double reflectance_closed_form(const PotentialSpec& spec) {
  return std::exp(log_reflectance_closed_form(spec));
}

ScatterResult closed_form_result(const PotentialSpec& spec) {
  ScatterResult res;
  res.backend = Backend::ClosedForm;
  res.log_R = log_reflectance_closed_form(spec);
  res.R = std::exp(res.log_R);
  res.T = 1.0 - res.R;
  res.log_T = std::log1p(-res.R);
  res.r = std::sqrt(res.R);
  res.t = std::numeric_limits<double>::quiet_NaN();
  const TailValues tv = tail_values(spec);
  res.k_minus = std::sqrt(1.0 - spec.delta * tv.u_minus);
  res.k_plus = std::sqrt(1.0 - spec.delta * tv.u_plus);
  res.status = SolveStatus::Ok;
  return res;
}

}  // namespace sscat
