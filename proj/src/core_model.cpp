#include "sscat/core_model.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace sscat {

namespace {

constexpr double kPoleGuard = 1e-8;

bool is_real_point(ComplexPoint z) { return z.imag() == 0.0; }

// 1/(1+e^{-u}) for complex u, written so that neither branch overflows.
Complex fermi_complex(Complex u) {
  Complex den;
  Complex num(1.0, 0.0);
  if (u.real() >= 0.0) {
    den = 1.0 + std::exp(-u);
  } else {
    num = std::exp(u);
    den = num + 1.0;
  }
  if (std::abs(den) < kPoleGuard * std::max(1.0, std::abs(num)))
    throw PoleError("FermiStep shape evaluated at a pole (|1 + e^{-u}| < 1e-8)");
  return num / den;
}

Complex fermi_derivative_complex(Complex u) {
  // e^{-u}/(1+e^{-u})² = e^{u}/(1+e^{u})²
  const Complex w = u.real() >= 0.0 ? std::exp(-u) : std::exp(u);
  const Complex den = 1.0 + w;
  if (std::abs(den) < kPoleGuard)
    throw PoleError("FermiStep derivative evaluated at a pole (|1 + e^{-u}| < 1e-8)");
  return w / (den * den);
}

// cosh(u) scaled by e^{-|Re u|} to stay finite; returns sech(u).
Complex sech_complex(Complex u) {
  const Complex v = u.real() >= 0.0 ? u : -u;
  const Complex e = std::exp(-v);
  const Complex den = 1.0 + e * e;  // 2 cosh(v) e^{-v}
  // |cosh v| = |den| e^{Re v}/2
  if (std::abs(den) * std::exp(v.real()) * 0.5 < kPoleGuard)
    throw PoleError("SechSquared shape evaluated at a pole (|cosh u| < 1e-8)");
  return 2.0 * e / den;
}

Complex series_value(const FourierSeriesParams& p, Complex z, bool derivative) {
  const double x = z.real();
  if (x < 0.0 || x > p.length) return {0.0, 0.0};
  Complex sum(0.0, 0.0);
  Complex dsum(0.0, 0.0);
  for (std::size_t n = 0; n < p.amplitudes.size(); ++n) {
    const Complex arg = p.wavenumbers[n] * z + p.phases[n];
    sum += p.amplitudes[n] * std::cos(arg);
    if (derivative) dsum -= p.amplitudes[n] * p.wavenumbers[n] * std::sin(arg);
  }
  const double w = p.taper_width;
  Complex taper(1.0, 0.0);
  Complex dtaper(0.0, 0.0);
  const double pi = std::numbers::pi;
  if (w > 0.0 && x < w) {
    taper = 0.5 * (1.0 - std::cos(pi * z / w));
    dtaper = 0.5 * pi / w * std::sin(pi * z / w);
  } else if (w > 0.0 && x > p.length - w) {
    const Complex s = p.length - z;
    taper = 0.5 * (1.0 - std::cos(pi * s / w));
    dtaper = -0.5 * pi / w * std::sin(pi * s / w);
  }
  if (!derivative) return taper * sum;
  return dtaper * sum + taper * dsum;
}

double table_value(const TabulatedParams& t, double z, bool derivative) {
  if (z < t.z.front() || z > t.z.back())
    throw UsageError("tabulated shape evaluated outside its sample grid");
  auto it = std::upper_bound(t.z.begin(), t.z.end(), z);
  std::size_t i = it == t.z.end() ? t.z.size() - 2 : static_cast<std::size_t>(it - t.z.begin()) - 1;
  i = std::min(i, t.z.size() - 2);
  const double slope = (t.u[i + 1] - t.u[i]) / (t.z[i + 1] - t.z[i]);
  if (derivative) return slope;
  return t.u[i] + slope * (z - t.z[i]);
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::FermiStep: return "FermiStep";
    case Family::SechSquared: return "SechSquared";
    case Family::GaussianBump: return "GaussianBump";
    case Family::FourierSeries: return "FourierSeries";
    case Family::Tabulated: return "Tabulated";
  }
  return "?";
}

Family family_from_string(std::string_view name) {
  if (name == "fermi" || name == "FermiStep") return Family::FermiStep;
  if (name == "sech2" || name == "SechSquared") return Family::SechSquared;
  if (name == "gauss" || name == "gaussian" || name == "GaussianBump") return Family::GaussianBump;
  if (name == "series" || name == "FourierSeries") return Family::FourierSeries;
  if (name == "tabulated" || name == "Tabulated") return Family::Tabulated;
  throw UsageError("unknown potential family '" + std::string(name) + "'");
}

bool is_analytic(Family f) { return f != Family::Tabulated; }

bool is_deterministic_closed_family(Family f) {
  return f == Family::FermiStep || f == Family::SechSquared || f == Family::GaussianBump;
}

PotentialSpec make_spec(Family family, double delta, double eps) {
  PotentialSpec s;
  s.family = family;
  s.delta = delta;
  s.eps = eps;
  return s;
}

PotentialSpec nondimensionalize(const PhysicalScales& scales, Family family) {
  if (!(scales.energy > 0.0) || !(scales.amplitude > 0.0) || !(scales.length > 0.0))
    throw DomainError("physical scales must satisfy E > 0, V0 > 0, L > 0");
  if (scales.energy <= scales.amplitude)
    throw DomainError("above-barrier only: E must exceed V0 (delta = V0/E < 1)");
  return make_spec(family, scales.amplitude / scales.energy,
                   1.0 / (std::sqrt(scales.energy) * scales.length));
}

void validate(const PotentialSpec& spec) {
  if (!std::isfinite(spec.delta) || spec.delta < 0.0 || spec.delta >= 1.0) {
    std::ostringstream os;
    os << "above-barrier only: delta must lie in [0, 1), got " << spec.delta;
    throw DomainError(os.str());
  }
  if (!std::isfinite(spec.eps) || spec.eps <= 0.0) throw DomainError("eps must be positive");
  if (spec.family == Family::FourierSeries) {
    const auto& p = spec.series;
    if (p.amplitudes.size() != p.wavenumbers.size() || p.amplitudes.size() != p.phases.size())
      throw ConfigError("FourierSeries amplitude/wavenumber/phase lists differ in length");
    if (!(p.length > 0.0)) throw ConfigError("FourierSeries length must be positive");
    if (p.taper_width < 0.0 || 2.0 * p.taper_width > p.length)
      throw ConfigError("FourierSeries taper must fit twice inside the sample length");
    for (double q : p.wavenumbers)
      if (!(q > 0.0)) throw ConfigError("FourierSeries wavenumbers must be positive");
  }
  if (spec.family == Family::Tabulated) {
    const auto& t = spec.table;
    if (t.z.size() < 2 || t.z.size() != t.u.size())
      throw ConfigError("tabulated potential needs at least two (z, U) samples");
    for (std::size_t i = 1; i < t.z.size(); ++i)
      if (!(t.z[i] > t.z[i - 1])) throw ConfigError("tabulated z grid must be strictly increasing");
  }
  const TailValues tails = tail_values(spec);
  if (spec.delta * tails.u_minus >= 1.0 || spec.delta * tails.u_plus >= 1.0)
    throw DomainError("unsupported regime: non-propagating asymptotic tail (delta * U(+-inf) >= 1)");
}

Complex eval_shape(const PotentialSpec& spec, ComplexPoint z) {
  const Complex u = spec.eps * z;
  switch (spec.family) {
    case Family::FermiStep: return fermi_complex(u);
    case Family::SechSquared: {
      const Complex s = sech_complex(u);
      return s * s;
    }
    case Family::GaussianBump: return std::exp(-u * u);
    case Family::FourierSeries: return series_value(spec.series, z, false);
    case Family::Tabulated:
      if (!is_real_point(z)) throw UsageError("tabulated potentials have no analytic continuation");
      return table_value(spec.table, z.real(), false);
  }
  return {};
}

Complex eval_shape_derivative(const PotentialSpec& spec, ComplexPoint z) {
  const Complex u = spec.eps * z;
  switch (spec.family) {
    case Family::FermiStep: return fermi_derivative_complex(u);
    case Family::SechSquared: {
      const Complex s = sech_complex(u);
      return -2.0 * s * s * std::tanh(u);
    }
    case Family::GaussianBump: return -2.0 * u * std::exp(-u * u);
    case Family::FourierSeries: return series_value(spec.series, z, true) / spec.eps;
    case Family::Tabulated:
      if (!is_real_point(z)) throw UsageError("tabulated potentials have no analytic continuation");
      return table_value(spec.table, z.real(), true) / spec.eps;
  }
  return {};
}

TailValues tail_values(const PotentialSpec& spec) {
  switch (spec.family) {
    case Family::FermiStep: return {0.0, 1.0};
    case Family::SechSquared:
    case Family::GaussianBump:
    case Family::FourierSeries: return {0.0, 0.0};
    case Family::Tabulated:
      if (spec.table.u.empty()) return {0.0, 0.0};
      return {spec.table.u.front(), spec.table.u.back()};
  }
  return {};
}

std::optional<ComplexPoint> nearest_singularity(const PotentialSpec& spec, ComplexPoint z) {
  const double pi = std::numbers::pi;
  // Poles sit on the imaginary u axis at u = i(y₀ + n·period).
  double y0 = 0.0;
  double period = 0.0;
  if (spec.family == Family::FermiStep) {
    y0 = pi;
    period = 2.0 * pi;
  } else if (spec.family == Family::SechSquared) {
    y0 = pi / 2.0;
    period = pi;
  } else {
    return std::nullopt;
  }
  const double v = spec.eps * z.imag();
  const double n = std::round((v - y0) / period);
  return ComplexPoint(0.0, (y0 + n * period) / spec.eps);
}

bool family_closed_under_mirror(Family f) { return f != Family::FermiStep; }

PotentialSpec mirrored(const PotentialSpec& spec) {
  PotentialSpec m = spec;
  switch (spec.family) {
    case Family::SechSquared:
    case Family::GaussianBump: return m;
    case Family::FermiStep:
      throw UsageError("FermiStep is not closed under z -> -z; use SolveOptions::incidence instead");
    case Family::Tabulated: {
      const auto n = spec.table.z.size();
      for (std::size_t i = 0; i < n; ++i) {
        m.table.z[i] = -spec.table.z[n - 1 - i];
        m.table.u[i] = spec.table.u[n - 1 - i];
      }
      return m;
    }
    case Family::FourierSeries: {
      // cos(q(L − z) + φ) = cos(q z − qL − φ) = cos(q z + (−qL − φ))
      for (std::size_t n = 0; n < spec.series.phases.size(); ++n)
        m.series.phases[n] = -spec.series.wavenumbers[n] * spec.series.length - spec.series.phases[n];
      return m;
    }
  }
  return m;
}

}  // namespace sscat
