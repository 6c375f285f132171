#pragma once

// Dimensionless one-dimensional scattering model
//
//     ψ'' + [1 − δ U(εz)] ψ = 0,   z = k₀x,  δ = V₀/E,  ε = 1/(k₀L),
//
// with units ħ = 2m = 1 so that k₀ = √E. The shape U carries unit
// characteristic magnitude; δ and ε are the two small parameters.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sscat/errors.hpp"

namespace sscat {

using Complex = std::complex<double>;

/// A point of the complex z-plane (units of k₀⁻¹).
using ComplexPoint = Complex;

enum class Family { FermiStep, SechSquared, GaussianBump, FourierSeries, Tabulated };

std::string_view to_string(Family f);
/// Accepts the canonical names and the CLI short forms (fermi, sech2, gauss, series, tabulated).
Family family_from_string(std::string_view name);
bool is_analytic(Family f);
/// FermiStep, SechSquared, GaussianBump: the closed-form shapes.
bool is_deterministic_closed_family(Family f);

/// Physical inputs in units ħ = 2m = 1.
struct PhysicalScales {
  double energy = 0.0;
  double amplitude = 0.0;  // V₀
  double length = 0.0;     // L
};

/// U(z) = taper(z) · Σ aₙ cos(qₙ z + φₙ) on [0, length], zero outside.
/// Wavenumbers are in units of k₀ (they already contain ε).
struct FourierSeriesParams {
  std::vector<double> amplitudes;
  std::vector<double> wavenumbers;
  std::vector<double> phases;
  double taper_width = 0.0;
  double length = 0.0;
};

/// Samples (zᵢ, Uᵢ) of the shape on the real z axis, zᵢ strictly increasing.
struct TabulatedParams {
  std::vector<double> z;
  std::vector<double> u;
};

struct PotentialSpec {
  Family family = Family::FermiStep;
  double delta = 0.0;
  double eps = 1.0;
  FourierSeriesParams series;
  TabulatedParams table;
};

struct TailValues {
  double u_minus = 0.0;
  double u_plus = 0.0;
};

PotentialSpec make_spec(Family family, double delta, double eps);

/// δ = V₀/E, ε = 1/(√E L). Throws DomainError unless E > V₀ > 0 and L > 0.
PotentialSpec nondimensionalize(const PhysicalScales& scales, Family family);

/// Throws DomainError / ConfigError when the spec breaks its invariants.
void validate(const PotentialSpec& spec);

/// The shape U(εz), amplitude free. Analytic families accept complex z;
/// Tabulated accepts only real z inside its grid.
Complex eval_shape(const PotentialSpec& spec, ComplexPoint z);

/// dU/du at u = εz (derivative with respect to the shape argument).
Complex eval_shape_derivative(const PotentialSpec& spec, ComplexPoint z);

TailValues tail_values(const PotentialSpec& spec);

/// Poles of U nearest to `z` (FermiStep, SechSquared); empty for entire shapes.
std::optional<ComplexPoint> nearest_singularity(const PotentialSpec& spec, ComplexPoint z);

/// Mirror image z → −z of the spec, as a spec of the same kind when the family
/// is closed under reflection (SechSquared, GaussianBump, Tabulated, FourierSeries).
/// FermiStep is not closed under reflection; the solvers mirror it internally.
bool family_closed_under_mirror(Family f);
PotentialSpec mirrored(const PotentialSpec& spec);

namespace shape {

/// Real-axis shapes in any floating type; `u` is the shape argument εz.
template <class T>
T fermi(T u) {
  using std::exp;
  if (u >= T(0)) return T(1) / (T(1) + exp(-u));
  const T e = exp(u);
  return e / (T(1) + e);
}

template <class T>
T fermi_derivative(T u) {
  using std::exp;
  const T e = exp(-std::abs(u));
  return e / ((T(1) + e) * (T(1) + e));
}

template <class T>
T sech2(T u) {
  using std::exp;
  const T e = exp(-T(2) * std::abs(u));
  const T s = T(2) * exp(-std::abs(u)) / (T(1) + e);
  return s * s;
}

template <class T>
T sech2_derivative(T u) {
  using std::tanh;
  return -T(2) * sech2(u) * tanh(u);
}

template <class T>
T gauss(T u) {
  using std::exp;
  return exp(-u * u);
}

template <class T>
T gauss_derivative(T u) {
  using std::exp;
  return -T(2) * u * exp(-u * u);
}

/// Raised-cosine ramp value and its z-derivative for a point at distance `s`
/// into a ramp of width `w` (0 at s = 0, 1 at s = w).
template <class T>
T ramp(T s, T w) {
  using std::cos;
  const T pi = T(3.141592653589793238462643383279502884L);
  return T(0.5) * (T(1) - cos(pi * s / w));
}

template <class T>
T ramp_derivative(T s, T w) {
  using std::sin;
  const T pi = T(3.141592653589793238462643383279502884L);
  return T(0.5) * pi / w * sin(pi * s / w);
}

}  // namespace shape

}  // namespace sscat
