#pragma once

// First-order Born reflection, R = (δ²/4)|∫U(εz) e^{2iz} dz|².
//
// For step-like shapes (u₋ ≠ u₊) the integral is taken after one integration
// by parts, keeping (i/2)∫(dU/dz) e^{2iz} dz and dropping the oscillatory
// boundary term.

#include <string_view>

#include "sscat/core_model.hpp"

namespace sscat {

enum class BornMethod {
  Auto,          // contour shift for analytic families, per-mode sums for series, Filon for tables
  ContourShift,  // analytic families only
  Filon,         // piecewise-linear Filon rule on the real axis
};

enum class TailRegularization { IntegrateByParts, Reject };

enum class BornStatus { Ok, FirstOrderUnderflow };

struct BornOptions {
  double window_halfwidth = 0.0;  // real-axis window for Filon, units of 1/k₀; 0 = auto
  BornMethod method = BornMethod::Auto;
  TailRegularization tails = TailRegularization::IntegrateByParts;
  double rel_tol = 1e-10;         // contour-shift failure threshold on the error estimate
  double filon_step = 0.01;       // Filon grid spacing in z
};

struct BornResult {
  double R = 0.0;
  double log_R = 0.0;        // finite even when R underflows (−∞ only at δ = 0)
  Complex amplitude{};       // ∫U e^{2iz}dz (regularized), zero when it underflows
  double log_abs_amplitude = 0.0;
  double error_estimate = 0.0;  // relative, on |amplitude|
  BornStatus status = BornStatus::Ok;
};

std::string_view to_string(BornStatus s);
BornMethod born_method_from_string(std::string_view name);

/// Throws DomainError outside 0 ≤ δ < 1, NumericError when the quadrature
/// misses rel_tol (message carries the achieved estimate), UsageError for an
/// unsupported method/family pair or for step tails with Reject.
BornResult reflectance_born(const PotentialSpec& spec, const BornOptions& opts = {});

/// Closed forms: FermiStep (δ²/4)(π/ε)²/sh²(2π/ε); SechSquared π²δ²/(ε⁴ sh²(π/ε));
/// GaussianBump (πδ²/4ε²) e^{−2/ε²}. UsageError for other families.
double log_born_closed_form(const PotentialSpec& spec);
double born_closed_form(const PotentialSpec& spec);

}  // namespace sscat
