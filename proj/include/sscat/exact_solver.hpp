#pragma once

// Numerically exact reflection and transmission for ψ'' + [1 − δU(εz)]ψ = 0.
//
// Two backends:
//   TransferMatrix      integrates ψ from the transmitted side and decomposes
//                       into plane waves on the incident side; the cancellation
//                       in that decomposition limits R to ~1e-18.
//   InvariantEmbedding  integrates the local reflection amplitude σ(z) of the
//                       WKB-decomposed field, σ' = −2ikσ + (k'/2k)(1 − σ²), in
//                       extended precision; R stays certifiable to ~1e-24.
// Analytic families are integrated adaptively; FourierSeries and Tabulated
// shapes are resolved on a uniform cell grid (piecewise-constant potential),
// where TransferMatrix multiplies exact cell propagators and
// InvariantEmbedding runs the layer recursion for the reflection amplitude.

#include <string>

#include "sscat/core_model.hpp"

namespace sscat {

enum class Backend { Auto, TransferMatrix, InvariantEmbedding, ClosedForm };
enum class SolveStatus { Ok, BelowNumericFloor };
enum class Incidence { FromLeft, FromRight };

std::string_view to_string(Backend b);
std::string_view to_string(SolveStatus s);
Backend backend_from_string(std::string_view name);

struct ScatterResult {
  Complex r{};          // reflection amplitude, referenced to z = 0
  Complex t{};          // transmission amplitude, referenced to z = 0
  double R = 0.0;       // |r|²
  double T = 1.0;       // (k_out/k_in)|t|²
  double log_R = 0.0;   // ln R, finite even when R underflows
  double log_T = 0.0;   // ln T
  double k_minus = 1.0; // √(1 − δu₋)
  double k_plus = 1.0;  // √(1 − δu₊)
  Backend backend = Backend::Auto;
  SolveStatus status = SolveStatus::Ok;
  double noise = 0.0;   // estimated round-off level of |r|
  std::size_t steps = 0;
};

struct SolveOptions {
  Backend backend = Backend::Auto;
  Incidence incidence = Incidence::FromLeft;
  double domain_halfwidth = 0.0;  // 0: chosen from tail_tol
  double tail_tol = 1e-14;        // δ|U − u±| at the domain ends
  double rtol = 1e-12;            // TransferMatrix relative tolerance
  double ie_rtol = 1e-17;         // InvariantEmbedding tolerances (extended precision)
  double ie_atol = 1e-19;
  double sample_step = 0.05;      // cell width for FourierSeries / Tabulated shapes
  std::size_t max_steps = 20'000'000;
};

/// Throws DomainError for δ ∉ [0,1) or non-propagating tails, ConfigError on
/// non-positive tolerances or cell width, NumericError on
/// step-control failure. status = BelowNumericFloor unless |r| > 100·noise.
ScatterResult reflectance_exact(const PotentialSpec& spec, const SolveOptions& opts = {});

/// ln R from the closed forms of the FermiStep and SechSquared families
/// (−∞ at δ = 0). Throws UsageError for other families.
double log_reflectance_closed_form(const PotentialSpec& spec);
double reflectance_closed_form(const PotentialSpec& spec);

/// Closed-form result packaged as a ScatterResult (backend ClosedForm, t unset).
ScatterResult closed_form_result(const PotentialSpec& spec);

/// Half-width used for analytic shapes when SolveOptions::domain_halfwidth is 0.
double auto_domain_halfwidth(const PotentialSpec& spec, double tail_tol);

/// ln sinh x and ln cosh x for x ≥ 0 without overflow.
double log_sinh(double x);
double log_cosh(double x);

}  // namespace sscat
