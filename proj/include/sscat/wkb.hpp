#pragma once

// Quasiclassical reflection through complex turning points: zeros z₀ of
// 1 − δU(εz) in the upper half plane, the imaginary action
// γ = Im ∫_{z_r}^{z₀} √(1 − δU(εz)) dz, and R_WKB = e^{−4γ}.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sscat/core_model.hpp"

namespace sscat {

struct TurningPoint {
  ComplexPoint z0{};
  double gamma = 0.0;
  double smoothness = 0.0;  // S = 1/(δ |dU/dz|) at z₀
  double residual = 0.0;    // |1 − δU(εz₀)|
  std::optional<ComplexPoint> nearest_singularity;
  double singularity_distance = 0.0;  // |z₀ − z₁|, infinite when there is no pole
};

struct WkbOptions {
  // Search strip in z. Zero / NaN bounds are chosen per family.
  double im_min = 0.0;
  double im_max = 0.0;
  double re_min = std::numeric_limits<double>::quiet_NaN();
  double re_max = std::numeric_limits<double>::quiet_NaN();
  double seed_dx = 0.0;  // seed grid spacing, 0 → 0.5/ε
  double seed_dy = 0.0;  // 0 → 0.2/ε
  double scan_step = 0.0;  // FFT scan spacing for lattice series, 0 → 0.04/ε
  double root_tol = 1e-10;
  double quad_tol = 1e-12;
  int max_newton = 100;
  bool compute_action = true;  // false: leave gamma at 0 (root search only)
  // Rectangular Newton seed grid: always used for FourierSeries; for the
  // closed families only on request (their analytic seeds are exact).
  bool seed_grid = false;
};

struct TurningPointSearch {
  std::vector<TurningPoint> points;  // sorted by gamma ascending
  std::string diagnostic;            // non-empty when nothing was found
  // zeros enclosed by the series scan where |F| cannot be driven below
  // root_tol in double precision (deep in the strip, where the terms are huge)
  std::size_t unverified = 0;
  std::size_t action_failures = 0;  // verified zeros without a clean action path
};

/// Throws UsageError for Tabulated shapes, DomainError outside 0 < δ < 1.
TurningPointSearch find_turning_points(const PotentialSpec& spec, const WkbOptions& opts = {});

/// γ = Im ∫ from z_r (real) to z₀ along a straight segment, principal branch
/// continued from the real axis. z_r defaults to Re z₀. Falls back to a
/// two-segment dogleg when the straight path meets a branch point; throws
/// NumericError naming the segment when neither path tracks cleanly.
double wkb_action(const PotentialSpec& spec, ComplexPoint z0, const WkbOptions& opts = {},
                  std::optional<double> z_r = std::nullopt);

/// S = 1/(δ ε |U′(εz₀)|), U′ = dU/du.
double smoothness_criterion(const PotentialSpec& spec, const TurningPoint& tp);

struct WkbResult {
  double R = 0.0;
  double log_R = 0.0;  // −4γ
  TurningPoint dominant;
  bool warning = false;  // δε/(1 − δ) > 0.1: the δ → 1 guard is not satisfied
  std::string warning_text;
};

/// R = e^{−4γ_min}. Throws NumericError when the strip holds no turning point.
WkbResult reflectance_wkb(const PotentialSpec& spec, const WkbOptions& opts = {});

/// Analytic turning points of the closed-form families (upper half plane,
/// nearest the real axis first).
std::vector<ComplexPoint> analytic_turning_points(const PotentialSpec& spec);

}  // namespace sscat
