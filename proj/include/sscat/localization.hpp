#pragma once

// Localization in smooth random potentials: ensemble ⟨ln T⟩ over seeded
// realizations, the Born rate δ²w(2)/4, and the turning-point statistics
// estimate Σ e^{−4γ} per unit length (known only up to an O(1) constant).

#include <cstdint>
#include <string>
#include <vector>

#include "sscat/exact_solver.hpp"
#include "sscat/random_potential.hpp"
#include "sscat/wkb.hpp"

namespace sscat {

struct EnsembleConfig {
  GaussianCorrelation correlation{};
  double delta = 0.0;
  double L0 = 0.0;  // sample length, units k₀⁻¹
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double taper_width = 0.0;  // 0 → 5/ε
  double modes_per_corr_length = 8.0;
  SolveOptions solve{};      // backend Auto selects the layer recursion for series
  unsigned threads = 0;      // 0: hardware concurrency
};

/// Throws ConfigError on L0 ≤ 0, n < 2, taper < 3/ε or taper too wide for L0;
/// DomainError on δ ∉ [0, 1) or ε ≤ 0.
void validate(const EnsembleConfig& config);

/// Realization `index` of the ensemble (seed derived from (seed, index)).
PotentialSpec ensemble_realization(const EnsembleConfig& config, std::size_t index);

/// ln T through one realization. Throws NumericError when T is not
/// representable even in log form.
double measure_transmission(const PotentialSpec& realization, const SolveOptions& opts = {});

struct LocalizationEstimate {
  double lloc_inv = 0.0;  // −⟨ln T⟩/(2L0)
  double stderr_ = 0.0;   // standard error of lloc_inv
  double born_pred = 0.0;
  std::size_t n = 0;      // realizations used
  std::size_t failed = 0;
  double lnT_mean = 0.0;
  double lnT_var = 0.0;
  std::vector<double> lnT;  // per realization, index order; NaN where the solve failed
  std::vector<std::string> failures;
};

/// Throws NumericError when more than 10% of realizations fail.
LocalizationEstimate estimate_lloc(const EnsembleConfig& config);

/// δ² w(2) / 4.
double born_lloc(const EnsembleConfig& config);

struct HistogramOptions {
  std::size_t bins = 64;
  double gamma_max = 0.0;   // upper edge, 0 → 4/ε; larger γ lands in the last bin
  bool include_real = true; // real zeros of 1 − δU (local barriers) enter with γ = 0
  WkbOptions wkb{};         // strip bounds are overridden with the sample interior
};

struct MGammaHistogram {
  std::vector<double> edges;     // bins + 1 values
  std::vector<double> density;   // turning points per unit Re z, per bin
  std::vector<double> weighted;  // Σ e^{−4γ} per unit Re z, per bin
  double lambda = 0.0;           // 1 / total density; infinite when nothing was found
  double gamma_min = 0.0;        // smallest γ observed (infinite when empty)
  double length = 0.0;           // total Re z length harvested
  std::size_t points = 0;
  std::size_t real_points = 0;
  std::size_t empty_realizations = 0;
  std::size_t dropped = 0;       // zeros found but with no trackable action
  std::size_t unverified = 0;    // deep zeros whose residual is out of reach
};

/// Harvests turning points of every realization over Re z ∈ [w, L0 − w].
MGammaHistogram turning_point_histogram(const EnsembleConfig& config, const HistogramOptions& opts = {});

/// ∫ M(ξ) e^{−4ξ} dξ, up to an unknown O(1) constant. Throws NumericError on
/// an empty histogram.
double wkb_lloc_estimate(const MGammaHistogram& hist);

}  // namespace sscat
