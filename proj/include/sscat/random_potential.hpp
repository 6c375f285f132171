#pragma once

// Smooth random potentials: band-limited spectral synthesis of a zero-mean,
// unit-variance stationary Gaussian process with binary correlation
// w̃(z) = exp(−(εz)²), realized as a finite cosine series with random phases.

#include <cstdint>
#include <vector>

#include "sscat/core_model.hpp"

namespace sscat {

struct GaussianCorrelation {
  double eps = 1.0;
};

/// w̃(s) = exp(−(εs)²).
double correlation_value(const GaussianCorrelation& c, double s);

/// Two-sided spectral density S(q) = (2π)⁻¹ ∫ w̃(z) e^{iqz} dz, normalized so ∫S dq = 1.
double spectral_density(const GaussianCorrelation& c, double q);

/// w(2) = ∫ w̃(z) e^{2iz} dz = (√π/ε) e^{−1/ε²}.
double correlation_fourier(const GaussianCorrelation& c);

struct SynthesisOptions {
  double length = 0.0;             // L0, units k₀⁻¹
  std::uint64_t seed = 0;
  double taper_width = 0.0;        // 0 selects 5/ε
  double modes_per_corr_length = 8.0;
  double spectral_cutoff = 12.0;   // q_max = cutoff · ε; S(q_max)/S(0) = e^{−36}
  std::size_t max_modes = 50'000'000;
};

/// A FourierSeries realization on [0, length] with raised-cosine ramps at both
/// ends. Wavenumbers lie on the lattice qₙ = n·Δq so the realization can be
/// sampled by FFT. Deterministic in (seed, options).
PotentialSpec synthesize_random(const GaussianCorrelation& corr, double delta,
                                const SynthesisOptions& opts);

/// Counter-based seed derivation for realization `index` of an ensemble.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

/// U and dU/dz on the uniform grid z_j = z_first + j·h, j < count.
struct SampledShape {
  double z_first = 0.0;
  double h = 0.0;
  std::vector<double> u;
  std::vector<double> du;
};

/// Samples a FourierSeries shape (taper included) on the cell midpoints of
/// [0, length] with spacing at most `max_step`. Uses an FFT when the
/// wavenumbers lie on a common lattice, a direct sum otherwise.
SampledShape sample_series(const FourierSeriesParams& p, double max_step);

/// Analytic continuation of a lattice FourierSeries shape (taper included) to
/// the row z = x + iy, x_j = j·h for j < count covering [0, length], with
/// h ≤ max_step. Empty result when the wavenumbers are not on a lattice.
struct ComplexRow {
  double h = 0.0;
  std::vector<Complex> u;
  std::vector<Complex> du;  // dU/dz
};
ComplexRow sample_series_row(const FourierSeriesParams& p, double y, double max_step);

}  // namespace sscat
