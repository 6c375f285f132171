#pragma once

// (δ, ε) sweeps comparing Born, WKB and exact reflectance, cell
// classification by the smoothness score, and the Born/WKB dividing line.

#include <optional>
#include <string>
#include <vector>

#include "sscat/core_model.hpp"
#include "sscat/exact_solver.hpp"

namespace sscat {

enum class Regime { BornValid, WkbValid, Crossover, Unresolved };
std::string_view to_string(Regime r);

struct RegimeCell {
  Family family = Family::FermiStep;
  double delta = 0.0;
  double eps = 0.0;
  double R_born = 0.0;
  double R_wkb = 0.0;
  double log_R_born = 0.0;
  double log_R_wkb = 0.0;
  std::optional<double> R_exact;
  std::optional<double> log_R_exact;
  std::string exact_source;  // "closed-form", "exact", or empty
  double S = 0.0;
  Regime regime = Regime::Unresolved;
  bool wkb_warning = false;
  std::string error;  // per-cell failure, empty on success
};

struct SweepOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  double S_lo = 1.0 / 3.0;
  double S_hi = 3.0;
  bool numeric_exact = true;  // exact solver for families without a closed form
  SolveOptions solve{};
};

/// Log-spaced grid of n points over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t n);
std::vector<double> default_eps_grid();                  // [0.05, 2], 24 points
std::vector<double> default_delta_grid(Family family);   // [1e-4, 0.9] (Gaussian: [1e-25, 0.9]), 32 points

/// One cell per (ε, δ), ε outer and δ inner; failures are recorded in-cell.
std::vector<RegimeCell> sweep(Family family, const std::vector<double>& delta_grid,
                              const std::vector<double>& eps_grid, const SweepOptions& opts = {});

/// WkbValid iff S ≥ S_hi, BornValid iff S ≤ S_lo; in between Crossover when an
/// exact reference exists, Unresolved otherwise. δ = 0 is BornValid.
Regime classify(const RegimeCell& cell, double S_lo = 1.0 / 3.0, double S_hi = 3.0);

enum class CrossoverMethod {
  Ridge,     // per column, the δ of closest approach: argmax of ln(R_born/R_wkb)
  Equality,  // per column, the smallest δ where ln(R_born/R_wkb) changes sign
};

struct CrossoverOptions {
  CrossoverMethod method = CrossoverMethod::Ridge;
  double fit_eps_min = 0.0;  // fit window; 0 selects [0.15, 0.5] for GaussianBump, everything otherwise
  double fit_eps_max = 0.0;
};

struct CrossoverPoint {
  double eps = 0.0;
  double delta = 0.0;
  double ln_inv_eps = 0.0;
  double ln_inv_delta = 0.0;
  double ratio = 0.0;  // R_born / R_wkb at the point
  bool in_fit = false;
};

struct CrossoverLine {
  Family family = Family::FermiStep;
  CrossoverMethod method = CrossoverMethod::Ridge;
  std::vector<CrossoverPoint> points;  // sorted by ln ε⁻¹
  // Fit of ln δ⁻¹ = slope·x + intercept, x = ln ε⁻¹ (FermiStep, SechSquared) or ε⁻² (GaussianBump)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
  std::vector<std::string> skipped;  // one message per column without a point
};

CrossoverLine crossover_line(const std::vector<RegimeCell>& cells, const CrossoverOptions& opts = {});

/// CSV writers matching the CLI outputs.
std::string cells_csv(const std::vector<RegimeCell>& cells);
std::string line_csv(const CrossoverLine& line);

}  // namespace sscat
