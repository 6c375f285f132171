#pragma once

// Text and JSON interchange: tabulated shapes, FourierSeries documents and the
// JSON records the CLI prints.

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "sscat/born.hpp"
#include "sscat/core_model.hpp"
#include "sscat/exact_solver.hpp"
#include "sscat/localization.hpp"
#include "sscat/wkb.hpp"

namespace sscat {

/// Two columns (z, U), whitespace or comma separated, '#' starts a comment;
/// one non-numeric header line before the data is skipped.
/// Throws ConfigError on malformed lines or a non-increasing grid.
PotentialSpec read_tabulated(std::istream& in, double delta, double eps);
PotentialSpec read_tabulated_file(const std::string& path, double delta, double eps);

/// {delta, eps, amplitudes[], wavenumbers[], phases[], taper_width, length}
nlohmann::json series_to_json(const PotentialSpec& spec);
PotentialSpec series_from_json(const nlohmann::json& doc);

/// method: "exact", "closed-form", "born" or "wkb".
nlohmann::json scatter_json(const PotentialSpec& spec, const ScatterResult& r, const std::string& method);
nlohmann::json born_json(const PotentialSpec& spec, const BornResult& r);
nlohmann::json wkb_json(const PotentialSpec& spec, const WkbResult& r);
nlohmann::json turning_point_json(const TurningPoint& tp);
nlohmann::json localization_json(const EnsembleConfig& c, const LocalizationEstimate& e);
nlohmann::json histogram_json(const EnsembleConfig& c, const MGammaHistogram& h, double estimate);

/// "z,U" rows of the shape over [z_min, z_max] (n ≥ 2 points).
std::string shape_csv(const PotentialSpec& spec, double z_min, double z_max, std::size_t n);

}  // namespace sscat
