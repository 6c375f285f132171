#include "sscat/regime_map.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "parallel.hpp"
#include "sscat/born.hpp"
#include "sscat/wkb.hpp"

namespace sscat {

namespace {

void evaluate_cell(RegimeCell& c, const SweepOptions& opts) {
  if (c.delta == 0.0) {
    c.log_R_born = c.log_R_wkb = -std::numeric_limits<double>::infinity();
    c.R_exact = 0.0;
    c.log_R_exact = c.log_R_born;
    c.exact_source = "closed-form";
    c.S = 0.0;
    c.regime = Regime::BornValid;
    return;
  }
  const PotentialSpec spec = make_spec(c.family, c.delta, c.eps);
  std::ostringstream errs;
  try {
    const BornResult b = reflectance_born(spec);
    c.R_born = b.R;
    c.log_R_born = b.log_R;
  } catch (const std::exception& e) {
    errs << "born: " << e.what() << "; ";
  }
  try {
    const WkbResult w = reflectance_wkb(spec);
    c.R_wkb = w.R;
    c.log_R_wkb = w.log_R;
    c.S = w.dominant.smoothness;
    c.wkb_warning = w.warning;
  } catch (const std::exception& e) {
    errs << "wkb: " << e.what() << "; ";
  }
  try {
    if (c.family == Family::FermiStep || c.family == Family::SechSquared) {
      c.log_R_exact = log_reflectance_closed_form(spec);
      c.R_exact = std::exp(*c.log_R_exact);
      c.exact_source = "closed-form";
    } else if (opts.numeric_exact) {
      SolveOptions so = opts.solve;
      so.backend = Backend::InvariantEmbedding;
      const ScatterResult r = reflectance_exact(spec, so);
      if (r.status == SolveStatus::Ok) {
        c.R_exact = r.R;
        c.log_R_exact = r.log_R;
        c.exact_source = "exact";
      }
    }
  } catch (const std::exception& e) {
    errs << "exact: " << e.what() << "; ";
  }
  c.error = errs.str();
  c.regime = classify(c, opts.S_lo, opts.S_hi);
}

// ln(R_born/R_wkb) at (δ, ε), computed afresh off the grid.
double log_ratio(Family family, double delta, double eps) {
  const PotentialSpec spec = make_spec(family, delta, eps);
  return reflectance_born(spec).log_R - reflectance_wkb(spec).log_R;
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::BornValid: return "BornValid";
    case Regime::WkbValid: return "WkbValid";
    case Regime::Crossover: return "Crossover";
    case Regime::Unresolved: return "Unresolved";
  }
  return "?";
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (n == 1) return {lo};
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_eps_grid() { return log_grid(0.05, 2.0, 24); }

std::vector<double> default_delta_grid(Family family) {
  // the Gaussian dividing line sits at ln δ⁻¹ ≈ ε⁻², i.e. δ ~ e⁻⁴⁵ at ε = 0.15
  return log_grid(family == Family::GaussianBump ? 1e-25 : 1e-4, 0.9, 32);
}

Regime classify(const RegimeCell& cell, double S_lo, double S_hi) {
  if (cell.delta == 0.0) return Regime::BornValid;
  if (cell.S >= S_hi) return Regime::WkbValid;
  if (cell.S <= S_lo) return Regime::BornValid;
  return cell.R_exact ? Regime::Crossover : Regime::Unresolved;
}

std::vector<RegimeCell> sweep(Family family, const std::vector<double>& delta_grid,
                              const std::vector<double>& eps_grid, const SweepOptions& opts) {
  for (double d : delta_grid)
    if (!(d >= 0.0 && d < 1.0)) throw DomainError("above-barrier only: sweep deltas must lie in [0, 1)");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw DomainError("sweep eps values must be positive");
  if (!is_deterministic_closed_family(family))
    throw UsageError("sweeps need FermiStep, SechSquared or GaussianBump");

  std::vector<RegimeCell> cells;
  cells.reserve(delta_grid.size() * eps_grid.size());
  for (double e : eps_grid)
    for (double d : delta_grid) {
      RegimeCell c;
      c.family = family;
      c.delta = d;
      c.eps = e;
      cells.push_back(c);
    }

  detail::parallel_for(cells.size(), opts.threads, [&](std::size_t i) { evaluate_cell(cells[i], opts); });
  return cells;
}

CrossoverLine crossover_line(const std::vector<RegimeCell>& cells, const CrossoverOptions& opts) {
  CrossoverLine line;
  line.method = opts.method;
  if (cells.empty()) return line;
  line.family = cells.front().family;
  const bool gauss = line.family == Family::GaussianBump;
  double fit_lo = opts.fit_eps_min, fit_hi = opts.fit_eps_max;
  if (fit_lo <= 0.0 && fit_hi <= 0.0) {
    fit_lo = gauss ? 0.15 : 0.0;
    fit_hi = gauss ? 0.5 : std::numeric_limits<double>::infinity();
  }

  std::map<double, std::vector<const RegimeCell*>> columns;
  for (const auto& c : cells) {
    if (c.family != line.family) throw UsageError("crossover_line needs cells from a single family");
    if (c.delta > 0.0 && c.error.empty()) columns[c.eps].push_back(&c);
  }

  for (auto& [eps, col] : columns) {
    std::sort(col.begin(), col.end(), [](auto* a, auto* b) { return a->delta < b->delta; });
    std::ostringstream why;
    why << "eps=" << eps << ": ";
    if (col.size() < 3) {
      why << "fewer than three usable cells";
      line.skipped.push_back(why.str());
      continue;
    }
    std::vector<double> rho(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) rho[i] = col[i]->log_R_born - col[i]->log_R_wkb;
    auto f = [&](double ln_delta) { return log_ratio(line.family, std::exp(ln_delta), eps); };

    double ln_delta = 0.0;
    bool found = false;
    try {
      if (opts.method == CrossoverMethod::Ridge) {
        const auto it = std::max_element(rho.begin(), rho.end());
        const auto k = static_cast<std::size_t>(it - rho.begin());
        if (k == 0 || k + 1 == rho.size()) {
          why << "ratio maximum at the edge of the delta grid (no interior ridge)";
        } else {
          const auto r = boost::math::tools::brent_find_minima(
              [&](double x) { return -f(x); }, std::log(col[k - 1]->delta), std::log(col[k + 1]->delta), 40);
          ln_delta = r.first;
          found = true;
        }
      } else {
        for (std::size_t i = 0; i + 1 < rho.size() && !found; ++i) {
          if ((rho[i] < 0.0) == (rho[i + 1] < 0.0)) continue;
          std::uintmax_t iters = 100;
          const auto r = boost::math::tools::toms748_solve(
              f, std::log(col[i]->delta), std::log(col[i + 1]->delta), rho[i], rho[i + 1],
              boost::math::tools::eps_tolerance<double>(40), iters);
          ln_delta = 0.5 * (r.first + r.second);
          found = true;
        }
        if (!found) why << "R_born = R_wkb is never bracketed in this column";
      }
    } catch (const std::exception& e) {
      why << e.what();
      found = false;
    }
    if (!found) {
      line.skipped.push_back(why.str());
      continue;
    }
    CrossoverPoint p;
    p.eps = eps;
    p.delta = std::exp(ln_delta);
    p.ln_inv_eps = -std::log(eps);
    p.ln_inv_delta = -ln_delta;
    p.ratio = std::exp(f(ln_delta));
    p.in_fit = eps >= fit_lo && eps <= fit_hi;
    line.points.push_back(p);
  }
  std::sort(line.points.begin(), line.points.end(),
            [](const auto& a, const auto& b) { return a.ln_inv_eps < b.ln_inv_eps; });

  // least squares on the fit window
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t n = 0;
  auto xval = [&](const CrossoverPoint& p) { return gauss ? 1.0 / (p.eps * p.eps) : p.ln_inv_eps; };
  for (const auto& p : line.points) {
    if (!p.in_fit) continue;
    const double x = xval(p), y = p.ln_inv_delta;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    ++n;
  }
  if (n >= 2) {
    const double nn = static_cast<double>(n);
    const double cxx = sxx - sx * sx / nn, cxy = sxy - sx * sy / nn, cyy = syy - sy * sy / nn;
    line.slope = cxy / cxx;
    line.intercept = (sy - line.slope * sx) / nn;
    double ss = 0.0;
    for (const auto& p : line.points)
      if (p.in_fit) {
        const double r = p.ln_inv_delta - (line.slope * xval(p) + line.intercept);
        ss += r * r;
      }
    line.rms_residual = std::sqrt(ss / nn);
    line.r_squared = cyy > 0.0 ? 1.0 - ss / cyy : 1.0;
  }
  return line;
}

std::string cells_csv(const std::vector<RegimeCell>& cells) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "delta,eps,R_exact,R_born,R_wkb,S,regime,log_R_exact,log_R_born,log_R_wkb,exact_source,error\n";
  for (const auto& c : cells) {
    os << c.delta << ',' << c.eps << ',';
    if (c.R_exact) os << *c.R_exact;
    os << ',' << c.R_born << ',' << c.R_wkb << ',' << c.S << ',' << to_string(c.regime) << ',';
    if (c.log_R_exact) os << *c.log_R_exact;
    os << ',' << c.log_R_born << ',' << c.log_R_wkb << ',' << c.exact_source << ',';
    std::string e = c.error;
    std::replace(e.begin(), e.end(), ',', ';');
    std::replace(e.begin(), e.end(), '\n', ' ');
    os << e << '\n';
  }
  return os.str();
}

std::string line_csv(const CrossoverLine& line) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "ln_inv_eps,ln_inv_delta,eps,delta,ratio_born_wkb,in_fit\n";
  for (const auto& p : line.points)
    os << p.ln_inv_eps << ',' << p.ln_inv_delta << ',' << p.eps << ',' << p.delta << ',' << p.ratio << ','
       << (p.in_fit ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace sscat
