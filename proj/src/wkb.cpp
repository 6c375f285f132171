#include "sscat/wkb.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sscat/random_potential.hpp"

namespace sscat {

namespace {

constexpr double kPi = std::numbers::pi;

// F(z) = 1 − δU and dF/dz at complex z. Lattice FourierSeries shapes are
// summed with a power recurrence in e^{iΔq z} instead of one cos per mode.
class Characteristic {
 public:
  explicit Characteristic(const PotentialSpec& spec) : spec_(spec) {
    if (spec.family != Family::FourierSeries) return;
    const auto& q = spec.series.wavenumbers;
    if (q.empty()) return;
    const double dq = q.size() > 1 ? q[1] - q[0] : q[0];
    if (!(dq > 0.0)) return;
    std::vector<long> idx(q.size());
    for (std::size_t n = 0; n < q.size(); ++n) {
      const double m = q[n] / dq;
      const double r = std::round(m);
      if (std::abs(m - r) > 1e-9 * std::max(1.0, m) || r < 1.0) return;
      idx[n] = static_cast<long>(r);
      if (n > 0 && idx[n] <= idx[n - 1]) return;
    }
    dq_ = dq;
    index_ = std::move(idx);
    coef_.resize(q.size());
    for (std::size_t n = 0; n < q.size(); ++n)
      coef_[n] = std::polar(0.5 * spec.series.amplitudes[n], spec.series.phases[n]);
  }

  // returns F, writes dF/dz
  Complex operator()(Complex z, Complex& dfdz) const {
    Complex u, du;
    shape(z, u, du);
    dfdz = -spec_.delta * du;
    return 1.0 - spec_.delta * u;
  }

  Complex value(Complex z) const {
    Complex d;
    return (*this)(z, d);
  }

 private:
  void shape(Complex z, Complex& u, Complex& du) const {
    if (index_.empty()) {
      u = eval_shape(spec_, z);
      du = spec_.eps * eval_shape_derivative(spec_, z);
      return;
    }
    const auto& p = spec_.series;
    const double x = z.real();
    if (x < 0.0 || x > p.length) {
      u = du = Complex{};
      return;
    }
    // Σ c e^{iqz} + conj-phase c̄ e^{−iqz}, powers refreshed every 128 steps
    const Complex step = std::exp(Complex(0.0, dq_) * z);
    const Complex step_inv = 1.0 / step;
    Complex pw(1.0, 0.0), pw_inv(1.0, 0.0);
    long at = 0;
    Complex sum(0.0, 0.0), dsum(0.0, 0.0);
    for (std::size_t n = 0; n < index_.size(); ++n) {
      const long target = index_[n];
      if (target - at > 1 || (target & 127) == 0) {
        pw = std::exp(Complex(0.0, dq_ * static_cast<double>(target)) * z);
        pw_inv = 1.0 / pw;
      } else {
        pw *= step;
        pw_inv *= step_inv;
      }
      at = target;
      const Complex a = coef_[n] * pw;
      const Complex b = std::conj(coef_[n]) * pw_inv;
      sum += a + b;
      dsum += Complex(0.0, spec_.series.wavenumbers[n]) * (a - b);
    }
    const double w = p.taper_width;
    Complex t(1.0, 0.0), dt(0.0, 0.0);
    if (w > 0.0 && x < w) {
      t = 0.5 * (1.0 - std::cos(kPi * z / w));
      dt = 0.5 * kPi / w * std::sin(kPi * z / w);
    } else if (w > 0.0 && x > p.length - w) {
      const Complex s = p.length - z;
      t = 0.5 * (1.0 - std::cos(kPi * s / w));
      dt = -0.5 * kPi / w * std::sin(kPi * s / w);
    }
    u = t * sum;
    du = dt * sum + t * dsum;
  }

  const PotentialSpec& spec_;
  double dq_ = 0.0;
  std::vector<long> index_;
  std::vector<Complex> coef_;
};

struct Strip {
  double im_min, im_max, re_min, re_max;
  bool contains(Complex z) const {
    return z.imag() > im_min && z.imag() <= im_max && z.real() >= re_min && z.real() <= re_max;
  }
};

Strip strip_for(const PotentialSpec& spec, const WkbOptions& o) {
  const double e = spec.eps;
  Strip s{o.im_min, o.im_max, o.re_min, o.re_max};
  double im_auto = 0.0, lo = 0.0, hi = 0.0;
  switch (spec.family) {
    case Family::FermiStep:
      im_auto = 2.0 * kPi / e;
      lo = -4.0 / e;
      hi = (std::log(1.0 / (1.0 - spec.delta)) + 4.0) / e;
      break;
    case Family::SechSquared:
      im_auto = kPi / e;
      lo = -4.0 / e;
      hi = 4.0 / e;
      break;
    case Family::GaussianBump:
      im_auto = (1.5 * std::sqrt(std::log(1.0 / spec.delta)) + 1.0) / e;
      lo = -4.0 / e;
      hi = 4.0 / e;
      break;
    case Family::FourierSeries:
      im_auto = 3.0 / e;
      lo = 0.0;
      hi = spec.series.length;
      break;
    case Family::Tabulated:
      break;
  }
  if (!(s.im_max > 0.0)) s.im_max = im_auto;
  if (std::isnan(s.re_min)) s.re_min = lo;
  if (std::isnan(s.re_max)) s.re_max = hi;
  return s;
}

// Damped Newton; nullopt on divergence, pole contact or stagnation.
std::optional<Complex> newton(const Characteristic& f, Complex z, const WkbOptions& o, double scale) {
  try {
    Complex d;
    Complex fz = f(z, d);
    for (int it = 0; it < o.max_newton; ++it) {
      if (std::abs(fz) < 1e-3 * o.root_tol) return z;
      if (d == Complex{}) return std::nullopt;
      Complex stepv = fz / d;
      const double cap = 2.0 * scale;  // no leaps across the strip
      if (std::abs(stepv) > cap) stepv *= cap / std::abs(stepv);
      double lambda = 1.0;
      bool moved = false;
      for (int h = 0; h < 40; ++h) {
        const Complex zn = z - lambda * stepv;
        Complex dn;
        Complex fn;
        try {
          fn = f(zn, dn);
        } catch (const PoleError&) {
          lambda *= 0.5;
          continue;
        }
        if (std::abs(fn) < std::abs(fz) || h == 39) {
          moved = std::abs(zn - z) > 0.0;
          z = zn;
          fz = fn;
          d = dn;
          break;
        }
        lambda *= 0.5;
      }
      if (!moved) break;
    }
    if (std::abs(fz) < o.root_tol) return z;
  } catch (const PoleError&) {
  }
  return std::nullopt;
}

void add_root(std::vector<Complex>& roots, Complex z) { roots.push_back(z); }

std::vector<Complex> dedup(std::vector<Complex> roots, double tol) {
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
  });
  std::vector<Complex> out;
  for (Complex z : roots) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && z.imag() - it->imag() <= tol; ++it)
      if (std::abs(*it - z) <= tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(z);
  }
  return out;
}

int winding(const std::array<Complex, 4>& c) {
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double d = std::arg(c[(i + 1) % 4]) - std::arg(c[i]);
    if (d > kPi) d -= 2.0 * kPi;
    if (d < -kPi) d += 2.0 * kPi;
    total += d;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

// Zeros of F for lattice series: winding numbers on FFT-sampled complex rows,
// then Newton from every cell that encloses a zero.
void scan_series(const PotentialSpec& spec, const Characteristic& f, const Strip& s,
                 const WkbOptions& o, std::vector<Complex>& roots, std::size_t& unverified) {
  const double step = o.scan_step > 0.0 ? o.scan_step : 0.04 / spec.eps;
  const double y0 = std::max(s.im_min, 0.0) + 1e-3 * step;
  const auto rows = static_cast<std::size_t>(std::ceil((s.im_max - y0) / step));
  const double dy = (s.im_max - y0) / static_cast<double>(std::max<std::size_t>(rows, 1));
  ComplexRow lower = sample_series_row(spec.series, y0, step);
  const double h = lower.h;
  auto to_f = [&](ComplexRow& r) {
    for (auto& v : r.u) v = 1.0 - spec.delta * v;
  };
  to_f(lower);
  for (std::size_t m = 1; m <= rows; ++m) {
    const double y = y0 + static_cast<double>(m) * dy;
    ComplexRow upper = sample_series_row(spec.series, y, step);
    to_f(upper);
    for (std::size_t j = 0; j + 1 < lower.u.size(); ++j) {
      const double x = static_cast<double>(j) * h;
      if (x + h < s.re_min || x > s.re_max) continue;
      const int w = winding({lower.u[j], lower.u[j + 1], upper.u[j + 1], upper.u[j]});
      if (w == 0) continue;
      const Complex centre(x + 0.5 * h, y - 0.5 * dy);
      auto z = newton(f, centre, o, std::max(h, dy));
      if (!z) z = newton(f, Complex(x, y - dy), o, std::max(h, dy));
      if (z)
        add_root(roots, *z);
      else
        unverified += static_cast<std::size_t>(std::abs(w));
    }
    lower = std::move(upper);
  }
}

// ∫ √F dz along a polyline ending at z0 (where F = 0), branch continued from
// the principal value at the start. Returns nullopt if the branch jumps.
struct PathIntegral {
  Complex value;
  bool ok;
  double worst_turn;
};

PathIntegral integrate_path(const Characteristic& f, const std::vector<Complex>& path, int panels) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& xa = GL::abscissa();
  const auto& wa = GL::weights();
  // nodes of one panel on [0, 1], ascending, with weights
  std::vector<std::pair<double, double>> nodes;
  for (std::size_t i = xa.size(); i-- > 0;) {
    nodes.push_back({0.5 * (1.0 - xa[i]), 0.5 * wa[i]});
    if (xa[i] != 0.0) nodes.push_back({0.5 * (1.0 + xa[i]), 0.5 * wa[i]});
  }
  std::sort(nodes.begin(), nodes.end());

  PathIntegral out{Complex{}, true, 0.0};
  Complex prev = std::sqrt(f.value(path.front()));
  for (std::size_t seg = 0; seg + 1 < path.size(); ++seg) {
    const Complex a = path[seg];
    const Complex b = path[seg + 1];
    const bool last = seg + 2 == path.size();
    for (int p = 0; p < panels; ++p) {
      for (const auto& [t_local, w] : nodes) {
        const double t = (static_cast<double>(p) + t_local) / panels;
        Complex z, dz;
        if (last) {
          // z = b + (a − b)(1 − t)²: the √ endpoint zero becomes linear in t
          z = b + (a - b) * (1.0 - t) * (1.0 - t);
          dz = -2.0 * (a - b) * (1.0 - t);
        } else {
          z = a + (b - a) * t;
          dz = b - a;
        }
        Complex r = std::sqrt(f.value(z));
        if (std::real(r * std::conj(prev)) < 0.0) r = -r;
        if (std::abs(r) > 0.0 && std::abs(prev) > 0.0) {
          const double turn = std::abs(std::arg(r / prev));
          out.worst_turn = std::max(out.worst_turn, turn);
        }
        prev = r;
        out.value += r * dz * (w / panels);
      }
    }
  }
  out.ok = out.worst_turn < kPi / 3.0;
  return out;
}

std::optional<Complex> converge_path(const Characteristic& f, const std::vector<Complex>& path, double tol) {
  Complex last{};
  bool have = false;
  for (int panels = 2; panels <= 4096; panels *= 2) {
    const PathIntegral r = integrate_path(f, path, panels);
    if (have && r.ok && std::abs(r.value - last) <= tol * std::max(1.0, std::abs(r.value))) return r.value;
    if (!r.ok && panels >= 64) break;  // a pole or branch point sits on the path
    last = r.value;
    have = r.ok;
  }
  return std::nullopt;
}

}  // namespace

std::vector<ComplexPoint> analytic_turning_points(const PotentialSpec& spec) {
  const double d = spec.delta;
  const double e = spec.eps;
  std::vector<ComplexPoint> u;
  switch (spec.family) {
    case Family::FermiStep:
      u.push_back(Complex(std::log(1.0 / (1.0 - d)), kPi));
      u.push_back(Complex(std::log(1.0 / (1.0 - d)), 3.0 * kPi));
      break;
    case Family::SechSquared: {
      const double a = std::acos(std::sqrt(d));
      u.push_back(Complex(0.0, a));
      u.push_back(Complex(0.0, kPi - a));
      break;
    }
    case Family::GaussianBump: {
      const double l = std::log(1.0 / d);
      u.push_back(Complex(0.0, std::sqrt(l)));
      for (int n = 1; n <= 2; ++n) {
        const Complex r = std::sqrt(Complex(-l, 2.0 * kPi * n));
        const Complex up = r.imag() > 0.0 ? r : -r;
        u.push_back(up);
        u.push_back(Complex(-up.real(), up.imag()));
      }
      break;
    }
    default:
      throw UsageError("analytic turning points exist only for the closed-form families");
  }
  for (auto& v : u) v /= e;
  return u;
}

TurningPointSearch find_turning_points(const PotentialSpec& spec, const WkbOptions& opts) {
  validate(spec);
  if (spec.family == Family::Tabulated)
    throw UsageError("tabulated potentials have no analytic continuation; WKB needs an analytic shape");
  if (spec.delta == 0.0) throw DomainError("no turning points at delta = 0");
  if (!(opts.root_tol > 0.0) || !(opts.quad_tol > 0.0)) throw ConfigError("WKB tolerances must be positive");

  const Characteristic f(spec);
  const Strip strip = strip_for(spec, opts);
  const double dx = opts.seed_dx > 0.0 ? opts.seed_dx : 0.5 / spec.eps;
  const double dy = opts.seed_dy > 0.0 ? opts.seed_dy : 0.2 / spec.eps;
  std::vector<Complex> roots;
  TurningPointSearch out;

  if (is_deterministic_closed_family(spec.family)) {
    for (Complex seed : analytic_turning_points(spec))
      if (auto z = newton(f, seed, opts, dy)) add_root(roots, *z);
  }
  ComplexRow probe;
  if (spec.family == Family::FourierSeries)
    probe = sample_series_row(spec.series, 0.0, opts.scan_step > 0.0 ? opts.scan_step : 0.04 / spec.eps);
  if (spec.family == Family::FourierSeries && probe.h > 0.0) {
    scan_series(spec, f, strip, opts, roots, out.unverified);
  } else if (spec.family == Family::FourierSeries || opts.seed_grid) {
    for (double y = std::max(strip.im_min, 0.0) + 0.5 * dy; y <= strip.im_max; y += dy)
      for (double x = strip.re_min; x <= strip.re_max; x += dx)
        if (auto z = newton(f, Complex(x, y), opts, dy)) add_root(roots, *z);
  }

  std::vector<Complex> kept;
  for (Complex z : roots)
    if (strip.contains(z)) kept.push_back(z);
  kept = dedup(std::move(kept), 1e-7 / spec.eps);

  for (Complex z : kept) {
    TurningPoint tp;
    tp.z0 = z;
    tp.residual = std::abs(f.value(z));
    if (!(tp.residual < opts.root_tol)) continue;
    tp.smoothness = smoothness_criterion(spec, tp);
    tp.nearest_singularity = nearest_singularity(spec, z);
    tp.singularity_distance = tp.nearest_singularity ? std::abs(z - *tp.nearest_singularity)
                                                     : std::numeric_limits<double>::infinity();
    if (opts.compute_action) {
      try {
        tp.gamma = wkb_action(spec, z, opts);
      } catch (const NumericError&) {
        ++out.action_failures;  // no clean path from the real axis
        continue;
      }
    }
    out.points.push_back(tp);
  }
  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const TurningPoint& a, const TurningPoint& b) { return a.gamma < b.gamma; });
  if (out.points.empty()) {
    std::ostringstream os;
    os << "no turning points in the strip " << strip.im_min << " < Im z <= " << strip.im_max
       << " (strip may be too shallow)";
    out.diagnostic = os.str();
  }
  return out;
}

double wkb_action(const PotentialSpec& spec, ComplexPoint z0, const WkbOptions& opts, std::optional<double> z_r) {
  const Characteristic f(spec);
  const Complex start(z_r ? *z_r : z0.real(), 0.0);
  if (auto v = converge_path(f, {start, z0}, opts.quad_tol)) return std::abs(v->imag());
  // dogleg: up to the height of z0 beside it, then across
  for (double d : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    const Complex corner(z0.real() + d / spec.eps, z0.imag());
    if (auto v = converge_path(f, {start, corner, z0}, opts.quad_tol)) return std::abs(v->imag());
  }
  std::ostringstream os;
  os << "branch tracking failed on the segment from " << start.real() << " to (" << z0.real() << ", "
     << z0.imag() << ") and on every dogleg";
  throw NumericError(os.str());
}

double smoothness_criterion(const PotentialSpec& spec, const TurningPoint& tp) {
  const Characteristic f(spec);
  Complex d;
  f(tp.z0, d);  // dF/dz = −δ dU/dz = −δ ε U′(u)
  return 1.0 / std::abs(d);
}

WkbResult reflectance_wkb(const PotentialSpec& spec, const WkbOptions& opts) {
  WkbOptions o = opts;
  o.compute_action = true;
  const TurningPointSearch search = find_turning_points(spec, o);
  if (search.points.empty()) throw NumericError(search.diagnostic);
  WkbResult res;
  res.dominant = search.points.front();
  res.log_R = -4.0 * res.dominant.gamma;
  res.R = std::exp(res.log_R);
  const double guard = spec.delta * spec.eps / (1.0 - spec.delta);
  if (guard > 0.1) {
    res.warning = true;
    std::ostringstream os;
    os << "WKB needs delta*eps/(1-delta) << 1; here it is " << guard;
    res.warning_text = os.str();
  }
  return res;
}

}  // namespace sscat
