#include "sscat/random_potential.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

namespace sscat {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t next_smooth_size(std::size_t n) {
  for (;; ++n) {
    std::size_t m = n;
    for (std::size_t p : {2u, 3u, 5u})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

// Lattice index of every wavenumber when all are integer multiples of a common
// spacing; empty otherwise.
std::vector<long> lattice_indices(const std::vector<double>& q, double& spacing) {
  if (q.empty()) return {};
  spacing = q.size() > 1 ? q[1] - q[0] : q[0];
  if (!(spacing > 0.0)) return {};
  std::vector<long> idx(q.size());
  for (std::size_t n = 0; n < q.size(); ++n) {
    const double m = q[n] / spacing;
    const double r = std::round(m);
    if (std::abs(m - r) > 1e-9 * std::max(1.0, m) || r < 1.0) return {};
    idx[n] = static_cast<long>(r);
  }
  return idx;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// x_j = Re Σ coef_k e^{2πi k j/M} for k < M/2 via a complex-to-real transform.
std::vector<double> real_synthesis(const std::vector<Complex>& coef, std::size_t m, std::size_t keep) {
  const std::size_t half = m / 2 + 1;
  std::unique_ptr<fftw_complex[], FftwDeleter> in(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half)));
  std::unique_ptr<double[], FftwDeleter> out(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
  for (std::size_t k = 0; k < half; ++k) {
    const Complex c = k < coef.size() ? coef[k] : Complex{};
    // c2r doubles every interior bin through Hermitian symmetry.
    in[k][0] = 0.5 * c.real();
    in[k][1] = 0.5 * c.imag();
  }
  in[0][0] *= 2.0;
  in[0][1] = 0.0;
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return std::vector<double>(out.get(), out.get() + keep);
}

// x_j = Σ_k in_k e^{+2πi jk/M}
std::vector<Complex> complex_synthesis(const std::vector<Complex>& coef, std::size_t keep) {
  const std::size_t m = coef.size();
  std::unique_ptr<fftw_complex[], FftwDeleter> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m)));
  for (std::size_t k = 0; k < m; ++k) {
    buf[k][0] = coef[k].real();
    buf[k][1] = coef[k].imag();
  }
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<Complex> out(keep);
  for (std::size_t j = 0; j < keep; ++j) out[j] = Complex(buf[j][0], buf[j][1]);
  return out;
}

}  // namespace

double correlation_value(const GaussianCorrelation& c, double s) {
  const double x = c.eps * s;
  return std::exp(-x * x);
}

double spectral_density(const GaussianCorrelation& c, double q) {
  const double x = q / (2.0 * c.eps);
  return std::exp(-x * x) / (2.0 * std::sqrt(std::numbers::pi) * c.eps);
}

double correlation_fourier(const GaussianCorrelation& c) {
  return std::sqrt(std::numbers::pi) / c.eps * std::exp(-1.0 / (c.eps * c.eps));
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(splitmix64(base_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

PotentialSpec synthesize_random(const GaussianCorrelation& corr, double delta,
                                const SynthesisOptions& opts) {
  if (!(corr.eps > 0.0)) throw ConfigError("correlation eps must be positive");
  if (!(opts.length > 0.0)) throw ConfigError("sample length must be positive");
  const double taper = opts.taper_width > 0.0 ? opts.taper_width : 5.0 / corr.eps;
  if (2.0 * taper > opts.length)
    throw ConfigError("sample length shorter than the two end tapers");

  const double q_max = opts.spectral_cutoff * corr.eps;
  const double wanted = std::ceil(opts.modes_per_corr_length * corr.eps * opts.length);
  if (wanted > static_cast<double>(opts.max_modes))
    throw ConfigError("insufficient modes: the requested bandwidth and length need more than max_modes");
  const auto n_modes = static_cast<std::size_t>(std::max(64.0, wanted));
  const double dq = q_max / static_cast<double>(n_modes);

  PotentialSpec spec = make_spec(Family::FourierSeries, delta, corr.eps);
  auto& p = spec.series;
  p.length = opts.length;
  p.taper_width = taper;
  p.amplitudes.resize(n_modes);
  p.wavenumbers.resize(n_modes);
  p.phases.resize(n_modes);

  std::mt19937_64 rng(splitmix64(opts.seed));
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t n = 0; n < n_modes; ++n) {
    const double q = static_cast<double>(n + 1) * dq;
    // One-sided density 2S(q); a cosine of amplitude a carries variance a²/2.
    p.wavenumbers[n] = q;
    p.amplitudes[n] = std::sqrt(4.0 * spectral_density(corr, q) * dq);
    p.phases[n] = two_pi * unit_uniform(rng);
  }
  return spec;
}

SampledShape sample_series(const FourierSeriesParams& p, double max_step) {
  if (!(max_step > 0.0)) throw ConfigError("sampling step must be positive");
  SampledShape out;
  double dq = 0.0;
  const auto idx = lattice_indices(p.wavenumbers, dq);
  const double pi = std::numbers::pi;

  std::size_t count = 0;
  if (!idx.empty()) {
    const long m_max = *std::max_element(idx.begin(), idx.end());
    std::size_t m = static_cast<std::size_t>(std::ceil(2.0 * pi / (dq * max_step)));
    m = std::max<std::size_t>(m, static_cast<std::size_t>(2 * m_max + 2));
    m = next_smooth_size(m);
    out.h = 2.0 * pi / (dq * static_cast<double>(m));
    count = static_cast<std::size_t>(std::ceil(p.length / out.h));
    if (count > m) throw ConfigError("series period shorter than the sample length");
    out.z_first = 0.5 * out.h;
    std::vector<Complex> cu(static_cast<std::size_t>(m_max) + 1);
    std::vector<Complex> cd(cu.size());
    for (std::size_t n = 0; n < idx.size(); ++n) {
      const Complex c = std::polar(p.amplitudes[n], p.phases[n] + p.wavenumbers[n] * out.z_first);
      cu[static_cast<std::size_t>(idx[n])] += c;
      cd[static_cast<std::size_t>(idx[n])] += Complex(0.0, p.wavenumbers[n]) * c;
    }
    out.u = real_synthesis(cu, m, count);
    out.du = real_synthesis(cd, m, count);
  } else {
    count = static_cast<std::size_t>(std::ceil(p.length / max_step));
    out.h = p.length / static_cast<double>(count);
    out.z_first = 0.5 * out.h;
    out.u.assign(count, 0.0);
    out.du.assign(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      const double z = out.z_first + static_cast<double>(j) * out.h;
      for (std::size_t n = 0; n < p.amplitudes.size(); ++n) {
        const double arg = p.wavenumbers[n] * z + p.phases[n];
        out.u[j] += p.amplitudes[n] * std::cos(arg);
        out.du[j] -= p.amplitudes[n] * p.wavenumbers[n] * std::sin(arg);
      }
    }
  }

  const double w = p.taper_width;
  for (std::size_t j = 0; j < count; ++j) {
    const double z = out.z_first + static_cast<double>(j) * out.h;
    double t = 1.0;
    double dt = 0.0;
    if (z > p.length) {
      t = 0.0;
      out.du[j] = 0.0;
    } else if (w <= 0.0) {
      continue;
    } else if (z < w) {
      t = shape::ramp(z, w);
      dt = shape::ramp_derivative(z, w);
    } else if (z > p.length - w) {
      t = shape::ramp(p.length - z, w);
      dt = -shape::ramp_derivative(p.length - z, w);
    }
    out.du[j] = dt * out.u[j] + t * out.du[j];
    out.u[j] *= t;
  }
  return out;
}

ComplexRow sample_series_row(const FourierSeriesParams& p, double y, double max_step) {
  if (!(max_step > 0.0)) throw ConfigError("sampling step must be positive");
  ComplexRow out;
  double dq = 0.0;
  const auto idx = lattice_indices(p.wavenumbers, dq);
  if (idx.empty()) return out;
  const long m_max = *std::max_element(idx.begin(), idx.end());
  std::size_t m = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / (dq * max_step)));
  m = next_smooth_size(std::max<std::size_t>(m, static_cast<std::size_t>(2 * m_max + 2)));
  out.h = 2.0 * std::numbers::pi / (dq * static_cast<double>(m));
  const auto count = static_cast<std::size_t>(std::floor(p.length / out.h)) + 1;
  if (count > m) throw ConfigError("series period shorter than the sample length");

  // cos(qz + φ) = ½e^{iφ}e^{−qy}e^{iqx} + ½e^{−iφ}e^{qy}e^{−iqx}
  std::vector<Complex> cu(m), cd(m);
  for (std::size_t n = 0; n < idx.size(); ++n) {
    const double q = p.wavenumbers[n];
    const Complex plus = std::polar(0.5 * p.amplitudes[n] * std::exp(-q * y), p.phases[n]);
    const Complex minus = std::polar(0.5 * p.amplitudes[n] * std::exp(q * y), -p.phases[n]);
    const auto k = static_cast<std::size_t>(idx[n]);
    cu[k] += plus;
    cu[m - k] += minus;
    cd[k] += Complex(0.0, q) * plus;
    cd[m - k] -= Complex(0.0, q) * minus;
  }
  out.u = complex_synthesis(cu, count);
  out.du = complex_synthesis(cd, count);

  const double w = p.taper_width;
  const double pi = std::numbers::pi;
  for (std::size_t j = 0; j < count; ++j) {
    const double x = static_cast<double>(j) * out.h;
    const Complex z(x, y);
    Complex t(1.0, 0.0), dt(0.0, 0.0);
    if (w > 0.0 && x < w) {
      t = 0.5 * (1.0 - std::cos(pi * z / w));
      dt = 0.5 * pi / w * std::sin(pi * z / w);
    } else if (w > 0.0 && x > p.length - w) {
      const Complex s = p.length - z;
      t = 0.5 * (1.0 - std::cos(pi * s / w));
      dt = -0.5 * pi / w * std::sin(pi * s / w);
    }
    out.du[j] = dt * out.u[j] + t * out.du[j];
    out.u[j] *= t;
  }
  return out;
}

}  // namespace sscat
