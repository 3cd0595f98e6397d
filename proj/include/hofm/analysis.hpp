#ifndef HOFM_ANALYSIS_HPP_
#define HOFM_ANALYSIS_HPP_

// Spectrum measurement for verification: bin-centred DFT frames, harmonic
// peak picking, carrier-drift detection, DC and spectral slope.
//
// Magnitudes are normalised so that a full-scale cosine sitting exactly on a
// bin reads 1.0 (DC and Nyquist included), whatever the window.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hofm {

enum class Window { rectangular, hann };

/// A block of samples to analyse. With a fundamental set, the frame spans
/// an integer number (>= 16) of its periods, so every harmonic lands on a bin.
struct AnalysisFrame {
  std::vector<double> samples;
  double sample_rate = 0.0;
  std::optional<double> fundamental_hz;

  double periods() const noexcept {
    return fundamental_hz ? static_cast<double>(samples.size()) * *fundamental_hz / sample_rate : 0.0;
  }
};

inline constexpr std::size_t kMinFramePeriods = 16;

/// The longest prefix of `signal` that is bin-centred for `fundamental_hz`,
/// or nullopt when fewer than `min_periods` periods fit. Frequencies are
/// treated at 1e-6 Hz resolution.
inline std::optional<AnalysisFrame> try_bin_centered_frame(std::span<const double> signal, double sample_rate,
                                                           double fundamental_hz,
                                                           std::size_t min_periods = kMinFramePeriods) {
  if (!(sample_rate > 0.0) || !(fundamental_hz > 0.0)) return std::nullopt;
  const auto fs_u = std::llround(sample_rate * 1e6);
  const auto f0_u = std::llround(fundamental_hz * 1e6);
  if (fs_u <= 0 || f0_u <= 0) return std::nullopt;
  const auto g = std::gcd(fs_u, f0_u);
  const auto unit_samples = static_cast<std::size_t>(fs_u / g);
  const auto unit_periods = static_cast<std::size_t>(f0_u / g);
  const std::size_t units = signal.size() / unit_samples;
  if (units == 0 || units * unit_periods < min_periods) return std::nullopt;
  AnalysisFrame frame;
  frame.samples.assign(signal.begin(), signal.begin() + static_cast<std::ptrdiff_t>(units * unit_samples));
  frame.sample_rate = sample_rate;
  frame.fundamental_hz = fundamental_hz;
  return frame;
}

inline AnalysisFrame bin_centered_frame(std::span<const double> signal, double sample_rate, double fundamental_hz,
                                        std::size_t min_periods = kMinFramePeriods) {
  auto frame = try_bin_centered_frame(signal, sample_rate, fundamental_hz, min_periods);
  if (!frame)
    throw std::invalid_argument("cannot fit " + std::to_string(min_periods) + " periods of " +
                                std::to_string(fundamental_hz) + " Hz in " + std::to_string(signal.size()) +
                                " samples at " + std::to_string(sample_rate) + " Hz");
  return *std::move(frame);
}

struct SpectrumBin {
  double freq_hz = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;
};

struct MeasuredSpectrum {
  std::vector<SpectrumBin> bins;
  double sample_rate = 0.0;
  double bin_hz = 0.0;
  Window window = Window::rectangular;

  std::size_t nearest_bin(double freq_hz) const noexcept {
    const auto k = static_cast<long long>(std::llround(freq_hz / bin_hz));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(bins.size()) - 1));
  }

  double magnitude_at(double freq_hz) const noexcept { return bins[nearest_bin(freq_hz)].magnitude; }

  /// Largest magnitude within +-half_width_hz of freq_hz (at least the nearest bin).
  double peak_near(double freq_hz, double half_width_hz) const noexcept {
    const std::size_t lo = nearest_bin(freq_hz - half_width_hz);
    const std::size_t hi = nearest_bin(freq_hz + half_width_hz);
    double m = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) m = std::max(m, bins[k].magnitude);
    return m;
  }

  double max_magnitude() const noexcept {
    double m = 0.0;
    for (const auto& b : bins) m = std::max(m, b.magnitude);
    return m;
  }
};

namespace detail {

// The FFTW planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<std::complex<double>> real_dft(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

inline void check_frame(const AnalysisFrame& frame, Window window) {
  if (frame.samples.empty()) throw std::invalid_argument("empty analysis frame");
  if (!(frame.sample_rate > 0.0)) throw std::invalid_argument("analysis frame needs a positive sample rate");
  if (frame.fundamental_hz) {
    const double p = frame.periods();
    const double whole = std::round(p);
    if (std::abs(p - whole) > 1e-9 * std::max(1.0, p) || whole < static_cast<double>(kMinFramePeriods))
      throw std::invalid_argument("frame of " + std::to_string(frame.samples.size()) +
                                  " samples is not an integer number (>= 16) of " +
                                  std::to_string(*frame.fundamental_hz) + " Hz periods");
  } else if (window == Window::rectangular) {
    throw std::invalid_argument("rectangular analysis needs a bin-centred frame (set a fundamental)");
  }
}

}  // namespace detail

inline MeasuredSpectrum measure_spectrum(const AnalysisFrame& frame, Window window = Window::rectangular) {
  detail::check_frame(frame, window);
  const std::size_t n = frame.samples.size();
  std::vector<double> x(frame.samples);
  double wsum = static_cast<double>(n);
  if (window == Window::hann) {
    wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
      x[i] *= w;
      wsum += w;
    }
  }
  const auto spec = detail::real_dft(x);
  MeasuredSpectrum out;
  out.sample_rate = frame.sample_rate;
  out.bin_hz = frame.sample_rate / static_cast<double>(n);
  out.window = window;
  out.bins.resize(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    out.bins[k] = {static_cast<double>(k) * out.bin_hz, std::abs(spec[k]) * (edge ? 1.0 : 2.0) / wsum,
                   std::arg(spec[k])};
  }
  return out;
}

/// Mean of the frame; over whole periods this is the DC term.
inline double measure_dc(const AnalysisFrame& frame) {
  if (frame.samples.empty()) throw std::invalid_argument("empty analysis frame");
  return std::accumulate(frame.samples.begin(), frame.samples.end(), 0.0) / static_cast<double>(frame.samples.size());
}

struct SpectralPeak {
  double freq_hz = 0.0;
  double magnitude = 0.0;
  /// Distance to the nearest grid multiple.
  double offset_hz = 0.0;
};

struct DriftReport {
  double max_offset_hz = 0.0;
  std::vector<SpectralPeak> peaks;
  std::vector<SpectralPeak> offending;
};

/// Locates every local peak within 40 dB of the strongest bin (DC excluded), refines its
/// frequency by a parabola through the log magnitudes of three bins, and
/// measures how far it sits from the nearest multiple of grid_hz.
inline DriftReport detect_carrier_drift(const MeasuredSpectrum& spec, double grid_hz, double tolerance_hz) {
  if (!(grid_hz > 0.0)) throw std::invalid_argument("drift grid must be positive");
  DriftReport report;
  const auto& b = spec.bins;
  if (b.size() < 3) return report;
  const double threshold = spec.max_magnitude() * 0.01;
  // DC is not a partial; skip its main lobe.
  const std::size_t first = spec.window == Window::hann ? 2 : 1;
  for (std::size_t k = first; k + 1 < b.size(); ++k) {
    const double m = b[k].magnitude;
    if (m <= 0.0 || m < threshold || !(m > b[k - 1].magnitude) || !(m >= b[k + 1].magnitude)) continue;
    double delta = 0.0;
    const double lo = b[k - 1].magnitude;
    const double hi = b[k + 1].magnitude;
    if (lo > m * 1e-9 && hi > m * 1e-9) {
      const double a = std::log(lo);
      const double c = std::log(m);
      const double d = std::log(hi);
      const double denom = a - 2.0 * c + d;
      if (denom < 0.0) delta = 0.5 * (a - d) / denom;
    }
    const double f = (static_cast<double>(k) + delta) * spec.bin_hz;
    const double offset = std::abs(f - std::round(f / grid_hz) * grid_hz);
    const SpectralPeak peak{f, m, offset};
    report.peaks.push_back(peak);
    report.max_offset_hz = std::max(report.max_offset_hz, offset);
    if (offset > tolerance_hz) report.offending.push_back(peak);
  }
  return report;
}

/// Magnitudes of harmonics first..last of fundamental_hz: the largest bin
/// within a quarter of the fundamental of each harmonic.
inline std::vector<double> harmonic_magnitudes(const MeasuredSpectrum& spec, double fundamental_hz, int first,
                                               int last) {
  std::vector<double> out;
  for (int h = first; h <= last; ++h) out.push_back(spec.peak_near(h * fundamental_hz, 0.25 * fundamental_hz));
  return out;
}

/// Least-squares slope of harmonic level (dB) against log2 frequency, in dB
/// per octave. A 1/f envelope gives about -6.02.
inline double fit_spectral_slope(const MeasuredSpectrum& spec, double fundamental_hz, int first, int last) {
  if (!(fundamental_hz > 0.0) || first < 1 || last < first)
    throw std::invalid_argument("slope fit needs a positive fundamental and harmonic range 1 <= first <= last");
  const auto mags = harmonic_magnitudes(spec, fundamental_hz, first, last);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int h = first; h <= last; ++h) {
    const double m = mags[static_cast<std::size_t>(h - first)];
    if (m <= 1e-9) continue;
    xs.push_back(std::log2(h * fundamental_hz));
    ys.push_back(20.0 * std::log10(m));
  }
  if (xs.size() < 4)
    throw std::invalid_argument("slope fit needs at least 4 harmonics above 1e-9, found " + std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace hofm

#endif  // HOFM_ANALYSIS_HPP_
