#ifndef HOFM_SPECTRUM_PREDICT_HPP_
#define HOFM_SPECTRUM_PREDICT_HPP_

// Analytic line spectra for first- and second-order modulation.
//
// Every predicted line is a zero-phase cosine, so a line at a negative
// frequency folds onto |f| with its signed amplitude unchanged, and lines
// landing on the same frequency add coherently.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hofm/bessel.hpp"
#include "hofm/errors.hpp"

namespace hofm {

inline constexpr double kCoincidentHz = 1e-9;
inline constexpr double kDefaultAmplitudeFloor = 1e-6;
inline constexpr std::size_t kExpansionBudget = 10'000'000;

struct SpectralLine {
  double freq_hz = 0.0;
  double amplitude = 0.0;

  friend bool operator==(const SpectralLine&, const SpectralLine&) = default;
};

/// Cosine-phase partials, strictly increasing in frequency.
struct LineSpectrum {
  std::vector<SpectralLine> lines;

  /// Mean-square value of the signal the lines describe.
  double total_power() const noexcept {
    double p = 0.0;
    for (const auto& l : lines) p += l.freq_hz == 0.0 ? l.amplitude * l.amplitude : 0.5 * l.amplitude * l.amplitude;
    return p;
  }

  /// Amplitude of the line at `freq_hz` (within kCoincidentHz), or 0.
  double amplitude_at(double freq_hz) const noexcept {
    auto it = std::lower_bound(lines.begin(), lines.end(), freq_hz - kCoincidentHz,
                               [](const SpectralLine& l, double f) { return l.freq_hz < f; });
    if (it != lines.end() && std::abs(it->freq_hz - freq_hz) <= kCoincidentHz) return it->amplitude;
    return 0.0;
  }

  void scale(double gain) noexcept {
    for (auto& l : lines) l.amplitude *= gain;
  }

  friend bool operator==(const LineSpectrum&, const LineSpectrum&) = default;
};

struct TruncationPolicy {
  /// Inner sidebands kept on each side; negative selects ceil(z0) + 8.
  int sidebands = -1;
  double amplitude_floor = kDefaultAmplitudeFloor;

  int resolved_sidebands(double z0) const noexcept {
    return sidebands >= 0 ? sidebands : static_cast<int>(std::ceil(z0)) + 8;
  }
};

/// Folds negative frequencies, sums lines closer than kCoincidentHz (in
/// input order), sorts, and drops lines with |amplitude| <= prune_below.
inline LineSpectrum merge_and_fold(std::span<const SpectralLine> raw, double prune_below = 0.0) {
  std::vector<SpectralLine> folded(raw.begin(), raw.end());
  for (auto& l : folded) l.freq_hz = std::abs(l.freq_hz);
  std::stable_sort(folded.begin(), folded.end(),
                   [](const SpectralLine& a, const SpectralLine& b) { return a.freq_hz < b.freq_hz; });
  LineSpectrum out;
  for (std::size_t i = 0; i < folded.size();) {
    SpectralLine merged = folded[i];
    std::size_t j = i + 1;
    for (; j < folded.size() && folded[j].freq_hz - merged.freq_hz <= kCoincidentHz; ++j)
      merged.amplitude += folded[j].amplitude;
    if (std::abs(merged.amplitude) > prune_below) out.lines.push_back(merged);
    i = j;
  }
  return out;
}

namespace detail {

/// Signed J_n(x) for n in [-order, order], returned as index n + order.
inline std::vector<double> signed_bessel_span(int order, double x) {
  const auto row = bessel_row(order, std::abs(x));
  std::vector<double> out(2 * static_cast<std::size_t>(order) + 1);
  for (int n = -order; n <= order; ++n) {
    const int m = std::abs(n);
    double v = row[static_cast<std::size_t>(m)];
    if ((m % 2 == 1) && ((n < 0) != (x < 0.0))) v = -v;
    out[static_cast<std::size_t>(n + order)] = v;
  }
  return out;
}

/// Orders beyond which |J_n(|x|)| stays below `floor` (J_n decreases for n > |x|).
inline int significant_order(double x, double floor) {
  const double ax = std::abs(x);
  floor = std::max(floor, 1e-300);
  int order = static_cast<int>(std::ceil(ax)) + 16;
  for (;;) {
    const auto row = bessel_row(order, ax);
    for (int n = static_cast<int>(std::ceil(ax)); n <= order; ++n)
      if (std::abs(row[static_cast<std::size_t>(n)]) < floor) return std::max(n - 1, 0);
    order *= 2;
  }
}

inline std::int64_t freq_key(double f) { return std::llround(f / kCoincidentHz); }

}  // namespace detail

/// Lines at fc + n fm weighted J_n(z), n in [-max_sideband, max_sideband].
/// Terms with |J_n(z)| below `amplitude_floor` are skipped; a negative
/// max_sideband stops where |J_n(z)| falls below the floor for good.
inline LineSpectrum predict_first_order(double fc, double fm, double z, int max_sideband = -1,
                                        double amplitude_floor = kDefaultAmplitudeFloor) {
  if (!(fm > 0.0)) throw std::invalid_argument("modulator frequency must be positive");
  if (max_sideband < 0) max_sideband = detail::significant_order(z, amplitude_floor);
  const auto weights = detail::signed_bessel_span(max_sideband, z);
  std::vector<SpectralLine> raw;
  for (int n = -max_sideband; n <= max_sideband; ++n) {
    const double w = weights[static_cast<std::size_t>(n + max_sideband)];
    if (std::abs(w) < amplitude_floor || w == 0.0) continue;
    raw.push_back({fc + n * fm, w});
  }
  return merge_and_fold(raw);
}

/// Second-order spectrum, cos(2pi fc t + z1 sin(2pi fm1 t + z0 sin(2pi fm0 t))).
///
/// The inner modulator is expanded into lines fm1 + k fm0 (|k| <= K) with
/// weights J_k(z0). Each line is an independent sinusoidal phase modulator
/// of index z1 J_k(z0), so the carrier spectrum is the convolution of their
/// Jacobi-Anger series: multi-index (n_k) contributes prod J_{n_k}(z1 J_k(z0))
/// at fc + sum n_k (fm1 + k fm0).
inline LineSpectrum predict_second_order(double fc, double fm0, double fm1, double z0, double z1,
                                         const TruncationPolicy& policy = {}) {
  if (!(fm0 > 0.0) || !(fm1 > 0.0)) throw std::invalid_argument("modulator frequencies must be positive");
  const int K = policy.resolved_sidebands(z0);
  const double floor = policy.amplitude_floor;
  const auto inner = detail::signed_bessel_span(K, z0);

  std::vector<SpectralLine> current{{fc, 1.0}};
  std::size_t visited = 0;
  for (int k = -K; k <= K; ++k) {
    const double x = z1 * inner[static_cast<std::size_t>(k + K)];
    const double fk = fm1 + k * fm0;
    const int order = detail::significant_order(x, floor);
    const auto weights = detail::signed_bessel_span(order, x);

    std::map<std::int64_t, SpectralLine> next;
    visited += current.size() * weights.size();
    if (visited > kExpansionBudget)
      throw BudgetExceeded("second-order expansion exceeds " + std::to_string(kExpansionBudget) +
                           " terms; raise the amplitude floor");
    for (const auto& line : current) {
      for (int n = -order; n <= order; ++n) {
        const double w = line.amplitude * weights[static_cast<std::size_t>(n + order)];
        if (std::abs(w) < floor || w == 0.0) continue;
        const double f = line.freq_hz + n * fk;
        auto [it, inserted] = next.try_emplace(detail::freq_key(f), SpectralLine{f, w});
        if (!inserted) it->second.amplitude += w;
      }
    }
    current.clear();
    for (const auto& [key, line] : next)
      if (std::abs(line.amplitude) >= floor) current.push_back(line);
  }
  return merge_and_fold(current);
}

}  // namespace hofm

#endif  // HOFM_SPECTRUM_PREDICT_HPP_
