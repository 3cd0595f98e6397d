#ifndef HOFM_PM_REFERENCE_HPP_
#define HOFM_PM_REFERENCE_HPP_

// Phase-modulation references evaluated directly from the closed-form phase,
// sample by sample, with library transcendental functions. Time is n / fs for
// each sample; nothing is accumulated.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hofm {

struct PMParams {
  double fc = 0.0;
  /// Modulator frequencies, innermost (first-order) modulator first.
  std::vector<double> fm;
  /// Indices, same order as fm.
  std::vector<double> z;
  double sample_rate = 48000.0;
  /// Optional constant added to each modulator's phase (radians).
  std::vector<double> mod_phase;
};

namespace detail {

inline void check_pm(const PMParams& p, std::size_t orders) {
  if (p.fm.size() != orders || p.z.size() != orders)
    throw std::invalid_argument("PM reference expects " + std::to_string(orders) + " modulation order(s)");
  if (!p.mod_phase.empty() && p.mod_phase.size() != orders)
    throw std::invalid_argument("PM modulator phase list length must match the modulation orders");
  for (double z : p.z)
    if (z < 0.0) throw std::invalid_argument("modulation indices must be >= 0");
  if (!(p.sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
}

inline double mod_phase(const PMParams& p, std::size_t i) { return p.mod_phase.empty() ? 0.0 : p.mod_phase[i]; }

}  // namespace detail

/// cos(2pi fc t + z sin(2pi fm t))
inline std::vector<double> render_pm1(const PMParams& p, std::size_t n_samples) {
  detail::check_pm(p, 1);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / p.sample_rate;
    out[n] = std::cos(two_pi * p.fc * t + p.z[0] * std::sin(two_pi * p.fm[0] * t + detail::mod_phase(p, 0)));
  }
  return out;
}

/// cos(2pi fc t + z1 sin(2pi fm1 t + z0 sin(2pi fm0 t)))
inline std::vector<double> render_pm2(const PMParams& p, std::size_t n_samples) {
  detail::check_pm(p, 2);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / p.sample_rate;
    const double inner = p.z[0] * std::sin(two_pi * p.fm[0] * t + detail::mod_phase(p, 0));
    const double outer = p.z[1] * std::sin(two_pi * p.fm[1] * t + inner + detail::mod_phase(p, 1));
    out[n] = std::cos(two_pi * p.fc * t + outer);
  }
  return out;
}

/// Feedback PM with a unit delay: out[n] = amp cos(2pi f n/fs + gain out[n-1]).
inline std::vector<double> render_feedback_pm(double amp, double freq_hz, double feedback_gain, double sample_rate,
                                              std::size_t n_samples) {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> out(n_samples);
  double last = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    last = amp * std::cos(two_pi * freq_hz * t + feedback_gain * last);
    out[n] = last;
  }
  return out;
}

}  // namespace hofm

#endif  // HOFM_PM_REFERENCE_HPP_
