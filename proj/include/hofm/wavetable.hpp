#ifndef HOFM_WAVETABLE_HPP_
#define HOFM_WAVETABLE_HPP_

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hofm {

/// Width of the phase accumulator in bits.
inline constexpr int kPhaseBits = 32;
/// 2^32 as a real, the number of phase steps in one cycle.
inline constexpr double kPhaseCycle = 4294967296.0;
/// Quarter of a cycle in phase steps.
inline constexpr std::uint32_t kQuarterCycle = 0x40000000u;
inline constexpr std::size_t kDefaultTableSize = 1025;

/// One period of a waveform with a trailing guard point.
///
/// The table holds 2^k + 1 samples and the last sample repeats the first,
/// so linear interpolation may always read `samples[index + 1]`. Alongside
/// the waveform the table keeps its antiderivative over one cycle (phase in
/// radians), used by operators that integrate exactly across a sample step.
class Wavetable {
 public:
  /// Cosine table of `size` points (2^k + 1, k >= 4).
  static Wavetable cosine(std::size_t size = kDefaultTableSize) {
    check_size(size);
    const std::size_t len = size - 1;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(len);
    std::vector<double> wave(size);
    std::vector<double> integral(size);
    for (std::size_t i = 0; i < size; ++i) {
      wave[i] = std::cos(step * static_cast<double>(i));
      integral[i] = std::sin(step * static_cast<double>(i));
    }
    wave[len] = wave[0];
    integral[len] = integral[0];
    return Wavetable(std::move(wave), std::move(integral));
  }

  /// Arbitrary single-cycle table; the guard point must already be present.
  /// The antiderivative is the exact integral of the linear interpolant,
  /// shifted to zero mean.
  static Wavetable from_samples(std::vector<double> wave) {
    check_size(wave.size());
    if (wave.back() != wave.front())
      throw std::invalid_argument("wavetable guard point must equal the first sample");
    const std::size_t len = wave.size() - 1;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(len);
    std::vector<double> integral(wave.size(), 0.0);
    for (std::size_t i = 0; i < len; ++i)
      integral[i + 1] = integral[i] + 0.5 * step * (wave[i] + wave[i + 1]);
    double mean = 0.0;
    for (std::size_t i = 0; i < len; ++i) mean += integral[i];
    mean /= static_cast<double>(len);
    for (auto& v : integral) v -= mean;
    return Wavetable(std::move(wave), std::move(integral));
  }

  std::span<const double> samples() const noexcept { return wave_; }
  std::span<const double> integral() const noexcept { return integral_; }
  std::size_t size() const noexcept { return wave_.size(); }
  double operator[](std::size_t i) const noexcept { return wave_[i]; }

  /// log2 of the number of distinct points (size - 1).
  int index_bits() const noexcept {
    return std::countr_zero(static_cast<std::uint64_t>(wave_.size() - 1));
  }

  /// True when the antiderivative closes over one cycle (zero-mean waveform).
  bool integral_is_periodic(double tolerance = 1e-9) const noexcept {
    return std::abs(integral_.back() - integral_.front()) <= tolerance;
  }

 private:
  Wavetable(std::vector<double> wave, std::vector<double> integral)
      : wave_(std::move(wave)), integral_(std::move(integral)) {}

  static void check_size(std::size_t size) {
    const std::size_t len = size > 0 ? size - 1 : 0;
    if (len < 16 || !std::has_single_bit(len) || len > (std::size_t{1} << 30))
      throw std::invalid_argument("wavetable size must be 2^k + 1 with 4 <= k <= 30, got " +
                                  std::to_string(size));
  }

  std::vector<double> wave_;
  std::vector<double> integral_;
};

/// Converts a frequency to a phase increment: freqHz * 2^32 / sampleRate,
/// truncated toward zero. The result may be negative; it is applied to the
/// 32-bit phase with wrapping arithmetic.
inline std::int64_t freq_to_increment(double freqHz, double sampleRate) {
  if (!(sampleRate > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (!(std::abs(freqHz) < sampleRate))
    throw std::out_of_range("frequency " + std::to_string(freqHz) +
                            " Hz aliases beyond one cycle per sample at " +
                            std::to_string(sampleRate) + " Hz");
  const double fac = kPhaseCycle / sampleRate;
  return static_cast<std::int64_t>(std::trunc(freqHz * fac));
}

/// 32-bit fixed-point phase with an index/fraction split sized to a table.
class PhaseAccumulator {
 public:
  PhaseAccumulator() = default;
  explicit PhaseAccumulator(const Wavetable& table) noexcept
      : frac_bits_(kPhaseBits - table.index_bits()),
        frac_mask_((std::uint32_t{1} << frac_bits_) - 1u),
        frac_scale_(1.0 / static_cast<double>(frac_mask_ + std::uint64_t{1})) {}

  std::uint32_t phase() const noexcept { return phase_; }
  void reset(std::uint32_t phase = 0) noexcept { phase_ = phase; }

  std::uint32_t index() const noexcept { return phase_ >> frac_bits_; }
  double fraction() const noexcept { return (phase_ & frac_mask_) * frac_scale_; }

  int frac_bits() const noexcept { return frac_bits_; }
  std::uint32_t frac_mask() const noexcept { return frac_mask_; }
  double frac_scale() const noexcept { return frac_scale_; }

  /// Unsigned overflow is the wrap.
  void advance(std::int64_t increment) noexcept {
    phase_ += static_cast<std::uint32_t>(static_cast<std::uint64_t>(increment));
  }

  /// Linear interpolation of `table` at an arbitrary phase.
  double read(std::span<const double> table, std::uint32_t phase) const noexcept {
    const std::uint32_t ndx = phase >> frac_bits_;
    const double frac = (phase & frac_mask_) * frac_scale_;
    return table[ndx] + frac * (table[ndx + 1] - table[ndx]);
  }

 private:
  std::uint32_t phase_ = 0;
  int frac_bits_ = kPhaseBits - 10;
  std::uint32_t frac_mask_ = (std::uint32_t{1} << (kPhaseBits - 10)) - 1u;
  double frac_scale_ = 1.0 / static_cast<double>(std::uint32_t{1} << (kPhaseBits - 10));
};

/// One oscillator sample: amp * table(phase), then phase += increment.
inline double osc_tick(PhaseAccumulator& state, const Wavetable& table, double amp,
                       std::int64_t increment) noexcept {
  const std::uint32_t ndx = state.index();
  const double frac = state.fraction();
  const double s = amp * (table[ndx] + frac * (table[ndx + 1] - table[ndx]));
  state.advance(increment);
  return s;
}

}  // namespace hofm

#endif  // HOFM_WAVETABLE_HPP_
