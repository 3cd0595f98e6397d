#ifndef HOFM_OPERATOR_HPP_
#define HOFM_OPERATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hofm/errors.hpp"
#include "hofm/wavetable.hpp"

namespace hofm {

inline constexpr std::size_t kDefaultBlockSize = 64;

/// How an operator derives its modulation output from its oscillator.
enum class ModulationOutput {
  /// Integral of amp * waveform over the sample step, times fs / 2pi.
  /// Accumulated by the next operator it reproduces the phase-modulation
  /// phase exactly; in continuous time it equals audio * f.
  exact_step,
  /// audio * (freqHz + modIn), sample by sample. Bit-for-bit the classic
  /// reference operator; the left-rectangle integration leaves a DC error
  /// that shows up as carrier drift in stacks and pitch error in feedback.
  instantaneous,
  /// audio * freqHz with the static scalar frequency. The naive deviation
  /// law: any DC in a modulated modulator becomes carrier drift.
  static_frequency,
};

struct OperatorOutput {
  double audio;
  double modulation;
};

/// Scalar inputs of one operator: index (or output amplitude) and frequency.
struct OperatorParams {
  double amp = 0.0;
  double freq_hz = 0.0;
};

/// Audio and modulation streams of a render.
struct Block {
  std::vector<double> audio;
  std::vector<double> modulation;
  double sample_rate = 0.0;
};

/// A modulatable table oscillator with two outputs: audio, and a
/// modulation signal scaled by the instantaneous frequency so it can drive
/// the frequency input of the next operator in a stack (or itself).
///
/// The block interface mirrors the usual vector-processing layout: each call
/// fills `block_size()` samples and returns the audio; the modulation output
/// of the same block is available from `modulation()`.
class Operator {
 public:
  Operator(const Wavetable& table, double sample_rate,
           std::size_t block_size = kDefaultBlockSize,
           ModulationOutput rule = ModulationOutput::exact_step)
      : table_(&table),
        osc_(table),
        fs_(sample_rate),
        step_scale_(sample_rate / (2.0 * std::numbers::pi)),
        rule_(rule),
        audio_(block_size),
        mod_(block_size) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("operator sample rate must be positive");
    if (block_size == 0) throw std::invalid_argument("operator block size must be positive");
    if (rule == ModulationOutput::exact_step && !table.integral_is_periodic())
      throw std::invalid_argument("exact-step modulation needs a zero-mean waveform table");
  }

  /// One sample. Throws std::out_of_range when |freqHz + modIn| >= fs.
  OperatorOutput tick(double amp, double freq_hz, double mod_in) {
    const double f = freq_hz + mod_in;
    const std::int64_t inc = freq_to_increment(f, fs_);
    const std::uint32_t before = osc_.phase();
    const double s = osc_tick(osc_, *table_, amp, inc);
    switch (rule_) {
      case ModulationOutput::instantaneous:
        return {s, s * f};
      case ModulationOutput::static_frequency:
        return {s, s * freq_hz};
      case ModulationOutput::exact_step:
        break;
    }
    const auto integral = table_->integral();
    const double swept = osc_.read(integral, osc_.phase()) - osc_.read(integral, before);
    return {s, amp * step_scale_ * swept};
  }

  /// Unmodulated block (top of a stack).
  std::span<const double> operator()(double amp, double freq_hz) {
    for (std::size_t n = 0; n < audio_.size(); ++n) {
      const auto out = tick(amp, freq_hz, 0.0);
      audio_[n] = out.audio;
      mod_[n] = out.modulation;
    }
    return audio_;
  }

  /// Modulated block; `fm` must hold at least block_size() samples.
  std::span<const double> operator()(double amp, double freq_hz, std::span<const double> fm) {
    if (fm.size() < audio_.size()) throw std::invalid_argument("modulation input shorter than block");
    for (std::size_t n = 0; n < audio_.size(); ++n) {
      const auto out = tick(amp, freq_hz, fm[n]);
      audio_[n] = out.audio;
      mod_[n] = out.modulation;
    }
    return audio_;
  }

  std::span<const double> audio() const noexcept { return audio_; }
  std::span<const double> modulation() const noexcept { return mod_; }

  std::size_t block_size() const noexcept { return audio_.size(); }
  double sample_rate() const noexcept { return fs_; }
  ModulationOutput rule() const noexcept { return rule_; }
  const PhaseAccumulator& oscillator() const noexcept { return osc_; }
  void reset(std::uint32_t phase = 0) noexcept { osc_.reset(phase); }

 private:
  const Wavetable* table_;
  PhaseAccumulator osc_;
  double fs_;
  double step_scale_;
  ModulationOutput rule_;
  std::vector<double> audio_;
  std::vector<double> mod_;
};

/// A serial chain of operators, listed top (first modulator) to bottom
/// (carrier). Each operator's modulation output drives the frequency input
/// of the next; the bottom operator's amp is the output amplitude, the
/// others' amps are modulation indices.
class OperatorStack {
 public:
  OperatorStack(const Wavetable& table, double sample_rate, std::size_t order,
                std::size_t block_size = kDefaultBlockSize,
                ModulationOutput rule = ModulationOutput::exact_step) {
    if (order == 0) throw std::invalid_argument("operator stack needs at least one operator");
    ops_.reserve(order);
    for (std::size_t i = 0; i < order; ++i) ops_.emplace_back(table, sample_rate, block_size, rule);
  }

  /// Renders one block; `params` is top to bottom, one entry per operator.
  std::span<const double> operator()(std::span<const OperatorParams> params) {
    if (params.size() != ops_.size())
      throw std::invalid_argument("expected " + std::to_string(ops_.size()) + " operator parameters, got " +
                                  std::to_string(params.size()));
    ops_[0](params[0].amp, params[0].freq_hz);
    for (std::size_t i = 1; i < ops_.size(); ++i)
      ops_[i](params[i].amp, params[i].freq_hz, ops_[i - 1].modulation());
    return ops_.back().audio();
  }

  std::span<const double> modulation() const noexcept { return ops_.back().modulation(); }
  const Operator& at(std::size_t i) const { return ops_.at(i); }
  std::size_t order() const noexcept { return ops_.size(); }
  std::size_t block_size() const noexcept { return ops_.front().block_size(); }

 private:
  std::vector<Operator> ops_;
};

struct RenderOptions {
  double sample_rate = 48000.0;
  std::size_t block_size = kDefaultBlockSize;
  ModulationOutput rule = ModulationOutput::exact_step;
  /// Defaults to the shared 1025-point cosine table.
  const Wavetable* table = nullptr;
};

/// The shared 1025-point cosine table.
inline const Wavetable& default_cosine_table() {
  static const Wavetable table = Wavetable::cosine(kDefaultTableSize);
  return table;
}

namespace detail {

inline Block render_blocks(std::span<const OperatorParams> params, std::size_t n_samples,
                           const RenderOptions& options, ModulationOutput rule) {
  if (params.empty()) throw std::invalid_argument("operator stack needs at least one operator");
  const Wavetable& table = options.table ? *options.table : default_cosine_table();
  OperatorStack stack(table, options.sample_rate, params.size(), options.block_size, rule);
  Block block;
  block.sample_rate = options.sample_rate;
  block.audio.reserve(n_samples);
  block.modulation.reserve(n_samples);
  while (block.audio.size() < n_samples) {
    const auto audio = stack(params);
    const auto mod = stack.modulation();
    const std::size_t take = std::min(audio.size(), n_samples - block.audio.size());
    block.audio.insert(block.audio.end(), audio.begin(), audio.begin() + static_cast<std::ptrdiff_t>(take));
    block.modulation.insert(block.modulation.end(), mod.begin(), mod.begin() + static_cast<std::ptrdiff_t>(take));
  }
  return block;
}

}  // namespace detail

/// Stacked FM with the instantaneous-frequency deviation law.
inline Block render_stack(std::span<const OperatorParams> params, std::size_t n_samples,
                          const RenderOptions& options = {}) {
  return detail::render_blocks(params, n_samples, options, options.rule);
}

/// Stacked FM with the naive deviation law (index times static modulator
/// frequency). Kept to reproduce carrier drift.
inline Block render_naive_stack(std::span<const OperatorParams> params, std::size_t n_samples,
                                const RenderOptions& options = {}) {
  return detail::render_blocks(params, n_samples, options, ModulationOutput::static_frequency);
}

/// Feedback FM: one operator whose frequency input is its own modulation
/// output, delayed by one sample and scaled by `feedback_gain`.
inline Block render_feedback_fm(double amp, double freq_hz, double feedback_gain, std::size_t n_samples,
                                const RenderOptions& options = {}) {
  if (feedback_gain < 0.0) throw std::invalid_argument("feedback gain must be >= 0");
  const Wavetable& table = options.table ? *options.table : default_cosine_table();
  Operator op(table, options.sample_rate, 1, options.rule);
  const double guard = 10.0 * options.sample_rate;
  Block block;
  block.sample_rate = options.sample_rate;
  block.audio.resize(n_samples);
  block.modulation.resize(n_samples);
  double last = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    OperatorOutput out{};
    try {
      out = op.tick(amp, freq_hz, feedback_gain * last);
    } catch (const std::out_of_range& e) {
      throw InstabilityError("feedback FM diverged at sample " + std::to_string(n) + ": " + e.what());
    }
    if (!(std::abs(out.modulation) <= guard))
      throw InstabilityError("feedback FM diverged at sample " + std::to_string(n) + ": modulation " +
                             std::to_string(out.modulation) + " exceeds guard " + std::to_string(guard));
    block.audio[n] = out.audio;
    block.modulation[n] = out.modulation;
    last = out.modulation;
  }
  return block;
}

}  // namespace hofm

#endif  // HOFM_OPERATOR_HPP_
