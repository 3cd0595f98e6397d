#ifndef HOFM_PATCH_HPP_
#define HOFM_PATCH_HPP_

// Patch descriptions: a topology plus its operator scalars, as data. A patch
// can be written as JSON:
//
//   {"topology": "fm-stack",
//    "operators": [{"amp": 3, "freqHz": 500}, {"amp": 2, "freqHz": 500},
//                  {"amp": 1, "freqHz": 500}],
//    "feedbackGain": 0, "sampleRate": 96000, "duration": 1.0}
//
// Operators run top (first modulator) to bottom (carrier). PM topologies
// use the same layout: the top entries carry (index, modulator frequency),
// the last carries (amplitude, carrier frequency).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hofm/operator.hpp"
#include "hofm/pm_reference.hpp"
#include "hofm/spectrum_predict.hpp"

namespace hofm {

enum class Topology { fm_stack, fm_stack_naive, pm1, pm2, fm_feedback, pm_feedback };

inline std::string_view to_string(Topology t) {
  switch (t) {
    case Topology::fm_stack: return "fm-stack";
    case Topology::fm_stack_naive: return "fm-stack-naive";
    case Topology::pm1: return "pm1";
    case Topology::pm2: return "pm2";
    case Topology::fm_feedback: return "fm-feedback";
    case Topology::pm_feedback: return "pm-feedback";
  }
  return "?";
}

inline Topology parse_topology(std::string_view name) {
  for (auto t : {Topology::fm_stack, Topology::fm_stack_naive, Topology::pm1, Topology::pm2, Topology::fm_feedback,
                 Topology::pm_feedback})
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown topology '" + std::string(name) +
                              "' (expected fm-stack, fm-stack-naive, pm1, pm2, fm-feedback or pm-feedback)");
}

inline std::string_view to_string(ModulationOutput rule) {
  switch (rule) {
    case ModulationOutput::exact_step: return "exact-step";
    case ModulationOutput::instantaneous: return "reference";
    case ModulationOutput::static_frequency: return "naive";
  }
  return "?";
}

inline ModulationOutput parse_integration(std::string_view name) {
  if (name == "exact-step") return ModulationOutput::exact_step;
  if (name == "reference") return ModulationOutput::instantaneous;
  throw std::invalid_argument("unknown integration '" + std::string(name) + "' (expected exact-step or reference)");
}

/// Parses "amp:freq".
inline OperatorParams parse_operator(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("operator '" + std::string(text) + "' is not amp:freq");
  const std::string amp(text.substr(0, colon));
  const std::string freq(text.substr(colon + 1));
  std::size_t used_a = 0;
  std::size_t used_f = 0;
  OperatorParams op;
  try {
    op.amp = std::stod(amp, &used_a);
    op.freq_hz = std::stod(freq, &used_f);
  } catch (const std::exception&) {
    throw std::invalid_argument("operator '" + std::string(text) + "' is not amp:freq");
  }
  if (used_a != amp.size() || used_f != freq.size())
    throw std::invalid_argument("operator '" + std::string(text) + "' is not amp:freq");
  return op;
}

struct PatchSpec {
  Topology topology = Topology::fm_stack;
  std::vector<OperatorParams> operators;
  double feedback_gain = 0.0;
  double sample_rate = 48000.0;
  double duration = 1.0;
  ModulationOutput integration = ModulationOutput::exact_step;
  std::size_t block_size = kDefaultBlockSize;

  std::size_t sample_count() const { return static_cast<std::size_t>(std::llround(duration * sample_rate)); }

  /// Throws std::invalid_argument describing the first problem found.
  void validate() const {
    if (!(sample_rate > 0.0) || sample_rate != std::floor(sample_rate) || sample_rate > 4.0e6)
      throw std::invalid_argument("sample rate must be a positive integer number of Hz");
    if (!(duration > 0.0) || duration > 3600.0) throw std::invalid_argument("duration must be in (0, 3600] seconds");
    if (block_size == 0) throw std::invalid_argument("block size must be positive");
    if (!(feedback_gain >= 0.0)) throw std::invalid_argument("feedback gain must be >= 0");
    const std::size_t n = operators.size();
    auto need = [&](std::size_t count) {
      if (n != count)
        throw std::invalid_argument(std::string(to_string(topology)) + " takes " + std::to_string(count) +
                                    " operator(s), got " + std::to_string(n));
    };
    switch (topology) {
      case Topology::fm_stack:
      case Topology::fm_stack_naive:
        if (n == 0) throw std::invalid_argument(std::string(to_string(topology)) + " needs at least one operator");
        break;
      case Topology::pm1: need(2); break;
      case Topology::pm2: need(3); break;
      case Topology::fm_feedback:
      case Topology::pm_feedback: need(1); break;
    }
    for (const auto& op : operators)
      if (!std::isfinite(op.amp) || !std::isfinite(op.freq_hz))
        throw std::invalid_argument("operator scalars must be finite");
    if (topology == Topology::pm1 || topology == Topology::pm2)
      for (std::size_t i = 0; i + 1 < n; ++i)
        if (operators[i].amp < 0.0) throw std::invalid_argument("PM modulation indices must be >= 0");
  }
};

inline nlohmann::json to_json(const PatchSpec& p) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : p.operators) ops.push_back({{"amp", op.amp}, {"freqHz", op.freq_hz}});
  return {{"topology", std::string(to_string(p.topology))},
          {"operators", ops},
          {"feedbackGain", p.feedback_gain},
          {"sampleRate", p.sample_rate},
          {"duration", p.duration},
          {"integration", std::string(to_string(p.integration))},
          {"blockSize", p.block_size}};
}

inline PatchSpec patch_from_json(const nlohmann::json& j) {
  try {
    PatchSpec p;
    p.topology = parse_topology(j.at("topology").get<std::string>());
    for (const auto& op : j.at("operators")) {
      if (op.is_array())
        p.operators.push_back({op.at(0).get<double>(), op.at(1).get<double>()});
      else
        p.operators.push_back({op.at("amp").get<double>(), op.at("freqHz").get<double>()});
    }
    p.feedback_gain = j.value("feedbackGain", 0.0);
    p.sample_rate = j.value("sampleRate", 48000.0);
    p.duration = j.value("duration", 1.0);
    if (j.contains("integration")) p.integration = parse_integration(j.at("integration").get<std::string>());
    p.block_size = j.value("blockSize", kDefaultBlockSize);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad patch JSON: ") + e.what());
  }
}

/// `source` is either an inline JSON document (starting with '{') or a path.
inline PatchSpec load_patch(const std::string& source) {
  std::string text = source;
  if (source.find_first_not_of(" \t\r\n") == std::string::npos || source[source.find_first_not_of(" \t\r\n")] != '{') {
    std::ifstream f(source);
    if (!f) throw std::invalid_argument("cannot read patch file '" + source + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("bad patch JSON: ") + e.what());
  }
  return patch_from_json(j);
}

/// Renders the patch's audio output.
inline std::vector<double> render_patch(const PatchSpec& p) {
  p.validate();
  const std::size_t n = p.sample_count();
  RenderOptions opts;
  opts.sample_rate = p.sample_rate;
  opts.block_size = p.block_size;
  opts.rule = p.integration;
  const auto& ops = p.operators;
  switch (p.topology) {
    case Topology::fm_stack: return render_stack(ops, n, opts).audio;
    case Topology::fm_stack_naive: return render_naive_stack(ops, n, opts).audio;
    case Topology::fm_feedback: return render_feedback_fm(ops[0].amp, ops[0].freq_hz, p.feedback_gain, n, opts).audio;
    case Topology::pm_feedback:
      return render_feedback_pm(ops[0].amp, ops[0].freq_hz, p.feedback_gain, p.sample_rate, n);
    case Topology::pm1:
    case Topology::pm2: {
      PMParams pm;
      pm.sample_rate = p.sample_rate;
      pm.fc = ops.back().freq_hz;
      for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
        pm.z.push_back(ops[i].amp);
        pm.fm.push_back(ops[i].freq_hz);
      }
      auto out = p.topology == Topology::pm1 ? render_pm1(pm, n) : render_pm2(pm, n);
      for (auto& s : out) s *= ops.back().amp;
      return out;
    }
  }
  return {};
}

/// Analytic spectrum, for pm1/pm2 and fm-stack of order 1 to 3.
inline LineSpectrum predict_patch(const PatchSpec& p, const TruncationPolicy& policy = {}) {
  p.validate();
  const auto& ops = p.operators;
  const bool stack = p.topology == Topology::fm_stack;
  const bool pm = p.topology == Topology::pm1 || p.topology == Topology::pm2;
  if (!stack && !pm)
    throw std::invalid_argument("predicted spectra are available for pm1, pm2 and fm-stack only, not " +
                                std::string(to_string(p.topology)));
  const auto& carrier = ops.back();
  LineSpectrum out;
  switch (ops.size()) {
    case 1:
      out.lines.push_back({std::abs(carrier.freq_hz), 1.0});
      break;
    case 2:
      out = predict_first_order(carrier.freq_hz, ops[0].freq_hz, ops[0].amp, -1, policy.amplitude_floor);
      break;
    case 3:
      out = predict_second_order(carrier.freq_hz, ops[0].freq_hz, ops[1].freq_hz, ops[0].amp, ops[1].amp, policy);
      break;
    default:
      throw std::invalid_argument("no analytic prediction beyond second order (got " + std::to_string(ops.size()) +
                                  " operators)");
  }
  out.scale(carrier.amp);
  return out;
}

/// Greatest common divisor of the non-zero operator frequencies of all
/// patches, on a 1e-6 Hz lattice. Zero when there are none.
inline double common_fundamental(std::span<const PatchSpec> patches) {
  std::int64_t g = 0;
  for (const auto& p : patches)
    for (const auto& op : p.operators) {
      const auto micro = std::llabs(std::llround(op.freq_hz * 1e6));
      if (micro != 0) g = std::gcd(g, micro);
    }
  return static_cast<double>(g) * 1e-6;
}

}  // namespace hofm

#endif  // HOFM_PATCH_HPP_
