#ifndef HOFM_CLI_HPP_
#define HOFM_CLI_HPP_

// Command-line front end: render, spectrum, compare, drift-demo.
//
// Exit codes: 0 success / within tolerance, 1 tolerance exceeded,
// 2 usage error, 3 runtime failure (instability, aliasing, I/O).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hofm/analysis.hpp"
#include "hofm/errors.hpp"
#include "hofm/io.hpp"
#include "hofm/patch.hpp"

namespace hofm::cli {

enum ExitCode : int { kOk = 0, kToleranceExceeded = 1, kUsage = 2, kRuntime = 3 };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flags shared by every subcommand that describes a patch.
struct PatchFlags {
  std::vector<std::string> patches;
  std::vector<std::string> topologies;
  std::vector<std::string> ops;
  double feedback_gain = 0.0;
  double sample_rate = 48000.0;
  double duration = 1.0;
  std::string integration = "exact-step";
  std::size_t block_size = kDefaultBlockSize;

  CLI::Option* feedback_gain_opt = nullptr;
  CLI::Option* sr_opt = nullptr;
  CLI::Option* dur_opt = nullptr;
  CLI::Option* integration_opt = nullptr;
  CLI::Option* block_opt = nullptr;

  void attach(CLI::App& app, bool allow_pairs) {
    const std::size_t max = allow_pairs ? 2 : 1;
    app.add_option("--patch", patches, "Patch JSON file or inline JSON document")->expected(0, static_cast<int>(max));
    app.add_option("--topology", topologies,
                   "fm-stack | fm-stack-naive | pm1 | pm2 | fm-feedback | pm-feedback")
        ->expected(0, static_cast<int>(max));
    app.add_option("--op", ops, "Operator amp:freqHz, repeatable, top of stack first");
    feedback_gain_opt = app.add_option("--feedback-gain", feedback_gain, "Feedback gain (feedback topologies)");
    sr_opt = app.add_option("--sr", sample_rate, "Sample rate in Hz (default 48000)");
    dur_opt = app.add_option("--dur", duration, "Duration in seconds (default 1)");
    integration_opt = app.add_option("--integration", integration,
                                     "Operator modulation output: exact-step (default) or reference");
    block_opt = app.add_option("--block-size", block_size, "Operator block size (default 64)");
  }

  void apply_overrides(PatchSpec& p) const {
    if (feedback_gain_opt->count()) p.feedback_gain = feedback_gain;
    if (sr_opt->count()) p.sample_rate = sample_rate;
    if (dur_opt->count()) p.duration = duration;
    if (integration_opt->count()) p.integration = parse_integration(integration);
    if (block_opt->count()) p.block_size = block_size;
  }

  PatchSpec from_flags(const std::string& topology) const {
    PatchSpec p;
    p.topology = parse_topology(topology);
    for (const auto& op : ops) p.operators.push_back(parse_operator(op));
    p.feedback_gain = feedback_gain;
    p.sample_rate = sample_rate;
    p.duration = duration;
    p.integration = parse_integration(integration);
    p.block_size = block_size;
    return p;
  }

  /// Resolves the flags into `count` patches (1, or 2 for compare).
  std::vector<PatchSpec> resolve(std::size_t count) const {
    std::vector<PatchSpec> out;
    if (!patches.empty()) {
      if (!topologies.empty() || !ops.empty())
        throw UsageError("--patch cannot be combined with --topology/--op");
      if (patches.size() != count)
        throw UsageError("expected " + std::to_string(count) + " --patch value(s), got " +
                         std::to_string(patches.size()));
      for (const auto& src : patches) {
        auto p = load_patch(src);
        apply_overrides(p);
        out.push_back(std::move(p));
      }
    } else {
      if (topologies.size() != count)
        throw UsageError("expected " + std::to_string(count) + " --topology value(s) (or --patch), got " +
                         std::to_string(topologies.size()));
      for (const auto& t : topologies) out.push_back(from_flags(t));
    }
    for (const auto& p : out) p.validate();
    return out;
  }
};

namespace detail {

inline std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

/// Bin-centred rectangular spectrum when the signal's frequencies share a
/// usable fundamental, otherwise a Hann-windowed spectrum of the whole signal.
inline MeasuredSpectrum measure_signal(const std::vector<double>& signal, double sample_rate, double fundamental,
                                       Window centred_window = Window::rectangular) {
  if (fundamental > 0.0)
    if (auto frame = try_bin_centered_frame(signal, sample_rate, fundamental))
      return measure_spectrum(*frame, centred_window);
  AnalysisFrame frame{signal, sample_rate, std::nullopt};
  return measure_spectrum(frame, Window::hann);
}

struct LineDiff {
  double max_db = 0.0;
  std::size_t lines = 0;
  double worst_hz = 0.0;
};

inline LineDiff compare_spectra(const MeasuredSpectrum& a, const MeasuredSpectrum& b, double floor_db) {
  const double ref = std::max(a.max_magnitude(), b.max_magnitude());
  const double floor_lin = ref * std::pow(10.0, floor_db / 20.0);
  LineDiff d;
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    const double ma = a.bins[k].magnitude;
    const double mb = b.bins[k].magnitude;
    if (std::max(ma, mb) < floor_lin) continue;
    ++d.lines;
    const double diff = (ma > 0.0 && mb > 0.0) ? std::abs(20.0 * std::log10(ma / mb))
                                                : std::numeric_limits<double>::infinity();
    if (diff > d.max_db) {
      d.max_db = diff;
      d.worst_hz = a.bins[k].freq_hz;
    }
  }
  return d;
}

inline void write_or_cleanup(const std::string& path, const std::function<void()>& write) {
  try {
    write();
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw;
  }
}

}  // namespace detail

inline int cmd_render(const PatchSpec& patch, const std::string& out_path, int bit_depth, std::ostream& out,
                      std::ostream& err) {
  const auto audio = render_patch(patch);
  WavSpec spec;
  spec.sample_rate = static_cast<std::uint32_t>(patch.sample_rate);
  spec.format = bit_depth == 32 ? SampleFormat::float32 : SampleFormat::pcm16;
  WavWriteReport report;
  detail::write_or_cleanup(out_path, [&] { report = write_wav(out_path, audio, spec); });
  if (report.out_of_range > 0)
    err << "warning: " << report.out_of_range << " sample(s) outside [-1, 1]"
        << (spec.format == SampleFormat::pcm16 ? " were clipped" : "") << "\n";
  out << "wrote " << report.frames << " samples (" << to_string(patch.topology) << ") to " << out_path << "\n";
  return kOk;
}

inline int cmd_spectrum(const PatchSpec& patch, const std::string& mode, const std::string& out_path,
                        std::ostream& out) {
  if (mode == "predicted") {
    const auto lines = predict_patch(patch);
    detail::write_or_cleanup(out_path, [&] { write_spectrum_csv(out_path, lines); });
    out << "wrote " << lines.lines.size() << " predicted lines to " << out_path << "\n";
    return kOk;
  }
  if (mode != "measured") throw UsageError("--mode must be measured or predicted");
  const auto audio = render_patch(patch);
  const PatchSpec one[] = {patch};
  const auto spec = detail::measure_signal(audio, patch.sample_rate, common_fundamental(one));
  detail::write_or_cleanup(out_path, [&] { write_spectrum_csv(out_path, spec); });
  out << "wrote " << spec.bins.size() << " bins (" << (spec.window == Window::hann ? "hann" : "bin-centred")
      << ", " << detail::fmt("%.9g", spec.bin_hz) << " Hz/bin) to " << out_path << "\n";
  return kOk;
}

inline int cmd_compare(const PatchSpec& a, const PatchSpec& b, double tolerance_db, double floor_db,
                       std::ostream& out) {
  if (a.sample_rate != b.sample_rate || a.sample_count() != b.sample_count())
    throw UsageError("compare needs patches with equal sample rate and duration");
  const auto xa = render_patch(a);
  const auto xb = render_patch(b);
  const PatchSpec both[] = {a, b};
  const double f0 = common_fundamental(both);
  const auto sa = detail::measure_signal(xa, a.sample_rate, f0);
  const auto sb = detail::measure_signal(xb, b.sample_rate, f0);
  if (sa.bins.size() != sb.bins.size() || sa.window != sb.window)
    throw UsageError("compare could not place both patches on a common analysis grid");
  const auto d = detail::compare_spectra(sa, sb, floor_db);
  const bool ok = d.max_db <= tolerance_db;
  out << to_string(a.topology) << " vs " << to_string(b.topology) << ": max line difference "
      << detail::fmt("%.6g", d.max_db) << " dB over " << d.lines << " lines above " << detail::fmt("%.6g", floor_db)
      << " dB (worst at " << detail::fmt("%.9g", d.worst_hz) << " Hz); tolerance " << detail::fmt("%.6g", tolerance_db)
      << " dB: " << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kToleranceExceeded;
}

inline int cmd_drift_demo(const PatchSpec& patch, double grid_hz, double tolerance_hz, std::ostream& out) {
  if (patch.topology != Topology::fm_stack && patch.topology != Topology::fm_stack_naive)
    throw UsageError("drift-demo needs an fm-stack or fm-stack-naive patch");
  const PatchSpec one[] = {patch};
  if (!(grid_hz > 0.0)) grid_hz = common_fundamental(one);
  if (!(grid_hz > 0.0)) throw UsageError("drift-demo needs --grid-hz when the patch has no common fundamental");
  const auto audio = render_patch(patch);
  const auto spec = detail::measure_signal(audio, patch.sample_rate, grid_hz, Window::hann);
  const auto report = detect_carrier_drift(spec, grid_hz, tolerance_hz);
  const bool ok = report.max_offset_hz <= tolerance_hz;
  out << to_string(patch.topology) << ": " << report.peaks.size() << " peaks, max offset "
      << detail::fmt("%.6g", report.max_offset_hz) << " Hz from the " << detail::fmt("%.9g", grid_hz)
      << " Hz grid; tolerance " << detail::fmt("%.6g", tolerance_hz) << " Hz: " << (ok ? "PASS" : "FAIL") << "\n";
  for (const auto& p : report.offending)
    out << "  peak " << detail::fmt("%.3f", p.freq_hz) << " Hz  offset " << detail::fmt("%.3f", p.offset_hz)
        << " Hz  magnitude " << detail::fmt("%.4g", p.magnitude) << "\n";
  return ok ? kOk : kToleranceExceeded;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Higher-order FM synthesis: render, measure, predict and compare operator topologies", "hofm"};
  app.require_subcommand(1);

  PatchFlags render_flags, spectrum_flags, compare_flags, drift_flags;

  auto* render = app.add_subcommand("render", "Render a patch to a mono WAV file");
  render_flags.attach(*render, false);
  std::string render_out;
  int bit_depth = 16;
  render->add_option("--out", render_out, "Output WAV path")->required();
  render->add_option("--bit-depth", bit_depth, "16 (PCM) or 32 (float)")->check(CLI::IsMember({16, 32}));

  auto* spectrum = app.add_subcommand("spectrum", "Write a measured or predicted spectrum as CSV");
  spectrum_flags.attach(*spectrum, false);
  std::string spectrum_out;
  std::string mode = "measured";
  spectrum->add_option("--out", spectrum_out, "Output CSV path")->required();
  spectrum->add_option("--mode", mode, "measured | predicted");

  auto* compare = app.add_subcommand("compare", "Compare the measured spectra of two patches");
  compare_flags.attach(*compare, true);
  double tolerance_db = 1.0;
  double floor_db = -60.0;
  compare->add_option("--tolerance-db", tolerance_db, "Allowed per-line difference in dB (default 1)");
  compare->add_option("--floor-db", floor_db, "Ignore lines below this level re. the strongest (default -60)");

  auto* drift = app.add_subcommand("drift-demo", "Measure partial offsets from a harmonic grid");
  drift_flags.attach(*drift, false);
  double grid_hz = 0.0;
  double tolerance_hz = 1.0;
  drift->add_option("--grid-hz", grid_hz, "Harmonic grid spacing (default: gcd of patch frequencies)");
  drift->add_option("--tolerance-hz", tolerance_hz, "Allowed offset from the grid (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "hofm: " << e.what() << " (see hofm --help)\n";
    return kUsage;
  }

  try {
    if (render->parsed()) return cmd_render(render_flags.resolve(1).front(), render_out, bit_depth, out, err);
    if (spectrum->parsed()) return cmd_spectrum(spectrum_flags.resolve(1).front(), mode, spectrum_out, out);
    if (compare->parsed()) {
      const auto p = compare_flags.resolve(2);
      return cmd_compare(p[0], p[1], tolerance_db, floor_db, out);
    }
    if (drift->parsed()) return cmd_drift_demo(drift_flags.resolve(1).front(), grid_hz, tolerance_hz, out);
  } catch (const std::invalid_argument& e) {
    err << "hofm: " << e.what() << " (see hofm --help)\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "hofm: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace hofm::cli

#endif  // HOFM_CLI_HPP_
