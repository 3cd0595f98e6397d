#ifndef HOFM_IO_HPP_
#define HOFM_IO_HPP_

// Mono RIFF/WAVE export (16-bit PCM or 32-bit float) and CSV spectrum export.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hofm/analysis.hpp"
#include "hofm/errors.hpp"
#include "hofm/spectrum_predict.hpp"

namespace hofm {

enum class SampleFormat { pcm16, float32 };

struct WavSpec {
  std::uint32_t sample_rate = 48000;
  SampleFormat format = SampleFormat::pcm16;
};

struct WavWriteReport {
  std::size_t frames = 0;
  /// Samples outside [-1, 1]: clipped for PCM, stored as-is for float.
  std::size_t out_of_range = 0;
};

namespace detail {

inline void put_le(std::vector<char>& buf, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void write_file(const std::filesystem::path& path, const std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.close();
  if (!f) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace detail

/// Encodes a complete WAV file in memory.
inline std::vector<char> encode_wav(std::span<const double> samples, const WavSpec& spec,
                                    WavWriteReport* report = nullptr) {
  if (spec.sample_rate == 0) throw std::invalid_argument("WAV sample rate must be positive");
  const bool pcm = spec.format == SampleFormat::pcm16;
  const std::uint32_t bytes_per_sample = pcm ? 2 : 4;
  const std::uint32_t data_size = static_cast<std::uint32_t>(samples.size()) * bytes_per_sample;

  std::vector<char> buf;
  buf.reserve(44 + data_size);
  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  detail::put_le(buf, 36 + data_size, 4);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_le(buf, 16, 4);
  detail::put_le(buf, pcm ? 1 : 3, 2);  // format tag: PCM / IEEE float
  detail::put_le(buf, 1, 2);            // mono
  detail::put_le(buf, spec.sample_rate, 4);
  detail::put_le(buf, spec.sample_rate * bytes_per_sample, 4);
  detail::put_le(buf, bytes_per_sample, 2);
  detail::put_le(buf, bytes_per_sample * 8, 2);
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  detail::put_le(buf, data_size, 4);

  WavWriteReport rep;
  rep.frames = samples.size();
  for (double s : samples) {
    if (!(std::abs(s) <= 1.0)) ++rep.out_of_range;
    if (pcm) {
      const double clipped = std::isnan(s) ? 0.0 : std::clamp(s, -1.0, 1.0);
      const auto v = static_cast<std::int16_t>(std::lround(clipped * 32767.0));
      detail::put_le(buf, static_cast<std::uint16_t>(v), 2);
    } else {
      detail::put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(s)), 4);
    }
  }
  if (report) *report = rep;
  return buf;
}

/// Writes a mono WAV file. Throws IoError if the path cannot be written;
/// no partial file is left behind.
inline WavWriteReport write_wav(const std::filesystem::path& path, std::span<const double> samples,
                                const WavSpec& spec) {
  WavWriteReport report;
  const auto bytes = encode_wav(samples, spec, &report);
  detail::write_file(path, std::string_view(bytes.data(), bytes.size()));
  return report;
}

namespace detail {

inline void append_csv_row(std::string& out, double f, double a) {
  char line[64];
  const int len = std::snprintf(line, sizeof line, "%.9g,%.9g\n", f, a);
  out.append(line, static_cast<std::size_t>(len));
}

}  // namespace detail

inline constexpr const char* kSpectrumCsvHeader = "freq_hz,amplitude\n";

/// Signed amplitudes, one row per predicted line.
inline std::string format_spectrum_csv(const LineSpectrum& spec) {
  std::string out = kSpectrumCsvHeader;
  for (const auto& l : spec.lines) detail::append_csv_row(out, l.freq_hz, l.amplitude);
  return out;
}

/// Magnitudes, one row per DFT bin.
inline std::string format_spectrum_csv(const MeasuredSpectrum& spec) {
  std::string out = kSpectrumCsvHeader;
  for (const auto& b : spec.bins) detail::append_csv_row(out, b.freq_hz, b.magnitude);
  return out;
}

template <typename Spectrum>
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec) {
  detail::write_file(path, format_spectrum_csv(spec));
}

}  // namespace hofm

#endif  // HOFM_IO_HPP_
