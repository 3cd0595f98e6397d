// Second-order FM stack with a decaying index envelope, written to a WAV file.
//
//   stacked_fm [out.wav] [seconds]
//
// The envelope is applied per block: the operator scalars are simply
// updated before each call.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "hofm/io.hpp"
#include "hofm/operator.hpp"

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "stacked_fm.wav";
  const double seconds = argc > 2 ? std::atof(argv[2]) : 2.0;
  const double fs = 48000.0;
  const double fr = 220.0;

  const auto& table = hofm::default_cosine_table();
  hofm::OperatorStack fm(table, fs, 3);

  std::vector<double> out;
  const auto total = static_cast<std::size_t>(seconds * fs);
  while (out.size() < total) {
    const double t = static_cast<double>(out.size()) / fs;
    const double env = std::exp(-3.0 * t);
    const hofm::OperatorParams params[] = {{3.0 * env, fr}, {2.0 * env, fr}, {0.5 * env, fr}};
    const auto block = fm(params);
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(total);

  hofm::write_wav(path, out, {static_cast<std::uint32_t>(fs), hofm::SampleFormat::pcm16});
  std::cout << "wrote " << out.size() << " samples to " << path << "\n";
  return 0;
}
