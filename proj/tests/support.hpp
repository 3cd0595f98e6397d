#ifndef HOFM_TESTS_SUPPORT_HPP_
#define HOFM_TESTS_SUPPORT_HPP_

// Independent oracles for the test suite. Nothing here calls into the
// library's Bessel or DFT code.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace hofm::test {

/// J_n(z) by the alternating power series in 50-digit arithmetic:
/// sum_k (-1)^k (z/2)^(2k+n) / (k! (n+k)!).
inline double bessel_series_oracle(int n, double z) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const int order = n < 0 ? -n : n;
  const big half = big(z) / 2;
  big term = 1;
  for (int i = 1; i <= order; ++i) term *= half / i;
  const big q = half * half;
  big sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (big(k) * big(order + k));
    sum += term;
    if (abs(term) < big("1e-45")) break;
  }
  double v = sum.convert_to<double>();
  if (n < 0 && (order % 2 == 1)) v = -v;
  return v;
}

/// Direct O(N^2) DFT magnitudes normalised like measure_spectrum with a
/// rectangular window: a full-scale bin-centred cosine reads 1.
inline std::vector<double> naive_dft_magnitudes(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> mags(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<long double> acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ph = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * i) % n) /
                      static_cast<long double>(n);
      acc += static_cast<long double>(x[i]) * std::complex<long double>(std::cos(ph), std::sin(ph));
    }
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    mags[k] = static_cast<double>(std::abs(acc) * (edge ? 1.0L : 2.0L) / static_cast<long double>(n));
  }
  return mags;
}

/// Single DFT bin magnitude (same normalisation), for spot checks.
inline double dft_bin_magnitude(std::span<const double> x, std::size_t k) {
  const std::size_t n = x.size();
  std::complex<long double> acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ph = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * i) % n) /
                    static_cast<long double>(n);
    acc += static_cast<long double>(x[i]) * std::complex<long double>(std::cos(ph), std::sin(ph));
  }
  const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
  return static_cast<double>(std::abs(acc) * (edge ? 1.0L : 2.0L) / static_cast<long double>(n));
}

inline double db(double ratio) { return 20.0 * std::log10(ratio); }

/// Lines of cos(2pi fc t + z sin(2pi fm t)) folded onto |f|, from the oracle.
/// Returns amplitude per multiple of `grid` (index = f / grid).
inline std::vector<double> folded_first_order(double fc, double fm, double z, double grid, std::size_t count) {
  std::vector<double> out(count, 0.0);
  for (int n = -80; n <= 80; ++n) {
    const double f = std::abs(fc + n * fm);
    const auto k = static_cast<std::size_t>(std::llround(f / grid));
    if (k < count) out[k] += bessel_series_oracle(n, z);
  }
  return out;
}

}  // namespace hofm::test

#endif  // HOFM_TESTS_SUPPORT_HPP_
