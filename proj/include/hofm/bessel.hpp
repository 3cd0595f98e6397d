#ifndef HOFM_BESSEL_HPP_
#define HOFM_BESSEL_HPP_

// Bessel functions of the first kind, integer order, real argument.
//
// Small arguments use the power series directly. Otherwise the row
// J_0..J_N is produced by downward (Miller) recurrence from an order well
// above max(N, z), normalised with J_0 + 2 * sum J_2k = 1. Upward
// recurrence is never used: it loses all accuracy once n > z.

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace hofm {

namespace detail {

inline constexpr double kSeriesLimit = 1.0;

inline double bessel_series(int n, double z) {
  const double half = 0.5 * z;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  const double q = half * half;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(n + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline int miller_start(int max_order, double z) {
  const int top = std::max(max_order, static_cast<int>(std::ceil(z)));
  const int m = top + 20 + static_cast<int>(std::sqrt(80.0 * top));
  return m + (m & 1);
}

}  // namespace detail

/// J_0(z) .. J_maxOrder(z) for z >= 0.
inline std::vector<double> bessel_row(int max_order, double z) {
  if (max_order < 0) throw std::invalid_argument("bessel_row: max_order must be >= 0");
  if (z < 0.0) throw std::invalid_argument("bessel_row: argument must be >= 0");
  std::vector<double> row(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (z == 0.0) {
    row[0] = 1.0;
    return row;
  }
  if (z <= detail::kSeriesLimit) {
    for (int n = 0; n <= max_order; ++n) row[static_cast<std::size_t>(n)] = detail::bessel_series(n, z);
    return row;
  }

  const int start = detail::miller_start(max_order, z);
  constexpr double kBig = 1e250;
  const double two_over_z = 2.0 / z;
  double above = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k, arbitrary seed
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double below = k * two_over_z * cur - above;
    above = cur;
    cur = below;
    // cur now holds J_{k-1}, above holds J_k
    if (k <= max_order) row[static_cast<std::size_t>(k)] = above;
    if (k % 2 == 0) norm += 2.0 * above;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      above /= kBig;
      norm /= kBig;
      for (int j = k; j <= max_order; ++j) row[static_cast<std::size_t>(j)] /= kBig;
    }
  }
  row[0] = cur;
  norm += cur;
  for (auto& v : row) v /= norm;
  return row;
}

/// J_n(z) for any integer n and real z, using J_{-n}(z) = (-1)^n J_n(z)
/// and J_n(-z) = (-1)^n J_n(z).
inline double bessel_j(int n, double z) {
  const int order = std::abs(n);
  const double v = bessel_row(order, std::abs(z)).back();
  const bool flip = (order % 2 == 1) && ((n < 0) != (z < 0.0));
  return flip ? -v : v;
}

}  // namespace hofm

#endif  // HOFM_BESSEL_HPP_
