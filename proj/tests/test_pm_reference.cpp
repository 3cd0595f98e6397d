#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "hofm/analysis.hpp"
#include "hofm/pm_reference.hpp"
#include "support.hpp"

using Catch::Approx;
using hofm::PMParams;

namespace {

hofm::MeasuredSpectrum centred(const std::vector<double>& x, double fs, double f0,
                               hofm::Window w = hofm::Window::rectangular) {
  return hofm::measure_spectrum(hofm::bin_centered_frame(x, fs, f0), w);
}

}  // namespace

TEST_CASE("first-order PM", "[pm]") {
  SECTION("zero index is a pure cosine") {
    const auto x = hofm::render_pm1({2000.0, {500.0}, {0.0}, 48000.0, {}}, 4800);
    for (std::size_t n = 0; n < x.size(); ++n)
      CHECK(x[n] == std::cos(2.0 * std::numbers::pi * 2000.0 * (static_cast<double>(n) / 48000.0)));
  }
  SECTION("carrier and first sideband follow the Bessel oracle") {
    const auto x = hofm::render_pm1({2000.0, {500.0}, {2.0}, 48000.0, {}}, 48000);
    const auto spec = centred(x, 48000.0, 500.0);
    CHECK(spec.magnitude_at(2000.0) == Approx(std::abs(hofm::test::bessel_series_oracle(0, 2.0))).margin(1e-3));
    CHECK(spec.magnitude_at(2500.0) == Approx(std::abs(hofm::test::bessel_series_oracle(1, 2.0))).margin(1e-3));
    CHECK(hofm::test::bessel_series_oracle(0, 2.0) == Approx(0.2239).margin(1e-4));
    CHECK(hofm::test::bessel_series_oracle(1, 2.0) == Approx(0.5767).margin(1e-4));
  }
  SECTION("invalid parameters") {
    CHECK_THROWS_AS(hofm::render_pm1({2000.0, {500.0}, {-1.0}, 48000.0, {}}, 10), std::invalid_argument);
    CHECK_THROWS_AS(hofm::render_pm1({2000.0, {500.0, 1.0}, {1.0}, 48000.0, {}}, 10), std::invalid_argument);
    CHECK_THROWS_AS(hofm::render_pm1({2000.0, {500.0}, {1.0}, 0.0, {}}, 10), std::invalid_argument);
  }
}

TEST_CASE("first-order PM partials match folded Bessel lines", "[pm][oracle][property]") {
  for (double fc : {500.0, 1000.0, 2000.0})
    for (double z : {0.5, 1.0, 2.5, 4.0, 5.0}) {
      const auto x = hofm::render_pm1({fc, {500.0}, {z}, 48000.0, {}}, 48000);
      const auto spec = centred(x, 48000.0, 500.0);
      const auto expected = hofm::test::folded_first_order(fc, 500.0, z, 500.0, 48);
      for (std::size_t k = 0; k < expected.size(); ++k) {
        INFO("fc " << fc << " z " << z << " line " << 500.0 * k);
        CHECK(spec.magnitude_at(500.0 * k) == Approx(std::abs(expected[k])).margin(1e-3));
      }
    }
}

// Sidebands must not fold across 0 Hz: folded lines add with phase-dependent signs.
TEST_CASE("a constant inner phase changes no magnitude", "[pm][property]") {
  const auto a = centred(hofm::render_pm1({12000.0, {500.0}, {3.0}, 48000.0, {}}, 48000), 48000.0, 500.0);
  for (double c : {0.3, 1.0, -2.2}) {
    const auto b = centred(hofm::render_pm1({12000.0, {500.0}, {3.0}, 48000.0, {c}}, 48000), 48000.0, 500.0);
    for (std::size_t k = 0; k < a.bins.size(); ++k) CHECK(std::abs(a.bins[k].magnitude - b.bins[k].magnitude) <= 1e-9);
  }
}

TEST_CASE("second-order PM", "[pm]") {
  SECTION("zero outer index is a pure cosine") {
    const auto x = hofm::render_pm2({500.0, {500.0, 500.0}, {3.0, 0.0}, 48000.0, {}}, 4800);
    for (std::size_t n = 0; n < x.size(); ++n)
      CHECK(x[n] == std::cos(2.0 * std::numbers::pi * 500.0 * (static_cast<double>(n) / 48000.0)));
  }
  SECTION("zero inner index reduces to first order") {
    const auto a = hofm::render_pm2({700.0, {300.0, 200.0}, {0.0, 2.0}, 48000.0, {}}, 4800);
    const auto b = hofm::render_pm1({700.0, {200.0}, {2.0}, 48000.0, {}}, 4800);
    CHECK(a == b);
  }
  SECTION("arity") {
    CHECK_THROWS_AS(hofm::render_pm2({500.0, {500.0}, {3.0}, 48000.0, {}}, 10), std::invalid_argument);
  }
}

TEST_CASE("second-order PM has no drift", "[pm][property]") {
  for (double z0 : {0.5, 1.0, 3.0, 5.0})
    for (double z1 : {0.5, 2.0, 4.0}) {
      const auto x = hofm::render_pm2({500.0, {500.0, 500.0}, {z0, z1}, 48000.0, {}}, 48000);
      const auto spec = centred(x, 48000.0, 500.0, hofm::Window::hann);
      INFO("z0 " << z0 << " z1 " << z1);
      CHECK(hofm::detect_carrier_drift(spec, 500.0, 1.0).max_offset_hz < 1.0);
    }
}

TEST_CASE("feedback PM", "[pm][feedback]") {
  SECTION("zero amplitude is silent") {
    for (double s : hofm::render_feedback_pm(0.0, 500.0, 1.0, 48000.0, 1000)) CHECK(s == 0.0);
  }
  SECTION("zero gain is a pure cosine") {
    const auto x = hofm::render_feedback_pm(1.0, 500.0, 0.0, 48000.0, 1000);
    for (std::size_t n = 0; n < x.size(); ++n)
      CHECK(x[n] == std::cos(2.0 * std::numbers::pi * 500.0 * (static_cast<double>(n) / 48000.0)));
  }
  SECTION("unit delay recursion") {
    const auto x = hofm::render_feedback_pm(0.9, 500.0, 1.3, 48000.0, 100);
    CHECK(x[0] == 0.9);
    for (std::size_t n = 1; n < x.size(); ++n)
      CHECK(x[n] == 0.9 * std::cos(2.0 * std::numbers::pi * 500.0 * (static_cast<double>(n) / 48000.0) + 1.3 * x[n - 1]));
  }
  SECTION("harmonics 2..10 decay monotonically") {
    const auto x = hofm::render_feedback_pm(1.0, 500.0, 1.0, 48000.0, 48000);
    const auto h = hofm::harmonic_magnitudes(centred(x, 48000.0, 500.0), 500.0, 2, 10);
    for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] < h[i - 1]);
  }
}
