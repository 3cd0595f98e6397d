#include "catch_amalgamated.hpp"

#include <cmath>

#include "hofm/bessel.hpp"
#include "support.hpp"

using Catch::Approx;
using hofm::bessel_j;
using hofm::bessel_row;
using hofm::test::bessel_series_oracle;

TEST_CASE("oracle reproduces known values", "[bessel][oracle]") {
  CHECK(bessel_series_oracle(0, 2.0) == Approx(0.223890779141236).margin(1e-15));
  CHECK(bessel_series_oracle(1, 2.0) == Approx(0.576724807756873).margin(1e-15));
  CHECK(bessel_series_oracle(2, 2.0) == Approx(0.352834028615638).margin(1e-15));
  CHECK(bessel_series_oracle(-1, 2.0) == -bessel_series_oracle(1, 2.0));
}

TEST_CASE("edge values", "[bessel]") {
  CHECK(bessel_j(0, 0.0) == 1.0);
  CHECK(bessel_j(3, 0.0) == 0.0);
  CHECK(bessel_j(1, 2.0) == Approx(0.576724807756873).margin(1e-12));
  const auto row = bessel_row(5, 0.0);
  CHECK(row == std::vector<double>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(bessel_row(-1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_row(3, -1.0), std::invalid_argument);
}

TEST_CASE("agrees with the power-series oracle", "[bessel][oracle]") {
  double worst = 0.0;
  for (int n = -64; n <= 64; ++n)
    for (double z = 0.0; z <= 32.0; z += 0.25) {
      const double err = std::abs(bessel_j(n, z) - bessel_series_oracle(n, z));
      worst = std::max(worst, err);
      if (err > 1e-12) {
        INFO("n = " << n << ", z = " << z);
        CHECK(err <= 1e-12);
      }
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("row matches element-wise evaluation", "[bessel]") {
  for (double z : {0.3, 1.0, 2.0, 7.5, 20.0}) {
    const auto row = bessel_row(40, z);
    for (int n = 0; n <= 40; ++n) CHECK(std::abs(row[static_cast<std::size_t>(n)] - bessel_j(n, z)) <= 1e-12);
  }
  const auto row = bessel_row(8, 2.0);
  for (int n = 0; n <= 8; ++n)
    CHECK(std::abs(row[static_cast<std::size_t>(n)] - bessel_series_oracle(n, 2.0)) <= 1e-12);
}

TEST_CASE("normalisation identity", "[bessel][property]") {
  for (double z : {0.1, 0.5, 1.0, 2.0, 3.3, 4.0, 8.0, 10.0, 16.0}) {
    const int top = static_cast<int>(std::ceil(z)) + 20;
    const auto row = bessel_row(std::max(top, 40), z);
    double s = row[0] * row[0];
    for (std::size_t n = 1; n < row.size(); ++n) s += 2.0 * row[n] * row[n];
    INFO("z = " << z);
    CHECK(std::abs(s - 1.0) <= 1e-10);
  }
}

TEST_CASE("three-term recurrence", "[bessel][property]") {
  for (double z = 0.5; z <= 16.0; z += 0.5) {
    const auto row = bessel_row(40, z);
    for (int n = 1; n < 40; ++n) {
      const auto i = static_cast<std::size_t>(n);
      CHECK(std::abs(row[i - 1] + row[i + 1] - 2.0 * n / z * row[i]) <= 1e-9);
    }
  }
}

TEST_CASE("parity", "[bessel][property]") {
  for (double z : {0.7, 2.0, 9.1})
    for (int n = 0; n <= 12; ++n) {
      const double sign = n % 2 ? -1.0 : 1.0;
      CHECK(bessel_j(-n, z) == sign * bessel_j(n, z));
      CHECK(bessel_j(n, -z) == sign * bessel_j(n, z));
    }
}
