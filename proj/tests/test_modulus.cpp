#include <doctest.h>

#include <cmath>

#include "ldp/modulus.hpp"
#include "ldp/types.hpp"

using ldp::Modulus;

TEST_SUITE("modulus") {

TEST_CASE("families evaluate as documented") {
  CHECK(Modulus::Linear(2.0)(3.0) == doctest::Approx(6.0));
  CHECK(Modulus::XLog1OverX(1.0)(0.0) == 0.0);
  CHECK(Modulus::XLog1OverX(2.0)(std::exp(-1.0)) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(Modulus::XLog1OverX(2.0)(0.1) == doctest::Approx(0.2 * std::log(10.0)));
  CHECK(Modulus::XLog1OverX(2.0)(0.9) == doctest::Approx(2.0 * std::exp(-1.0)));
  const Modulus g = Modulus::XLogXPlus1();
  CHECK(g(0.0) == 1.0);
  CHECK(g(1.0) == 1.0);
  CHECK(g(std::exp(1.0)) == doctest::Approx(std::exp(1.0) + 1.0));
  CHECK(Modulus::Custom("sq", [](double s) { return s * s; })(3.0) == 9.0);
}

TEST_CASE("negative coefficients are rejected") {
  CHECK_THROWS_AS(Modulus::Linear(-1.0), ldp::ConfigError);
  CHECK_THROWS_AS(Modulus::XLog1OverX(-1.0), ldp::ConfigError);
}

TEST_CASE("families are nonnegative and nondecreasing on their domain") {
  const Modulus xlog = Modulus::XLog1OverX(1.0);
  const Modulus lin = Modulus::Linear(0.7);
  const Modulus plus1 = Modulus::XLogXPlus1();
  double prev_x = 0.0, prev_l = 0.0, prev_p = 0.0;
  for (int i = 1; i <= 2000; ++i) {
    const double s_small = 0.9 * i / 2000.0;
    const double s_big = 50.0 * i / 2000.0;
    CHECK(xlog(s_small) >= prev_x);
    CHECK(lin(s_big) >= prev_l);
    CHECK(plus1(s_big) >= prev_p);
    prev_x = xlog(s_small);
    prev_l = lin(s_big);
    prev_p = plus1(s_big);
  }
}

TEST_CASE("XLogXPlus1 is continuous at one") {
  const Modulus g = Modulus::XLogXPlus1();
  CHECK(std::abs(g(1.0 + 1e-9) - g(1.0)) < 1e-8);
}

}
