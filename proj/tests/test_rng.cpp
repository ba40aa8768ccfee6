#include <doctest.h>

#include <cmath>

#include "ldp/rng.hpp"

using ldp::NoiseStream;

TEST_SUITE("rng") {

TEST_CASE("philox known answers") {
  const auto zero = ldp::philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);
  const auto ones = ldp::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                    {0xffffffffu, 0xffffffffu});
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("draws are pure functions of their coordinates") {
  const NoiseStream ns{42, 7};
  CHECK(ldp::standard_normal(ns, 3, 1) == ldp::standard_normal(ns, 3, 1));
  CHECK(ldp::standard_normal(ns, 3, 1) != ldp::standard_normal(ns, 3, 0));
  CHECK(ldp::standard_normal(ns, 3, 1) != ldp::standard_normal(NoiseStream{42, 8}, 3, 1));
  CHECK(ldp::standard_normal(ns, 3, 1) != ldp::standard_normal(NoiseStream{43, 7}, 3, 1));
}

TEST_CASE("normal moments") {
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = ldp::standard_normal(NoiseStream{5, 0}, static_cast<std::uint32_t>(k / 2),
                                          static_cast<std::uint32_t>(k % 2));
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
  CHECK(std::abs(s4 / n - 3.0) < 0.08);
}

TEST_CASE("uniforms lie in [0,1) with mean one half") {
  double sum = 0.0;
  for (std::uint32_t k = 0; k < 100000; ++k) {
    const double u = ldp::uniform01(NoiseStream{9, 1}, k, 0);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
}

}
