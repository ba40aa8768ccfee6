#include "ldp/rng.hpp"

#include <cmath>
#include <numbers>

namespace ldp {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// Uniform-pair and normal-pair draws share the counter layout
// (step, coord / 2, stream lo, stream hi); the domain tag in the key keeps
// them independent.
std::array<std::uint32_t, 4> block(NoiseStream ns, std::uint32_t step,
                                   std::uint32_t pair, std::uint32_t tag) {
  const std::array<std::uint32_t, 4> ctr{
      step, pair, static_cast<std::uint32_t>(ns.stream),
      static_cast<std::uint32_t>(ns.stream >> 32)};
  const std::array<std::uint32_t, 2> key{
      static_cast<std::uint32_t>(ns.seed),
      static_cast<std::uint32_t>(ns.seed >> 32) ^ tag};
  return philox4x32(ctr, key);
}

// 53-bit uniform in (0, 1].
double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double standard_normal(NoiseStream ns, std::uint32_t step, std::uint32_t coord) {
  const auto r = block(ns, step, coord / 2, 0u);
  const double u1 = to_unit(r[0], r[1]);
  const double u2 = to_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (coord % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
}

double uniform01(NoiseStream ns, std::uint32_t step, std::uint32_t coord) {
  const auto r = block(ns, step, coord / 2, 0x5A5A5A5Au);
  const double u = (coord % 2 == 0) ? to_unit(r[0], r[1]) : to_unit(r[2], r[3]);
  return u >= 1.0 ? 0.0 : u;
}

}  // namespace ldp
