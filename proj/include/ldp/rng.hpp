#pragma once

#include <array>
#include <cstdint>

namespace ldp {

/// Philox4x32-10 block cipher used as a stateless counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Identifies one Gaussian stream: sample `stream` of experiment `seed`.
struct NoiseStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Standard normal draw for (seed, stream, step, coordinate).
///
/// A pure function of its arguments, so any worker may generate any
/// increment in any order.
double standard_normal(NoiseStream ns, std::uint32_t step, std::uint32_t coord);

/// Uniform draw in [0, 1) for (seed, stream, step, coordinate).
double uniform01(NoiseStream ns, std::uint32_t step, std::uint32_t coord);

}  // namespace ldp
