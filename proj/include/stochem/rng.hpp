#pragma once

#include <array>
#include <cstdint>

namespace stochem::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
Counter philox4x32_10(Counter counter, Key key);

/// Standard normal draw that depends only on its arguments.
///
/// The (seed, replica, step, stream) tuple addresses a unique Philox block;
/// two 53-bit uniforms from that block feed a Box-Muller transform.
double standard_normal(std::uint64_t seed, std::uint32_t replica, std::uint64_t step,
                       std::uint32_t stream);

}  // namespace stochem::rng
