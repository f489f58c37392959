#pragma once

// ---------------------------------------------------------------------------
// rng.hpp -- counter-based random numbers.
//
// The generator is Philox-4x32 with 10 rounds.  A counter-based generator maps
// (counter, key) -> 128 random bits through a fixed bijection, so the i-th
// draw of a stream can be produced directly without advancing sequential
// state.  That is what makes the simulator reproducible under any thread
// count: sample i of stream s depends only on (seed, s, i).
//
// Conventions:
//   counter = (lo32(i), hi32(i), stream, 0)      for sample index i
//   key     = (lo32(seed), hi32(seed))
//   u64a    = (word0 << 32) | word1,  u64b = (word2 << 32) | word3
//   uniform = ((u64 >> 11) + 0.5) * 2^-53        in the open interval (0, 1)
//   normals = Box-Muller on the two uniforms of one block
// ---------------------------------------------------------------------------

#include <array>
#include <cstdint>

namespace phasesim {

// One application of the Philox-4x32-10 bijection.
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& counter,
                                        const std::array<std::uint32_t, 2>& key);

// Two independent uniforms in (0, 1) from block (seed, stream, index).
std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint32_t stream,
                                   std::uint64_t index);

// Two independent standard normals from block (seed, stream, index), via the
// Box-Muller transform: r = sqrt(-2 ln u1), z = r (cos 2 pi u2, sin 2 pi u2).
std::array<double, 2> normal_pair(std::uint64_t seed, std::uint32_t stream,
                                  std::uint64_t index);

}  // namespace phasesim
