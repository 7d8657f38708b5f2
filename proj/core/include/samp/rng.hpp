#pragma once

#include <cstdint>
#include <random>

namespace samp {

// Labeled substreams split off a master seed.  Every sampler takes a plain
// 64-bit seed; callers derive it with derive_seed so that trial k draws the
// same numbers no matter which worker runs it or in what order.
enum class Stream : std::uint64_t {
  Matrix = 0x6d61747269780000ULL,
  Signal = 0x7369676e616c0000ULL,
  Noise = 0x6e6f697365000000ULL,
  Trial = 0x747269616c000000ULL,
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Counter-based derivation: a pure function of (master, stream, index).
std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::uint64_t index = 0) noexcept;

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine{mix64(seed)}; }

}  // namespace samp
