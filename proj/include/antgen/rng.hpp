#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace antgen {

/// Seed for the deterministic generator. Same seed + same inputs gives
/// bit-identical output within one build of the library.
using Seed = std::uint64_t;

/// All sampling goes through this generator type.
using Rng = std::mt19937_64;

/// Stage sub-seed: FNV-1a over the label, mixed with the base seed.
/// Inserting a stage does not shift the streams of other labels.
inline Seed derive_seed(Seed base, std::string_view label) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h ^= base;
  h *= 1099511628211ull;
  h ^= h >> 29;
  return h;
}

/// Per-replicate seed for ensemble runs.
inline Seed replicate_seed(Seed base, std::uint64_t index) { return base ^ index; }

}  // namespace antgen
