#pragma once

// Seeded random streams. The engine is std::mt19937_64, whose output is
// fixed by the standard; the variate transforms below are written out
// because std:: distributions differ between standard libraries and every
// trace must be bit-reproducible from its seed.

#include <cstdint>
#include <random>

namespace liposim {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream for item `index` of a batch seeded with `seed`.
// Item streams do not depend on how many items precede them, so batch
// results are identical for any iteration order or thread count.
Rng derive_stream(std::uint64_t seed, std::uint64_t index);

// Uniform on [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

// Uniform integer in [lo, hi].
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

double uniform_real(Rng& rng, double lo, double hi);

// Standard normal (Box-Muller, one variate per call).
double standard_normal(Rng& rng);

}  // namespace liposim
