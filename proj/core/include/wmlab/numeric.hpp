#pragma once

/**
 * Deterministic hashing, counter-based pseudorandomness, and the special
 * functions behind every detector in the toolkit.
 *
 * All randomness is addressable: a draw is a pure function of
 * (seed, index), so detection can re-derive per-token randomness without
 * replaying generation. The mixer is the splitmix64 finalizer
 * (Steele, Lea, Flood 2014), fixed for the life of the project:
 *
 *   z += 0x9e3779b97f4a7c15
 *   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
 *   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
 *   z ^= z >> 31
 *
 * Token ids are absorbed as 32-bit little-endian words (their numeric
 * value), which keeps hashes bit-identical across platforms. Golden
 * values are pinned in the test suite and must never change.
 */

#include "wmlab/types.hpp"

#include <cstdint>
#include <span>

namespace wmlab {

/// Watermark key. The default is the toolkit-wide primary key.
struct HashKey {
  std::uint64_t value = 15485863;
};

/// Seed derived from (key, token prefix); addresses a counter-based
/// uniform stream via prng_uniform / prng_word.
struct PrefixSeed {
  std::uint64_t value = 0;
};

/// Hash a token-id prefix under a key. Deterministic, avalanche-quality
/// mixing: flipping any bit of any prefix token flips each output bit
/// with probability ~1/2.
PrefixSeed hash_prefix(HashKey key, std::span<const TokenId> prefix);

/// Raw 64-bit draw #index from the stream addressed by seed.
std::uint64_t prng_word(PrefixSeed seed, std::uint64_t index) noexcept;

/// Uniform draw in the open interval (0,1); 53 significant bits, never
/// exactly 0 or 1.
double prng_uniform(PrefixSeed seed, std::uint64_t index) noexcept;

/// Unbiased-enough integer draw in [0, bound); bound >= 1.
/// Uses the 128-bit multiply reduction (Lemire); deterministic.
std::uint64_t prng_below(PrefixSeed seed, std::uint64_t index,
                         std::uint64_t bound) noexcept;

/// Upper regularized incomplete gamma Q(shape, x) = P[Gamma(shape,1) > x]
/// for integer shape >= 1, evaluated as the log-space partial sum
/// e^{-x} * sum_{k<shape} x^k/k!. Stable for shape up to 1e4.
/// Throws std::invalid_argument for shape == 0 or x < 0.
double upper_regularized_gamma(std::uint64_t shape, double x);

/// P[N(0,1) > z] via erfc; relative error <= 1e-10 for |z| <= 8.
double normal_survival(double z) noexcept;

/// Exact P[Binomial(total, gamma) >= successes], summed in log space.
/// Throws std::invalid_argument for successes > total or gamma outside (0,1).
double binomial_tail(std::uint64_t total, std::uint64_t successes,
                     double gamma);

}  // namespace wmlab
