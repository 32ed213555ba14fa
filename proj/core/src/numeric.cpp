#include "wmlab/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wmlab {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t sm_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  return sm_finalize(z + kGolden);
}

// log(e^a + e^b) without overflow.
double log_add_exp(double a, double b) noexcept {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

PrefixSeed hash_prefix(HashKey key, std::span<const TokenId> prefix) {
  std::uint64_t h = mix64(key.value);
  for (const TokenId id : prefix) {
    h = mix64(h ^ static_cast<std::uint64_t>(id));
  }
  return PrefixSeed{h};
}

std::uint64_t prng_word(PrefixSeed seed, std::uint64_t index) noexcept {
  // Counter-addressed splitmix64: output #index of the stream whose state
  // starts at seed.value.
  return sm_finalize(seed.value + (index + 1) * kGolden);
}

double prng_uniform(PrefixSeed seed, std::uint64_t index) noexcept {
  const std::uint64_t bits53 = prng_word(seed, index) >> 11;
  return (static_cast<double>(bits53) + 0.5) * 0x1.0p-53;
}

std::uint64_t prng_below(PrefixSeed seed, std::uint64_t index,
                         std::uint64_t bound) noexcept {
  const std::uint64_t w = prng_word(seed, index);
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(w) * bound) >> 64);
}

double upper_regularized_gamma(std::uint64_t shape, double x) {
  if (shape == 0) {
    throw std::invalid_argument("upper_regularized_gamma: shape must be >= 1");
  }
  if (!(x >= 0.0)) {
    throw std::invalid_argument("upper_regularized_gamma: x must be >= 0");
  }
  if (x == 0.0) return 1.0;

  // Q(k, x) = e^{-x} sum_{j=0}^{k-1} x^j / j!, accumulated in log space.
  const double log_x = std::log(x);
  double log_term = -x;
  double log_sum = log_term;
  for (std::uint64_t j = 1; j < shape; ++j) {
    log_term += log_x - std::log(static_cast<double>(j));
    log_sum = log_add_exp(log_sum, log_term);
  }
  const double q = std::exp(log_sum);
  return q < 1.0 ? q : 1.0;
}

double normal_survival(double z) noexcept {
  return 0.5 * std::erfc(z * 0.70710678118654752440);
}

double binomial_tail(std::uint64_t total, std::uint64_t successes,
                     double gamma) {
  if (successes > total) {
    throw std::invalid_argument("binomial_tail: successes > total");
  }
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw std::invalid_argument("binomial_tail: gamma must be in (0,1)");
  }
  if (successes == 0) return 1.0;

  const double n = static_cast<double>(total);
  const double log_p = std::log(gamma);
  const double log_q = std::log1p(-gamma);
  const double log_gamma_n1 = std::lgamma(n + 1.0);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = successes; k <= total; ++k) {
    const double kd = static_cast<double>(k);
    const double log_pmf = log_gamma_n1 - std::lgamma(kd + 1.0) -
                           std::lgamma(n - kd + 1.0) + kd * log_p +
                           (n - kd) * log_q;
    log_sum = log_add_exp(log_sum, log_pmf);
  }
  const double tail = std::exp(log_sum);
  return tail < 1.0 ? tail : 1.0;
}

}  // namespace wmlab
