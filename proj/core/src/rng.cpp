#include "prevint/rng.hpp"

#include "prevint/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace prevint {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t run, StreamPurpose purpose,
                                std::uint64_t replicate) {
  std::uint64_t k = 0x243F6A8885A308D3ULL;  // pi fraction, arbitrary non-zero start
  for (std::uint64_t word : {seed, run, static_cast<std::uint64_t>(purpose), replicate}) {
    k = mix64(k ^ (word + kGolden)) + kGolden;
  }
  return k;
}

std::uint64_t RngStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open_double() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

double RngStream::next_normal(double mean, double sd) {
  return normal_quantile(next_open_double(), mean, sd);
}

int RngStream::next_binomial(int n, double p) {
  if (n < 0) throw std::invalid_argument("next_binomial: n must be non-negative");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  const bool flip = p > 0.5;
  const double ps = flip ? 1.0 - p : p;
  const double qs = 1.0 - ps;

  double pmf = std::pow(qs, n);
  if (pmf == 0.0) {
    // Underflow guard for very large n: fall back to a Bernoulli sum.
    int k = 0;
    for (int i = 0; i < n; ++i) k += next_double() < ps ? 1 : 0;
    return flip ? n - k : k;
  }

  const double u = next_double();
  double cdf = pmf;
  int k = 0;
  const double odds = ps / qs;
  while (u > cdf && k < n) {
    ++k;
    pmf *= static_cast<double>(n - k + 1) / static_cast<double>(k) * odds;
    cdf += pmf;
  }
  return flip ? n - k : k;
}

}  // namespace prevint
