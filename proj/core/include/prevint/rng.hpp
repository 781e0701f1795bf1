#ifndef PREVINT_RNG_HPP
#define PREVINT_RNG_HPP

#include <cstdint>

namespace prevint {

/// Role of a random stream inside one simulation run. Keying streams by
/// (seed, run, purpose, replicate) makes every draw independent of thread
/// scheduling, so parallel and serial executions produce identical results.
enum class StreamPurpose : std::uint64_t {
  training_sample = 1,
  test_sample = 2,
  train_resample = 3,
  test_resample = 4,
  overlay = 5,
  virtual_frequency = 6,
  eab_resample = 7,
  eab_flips = 8,
  eab_point = 9,
};

/// Counter-based pseudo-random stream (SplitMix64 core). Cheap to construct,
/// value-semantic, and reproducible from its key alone.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1).
  double next_double();

  /// Uniform draw in the open interval (0, 1); safe as a quantile argument.
  double next_open_double();

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  /// Normal draw by inversion, so a stream consumes exactly one variate per call.
  double next_normal(double mean, double sd);

  /// Binomial draw by CDF inversion.
  int next_binomial(int n, double p);

  bool next_bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

/// Derives a stream key from (seed, run, purpose, replicate) by chaining the
/// words through the SplitMix64 finalizer.
std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t run,
                                StreamPurpose purpose, std::uint64_t replicate);

/// All streams belonging to one simulation run.
struct StreamFamily {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;

  RngStream stream(StreamPurpose purpose, std::uint64_t replicate = 0) const {
    return RngStream(derive_stream_key(seed, run, purpose, replicate));
  }
};

}  // namespace prevint

#endif  // PREVINT_RNG_HPP
