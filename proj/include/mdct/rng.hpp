#pragma once

#include <cstdint>

namespace mdct {

// Update phases get their own stream namespace so that every sampling unit
// (block, tree node, data chunk, prediction point) draws from a stream keyed
// by (seed, phase, iteration, unit). Streams are independent of thread
// scheduling, which is what makes parallel chains bit-reproducible.
enum class Phase : std::uint64_t {
  init = 1,
  beta = 2,
  gamma = 3,
  sigma = 4,
  delta = 5,
  latent = 6,
  predict = 7,
  sim = 8,
  prior = 9,
};

std::uint64_t stream_key(std::uint64_t seed, Phase phase, std::uint64_t iteration,
                         std::uint64_t unit);

/// Counter-style splitmix64 generator with hand-rolled distributions.
/// Distribution code is kept in-house so draws are identical across standard
/// library versions and across sequential/parallel schedules.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1).
  double uniform();

  /// Standard normal (Box-Muller, cosine branch only).
  double normal();

  /// Gamma(shape, rate), shape > 0, via Marsaglia-Tsang.
  double gamma(double shape, double rate);

  /// Inverse gamma with density x^{-shape-1} exp(-rate/x); mean rate/(shape-1).
  double inv_gamma(double shape, double rate);

  /// N(mean, 1) conditioned on z > 0 (positive=true) or z <= 0.
  /// Inverse-CDF in the bulk, exponential rejection past 6 sd in the tail.
  double truncated_normal_unit_var(double mean, bool positive);

 private:
  double std_normal_lower_tail(double a);  // N(0,1) | x >= a

  std::uint64_t state_;
};

double normal_cdf(double x);
double normal_quantile(double p);  // inverse of normal_cdf on (0,1)

}  // namespace mdct
