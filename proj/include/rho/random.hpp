#pragma once

#include <cstdint>
#include <random>

namespace rho {

/// Seedable generator with counter-based substreams. A (master seed, stream id)
/// pair fully determines the draw sequence, so parallel replications that own
/// distinct stream ids reproduce bit-identically regardless of scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t master_seed, std::uint64_t stream_id = 0);

  std::uint64_t bits();
  /// Uniform on (0,1), never returns an endpoint.
  double uniform01();
  double uniform(double lo, double hi);
  /// Standard normal by inversion of the uniform (AS241-style rational fit).
  double normal();
  double cauchy();        // location 0, scale 1
  double laplace();       // location 0, scale 1
  double exponential();   // rate 1
  double gamma(double shape);  // scale 1, shape > 0
  /// Uniform integer in {0, ..., n-1}.
  int uniform_int(int n);

 private:
  std::mt19937_64 eng_;
};

/// Inverse of the standard normal CDF, accurate to ~1e-15 over (0,1).
double normal_quantile(double p);

/// SplitMix64 step, used to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace rho
