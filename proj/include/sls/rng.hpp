#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace sls {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so parallel replicas keyed by (seed, index) are
// reproducible regardless of scheduling.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  // Derive an independent stream, e.g. one per bootstrap round.
  CounterRng derive(uint64_t substream) const {
    return CounterRng(seed_, mix(stream_ ^ mix(substream + 0x9e3779b97f4a7c15ull)));
  }

  uint64_t nextU64();

  // Uniform in [0, 1).
  double nextUniform();

  // Uniform in [lo, hi).
  double nextUniform(double lo, double hi);

  // Standard normal via Box-Muller (pairs cached).
  double nextNormal();

  Eigen::VectorXd normalVector(int n, double stddev = 1.0);

  // Uniform integer in [0, n).
  int nextInt(int n);

 private:
  static uint64_t mix(uint64_t x);

  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace sls
