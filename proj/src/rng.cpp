#include "sls/rng.hpp"

#include <cmath>

namespace sls {

// splitmix64 finalizer; full 64-bit avalanche.
uint64_t CounterRng::mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t CounterRng::nextU64() {
  const uint64_t c = counter_++;
  return mix(mix(seed_ ^ mix(stream_)) ^ c);
}

double CounterRng::nextUniform() {
  // 53 mantissa bits.
  return static_cast<double>(nextU64() >> 11) * 0x1.0p-53;
}

double CounterRng::nextUniform(double lo, double hi) {
  return lo + (hi - lo) * nextUniform();
}

double CounterRng::nextNormal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = nextUniform();
  const double u2 = nextUniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

Eigen::VectorXd CounterRng::normalVector(int n, double stddev) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = stddev * nextNormal();
  return v;
}

int CounterRng::nextInt(int n) {
  // Rejection-free modulo is fine here; n is tiny relative to 2^64.
  return static_cast<int>(nextU64() % static_cast<uint64_t>(n));
}

}  // namespace sls
