#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dphmm {

// 64-bit finalizer used to derive independent stream seeds from ids.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic random stream. mt19937_64 output is fixed by the standard,
// and every transform below is written out by hand, so draws are identical
// across platforms and standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (seed, stream id), e.g. one per trajectory. The
  // derivation must never involve epsilon: paired-seed sweeps rely on the
  // same noise draws across epsilon values.
  static RandomStream derive(std::uint64_t seed, std::uint64_t stream_id) {
    return RandomStream(splitmix64(seed ^ splitmix64(stream_id + 1)));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Exponential with the given rate; -log1p(-u) is safe at u = 0.
  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  // Gamma with integer shape as a sum of `shape` exponentials. Consumes
  // exactly `shape` uniforms.
  double gamma_integer(int shape, double rate) {
    double sum = 0.0;
    for (int i = 0; i < shape; ++i) sum += exponential(rate);
    return sum;
  }

  // Standard double-exponential (density e^{-|x|}/2). Two uniforms.
  double laplace_unit() {
    double magnitude = exponential(1.0);
    return uniform() < 0.5 ? -magnitude : magnitude;
  }

  // Integer in [0, n).
  int below(int n) {
    int k = static_cast<int>(uniform() * n);
    return k >= n ? n - 1 : k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dphmm
