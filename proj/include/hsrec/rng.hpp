#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hsrec {

// Seedable sampling layer used everywhere randomness is needed.
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard; the distribution transforms live here so that results do not
// depend on the standard library's (implementation-defined) distribution
// internals. Same seed, same platform word size -> same draws, bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Decorrelated substream for (seed, stream_id), e.g. one per cluster chain.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix(mix(seed) ^ mix(stream_id ^ 0x9e3779b97f4a7c15ull)));
  }

  std::uint64_t raw() { return eng_(); }

  // uniform on [0,1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform on (0,1]
  double uniform_pos() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // unbiased integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t mask = ~0ull >> __builtin_clzll(n | 1);
    std::uint64_t v;
    do {
      v = eng_() & mask;
    } while (v >= n);
    return v;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // standard normal via Box-Muller; no cached spare, so draws consume a
  // fixed pair of engine outputs and streams stay reproducible.
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, rate), Marsaglia-Tsang for shape >= 1 with the usual
  // boost for shape < 1. Draws below the smallest normal double are clamped
  // so positivity survives the underflow of near-zero-shape draws.
  double gamma(double shape, double rate) {
    double v = std::exp(log_gamma(shape)) / rate;
    return v < 2.2250738585072014e-308 ? 2.2250738585072014e-308 : v;
  }

  // log of a Gamma(shape, 1) draw; stays finite for very small shapes,
  // where the draw itself would underflow to zero.
  double log_gamma(double shape) {
    if (shape < 1.0) {
      return log_gamma(shape + 1.0) + std::log(uniform_pos()) / shape;
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return std::log(d * v);
    }
  }

  // Beta(a, b) as the stable ratio of two log-gamma draws; result is
  // clamped into the open interval (0,1).
  double beta(double a, double b) {
    double lx = log_gamma(a);
    double ly = log_gamma(b);
    double r;
    if (lx >= ly) {
      r = 1.0 / (1.0 + std::exp(ly - lx));
    } else {
      double t = std::exp(lx - ly);
      r = t / (1.0 + t);
    }
    constexpr double lo = 2.2250738585072014e-308;  // smallest normal
    constexpr double hi = 1.0 - 1.1102230246251565e-16;
    if (r < lo) r = lo;
    if (r > hi) r = hi;
    return r;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
};

}  // namespace hsrec
