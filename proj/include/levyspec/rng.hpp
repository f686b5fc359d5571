#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "levyspec/errors.hpp"

// Counter-based random streams. Every logical unit of work (matrix row, tree
// node, population slot, repetition) owns a stream keyed by (master seed,
// path of ids), so results are bit-identical for a fixed seed regardless of
// how the work is scheduled across threads. Distributions are implemented
// here rather than taken from <random> so that the produced doubles are
// identical across standard-library implementations.
namespace levyspec::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += kGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t word) {
  return mix64(key ^ mix64(word + kGamma));
}

// Stream ids used across the library; fixed values keep outputs stable.
enum StreamTag : std::uint64_t {
  kTagMatrixRow = 0x11,
  kTagReplaceSign = 0x12,
  kTagReplaceChoice = 0x13,
  kTagDg = 0x14,
  kTagTreeNode = 0x15,
  kTagRdeArrivals = 0x16,
  kTagRdePick = 0x17,
  kTagTraceRep = 0x18,
  kTagConcentration = 0x19,
  kTagLwcRow = 0x1A,
  kTagLwcArrival = 0x1B,
  kTagNonHermRow = 0x1C,
  kTagStage = 0x1D,
};

class Stream {
 public:
  explicit Stream(std::uint64_t raw_key) : key_(raw_key) {}

  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : key_(mix64(seed)) {
    for (std::uint64_t w : path) key_ = derive_key(key_, w);
  }

  std::uint64_t key() const { return key_; }

  // Derived stream for a child unit; does not disturb this stream's counter.
  Stream child(std::uint64_t word) const { return Stream(derive_key(key_, word)); }

  std::uint64_t next_u64() { return mix64(key_ + kGamma * ++counter_); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform01_open0() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double exponential() { return -std::log(uniform01_open0()); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01_open0()));
    const double t = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

  // Uniform integer in [0, n); rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw NumericError("Stream::below: n must be positive");
    const std::uint64_t threshold = (-n) % n;
    std::uint64_t v = next_u64();
    while (v < threshold) v = next_u64();
    return v % n;
  }

  // Exact Poisson sampling; multiplication method in chunks so the
  // e^{-mean} factor never underflows.
  long poisson(double mean) {
    if (!(mean >= 0)) throw NumericError("Stream::poisson: mean must be >= 0");
    long total = 0;
    while (mean > 200.0) {
      total += poisson_chunk(200.0);
      mean -= 200.0;
    }
    return total + poisson_chunk(mean);
  }

 private:
  long poisson_chunk(double mean) {
    if (mean <= 0) return 0;
    const double limit = std::exp(-mean);
    long k = 0;
    double prod = uniform01_open0();
    while (prod > limit) {
      ++k;
      prod *= uniform01_open0();
    }
    return k;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levyspec::rng
