#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgeval {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input-file problem, carries source location when known.
struct ParseError : Error {
  ParseError(const std::string& what, int line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line) {}
  int line;
};

struct BudgetExhausted : Error {
  using Error::Error;
};

/// Deterministic RNG with engine-independent derived operations.
/// std::mt19937_64 output is pinned by the standard; the distributions here
/// are hand-rolled so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {
    // scramble a couple of rounds so small seeds diverge
    next();
    next();
  }

  std::uint64_t next() {
    // xorshift* variant; period 2^64-1 on nonzero state
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dull;
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // rejection sampling to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  /// Uniform double in [lo, hi).
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// k distinct values from [0, n), in selection order.
  std::vector<int> sample(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    shuffle(pool);
    pool.resize(k < n ? k : n);
    return pool;
  }

  /// Independent child stream; distinct salts give disjoint streams.
  Rng fork(std::uint64_t salt) const { return Rng(splitmix(state_ ^ splitmix(salt))); }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Shortest lossless decimal form; stable across runs.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0;
  std::sscanf(buf, "%lf", &back);
  if (back == v) {
    // try to shorten
    for (int prec = 1; prec < 17; ++prec) {
      char s[40];
      std::snprintf(s, sizeof(s), "%.*g", prec, v);
      double b = 0;
      std::sscanf(s, "%lf", &b);
      if (b == v) return s;
    }
  }
  return buf;
}

/// Population variance (divides by n).
inline double population_variance(const std::vector<double>& xs, std::size_t first,
                                  std::size_t count) {
  double mean = 0;
  for (std::size_t i = 0; i < count; ++i) mean += xs[first + i];
  mean /= static_cast<double>(count);
  double var = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = xs[first + i] - mean;
    var += d * d;
  }
  return var / static_cast<double>(count);
}

}  // namespace kgeval
