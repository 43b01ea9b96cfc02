#pragma once

#include <cstdint>
#include <random>

namespace semithermo {

// Deterministic random stream. Wraps mt19937_64 but derives variates by
// fixed arithmetic, not std distributions, so identical seeds give identical
// streams on every platform.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  // Uniform on {0,...,n-1}; n must be positive. Rejection keeps it unbiased.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = eng_();
    while (x >= limit) x = eng_();
    return static_cast<std::size_t>(x % span);
  }

  // Derive an independent child stream, e.g. one per Monte Carlo task.
  RngStream fork(std::uint64_t salt) {
    return RngStream(next_u64() ^ (salt * 0x9e3779b97f4a7c15ull));
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace semithermo
