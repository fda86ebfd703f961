#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qpool {

/// Which ranks share a stream's sequence.
enum class RngScope : std::uint8_t {
  local = 0,  // distinct per rank
  state = 1,  // shared by the ranks of one pool state
  pool = 2,   // shared by every rank of the pool
};

std::string_view to_string(RngScope scope) noexcept;

/// SplitMix64 output finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream.
///
/// Draw k is mix64(key ^ mix64((k + 1) * golden)), where the key hashes
/// (seed, scope, scope_key). Any rank that constructs the stream from the
/// same triple reproduces the same sequence without communication, and
/// `derive` splits off statistically independent child streams.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, RngScope scope, std::uint64_t scope_key = 0) noexcept;

  /// Child stream whose key also mixes in `salt`; the parent is untouched.
  RandomStream derive(std::uint64_t salt) const noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform in [lo, hi). Throws DomainError unless lo < hi.
  double uniform(double lo, double hi);
  void uniform(std::span<double> out, double lo, double hi);
  std::vector<double> uniform_vector(std::size_t count, double lo, double hi);
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  RngScope scope() const noexcept { return scope_; }
  std::uint64_t scope_key() const noexcept { return scope_key_; }
  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  RngScope scope_;
  std::uint64_t scope_key_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qpool
