#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qpool {

using Amplitude = std::complex<double>;
using Index = std::uint64_t;

// Error taxonomy shared by every module.

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller broke an API contract (e.g. a global qubit passed to a local kernel).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Message-passing failure: timeout, closed peer, malformed frame.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested problem size exceeds what an algorithm supports.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed circuit or graph text. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace bits {

constexpr Index pow2(unsigned k) noexcept { return Index{1} << k; }

constexpr bool test(Index value, unsigned bit) noexcept { return (value >> bit) & 1U; }

/// Inserts a zero bit at position `bit`, shifting higher bits up by one.
constexpr Index insert_zero(Index value, unsigned bit) noexcept {
  const Index low = value & (pow2(bit) - 1);
  return ((value ^ low) << 1) | low;
}

constexpr bool is_pow2(std::uint64_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

/// floor(log2(v)) for v >= 1.
constexpr unsigned floor_log2(std::uint64_t v) noexcept {
  unsigned r = 0;
  while (v >>= 1) ++r;
  return r;
}

}  // namespace bits

// Complex products written out explicitly so every code path (local kernel,
// exchange kernel, oracle-free replay) rounds identically.
inline Amplitude cmul(Amplitude a, Amplitude b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline double norm2(Amplitude a) noexcept { return a.real() * a.real() + a.imag() * a.imag(); }

}  // namespace qpool
