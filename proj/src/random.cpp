#include "qpool/random.hpp"

#include <cmath>
#include <numbers>

#include "qpool/types.hpp"

namespace qpool {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::string_view to_string(RngScope scope) noexcept {
  switch (scope) {
    case RngScope::local: return "local";
    case RngScope::state: return "state";
    case RngScope::pool: return "pool";
  }
  return "?";
}

RandomStream::RandomStream(std::uint64_t seed, RngScope scope, std::uint64_t scope_key) noexcept
    : seed_(seed), scope_(scope), scope_key_(scope_key) {
  key_ = mix64(mix64(seed ^ (static_cast<std::uint64_t>(scope) + 1) * kGolden) + scope_key * kGolden + kGolden);
}

RandomStream RandomStream::derive(std::uint64_t salt) const noexcept {
  RandomStream child = *this;
  child.key_ = mix64(key_ ^ mix64(salt + 0x632be59bd9b4e019ULL));
  child.counter_ = 0;
  return child;
}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ ^ mix64(counter_ * kGolden));
}

double RandomStream::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RandomStream::uniform(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("uniform range requires lo < hi");
  const double v = lo + (hi - lo) * uniform();
  return v < hi ? v : std::nextafter(hi, lo);
}

void RandomStream::uniform(std::span<double> out, double lo, double hi) {
  for (double& v : out) v = uniform(lo, hi);
}

std::vector<double> RandomStream::uniform_vector(std::size_t count, double lo, double hi) {
  std::vector<double> out(count);
  uniform(out, lo, hi);
  return out;
}

double RandomStream::normal() noexcept {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qpool
