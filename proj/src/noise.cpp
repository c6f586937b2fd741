#include "rhlab/noise.hpp"

#include <cmath>

#include "rhlab/errors.hpp"

namespace rhlab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseStream::NoiseStream(double sigma, std::uint64_t seed, std::uint64_t offset)
    : sigma_(sigma), seed_(seed), offset_(offset) {
  require(std::isfinite(sigma) && sigma >= 0.0 && sigma <= 0.5,
          "NoiseStream: sigma must lie in [0, 1/2]");
  key_a_ = mix64(seed + kGolden);
  key_b_ = mix64(key_a_ ^ 0xD1B54A32D192ED03ULL);
}

double NoiseStream::unit(std::uint64_t i) const {
  std::uint64_t counter = offset_ + i;
  std::uint64_t z = mix64(mix64(counter * kGolden + key_a_) ^ key_b_);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double NoiseStream::operator[](std::uint64_t i) const {
  return sigma_ * (2.0 * unit(i) - 1.0);
}

NoiseStream NoiseStream::shifted(std::uint64_t m) const {
  NoiseStream s = *this;
  s.offset_ = offset_ + m;
  return s;
}

NoiseStream NoiseStream::split(std::uint64_t stream) const {
  return NoiseStream(sigma_, mix64(seed_ ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ULL)), 0);
}

std::vector<double> NoiseStream::prefix(std::uint64_t n) const {
  std::vector<double> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = (*this)[i];
  return out;
}

}  // namespace rhlab
