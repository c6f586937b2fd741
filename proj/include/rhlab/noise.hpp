#pragma once

#include <cstdint>
#include <vector>

namespace rhlab {

std::uint64_t mix64(std::uint64_t z);

// Counter-based stream of i.i.d. uniform offsets on [-sigma, sigma]:
// draw i is a pure function of (seed, offset + i).
class NoiseStream {
 public:
  NoiseStream() = default;
  NoiseStream(double sigma, std::uint64_t seed, std::uint64_t offset = 0);

  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t offset() const { return offset_; }

  double operator[](std::uint64_t i) const;
  // Uniform draw on [0, 1) underlying entry i.
  double unit(std::uint64_t i) const;

  // theta^m: the stream advanced by m entries.
  NoiseStream shifted(std::uint64_t m) const;
  // Independent child stream number `stream`, starting at offset 0.
  NoiseStream split(std::uint64_t stream) const;
  std::vector<double> prefix(std::uint64_t n) const;

 private:
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
  std::uint64_t offset_ = 0;
  std::uint64_t key_a_ = 0;
  std::uint64_t key_b_ = 0;
};

}  // namespace rhlab
