#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace stegcal {

// Deterministic PRNG with portable derived distributions. std::mt19937_64's
// raw stream is fixed by the standard; the std:: distributions are not, so
// everything built on top of it lives here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  int bit() {
    if (bits_left_ == 0) {
      bit_buffer_ = engine_();
      bits_left_ = 64;
    }
    int b = static_cast<int>(bit_buffer_ & 1u);
    bit_buffer_ >>= 1;
    --bits_left_;
    return b;
  }

  // Uniform in [0, n), unbiased.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal();

 private:
  std::mt19937_64 engine_;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Combine a base seed with a stream index into an independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// FNV-1a over the little-endian bytes of 16-bit samples.
std::uint64_t content_hash(std::span<const std::int16_t> samples);

// First `count` entries of a seeded Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                    Rng& rng);

}  // namespace stegcal
