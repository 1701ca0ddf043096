#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace stegcal {

// Integer PCM carrier. Multi-channel clips keep interleaved samples until
// downmix_mono; everything downstream of I/O expects channel_count == 1.
struct AudioClip {
  std::vector<std::int16_t> samples;
  std::uint32_t sample_rate = 0;
  std::uint16_t channel_count = 1;

  std::size_t frame_count() const {
    return channel_count == 0 ? 0 : samples.size() / channel_count;
  }

  friend bool operator==(const AudioClip&, const AudioClip&) = default;
};

// Fixed-length analysis frames; frame i starts at sample i * hop.
struct FrameSet {
  std::vector<std::vector<double>> frames;
  std::size_t frame_len = 0;
  std::size_t hop = 0;
};

// RIFF/WAVE, format code 1, 16 bits per sample. Unknown chunks before (and
// after) `data` are skipped.
AudioClip read_wav(const std::filesystem::path& path);
AudioClip parse_wav(std::span<const std::uint8_t> bytes);

void write_wav(const AudioClip& clip, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);

// Per-frame mean of channels, rounded half away from zero.
AudioClip downmix_mono(const AudioClip& clip);

FrameSet segment(std::span<const double> x, std::size_t frame_len, std::size_t hop);

std::vector<double> to_real(std::span<const std::int16_t> samples);

// Throws OutOfRange on a zero rate or channel count, or a ragged interleave.
void validate(const AudioClip& clip);

}  // namespace stegcal
