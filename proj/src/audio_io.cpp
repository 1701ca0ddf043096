#include "stegcal/audio_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "stegcal/error.hpp"

namespace stegcal {

namespace {

std::uint16_t load_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void store_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(Errc::NotWav, "missing RIFF/WAVE magic");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;

  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::uint32_t size = load_u32(hdr + 4);
    const std::size_t body = pos + 8;

    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size()) {
        throw Error(Errc::Truncated, "fmt chunk shorter than 16 bytes");
      }
      format = load_u16(bytes.data() + body);
      channels = load_u16(bytes.data() + body + 2);
      rate = load_u32(bytes.data() + body + 4);
      bits = load_u16(bytes.data() + body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real format code in its subformat GUID.
      if (format == 0xFFFE && size >= 40 && body + 26 <= bytes.size()) {
        format = load_u16(bytes.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) throw Error(Errc::NotWav, "data chunk before fmt chunk");
      if (format != 1) {
        throw Error(Errc::UnsupportedFormat,
                    "audio format code " + std::to_string(format) + " is not PCM");
      }
      if (bits != 16) {
        throw Error(Errc::UnsupportedFormat,
                    std::to_string(bits) + " bits per sample; only 16 is supported");
      }
      if (channels == 0 || rate == 0) {
        throw Error(Errc::UnsupportedFormat, "zero channels or sample rate");
      }
      if (body + size > bytes.size()) {
        throw Error(Errc::Truncated, "data chunk declares " + std::to_string(size) +
                                         " bytes, file holds " +
                                         std::to_string(bytes.size() - body));
      }
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t n = (size / frame_bytes) * channels;
      AudioClip clip;
      clip.sample_rate = rate;
      clip.channel_count = channels;
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        clip.samples[i] = static_cast<std::int16_t>(load_u16(bytes.data() + body + 2 * i));
      }
      return clip;
    }
    // Chunks are word aligned.
    pos = body + size + (size & 1u);
  }
  throw Error(have_fmt ? Errc::Truncated : Errc::NotWav, "no data chunk found");
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::IoError, "read failed: " + path.string());
  return parse_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
  validate(clip);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  const std::uint16_t block_align = static_cast<std::uint16_t>(2 * clip.channel_count);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  store_tag(out, "RIFF");
  store_u32(out, 36 + data_bytes);
  store_tag(out, "WAVE");
  store_tag(out, "fmt ");
  store_u32(out, 16);
  store_u16(out, 1);
  store_u16(out, clip.channel_count);
  store_u32(out, clip.sample_rate);
  store_u32(out, clip.sample_rate * block_align);
  store_u16(out, block_align);
  store_u16(out, 16);
  store_tag(out, "data");
  store_u32(out, data_bytes);
  for (std::int16_t s : clip.samples) store_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  const auto bytes = encode_wav(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

AudioClip downmix_mono(const AudioClip& clip) {
  if (clip.channel_count <= 1) return clip;
  const std::size_t ch = clip.channel_count;
  const std::size_t frames = clip.samples.size() / ch;
  AudioClip mono;
  mono.sample_rate = clip.sample_rate;
  mono.channel_count = 1;
  mono.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    long sum = 0;
    for (std::size_t c = 0; c < ch; ++c) sum += clip.samples[f * ch + c];
    // std::lround rounds half away from zero.
    mono.samples[f] = static_cast<std::int16_t>(
        std::lround(static_cast<double>(sum) / static_cast<double>(ch)));
  }
  return mono;
}

FrameSet segment(std::span<const double> x, std::size_t frame_len, std::size_t hop) {
  if (frame_len == 0 || hop == 0 || hop > frame_len) {
    throw Error(Errc::BadLength, "segment requires 0 < hop <= frame_len");
  }
  if (x.size() < frame_len) {
    throw Error(Errc::TooShort, "signal of " + std::to_string(x.size()) +
                                    " samples is shorter than one frame of " +
                                    std::to_string(frame_len));
  }
  FrameSet fs;
  fs.frame_len = frame_len;
  fs.hop = hop;
  const std::size_t count = (x.size() - frame_len) / hop + 1;
  fs.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto start = x.begin() + static_cast<std::ptrdiff_t>(i * hop);
    fs.frames.emplace_back(start, start + static_cast<std::ptrdiff_t>(frame_len));
  }
  return fs;
}

std::vector<double> to_real(std::span<const std::int16_t> samples) {
  return {samples.begin(), samples.end()};
}

void validate(const AudioClip& clip) {
  if (clip.sample_rate == 0) throw Error(Errc::OutOfRange, "sample rate must be positive");
  if (clip.channel_count == 0) throw Error(Errc::OutOfRange, "channel count must be positive");
  if (clip.samples.size() % clip.channel_count != 0) {
    throw Error(Errc::OutOfRange, "sample count is not a multiple of the channel count");
  }
}

}  // namespace stegcal
