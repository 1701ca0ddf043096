#include <cstring>
#include <fstream>

#include "stegcal/audio_io.hpp"
#include "support.hpp"

using namespace stegcal;

namespace {

// Independent byte-level WAV writer used as the reference layout.
std::vector<std::uint8_t> reference_wav(const std::vector<std::int16_t>& s, std::uint16_t channels,
                                        std::uint32_t rate, std::uint16_t format = 1,
                                        std::uint16_t bits = 16, bool junk_chunk = false) {
  std::vector<std::uint8_t> b;
  auto u16 = [&](std::uint16_t v) {
    b.push_back(v & 0xff);
    b.push_back(v >> 8);
  };
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
  };
  auto tag = [&](const char* t) { b.insert(b.end(), t, t + 4); };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(s.size() * 2);
  tag("RIFF");
  u32(0);
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(channels * bits / 8);
  u16(bits);
  if (junk_chunk) {
    tag("LIST");
    u32(3);
    b.insert(b.end(), {'a', 'b', 'c', 0});  // odd size, padded
  }
  tag("data");
  u32(data_bytes);
  for (auto v : s) u16(static_cast<std::uint16_t>(v));
  const std::uint32_t riff = static_cast<std::uint32_t>(b.size() - 8);
  std::memcpy(b.data() + 4, &riff, 4);
  return b;
}

}  // namespace

TEST_CASE("wav round trip is bit exact") {
  const auto dir = testing::scratch_dir("wav");
  AudioClip tiny{{1, -2, 3, -4}, 16000, 1};
  write_wav(tiny, dir / "tiny.wav");
  CHECK(read_wav(dir / "tiny.wav") == tiny);

  AudioClip extremes{{-32768, 32767}, 44100, 1};
  write_wav(extremes, dir / "ext.wav");
  CHECK(read_wav(dir / "ext.wav") == extremes);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = testing::random_clip(1 + seed * 97, seed);
    CHECK(parse_wav(encode_wav(c)) == c);
  }
}

TEST_CASE("one-sample clip encodes to the reference 46-byte layout") {
  AudioClip one{{-7}, 8000, 1};
  const auto bytes = encode_wav(one);
  CHECK(bytes.size() == 46);
  CHECK(bytes == reference_wav({-7}, 1, 8000));
}

TEST_CASE("stereo file keeps interleaved samples") {
  const std::vector<std::int16_t> inter{10, 20, -30, 40, 50, -60};
  const auto clip = parse_wav(reference_wav(inter, 2, 22050));
  CHECK(clip.channel_count == 2);
  CHECK(clip.samples == inter);
  CHECK(clip.frame_count() == 3);
  CHECK(encode_wav(clip) == reference_wav(inter, 2, 22050));
}

TEST_CASE("unknown chunks are skipped") {
  const auto clip = parse_wav(reference_wav({5, 6, 7}, 1, 8000, 1, 16, true));
  CHECK(clip.samples == std::vector<std::int16_t>{5, 6, 7});
}

TEST_CASE("malformed wav inputs") {
  CHECK_ERRC(parse_wav(reference_wav({1, 2}, 1, 8000, 3, 16)), Errc::UnsupportedFormat);
  CHECK_ERRC(parse_wav(reference_wav({1, 2}, 1, 8000, 1, 8)), Errc::UnsupportedFormat);
  auto bad = reference_wav({1, 2}, 1, 8000);
  bad[0] = 'X';
  CHECK_ERRC(parse_wav(bad), Errc::NotWav);
  auto trunc = reference_wav({1, 2, 3, 4}, 1, 8000);
  trunc.resize(trunc.size() - 3);
  CHECK_ERRC(parse_wav(trunc), Errc::Truncated);
  CHECK_ERRC(read_wav("/nonexistent/dir/x.wav"), Errc::IoError);
}

TEST_CASE("downmix rounds half away from zero") {
  AudioClip mono{{1, 2, 3}, 8000, 1};
  CHECK(downmix_mono(mono) == mono);
  AudioClip st{{100, 200, 1, 2, -1, -2, -32768, -32767}, 8000, 2};
  const auto m = downmix_mono(st);
  CHECK(m.channel_count == 1);
  CHECK(m.samples == std::vector<std::int16_t>{150, 2, -2, -32768});
}

TEST_CASE("segment frame counts and contents") {
  std::vector<double> x(2048);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  CHECK(segment(std::span(x).first(1024), 1024, 512).frames.size() == 1);
  const auto fs = segment(x, 1024, 512);
  REQUIRE(fs.frames.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(fs.frames[f].size() == 1024);
    CHECK(fs.frames[f][0] == static_cast<double>(f * 512));
    CHECK(fs.frames[f].back() == static_cast<double>(f * 512 + 1023));
  }
  CHECK(segment(std::span(x).first(2047), 1024, 512).frames.size() == 2);
  CHECK_ERRC(segment(std::span(x).first(1023), 1024, 512), Errc::TooShort);
  CHECK_ERRC(segment(x, 1024, 0), Errc::BadLength);
  CHECK_ERRC(segment(x, 1024, 2000), Errc::BadLength);
}
