#pragma once

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "stegcal/audio_io.hpp"
#include "stegcal/error.hpp"

namespace testing {

// Runs expr and checks it throws stegcal::Error with the given code.
#define CHECK_ERRC(expr, errc)                                   \
  do {                                                           \
    bool thrown_ = false;                                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const stegcal::Error& e_) {                         \
      thrown_ = true;                                            \
      CHECK_MESSAGE(e_.code() == (errc), e_.what());             \
    }                                                            \
    CHECK_MESSAGE(thrown_, "expected stegcal::Error: " #errc);   \
  } while (0)

inline stegcal::AudioClip random_clip(std::size_t n, std::uint64_t seed, int lo = -32768,
                                      int hi = 32767, std::uint32_t rate = 44100) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> dist(lo, hi);
  stegcal::AudioClip clip;
  clip.sample_rate = rate;
  clip.channel_count = 1;
  clip.samples.resize(n);
  for (auto& s : clip.samples) s = static_cast<std::int16_t>(dist(gen));
  return clip;
}

inline std::vector<double> random_reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("stegcal_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
