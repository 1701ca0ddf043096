#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stegcal/audio_io.hpp"
#include "stegcal/dsp.hpp"
#include "stegcal/embedders.hpp"

namespace stegcal {

enum class CalibrationMode { Targeted, Universal };

struct CalibrationSpec {
  CalibrationMode mode = CalibrationMode::Universal;
  EmbedderSpec reembedder = universal_reembedder();
  // When set, replaces the content-hash message seed.
  std::optional<std::uint64_t> seed_override;

  static CalibrationSpec universal();
  static CalibrationSpec targeted(const EmbedderSpec& reembedder);
};

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

enum class FeatureSet {
  Proposed,    // calibrated R-Mel log-energies of second derivatives
  RMelEnergy,  // same path without calibration
  Mfcc,        // Mel cepstra of the raw signal
  D2Mfcc,      // Mel cepstra of the second derivative
  RMfcc,       // R-Mel cepstra of the raw signal
};

std::string_view feature_set_name(FeatureSet set);
FeatureSet parse_feature_set(std::string_view name);

struct FeatureConfig {
  FeatureSet set = FeatureSet::Proposed;
  std::size_t filters = 29;
  std::size_t frame_len = 1024;
  std::size_t hop = 512;
  SpectrumMode spectrum = SpectrumMode::Power;
  bool double_log = false;
  CalibrationSpec calibration;

  std::size_t dimension() const { return 4 * filters; }
};

// Channel-major: channel 1 (mean, sd, skew, kurt), channel 2 (...), ...
struct FeatureVector {
  std::vector<double> values;
};

// Population moments; a zero standard deviation yields skewness = kurtosis = 0.
Moments moments(std::span<const double> v);

// Re-embeds with calib.reembedder, seeding the message from the clip content
// hash unless overridden.
AudioClip reembed(const AudioClip& x, const CalibrationSpec& calib);

// Per-frame filter-bank log-energies of a (possibly differentiated) signal.
std::vector<std::vector<double>> frame_energies(std::span<const double> signal,
                                                const FilterBank& bank,
                                                const FeatureConfig& cfg);

FeatureVector extract_features(const AudioClip& x, const FeatureConfig& cfg);

// Convenience for the calibrated R-Mel pipeline with default framing.
FeatureVector extract_features(const AudioClip& x, const CalibrationSpec& calib,
                               std::size_t filters = 29);

// Minimum clip length accepted by extract_features for a config.
std::size_t min_clip_length(const FeatureConfig& cfg);

}  // namespace stegcal
