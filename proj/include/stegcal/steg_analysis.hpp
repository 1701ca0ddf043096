#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stegcal/audio_io.hpp"
#include "stegcal/embedders.hpp"

namespace stegcal {

struct NoisePmf {
  std::vector<int> support;   // ascending
  std::vector<double> probs;  // sums to 1
};

struct SensitivityReport {
  EmbedderSpec embedder;
  std::vector<int> planes;           // 1-based plane indices
  std::vector<double> sensitivity;   // S_i per entry of `planes`
  std::size_t n_clips = 0;
  std::size_t n_samples = 0;

  // Planes whose S_i exceeds 1, i.e. anti-correlated with the cover.
  std::vector<int> anomalous_planes() const;

  std::string to_json() const;
  // Header "method,param,1,2,..." then one row, values in percent.
  std::string to_csv(const std::string& label) const;
};

// n[m] = s[m] - c[m]
std::vector<int> steg_noise(const AudioClip& cover, const AudioClip& stego);

NoisePmf noise_pmf(std::span<const int> noise);

// Bit (plane - 1) of each sample's 16-bit two's-complement word.
std::vector<std::uint8_t> bitplane(const AudioClip& clip, int plane);

double ber(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

// 2 * BER between plane i of cover and stego.
double sensitivity(const AudioClip& cover, const AudioClip& stego, int plane);

// Embeds every clip with `spec` (seed re-derived per clip index so each clip
// gets a distinct message) and pools plane sensitivities over all samples.
SensitivityReport sensitivity_report(std::span<const AudioClip> covers, const EmbedderSpec& spec,
                                     int max_plane = 6, unsigned jobs = 1);

}  // namespace stegcal
