#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stegcal/audio_io.hpp"
#include "stegcal/embedders.hpp"
#include "stegcal/ml/dataset.hpp"

namespace stegcal {

// Band-limited synthetic "music": sustained harmonic partials under slow
// random envelopes plus tilted coloured noise, all below a random low-pass
// cutoff (5..19 kHz at 44.1 kHz, scaled with the rate), then quantized.
AudioClip synth_cover(std::uint32_t sample_rate, std::size_t samples, std::uint64_t seed);

std::vector<AudioClip> synth_corpus(std::size_t count, double duration_s,
                                    std::uint32_t sample_rate, std::uint64_t seed,
                                    unsigned jobs = 1);

struct ManifestRow {
  std::string clip_id;
  std::string path;  // relative to the manifest directory unless absolute
  ml::Label role = ml::Label::Cover;
  std::optional<EmbedderSpec> embedder;
  std::uint64_t seed = 0;
};

struct CorpusManifest {
  std::vector<ManifestRow> rows;

  // Unique ids and parsable embedders for every stego row.
  void validate() const;

  std::string to_csv() const;
  static CorpusManifest from_csv(const std::string& text);
  static CorpusManifest load(const std::filesystem::path& file);

  std::filesystem::path resolve(const ManifestRow& row,
                                const std::filesystem::path& manifest_dir) const;
};

// Sorted list of *.wav files in a directory.
std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir);

}  // namespace stegcal
