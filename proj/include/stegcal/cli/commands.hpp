#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stegcal/calibration_features.hpp"
#include "stegcal/corpus.hpp"
#include "stegcal/ml/cross_validation.hpp"
#include "stegcal/ml/dataset.hpp"
#include "stegcal/ml/ga_select.hpp"
#include "stegcal/ml/svm.hpp"
#include "stegcal/steg_analysis.hpp"

namespace stegcal::cli {

namespace fs = std::filesystem;

enum class GaScope { PerFold, Global };

// Everything a pipeline run depends on besides its input files.
struct RunConfig {
  FeatureConfig features;
  ml::SvmParams svm;
  ml::GaConfig ga;
  std::size_t folds = 10;
  bool use_ga = false;
  GaScope ga_scope = GaScope::PerFold;
  std::uint64_t seed = 0;
  unsigned jobs = 0;

  std::string to_json() const;
  // Keys absent from the text keep their defaults.
  static RunConfig from_json(const std::string& text);
  void validate() const;
};

std::string feature_config_to_json(const FeatureConfig& cfg);
FeatureConfig feature_config_from_json(const std::string& text);

// Features CSV: header clip_id,label,f001,...; label 0 = cover, 1 = stego.
std::string features_to_csv(const ml::Dataset& ds);
ml::Dataset features_from_csv(const std::string& text);
ml::Dataset load_features(const fs::path& file);

// Sidecar written next to a features CSV describing its extractor.
fs::path meta_path(const fs::path& features_csv);

// Reads a mono clip, downmixing multi-channel input.
AudioClip load_mono(const fs::path& wav);

// Writes count covers named cover_0000.wav, ... into out_dir.
std::vector<fs::path> cmd_gen_synthetic(std::size_t count, double duration_s,
                                        std::uint32_t sample_rate, const fs::path& out_dir,
                                        std::uint64_t seed, unsigned jobs);

// Parses a single spec object or an array of them.
std::vector<EmbedderSpec> parse_embedder_grid(const std::string& json_text);

// One COVER row per readable cover plus one STEGO row per (cover, spec).
// Stego files go to out_dir/stego; the manifest to out_dir/manifest.csv.
CorpusManifest cmd_gen_corpus(const fs::path& cover_dir, const std::vector<EmbedderSpec>& grid,
                              const fs::path& out_dir, std::uint64_t seed, unsigned jobs);

// Covers come from the manifest's COVER rows, or every WAV in a directory.
std::vector<AudioClip> load_covers(const fs::path& manifest_or_dir);

SensitivityReport cmd_sense(const std::vector<AudioClip>& covers, const EmbedderSpec& spec,
                            int planes, unsigned jobs);

// Rows in manifest order. Writes out_csv and its meta sidecar when non-empty.
ml::Dataset cmd_features(const fs::path& manifest, const RunConfig& cfg, const fs::path& out_csv);

ml::SvmModel cmd_train(const fs::path& features_csv, const RunConfig& cfg,
                       const fs::path& out_model);

ml::CvReport cmd_cv(const ml::Dataset& ds, const RunConfig& cfg);

// Per-fold (Table II) layout with percentages.
std::string format_cv_table(const ml::CvReport& report);

ml::GaResult cmd_ga(const ml::Dataset& ds, const RunConfig& cfg);
std::string ga_result_to_json(const ml::GaResult& r);

struct ScanVerdict {
  std::string path;
  ml::Label label = ml::Label::Cover;
  double margin = 0.0;
};
std::vector<ScanVerdict> cmd_scan(const fs::path& model_file, const std::vector<fs::path>& wavs,
                                  unsigned jobs);
std::string scan_to_csv(const std::vector<ScanVerdict>& verdicts);

// value,probability rows pooled over all covers.
std::string cmd_noise_pmf(const std::vector<AudioClip>& covers, const EmbedderSpec& spec);

// freq_hz,cover[,stego] Welch PSD rows.
std::string cmd_psd(const AudioClip& clip, const std::optional<EmbedderSpec>& spec,
                    std::size_t seg_len, std::size_t hop);

}  // namespace stegcal::cli
