#include "stegcal/calibration_features.hpp"

#include <cmath>

#include "stegcal/error.hpp"
#include "stegcal/rng.hpp"

namespace stegcal {

namespace {

bool uses_derivative(FeatureSet set) {
  return set == FeatureSet::Proposed || set == FeatureSet::RMelEnergy ||
         set == FeatureSet::D2Mfcc;
}

bool uses_cepstrum(FeatureSet set) {
  return set == FeatureSet::Mfcc || set == FeatureSet::D2Mfcc || set == FeatureSet::RMfcc;
}

ScaleKind scale_for(FeatureSet set) {
  return set == FeatureSet::Mfcc || set == FeatureSet::D2Mfcc ? ScaleKind::Mel : ScaleKind::RMel;
}

// Moments per channel over frames, channel-major.
FeatureVector summarize(const std::vector<std::vector<double>>& per_frame, std::size_t channels) {
  FeatureVector fv;
  fv.values.reserve(4 * channels);
  std::vector<double> column(per_frame.size());
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t f = 0; f < per_frame.size(); ++f) column[f] = per_frame[f][c];
    const auto m = moments(column);
    fv.values.insert(fv.values.end(), {m.mean, m.stddev, m.skewness, m.kurtosis});
  }
  return fv;
}

}  // namespace

CalibrationSpec CalibrationSpec::universal() { return {}; }

CalibrationSpec CalibrationSpec::targeted(const EmbedderSpec& reembedder) {
  CalibrationSpec c;
  c.mode = CalibrationMode::Targeted;
  c.reembedder = reembedder;
  return c;
}

std::string_view feature_set_name(FeatureSet set) {
  switch (set) {
    case FeatureSet::Proposed: return "proposed";
    case FeatureSet::RMelEnergy: return "rmel-energy";
    case FeatureSet::Mfcc: return "mfcc";
    case FeatureSet::D2Mfcc: return "d2-mfcc";
    case FeatureSet::RMfcc: return "r-mfcc";
  }
  return "unknown";
}

FeatureSet parse_feature_set(std::string_view name) {
  for (auto s : {FeatureSet::Proposed, FeatureSet::RMelEnergy, FeatureSet::Mfcc,
                 FeatureSet::D2Mfcc, FeatureSet::RMfcc}) {
    if (feature_set_name(s) == name) return s;
  }
  throw Error(Errc::ParseError, "unknown feature set '" + std::string(name) + "'");
}

Moments moments(std::span<const double> v) {
  if (v.empty()) throw Error(Errc::Empty, "moments of an empty sequence");
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mu = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mu;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments m;
  m.mean = mu;
  m.stddev = std::sqrt(m2);
  if (m2 > 0.0) {
    m.skewness = m3 / (m2 * m.stddev);
    m.kurtosis = m4 / (m2 * m2);
  }
  return m;
}

AudioClip reembed(const AudioClip& x, const CalibrationSpec& calib) {
  EmbedderSpec spec = calib.mode == CalibrationMode::Universal
                          ? universal_reembedder(calib.reembedder.seed)
                          : calib.reembedder;
  spec.seed = calib.seed_override ? *calib.seed_override
                                  : derive_seed(content_hash(x.samples), spec.seed);
  return embed(x, spec);
}

std::vector<std::vector<double>> frame_energies(std::span<const double> signal,
                                                const FilterBank& bank,
                                                const FeatureConfig& cfg) {
  const auto frames = segment(signal, cfg.frame_len, cfg.hop);
  std::vector<std::vector<double>> out;
  out.reserve(frames.frames.size());
  for (const auto& frame : frames.frames) {
    const auto ps = dft_power(frame, bank.nfft, bank.sample_rate);
    out.push_back(filterbank_energies(ps, bank, cfg.spectrum));
  }
  return out;
}

std::size_t min_clip_length(const FeatureConfig& cfg) {
  return cfg.frame_len + (uses_derivative(cfg.set) ? 2 : 0);
}

FeatureVector extract_features(const AudioClip& x, const FeatureConfig& cfg) {
  if (x.channel_count != 1) throw Error(Errc::InvalidSpec, "feature extraction expects mono input");
  if (x.samples.size() < min_clip_length(cfg)) {
    throw Error(Errc::TooShort, "clip of " + std::to_string(x.samples.size()) +
                                    " samples is shorter than the minimum " +
                                    std::to_string(min_clip_length(cfg)));
  }
  if (cfg.filters == 0) throw Error(Errc::OutOfRange, "filter count must be positive");

  const auto bank = build_filterbank(cfg.filters, x.sample_rate, cfg.frame_len, scale_for(cfg.set));
  auto prepare = [&](const AudioClip& clip) {
    auto real = to_real(clip.samples);
    return uses_derivative(cfg.set) ? second_derivative(real) : real;
  };

  auto energies = frame_energies(prepare(x), bank, cfg);

  if (cfg.set == FeatureSet::Proposed) {
    const auto twin = reembed(x, cfg.calibration);
    const auto twin_energies = frame_energies(prepare(twin), bank, cfg);
    for (std::size_t f = 0; f < energies.size(); ++f) {
      for (std::size_t k = 0; k < cfg.filters; ++k) energies[f][k] -= twin_energies[f][k];
    }
  } else if (uses_cepstrum(cfg.set)) {
    for (auto& e : energies) e = cepstrum(e, cfg.double_log);
  }
  return summarize(energies, cfg.filters);
}

FeatureVector extract_features(const AudioClip& x, const CalibrationSpec& calib,
                               std::size_t filters) {
  FeatureConfig cfg;
  cfg.filters = filters;
  cfg.calibration = calib;
  return extract_features(x, cfg);
}

}  // namespace stegcal
