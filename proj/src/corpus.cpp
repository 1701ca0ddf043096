#include "stegcal/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>

#include "stegcal/cli/csv.hpp"
#include "stegcal/error.hpp"
#include "stegcal/fft.hpp"
#include "stegcal/parallel.hpp"
#include "stegcal/rng.hpp"

namespace stegcal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

// Smooth low-pass gain: flat to fc, raised-cosine taper to 1.1 fc.
double lowpass_gain(double f, double fc) {
  if (f <= fc) return 1.0;
  const double stop = 1.1 * fc;
  if (f >= stop) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (f - fc) / (stop - fc)));
}

std::vector<double> coloured_noise(std::size_t n, double fs, double fc, double tilt, Rng& rng) {
  const std::size_t nfft = next_power_of_two(n);
  std::vector<std::complex<double>> spec(nfft);
  for (std::size_t k = 1; k < nfft / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(nfft);
    const double g = lowpass_gain(f, fc) * std::pow(1.0 + f / 200.0, -tilt);
    const double re = rng.normal(), im = rng.normal();
    spec[k] = {g * re, g * im};
    spec[nfft - k] = std::conj(spec[k]);
  }
  fft_inplace(spec, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
  return out;
}

void add_partials(std::vector<double>& out, double fs, double fc, Rng& rng) {
  const std::size_t n = out.size();
  const std::size_t notes = 2 + rng.uniform_index(3);
  for (std::size_t note = 0; note < notes; ++note) {
    const double f0 = 80.0 * std::pow(2.0, uniform(rng, 0.0, 3.6));
    const double rolloff = uniform(rng, 0.7, 1.6);
    const double level = uniform(rng, 0.3, 1.0);
    const double env_rate = uniform(rng, 0.2, 2.0);
    const double env_depth = uniform(rng, 0.4, 1.0);
    const double env_phase = uniform(rng, 0.0, kTwoPi);
    const std::size_t max_h = std::min<std::size_t>(24, static_cast<std::size_t>(fc / f0));
    for (std::size_t h = 1; h <= max_h; ++h) {
      const double f = f0 * static_cast<double>(h) * (1.0 + 0.0005 * rng.normal());
      if (f >= fc) break;
      const double amp = level * std::pow(static_cast<double>(h), -rolloff);
      // Phasor recursion, renormalized every block to stop amplitude drift.
      const std::complex<double> step = std::polar(1.0, kTwoPi * f / fs);
      std::complex<double> osc = std::polar(1.0, uniform(rng, 0.0, kTwoPi));
      const std::complex<double> env_step = std::polar(1.0, kTwoPi * env_rate / fs);
      std::complex<double> env = std::polar(1.0, env_phase);
      for (std::size_t i = 0; i < n; ++i) {
        const double e = 1.0 - env_depth * 0.5 * (1.0 + env.imag());
        out[i] += amp * e * osc.real();
        osc *= step;
        env *= env_step;
        if ((i & 1023) == 1023) {
          osc /= std::abs(osc);
          env /= std::abs(env);
        }
      }
    }
  }
}

}  // namespace

AudioClip synth_cover(std::uint32_t sample_rate, std::size_t samples, std::uint64_t seed) {
  if (sample_rate == 0) throw Error(Errc::OutOfRange, "sample rate must be positive");
  if (samples == 0) throw Error(Errc::TooShort, "synthetic clip needs at least one sample");
  Rng rng(seed);
  const double fs = static_cast<double>(sample_rate);
  const double fc = uniform(rng, 5000.0, 19000.0) * fs / 44100.0;

  std::vector<double> tonal(samples, 0.0);
  add_partials(tonal, fs, fc, rng);
  std::vector<double> noise = coloured_noise(samples, fs, fc, uniform(rng, 0.3, 1.2), rng);

  auto rms = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
  };
  const double tonal_rms = rms(tonal), noise_rms = rms(noise);
  const double snr_db = uniform(rng, 10.0, 30.0);
  const double noise_gain =
      noise_rms > 0.0 ? tonal_rms * std::pow(10.0, -snr_db / 20.0) / noise_rms : 0.0;
  std::vector<double> mix(samples);
  for (std::size_t i = 0; i < samples; ++i) mix[i] = tonal[i] + noise_gain * noise[i];

  const double target = uniform(rng, 3500.0, 7000.0);
  const double current = rms(mix);
  const double gain = current > 0.0 ? target / current : 0.0;

  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.channel_count = 1;
  clip.samples.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double v = std::clamp(std::round(mix[i] * gain), -32768.0, 32767.0);
    clip.samples[i] = static_cast<std::int16_t>(v);
  }
  return clip;
}

std::vector<AudioClip> synth_corpus(std::size_t count, double duration_s, std::uint32_t sample_rate,
                                    std::uint64_t seed, unsigned jobs) {
  if (!(duration_s > 0.0)) throw Error(Errc::OutOfRange, "duration must be positive");
  const auto samples = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  std::vector<AudioClip> out(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    out[i] = synth_cover(sample_rate, samples, derive_seed(seed, i));
  });
  return out;
}

void CorpusManifest::validate() const {
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (r.clip_id.empty()) throw Error(Errc::ParseError, "manifest row with empty clip_id");
    if (!seen.insert(r.clip_id).second)
      throw Error(Errc::ParseError, "duplicate clip_id in manifest: " + r.clip_id);
    if (r.role == ml::Label::Stego && !r.embedder)
      throw Error(Errc::InvalidSpec, "stego row without embedder: " + r.clip_id);
    if (r.embedder) r.embedder->validate();
  }
}

std::string CorpusManifest::to_csv() const {
  std::string out = "clip_id,path,role,embedder,seed\n";
  for (const auto& r : rows) {
    out += csv::escape(r.clip_id);
    out += ',';
    out += csv::escape(r.path);
    out += r.role == ml::Label::Stego ? ",STEGO," : ",COVER,";
    out += r.embedder ? csv::escape(r.embedder->to_json()) : "-";
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

CorpusManifest CorpusManifest::from_csv(const std::string& text) {
  const auto table = csv::parse(text);
  if (table.empty()) throw Error(Errc::ParseError, "empty manifest");
  const std::vector<std::string> header{"clip_id", "path", "role", "embedder", "seed"};
  if (table[0] != header) throw Error(Errc::ParseError, "manifest header mismatch");
  CorpusManifest m;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& f = table[i];
    if (f.size() != header.size())
      throw Error(Errc::ParseError, "manifest row " + std::to_string(i) + " has wrong field count");
    ManifestRow r;
    r.clip_id = f[0];
    r.path = f[1];
    if (f[2] == "COVER") {
      r.role = ml::Label::Cover;
    } else if (f[2] == "STEGO") {
      r.role = ml::Label::Stego;
    } else {
      throw Error(Errc::ParseError, "bad role '" + f[2] + "' in manifest row " + std::to_string(i));
    }
    if (f[3] != "-") r.embedder = EmbedderSpec::from_json(f[3]);
    try {
      std::size_t pos = 0;
      r.seed = std::stoull(f[4], &pos);
      if (pos != f[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "bad seed '" + f[4] + "' in manifest row " + std::to_string(i));
    }
    m.rows.push_back(std::move(r));
  }
  m.validate();
  return m;
}

CorpusManifest CorpusManifest::load(const std::filesystem::path& file) {
  return from_csv(csv::read_file(file));
}

std::filesystem::path CorpusManifest::resolve(const ManifestRow& row,
                                              const std::filesystem::path& manifest_dir) const {
  std::filesystem::path p(row.path);
  return p.is_absolute() ? p : manifest_dir / p;
}

std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot list " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> out;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".wav") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace stegcal
