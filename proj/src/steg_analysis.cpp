#include "stegcal/steg_analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "stegcal/error.hpp"
#include "stegcal/parallel.hpp"
#include "stegcal/rng.hpp"

namespace stegcal {

namespace {

void check_pair(const AudioClip& cover, const AudioClip& stego) {
  if (cover.samples.size() != stego.samples.size() ||
      cover.sample_rate != stego.sample_rate) {
    throw Error(Errc::LengthMismatch, "cover and stego differ in length or sample rate");
  }
}

void check_plane(int plane) {
  if (plane < 1 || plane > 16) {
    throw Error(Errc::BadPlane, "bit-plane " + std::to_string(plane) + " outside 1..16");
  }
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

}  // namespace

std::vector<int> steg_noise(const AudioClip& cover, const AudioClip& stego) {
  check_pair(cover, stego);
  std::vector<int> n(cover.samples.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = int{stego.samples[i]} - int{cover.samples[i]};
  return n;
}

NoisePmf noise_pmf(std::span<const int> noise) {
  if (noise.empty()) throw Error(Errc::Empty, "noise_pmf on an empty sequence");
  std::map<int, std::size_t> hist;
  for (int v : noise) ++hist[v];
  NoisePmf pmf;
  const double total = static_cast<double>(noise.size());
  for (const auto& [value, count] : hist) {
    pmf.support.push_back(value);
    pmf.probs.push_back(static_cast<double>(count) / total);
  }
  return pmf;
}

std::vector<std::uint8_t> bitplane(const AudioClip& clip, int plane) {
  check_plane(plane);
  std::vector<std::uint8_t> bits(clip.samples.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = static_cast<std::uint8_t>((static_cast<std::uint16_t>(clip.samples[i]) >> (plane - 1)) & 1u);
  }
  return bits;
}

double ber(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw Error(Errc::LengthMismatch, "bit sequences differ in length");
  if (a.empty()) throw Error(Errc::Empty, "ber on empty bit sequences");
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += (a[i] != b[i]);
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double sensitivity(const AudioClip& cover, const AudioClip& stego, int plane) {
  check_pair(cover, stego);
  return 2.0 * ber(bitplane(cover, plane), bitplane(stego, plane));
}

SensitivityReport sensitivity_report(std::span<const AudioClip> covers, const EmbedderSpec& spec,
                                     int max_plane, unsigned jobs) {
  if (covers.empty()) throw Error(Errc::EmptyCorpus, "sensitivity report over an empty corpus");
  check_plane(max_plane);
  spec.validate();

  // Per clip: count of flipped bits per plane.
  std::vector<std::vector<std::size_t>> flips(covers.size());
  parallel_for(covers.size(), jobs, [&](std::size_t c) {
    EmbedderSpec clip_spec = spec;
    clip_spec.seed = derive_seed(spec.seed, c);
    const auto stego = embed(covers[c], clip_spec);
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_plane), 0);
    for (std::size_t i = 0; i < stego.samples.size(); ++i) {
      const auto x = static_cast<std::uint16_t>(
          static_cast<std::uint16_t>(covers[c].samples[i]) ^ static_cast<std::uint16_t>(stego.samples[i]));
      for (int p = 0; p < max_plane; ++p) counts[static_cast<std::size_t>(p)] += (x >> p) & 1u;
    }
    flips[c] = std::move(counts);
  });

  SensitivityReport report;
  report.embedder = spec;
  report.n_clips = covers.size();
  for (const auto& clip : covers) report.n_samples += clip.samples.size();
  if (report.n_samples == 0) throw Error(Errc::EmptyCorpus, "corpus holds no samples");
  for (int p = 1; p <= max_plane; ++p) {
    std::size_t total = 0;
    for (const auto& counts : flips) total += counts[static_cast<std::size_t>(p - 1)];
    report.planes.push_back(p);
    report.sensitivity.push_back(2.0 * static_cast<double>(total) /
                                 static_cast<double>(report.n_samples));
  }
  return report;
}

std::vector<int> SensitivityReport::anomalous_planes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < sensitivity.size(); ++i) {
    if (sensitivity[i] > 1.0) out.push_back(planes[i]);
  }
  return out;
}

std::string SensitivityReport::to_json() const {
  nlohmann::ordered_json j;
  j["embedder"] = nlohmann::ordered_json::parse(embedder.to_json());
  j["planes"] = planes;
  j["sensitivity"] = sensitivity;
  j["n_clips"] = n_clips;
  j["n_samples"] = n_samples;
  j["pooling"] = "sample-weighted";
  j["anomalous_planes"] = anomalous_planes();
  return j.dump(2) + "\n";
}

std::string SensitivityReport::to_csv(const std::string& label) const {
  std::ostringstream os;
  os << "method,param";
  for (int p : planes) os << ',' << p;
  os << '\n' << kind_name(embedder.kind) << ',' << label;
  for (double s : sensitivity) os << ',' << percent(s);
  os << '\n';
  return os.str();
}

}  // namespace stegcal
