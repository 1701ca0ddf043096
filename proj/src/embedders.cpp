#include "stegcal/embedders.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stegcal/error.hpp"
#include "stegcal/fft.hpp"
#include "stegcal/rng.hpp"

namespace stegcal {

namespace {

// Independent PRNG streams derived from the spec seed.
enum Stream : std::uint64_t { kPositions = 1, kMessage = 2, kCoin = 3, kChips = 4 };

std::int16_t saturate(long long v) {
  return static_cast<std::int16_t>(std::clamp<long long>(v, -32768, 32767));
}

std::int16_t saturate_round(double v) {
  return saturate(std::llround(std::clamp(v, -1e9, 1e9)));
}

std::size_t positions_for_rate(double rate, std::size_t n) {
  return std::min(n, static_cast<std::size_t>(std::floor(rate * static_cast<double>(n))));
}

AudioClip lsb_replace(const AudioClip& cover, const EmbedderSpec& spec) {
  AudioClip out = cover;
  const std::size_t n = cover.samples.size();
  Rng message(derive_seed(spec.seed, kMessage));

  if (spec.capacity_bps >= 1.0) {
    const int b = spec.planes;
    const auto mask = static_cast<std::uint16_t>((1u << b) - 1u);
    for (auto& s : out.samples) {
      std::uint16_t bits = 0;
      for (int i = 0; i < b; ++i) bits = static_cast<std::uint16_t>(bits | (message.bit() << i));
      const auto u = static_cast<std::uint16_t>(s);
      s = static_cast<std::int16_t>((u & ~mask) | bits);
    }
    return out;
  }

  Rng pos_rng(derive_seed(spec.seed, kPositions));
  const auto positions = sample_without_replacement(n, positions_for_rate(spec.capacity_bps, n), pos_rng);
  for (std::size_t p : positions) {
    const auto u = static_cast<std::uint16_t>(out.samples[p]);
    out.samples[p] = static_cast<std::int16_t>((u & 0xfffeu) | message.bit());
  }
  return out;
}

AudioClip lsb_match(const AudioClip& cover, const EmbedderSpec& spec) {
  AudioClip out = cover;
  const std::size_t n = cover.samples.size();
  Rng pos_rng(derive_seed(spec.seed, kPositions));
  Rng message(derive_seed(spec.seed, kMessage));
  Rng coin(derive_seed(spec.seed, kCoin));

  const auto positions = sample_without_replacement(n, positions_for_rate(spec.capacity_bps, n), pos_rng);
  for (std::size_t p : positions) {
    const int bit = message.bit();
    std::int16_t& s = out.samples[p];
    if ((s & 1) == bit) continue;
    if (s == 32767) {
      s = 32766;
    } else if (s == -32768) {
      s = -32767;
    } else {
      s = static_cast<std::int16_t>(s + (coin.bit() ? 1 : -1));
    }
  }
  return out;
}

AudioClip int_wavelet(const AudioClip& cover, const EmbedderSpec& spec) {
  AudioClip out = cover;
  const std::size_t pairs = cover.samples.size() / 2;
  const int b = spec.planes;
  const std::size_t count = std::min(
      pairs, static_cast<std::size_t>(std::floor(spec.capacity_bps * 2.0 *
                                                 static_cast<double>(pairs) / b)));
  if (count == 0) return out;

  auto bands = haar_forward(std::span(cover.samples).first(2 * pairs));
  Rng pos_rng(derive_seed(spec.seed, kPositions));
  Rng message(derive_seed(spec.seed, kMessage));
  const auto positions = sample_without_replacement(pairs, count, pos_rng);
  const std::uint32_t mask = (1u << b) - 1u;
  for (std::size_t p : positions) {
    std::uint32_t bits = 0;
    for (int i = 0; i < b; ++i) bits |= static_cast<std::uint32_t>(message.bit()) << i;
    const auto u = static_cast<std::uint32_t>(bands.detail[p]);
    bands.detail[p] = static_cast<std::int32_t>((u & ~mask) | bits);
  }
  const auto rebuilt = haar_inverse(bands);
  for (std::size_t i = 0; i < rebuilt.size(); ++i) out.samples[i] = saturate(rebuilt[i]);
  return out;
}

std::vector<double> samples_as_double(const AudioClip& clip) {
  return to_real(clip.samples);
}

AudioClip from_real(const AudioClip& like, std::span<const double> y) {
  AudioClip out = like;
  for (std::size_t i = 0; i < y.size(); ++i) out.samples[i] = saturate_round(y[i]);
  return out;
}

AudioClip cox_dct(const AudioClip& cover, const EmbedderSpec& spec) {
  const std::size_t n = cover.samples.size();
  const std::size_t k = spec.n_coeffs == 0 ? default_cox_coeffs(n) : spec.n_coeffs;
  if (k == 0 || n <= k) {
    throw Error(Errc::TooShort, "COX embedding needs more than " + std::to_string(k) +
                                    " samples, got " + std::to_string(n));
  }
  auto v = dct_ortho(samples_as_double(cover));

  std::vector<std::size_t> idx(n - 1);
  std::iota(idx.begin(), idx.end(), std::size_t{1});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                      return ma != mb ? ma > mb : a < b;
                    });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());

  Rng chips(derive_seed(spec.seed, kChips));
  for (std::size_t i : idx) v[i] *= 1.0 + spec.alpha * chips.normal();
  return from_real(cover, idct_ortho(v));
}

AudioClip ss_dct_add(const AudioClip& cover, const EmbedderSpec& spec) {
  auto v = dct_ortho(samples_as_double(cover));
  Rng chips(derive_seed(spec.seed, kChips));
  for (std::size_t i = 1; i < v.size(); ++i) v[i] += chips.bit() ? spec.alpha : -spec.alpha;
  return from_real(cover, idct_ortho(v));
}

AudioClip ss_time_add(const AudioClip& cover, const EmbedderSpec& spec) {
  AudioClip out = cover;
  Rng chips(derive_seed(spec.seed, kChips));
  const long long up = std::llround(spec.alpha);
  const long long down = std::llround(-spec.alpha);
  for (auto& s : out.samples) {
    s = saturate(static_cast<long long>(s) + (chips.bit() ? up : down));
  }
  return out;
}

bool is_lsb_family(EmbedderKind kind) {
  return kind == EmbedderKind::LsbReplace || kind == EmbedderKind::LsbMatch ||
         kind == EmbedderKind::IntWavelet;
}

}  // namespace

std::string_view kind_name(EmbedderKind kind) {
  switch (kind) {
    case EmbedderKind::LsbReplace: return "lsb_replace";
    case EmbedderKind::LsbMatch: return "lsb_match";
    case EmbedderKind::IntWavelet: return "int_wavelet";
    case EmbedderKind::CoxDct: return "cox_dct";
    case EmbedderKind::SsDctAdd: return "ss_dct_add";
    case EmbedderKind::SsTimeAdd: return "ss_time_add";
  }
  return "unknown";
}

EmbedderKind parse_kind(std::string_view name) {
  for (auto k : {EmbedderKind::LsbReplace, EmbedderKind::LsbMatch, EmbedderKind::IntWavelet,
                 EmbedderKind::CoxDct, EmbedderKind::SsDctAdd, EmbedderKind::SsTimeAdd}) {
    if (kind_name(k) == name) return k;
  }
  throw Error(Errc::InvalidSpec, "unknown embedder kind '" + std::string(name) + "'");
}

void EmbedderSpec::validate() const {
  auto fail = [&](const std::string& why) {
    throw Error(Errc::InvalidSpec, std::string(kind_name(kind)) + ": " + why);
  };
  if (!(capacity_bps >= 0.0) || !std::isfinite(capacity_bps)) fail("capacity_bps must be >= 0");
  if (!std::isfinite(alpha)) fail("alpha must be finite");
  if (is_lsb_family(kind)) {
    if (planes < 1 || planes > 15) fail("planes must be in 1..15");
    if (capacity_bps > planes) {
      throw Error(Errc::CapacityExceeded, std::string(kind_name(kind)) + ": capacity_bps exceeds planes");
    }
  }
  switch (kind) {
    case EmbedderKind::LsbReplace:
      if (capacity_bps >= 1.0) {
        if (capacity_bps != planes) fail("full-rate replacement requires capacity_bps == planes");
        if (planes != 1 && planes != 2 && planes != 4) fail("planes must be 1, 2 or 4");
      } else if (planes != 1) {
        fail("fractional rates require planes == 1");
      }
      break;
    case EmbedderKind::LsbMatch:
      if (capacity_bps > 1.0) {
        throw Error(Errc::CapacityExceeded, "lsb_match: capacity_bps must be <= 1");
      }
      break;
    case EmbedderKind::IntWavelet:
      // Only N/2 detail coefficients exist, each carrying `planes` bits.
      if (capacity_bps > planes / 2.0) {
        throw Error(Errc::CapacityExceeded,
                    "int_wavelet: capacity_bps exceeds planes/2 (one detail coefficient per two samples)");
      }
      break;
    case EmbedderKind::CoxDct:
    case EmbedderKind::SsDctAdd:
    case EmbedderKind::SsTimeAdd:
      break;
  }
}

std::string EmbedderSpec::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = std::string(kind_name(kind));
  j["capacity_bps"] = capacity_bps;
  j["planes"] = planes;
  j["alpha"] = alpha;
  j["n_coeffs"] = n_coeffs;
  j["seed"] = seed;
  return j.dump();
}

EmbedderSpec EmbedderSpec::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("embedder spec: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw Error(Errc::ParseError, "embedder spec must be an object with a string 'kind'");
  }
  EmbedderSpec spec;
  try {
    spec.kind = parse_kind(j["kind"].get<std::string>());
    spec.capacity_bps = j.value("capacity_bps", 0.0);
    spec.planes = j.value("planes", 1);
    spec.alpha = j.value("alpha", 0.0);
    spec.n_coeffs = j.value("n_coeffs", std::size_t{0});
    spec.seed = j.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("embedder spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

EmbedderSpec universal_reembedder(std::uint64_t seed) {
  EmbedderSpec spec;
  spec.kind = EmbedderKind::LsbReplace;
  spec.capacity_bps = 1.0;
  spec.planes = 1;
  spec.seed = seed;
  return spec;
}

std::size_t default_cox_coeffs(std::size_t n) { return std::min<std::size_t>(1000, n / 10); }

HaarBands haar_forward(std::span<const std::int16_t> x) {
  const std::size_t pairs = x.size() / 2;
  HaarBands bands;
  bands.approx.resize(pairs);
  bands.detail.resize(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::int32_t even = x[2 * i], odd = x[2 * i + 1];
    const std::int32_t d = odd - even;
    bands.detail[i] = d;
    bands.approx[i] = even + (d >> 1);  // arithmetic shift == floor(d / 2)
  }
  return bands;
}

std::vector<std::int32_t> haar_inverse(const HaarBands& bands) {
  std::vector<std::int32_t> x(2 * bands.approx.size());
  for (std::size_t i = 0; i < bands.approx.size(); ++i) {
    const std::int32_t even = bands.approx[i] - (bands.detail[i] >> 1);
    x[2 * i] = even;
    x[2 * i + 1] = bands.detail[i] + even;
  }
  return x;
}

AudioClip embed(const AudioClip& cover, const EmbedderSpec& spec) {
  spec.validate();
  if (cover.channel_count != 1) {
    throw Error(Errc::InvalidSpec, "embed expects a mono clip; downmix first");
  }
  if (cover.samples.empty()) throw Error(Errc::TooShort, "embed on an empty clip");

  switch (spec.kind) {
    case EmbedderKind::LsbReplace:
      return spec.capacity_bps == 0.0 ? cover : lsb_replace(cover, spec);
    case EmbedderKind::LsbMatch:
      return spec.capacity_bps == 0.0 ? cover : lsb_match(cover, spec);
    case EmbedderKind::IntWavelet:
      return spec.capacity_bps == 0.0 ? cover : int_wavelet(cover, spec);
    case EmbedderKind::CoxDct:
      return cox_dct(cover, spec);
    case EmbedderKind::SsDctAdd:
      return ss_dct_add(cover, spec);
    case EmbedderKind::SsTimeAdd:
      return ss_time_add(cover, spec);
  }
  throw Error(Errc::InvalidSpec, "unhandled embedder kind");
}

}  // namespace stegcal
