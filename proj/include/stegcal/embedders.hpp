#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stegcal/audio_io.hpp"

namespace stegcal {

enum class EmbedderKind {
  LsbReplace,   // b-plane LSB replacement (Hide4PGP-style)
  LsbMatch,     // rate-controlled +-1 matching (Steghide-style)
  IntWavelet,   // detail-coefficient LSBs of a one-level integer Haar lifting
  CoxDct,       // multiplicative spread spectrum on the largest DCT coefficients
  SsDctAdd,     // additive +-a chips on every non-DC DCT coefficient
  SsTimeAdd,    // additive +-alpha chips per sample
};

std::string_view kind_name(EmbedderKind kind);
EmbedderKind parse_kind(std::string_view name);

struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::LsbReplace;
  double capacity_bps = 0.0;
  int planes = 1;
  double alpha = 0.0;
  // COX only; 0 selects min(1000, N/10).
  std::size_t n_coeffs = 0;
  std::uint64_t seed = 0;

  // Throws InvalidSpec when the parameters are inconsistent for the kind.
  void validate() const;

  std::string to_json() const;
  static EmbedderSpec from_json(std::string_view text);

  friend bool operator==(const EmbedderSpec&, const EmbedderSpec&) = default;
};

// The 1-LSB, full-rate replacement used for universal calibration.
EmbedderSpec universal_reembedder(std::uint64_t seed = 0);

// Mono cover in, stego of identical length and rate out. Deterministic in
// (cover, spec); samples saturate at the 16-bit limits.
AudioClip embed(const AudioClip& cover, const EmbedderSpec& spec);

// Exposed for tests: one-level integer Haar lifting and its exact inverse.
struct HaarBands {
  std::vector<std::int32_t> approx;
  std::vector<std::int32_t> detail;
};
HaarBands haar_forward(std::span<const std::int16_t> x);
std::vector<std::int32_t> haar_inverse(const HaarBands& bands);

std::size_t default_cox_coeffs(std::size_t n);

}  // namespace stegcal
