#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stegcal/audio_io.hpp"

namespace stegcal {

inline constexpr double kLogFloor = 1e-12;

// One-sided power spectrum |X(k)|^2, k = 0..nfft/2.
struct PowerSpectrum {
  std::vector<double> bins;
  std::size_t nfft = 0;
  double sample_rate = 0.0;
};

enum class ScaleKind { Mel, RMel };

enum class SpectrumMode { Power, Magnitude };

// M triangular windows over the bins of an nfft-point spectrum. Filters are
// stored in ascending order of center frequency for both scales, so
// weights.back() is always the highest-frequency filter.
struct FilterBank {
  std::size_t count = 0;
  ScaleKind scale = ScaleKind::Mel;
  double sample_rate = 0.0;
  std::size_t nfft = 0;
  std::vector<double> edges_hz;              // count + 2, ascending
  std::vector<std::vector<double>> weights;  // count x (nfft/2 + 1)

  double lower_edge(std::size_t filter) const { return edges_hz[filter]; }
  double center(std::size_t filter) const { return edges_hz[filter + 1]; }
  double upper_edge(std::size_t filter) const { return edges_hz[filter + 2]; }
};

// y[m] = x[m+1] - 2x[m] + x[m-1]; output is two samples shorter.
std::vector<double> second_derivative(std::span<const double> x);

PowerSpectrum dft_power(std::span<const double> frame, std::size_t nfft,
                        double sample_rate = 0.0);

double mel(double hz);
double mel_to_hz(double m);
double rmel(double hz, double fs);
double rmel_to_hz(double r, double fs);

FilterBank build_filterbank(std::size_t count, double fs, std::size_t nfft, ScaleKind scale);

// E_k = ln(max(sum_bins S * W_k, kLogFloor)) with S the power spectrum or its
// square root depending on `mode`.
std::vector<double> filterbank_energies(const PowerSpectrum& ps, const FilterBank& fb,
                                        SpectrumMode mode = SpectrumMode::Power);

// |inverse DFT| of already log-scaled energies (1/M normalization).
// double_log additionally applies ln(|E_k|) first.
std::vector<double> cepstrum(std::span<const double> energies, bool double_log = false);

// Energies in L equal bands of [0, pi]. The signal is zero-padded to the next
// power of two; a bin on a band boundary belongs to the lower band.
std::vector<double> band_energies(std::span<const double> x, std::size_t bands);

// Averaged Hann-windowed periodogram normalized by window energy: unit-variance
// white noise gives an expected value of 1 in every bin.
PowerSpectrum psd_welch(std::span<const double> x, std::size_t seg_len, std::size_t hop,
                        double sample_rate = 0.0);

// D_i = E_i(stego) / E_i(cover); +inf where the cover band is below kLogFloor.
std::vector<double> band_discriminability(const AudioClip& cover, const AudioClip& stego,
                                          std::size_t bands);

}  // namespace stegcal
