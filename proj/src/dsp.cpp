#include "stegcal/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "stegcal/error.hpp"
#include "stegcal/fft.hpp"

namespace stegcal {

namespace {

constexpr double kMelScale = 1127.0;
constexpr double kMelBreak = 700.0;

void check_band(double hz, double nyquist) {
  if (!(hz >= 0.0) || hz > nyquist * (1.0 + 1e-12)) {
    throw Error(Errc::OutOfRange, "frequency " + std::to_string(hz) +
                                      " Hz outside [0, " + std::to_string(nyquist) + "]");
  }
}

std::vector<double> one_sided_power(std::span<const double> x, std::size_t nfft) {
  std::vector<std::complex<double>> buf(nfft);
  std::copy(x.begin(), x.end(), buf.begin());
  fft_inplace(buf);
  std::vector<double> bins(nfft / 2 + 1);
  for (std::size_t k = 0; k < bins.size(); ++k) bins[k] = std::norm(buf[k]);
  return bins;
}

}  // namespace

std::vector<double> second_derivative(std::span<const double> x) {
  if (x.size() < 3) throw Error(Errc::TooShort, "second derivative needs >= 3 samples");
  std::vector<double> y(x.size() - 2);
  for (std::size_t m = 1; m + 1 < x.size(); ++m) y[m - 1] = x[m + 1] - 2.0 * x[m] + x[m - 1];
  return y;
}

PowerSpectrum dft_power(std::span<const double> frame, std::size_t nfft, double sample_rate) {
  if (!is_power_of_two(nfft) || frame.size() > nfft) {
    throw Error(Errc::BadLength, "dft_power: nfft " + std::to_string(nfft) +
                                     " must be a power of two >= frame length " +
                                     std::to_string(frame.size()));
  }
  return {one_sided_power(frame, nfft), nfft, sample_rate};
}

double mel(double hz) {
  if (!(hz >= 0.0)) throw Error(Errc::OutOfRange, "mel: negative frequency");
  return kMelScale * std::log1p(hz / kMelBreak);
}

double mel_to_hz(double m) { return kMelBreak * std::expm1(m / kMelScale); }

double rmel(double hz, double fs) {
  check_band(hz, fs / 2.0);
  return kMelScale * std::log1p(std::max(0.0, fs / 2.0 - hz) / kMelBreak);
}

double rmel_to_hz(double r, double fs) { return fs / 2.0 - kMelBreak * std::expm1(r / kMelScale); }

FilterBank build_filterbank(std::size_t count, double fs, std::size_t nfft, ScaleKind scale) {
  if (count == 0) throw Error(Errc::OutOfRange, "filter bank needs at least one filter");
  if (!(fs > 0.0)) throw Error(Errc::OutOfRange, "sample rate must be positive");
  if (!is_power_of_two(nfft)) throw Error(Errc::BadLength, "nfft must be a power of two");

  const double nyquist = fs / 2.0;
  const double top = scale == ScaleKind::Mel ? mel(nyquist) : rmel(0.0, fs);

  FilterBank fb;
  fb.count = count;
  fb.scale = scale;
  fb.sample_rate = fs;
  fb.nfft = nfft;
  fb.edges_hz.resize(count + 2);
  for (std::size_t p = 0; p < count + 2; ++p) {
    const double v = static_cast<double>(p) * top / static_cast<double>(count + 1);
    double hz = scale == ScaleKind::Mel ? mel_to_hz(v) : rmel_to_hz(v, fs);
    fb.edges_hz[p] = std::clamp(hz, 0.0, nyquist);
  }
  // Identity for Mel, a reversal for R-Mel.
  std::sort(fb.edges_hz.begin(), fb.edges_hz.end());
  // The end points are exact by construction; pin them against rounding.
  fb.edges_hz.front() = 0.0;
  fb.edges_hz.back() = nyquist;

  const std::size_t nbins = nfft / 2 + 1;
  const double bin_hz = fs / static_cast<double>(nfft);
  fb.weights.assign(count, std::vector<double>(nbins, 0.0));
  for (std::size_t k = 0; k < count; ++k) {
    const double lo = fb.lower_edge(k), c = fb.center(k), hi = fb.upper_edge(k);
    bool any = false;
    for (std::size_t b = 0; b < nbins; ++b) {
      const double f = static_cast<double>(b) * bin_hz;
      double w = 0.0;
      if (f > lo && f <= c) {
        w = (f - lo) / (c - lo);
      } else if (f > c && f < hi) {
        w = (hi - f) / (hi - c);
      }
      fb.weights[k][b] = w;
      any = any || w > 0.0;
    }
    if (!any) {
      throw Error(Errc::DegenerateFilter,
                  "filter " + std::to_string(k + 1) + " spans no FFT bin (support " +
                      std::to_string(lo) + ".." + std::to_string(hi) + " Hz, nfft " +
                      std::to_string(nfft) + ")");
    }
  }
  return fb;
}

std::vector<double> filterbank_energies(const PowerSpectrum& ps, const FilterBank& fb,
                                        SpectrumMode mode) {
  if (ps.nfft != fb.nfft || ps.bins.size() != fb.nfft / 2 + 1) {
    throw Error(Errc::MismatchedBank, "spectrum nfft " + std::to_string(ps.nfft) +
                                          " does not match filter bank nfft " +
                                          std::to_string(fb.nfft));
  }
  std::vector<double> out(fb.count);
  for (std::size_t k = 0; k < fb.count; ++k) {
    const auto& w = fb.weights[k];
    double acc = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) {
      if (w[b] == 0.0) continue;
      const double s = mode == SpectrumMode::Power ? ps.bins[b] : std::sqrt(ps.bins[b]);
      acc += s * w[b];
    }
    out[k] = std::log(std::max(acc, kLogFloor));
  }
  return out;
}

std::vector<double> cepstrum(std::span<const double> energies, bool double_log) {
  const std::size_t m = energies.size();
  std::vector<double> e(energies.begin(), energies.end());
  if (double_log) {
    for (double& v : e) v = std::log(std::max(std::abs(v), kLogFloor));
  }
  // M is small (tens) and rarely a power of two; direct evaluation.
  std::vector<double> out(m);
  for (std::size_t n = 0; n < m; ++n) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double ang = 2.0 * M_PI * static_cast<double>((k * n) % m) / static_cast<double>(m);
      acc += e[k] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[n] = std::abs(acc) / static_cast<double>(m);
  }
  return out;
}

std::vector<double> band_energies(std::span<const double> x, std::size_t bands) {
  if (bands == 0) throw Error(Errc::OutOfRange, "band count must be positive");
  if (x.empty()) throw Error(Errc::TooShort, "band_energies on an empty signal");
  const std::size_t nfft = next_power_of_two(x.size());
  const auto bins = one_sided_power(x, nfft);
  std::vector<double> out(bands, 0.0);
  // Bin k sits at normalized frequency 2*pi*k/nfft; band i covers
  // [(i-1)pi/L, i*pi/L], so its index is ceil(2kL/nfft) clamped to >= 1.
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const std::size_t num = 2 * k * bands;
    std::size_t band = (num + nfft - 1) / nfft;
    band = std::clamp<std::size_t>(band, 1, bands);
    out[band - 1] += bins[k];
  }
  return out;
}

PowerSpectrum psd_welch(std::span<const double> x, std::size_t seg_len, std::size_t hop,
                        double sample_rate) {
  if (!is_power_of_two(seg_len)) throw Error(Errc::BadLength, "Welch segment must be a power of two");
  if (hop == 0) throw Error(Errc::BadLength, "Welch hop must be positive");
  if (x.size() < seg_len) throw Error(Errc::TooShort, "signal shorter than one Welch segment");

  // Periodic Hann.
  std::vector<double> window(seg_len);
  double energy = 0.0;
  for (std::size_t i = 0; i < seg_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(seg_len));
    energy += window[i] * window[i];
  }

  PowerSpectrum acc{std::vector<double>(seg_len / 2 + 1, 0.0), seg_len, sample_rate};
  std::vector<double> buf(seg_len);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + seg_len <= x.size(); start += hop) {
    for (std::size_t i = 0; i < seg_len; ++i) buf[i] = x[start + i] * window[i];
    const auto p = one_sided_power(buf, seg_len);
    for (std::size_t k = 0; k < p.size(); ++k) acc.bins[k] += p[k];
    ++segments;
  }
  const double scale = 1.0 / (static_cast<double>(segments) * energy);
  for (double& v : acc.bins) v *= scale;
  return acc;
}

std::vector<double> band_discriminability(const AudioClip& cover, const AudioClip& stego,
                                          std::size_t bands) {
  if (cover.samples.size() != stego.samples.size()) {
    throw Error(Errc::LengthMismatch, "cover and stego lengths differ");
  }
  const auto ec = band_energies(to_real(cover.samples), bands);
  const auto es = band_energies(to_real(stego.samples), bands);
  std::vector<double> d(bands);
  for (std::size_t i = 0; i < bands; ++i) {
    d[i] = ec[i] < kLogFloor ? std::numeric_limits<double>::infinity() : es[i] / ec[i];
  }
  return d;
}

}  // namespace stegcal
