#include "stegcal/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "stegcal/error.hpp"

namespace stegcal {

namespace {

// FFTW's planner is not reentrant; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> run_r2r(std::vector<double> buf, fftw_r2r_kind kind) {
  const int n = static_cast<int>(buf.size());
  std::vector<double> out(buf.size());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_r2r_1d(n, buf.data(), out.data(), kind, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw Error(Errc::BadLength, "FFT size must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // Twiddles exp(-2 pi i k / n), k < n/2, computed directly per entry.
  thread_local std::vector<std::complex<double>> table;
  if (table.size() != n / 2) {
    table.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
      table[k] = {std::cos(ang), std::sin(ang)};
    }
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto w = inverse ? std::conj(table[k * stride]) : table[k * stride];
        const auto u = a[i + k];
        const auto v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
}

std::vector<double> dct_ortho(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto out = run_r2r(std::vector<double>(x.begin(), x.end()), FFTW_REDFT10);
  const double s0 = std::sqrt(1.0 / (4.0 * static_cast<double>(n)));
  const double sk = std::sqrt(1.0 / (2.0 * static_cast<double>(n)));
  out[0] *= s0;
  for (std::size_t k = 1; k < n; ++k) out[k] *= sk;
  return out;
}

std::vector<double> idct_ortho(std::span<const double> coeffs) {
  const std::size_t n = coeffs.size();
  if (n == 0) return {};
  std::vector<double> buf(coeffs.begin(), coeffs.end());
  buf[0] *= std::sqrt(1.0 / static_cast<double>(n));
  const double sk = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  for (std::size_t k = 1; k < n; ++k) buf[k] *= sk;
  return run_r2r(std::move(buf), FFTW_REDFT01);
}

}  // namespace stegcal
