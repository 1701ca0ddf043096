#include "stegcal/ml/normalize.hpp"

#include <cmath>

#include "stegcal/error.hpp"

namespace stegcal::ml {

NormStats fit_norm(const Matrix& train) {
  if (train.rows() == 0) throw Error(Errc::Empty, "fit_norm on an empty train set");
  const std::size_t d = train.cols();
  const double n = static_cast<double>(train.rows());
  NormStats s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += train(r, c);
  }
  for (double& m : s.mean) m /= n;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dev = train(r, c) - s.mean[c];
      s.sd[c] += dev * dev;
    }
  }
  for (double& v : s.sd) v = std::sqrt(v / n);
  return s;
}

void apply_norm_row(std::span<double> row, const NormStats& stats) {
  if (row.size() != stats.mean.size()) {
    throw Error(Errc::DimensionMismatch, "row width differs from normalization stats");
  }
  for (std::size_t c = 0; c < row.size(); ++c) {
    row[c] = stats.sd[c] > 0.0 ? (row[c] - stats.mean[c]) / stats.sd[c] : 0.0;
  }
}

Matrix apply_norm(const Matrix& x, const NormStats& stats) {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) apply_norm_row(out.row(r), stats);
  return out;
}

}  // namespace stegcal::ml
