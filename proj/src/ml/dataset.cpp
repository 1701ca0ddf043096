#include "stegcal/ml/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "stegcal/error.hpp"

namespace stegcal::ml {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw Error(Errc::DimensionMismatch, "row of " + std::to_string(values.size()) +
                                             " values appended to a matrix of width " +
                                             std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::size_t Dataset::count(Label label) const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), label));
}

void Dataset::validate() const {
  if (x.rows() != y.size()) throw Error(Errc::DimensionMismatch, "feature rows and labels differ in count");
  if (!ids.empty() && ids.size() != y.size()) throw Error(Errc::DimensionMismatch, "ids and labels differ in count");
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (double v : x.row(r)) {
      if (!std::isfinite(v)) {
        throw Error(Errc::OutOfRange, "non-finite feature in row " + std::to_string(r));
      }
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x = Matrix(0, x.cols());
  for (std::size_t r : rows) {
    out.x.append_row(x.row(r));
    out.y.push_back(y[r]);
    if (!ids.empty()) out.ids.push_back(ids[r]);
  }
  return out;
}

Dataset Dataset::select_columns(const std::vector<bool>& mask) const {
  if (mask.size() != x.cols()) throw Error(Errc::DimensionMismatch, "feature mask width differs from dataset");
  const auto kept = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  Dataset out;
  out.y = y;
  out.ids = ids;
  out.x = Matrix(x.rows(), kept);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::size_t j = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask[c]) out.x(r, j++) = x(r, c);
    }
  }
  return out;
}

}  // namespace stegcal::ml
