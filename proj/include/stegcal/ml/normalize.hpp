#pragma once

#include <vector>

#include "stegcal/ml/dataset.hpp"

namespace stegcal::ml {

// Train-set population mean and standard deviation per column.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> sd;
};

NormStats fit_norm(const Matrix& train);

// (x - mean) / sd per column; columns with sd == 0 map to 0.
Matrix apply_norm(const Matrix& x, const NormStats& stats);
void apply_norm_row(std::span<double> row, const NormStats& stats);

}  // namespace stegcal::ml
