#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stegcal/ml/dataset.hpp"
#include "stegcal/ml/svm.hpp"

namespace stegcal::ml {

struct FoldResult {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  double sensitivity = 0.0;  // TP / (TP + FN) over stego rows
  double specificity = 0.0;  // TN / (TN + FP) over cover rows
  double accuracy = 0.0;
  std::size_t selected_features = 0;
};

struct CvReport {
  std::vector<FoldResult> folds;
  double mean_sensitivity = 0.0;
  double mean_specificity = 0.0;
  double mean_accuracy = 0.0;
  // Confusion counts summed over folds.
  FoldResult pooled;
  std::uint64_t seed = 0;
  std::size_t k = 0;

  std::string to_json() const;
  std::string to_csv() const;
};

// Stratified fold index per row from a seeded per-class shuffle; within each
// class, fold sizes differ by at most one.
std::vector<std::size_t> stratified_folds(std::span<const Label> y, std::size_t k,
                                          std::uint64_t seed);

// Optional per-fold feature selection on the training portion (returns a mask).
using FoldSelector = std::function<std::vector<bool>(const Dataset& train, std::size_t fold)>;

// Per fold: normalization fitted on the training rows only, train, evaluate.
CvReport kfold_cv(const Dataset& ds, std::size_t k, const SvmParams& params, std::uint64_t seed,
                  const FoldSelector& selector = {}, unsigned jobs = 1);

}  // namespace stegcal::ml
