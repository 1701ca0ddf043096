#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stegcal/ml/dataset.hpp"
#include "stegcal/ml/normalize.hpp"

namespace stegcal::ml {

enum class KernelKind { Linear, Rbf };

struct SvmParams {
  KernelKind kernel = KernelKind::Rbf;
  // <= 0 selects 1 / d at training time.
  double gamma = 0.0;
  double c = 10.0;
  double tolerance = 1e-3;
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0;
};

struct Prediction {
  Label label = Label::Cover;
  double margin = 0.0;
};

// Binary soft-margin SVM. Stego is the positive class. The stored support
// vectors live in the normalized space when `norm` is present.
struct SvmModel {
  KernelKind kernel = KernelKind::Rbf;
  double gamma = 0.0;
  double c = 10.0;
  double bias = 0.0;
  Matrix support_vectors;
  std::vector<double> dual_coef;   // alpha_i, in [0, C]
  std::vector<int> sv_labels;      // +1 stego, -1 cover
  std::optional<NormStats> norm;
  std::vector<bool> feature_mask;  // empty = all features
  std::uint64_t seed = 0;

  std::size_t input_dims() const;

  // Decision value on an already masked and normalized row.
  double decision(std::span<const double> x) const;

  // Full path from a raw feature row: mask, normalize, decide. A margin of
  // exactly 0 resolves to Cover.
  Prediction predict(std::span<const double> raw) const;
};

double kernel_value(KernelKind kind, double gamma, std::span<const double> a,
                    std::span<const double> b);

// SMO with second-order working-set selection on already normalized data.
// Throws SingleClass or NotConverged.
SvmModel svm_train(const Dataset& train, const SvmParams& params);

// Applies mask, fits NormStats on `train`, then trains.
SvmModel svm_train_normalized(const Dataset& train, const SvmParams& params,
                              const std::vector<bool>& mask = {});

std::string model_to_json(const SvmModel& model, const std::string& extra_json = "{}");
SvmModel model_from_json(const std::string& text, std::string* extra_json = nullptr);

}  // namespace stegcal::ml
