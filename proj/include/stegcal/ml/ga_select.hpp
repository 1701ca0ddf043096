#pragma once

#include <cstdint>
#include <vector>

#include "stegcal/ml/dataset.hpp"
#include "stegcal/ml/svm.hpp"

namespace stegcal::ml {

struct GaConfig {
  std::size_t population = 200;
  std::size_t generations = 50;
  double crossover_rate = 0.8;  // two-point
  double mutation_rate = 0.01;  // per bit
  std::size_t elitism = 2;
  std::size_t tournament = 3;
  std::size_t inner_folds = 3;
  std::uint64_t seed = 0;
  SvmParams svm;

  void validate() const;
};

struct GaResult {
  std::vector<bool> mask;
  double fitness = 0.0;
  // Best fitness after initialization and after each generation.
  std::vector<double> trace;
};

// Fitness of a mask: mean accuracy of an inner stratified CV on the masked
// features. An empty mask scores 0.
double mask_fitness(const Dataset& ds, const std::vector<bool>& mask, const GaConfig& cfg);

GaResult ga_select(const Dataset& ds, const GaConfig& cfg, unsigned jobs = 1);

}  // namespace stegcal::ml
