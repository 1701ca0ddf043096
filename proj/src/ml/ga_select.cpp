#include "stegcal/ml/ga_select.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "stegcal/error.hpp"
#include "stegcal/ml/cross_validation.hpp"
#include "stegcal/parallel.hpp"
#include "stegcal/rng.hpp"

namespace stegcal::ml {

void GaConfig::validate() const {
  if (population < 2 || population % 2 != 0) {
    throw Error(Errc::OutOfRange, "GA population must be an even number >= 2");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw Error(Errc::OutOfRange, "mutation rate must be in [0, 1]");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw Error(Errc::OutOfRange, "crossover rate must be in [0, 1]");
  }
  if (elitism > population) throw Error(Errc::OutOfRange, "elitism exceeds population");
  if (tournament == 0) throw Error(Errc::OutOfRange, "tournament size must be positive");
  if (inner_folds < 2) throw Error(Errc::OutOfRange, "inner CV needs at least 2 folds");
}

double mask_fitness(const Dataset& ds, const std::vector<bool>& mask, const GaConfig& cfg) {
  if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) return 0.0;
  const auto masked = ds.select_columns(mask);
  return kfold_cv(masked, cfg.inner_folds, cfg.svm, cfg.seed).mean_accuracy;
}

GaResult ga_select(const Dataset& ds, const GaConfig& cfg, unsigned jobs) {
  cfg.validate();
  const std::size_t d = ds.dims();
  if (d < 2) throw Error(Errc::OutOfRange, "GA feature selection needs at least 2 features");
  if (ds.count(Label::Cover) < cfg.inner_folds || ds.count(Label::Stego) < cfg.inner_folds) {
    throw Error(Errc::TooFewSamples, "each class needs at least " +
                                         std::to_string(cfg.inner_folds) + " rows for the inner CV");
  }

  Rng rng(derive_seed(cfg.seed, 0x6a));
  using Mask = std::vector<bool>;
  std::vector<Mask> pop(cfg.population, Mask(d, false));
  for (auto& m : pop) {
    for (std::size_t b = 0; b < d; ++b) m[b] = rng.bit() != 0;
    if (std::none_of(m.begin(), m.end(), [](bool v) { return v; })) m[rng.uniform_index(d)] = true;
  }

  std::map<Mask, double> cache;
  auto evaluate = [&](const std::vector<Mask>& masks) {
    std::vector<Mask> todo;
    for (const auto& m : masks) {
      if (!cache.contains(m) && std::find(todo.begin(), todo.end(), m) == todo.end()) todo.push_back(m);
    }
    std::vector<double> scores(todo.size());
    parallel_for(todo.size(), jobs, [&](std::size_t i) { scores[i] = mask_fitness(ds, todo[i], cfg); });
    for (std::size_t i = 0; i < todo.size(); ++i) cache.emplace(todo[i], scores[i]);
    std::vector<double> fit(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) fit[i] = cache.at(masks[i]);
    return fit;
  };

  auto ranked = [](const std::vector<double>& fit) {
    std::vector<std::size_t> order(fit.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
    return order;
  };

  auto fitness = evaluate(pop);
  GaResult result;
  {
    const auto order = ranked(fitness);
    result.mask = pop[order[0]];
    result.fitness = fitness[order[0]];
    result.trace.push_back(result.fitness);
  }

  auto tournament_pick = [&](const std::vector<double>& fit) -> const Mask& {
    std::size_t best = rng.uniform_index(pop.size());
    for (std::size_t t = 1; t < cfg.tournament; ++t) {
      const std::size_t c = rng.uniform_index(pop.size());
      if (fit[c] > fit[best] || (fit[c] == fit[best] && c < best)) best = c;
    }
    return pop[best];
  };

  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    const auto order = ranked(fitness);
    std::vector<Mask> next;
    next.reserve(cfg.population);
    for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[e]]);

    while (next.size() < cfg.population) {
      Mask a = tournament_pick(fitness);
      Mask b = tournament_pick(fitness);
      if (rng.uniform01() < cfg.crossover_rate) {
        std::size_t lo = rng.uniform_index(d), hi = rng.uniform_index(d);
        if (lo > hi) std::swap(lo, hi);
        for (std::size_t i = lo; i <= hi; ++i) {
          const bool tmp = a[i];
          a[i] = b[i];
          b[i] = tmp;
        }
      }
      for (Mask* child : {&a, &b}) {
        for (std::size_t i = 0; i < d; ++i) {
          if (rng.uniform01() < cfg.mutation_rate) (*child)[i] = !(*child)[i];
        }
        if (next.size() < cfg.population) next.push_back(std::move(*child));
      }
    }
    pop = std::move(next);
    fitness = evaluate(pop);

    const auto best = ranked(fitness)[0];
    if (fitness[best] > result.fitness) {
      result.fitness = fitness[best];
      result.mask = pop[best];
    }
    result.trace.push_back(result.fitness);
  }
  return result;
}

}  // namespace stegcal::ml
