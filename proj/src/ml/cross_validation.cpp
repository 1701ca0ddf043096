#include "stegcal/ml/cross_validation.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "stegcal/error.hpp"
#include "stegcal/parallel.hpp"
#include "stegcal/rng.hpp"

namespace stegcal::ml {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void finish(FoldResult& r) {
  r.sensitivity = ratio(r.tp, r.tp + r.fn);
  r.specificity = ratio(r.tn, r.tn + r.fp);
  r.accuracy = ratio(r.tp + r.tn, r.tp + r.tn + r.fp + r.fn);
}

std::string fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const Label> y, std::size_t k,
                                          std::uint64_t seed) {
  std::vector<std::size_t> fold(y.size(), 0);
  // Stego rows continue the cover round-robin so overall fold sizes also
  // differ by at most one.
  std::size_t offset = 0;
  for (Label cls : {Label::Cover, Label::Stego}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) rows.push_back(i);
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    const auto order = sample_without_replacement(rows.size(), rows.size(), rng);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      fold[rows[order[pos]]] = (pos + offset) % k;
    }
    offset = (offset + rows.size()) % k;
  }
  return fold;
}

CvReport kfold_cv(const Dataset& ds, std::size_t k, const SvmParams& params, std::uint64_t seed,
                  const FoldSelector& selector, unsigned jobs) {
  ds.validate();
  if (k < 2) throw Error(Errc::OutOfRange, "k-fold CV needs k >= 2");
  if (ds.count(Label::Cover) < k || ds.count(Label::Stego) < k) {
    throw Error(Errc::TooFewSamples, "each class needs at least k = " + std::to_string(k) + " rows");
  }
  const auto fold = stratified_folds(ds.y, k, seed);

  CvReport report;
  report.k = k;
  report.seed = seed;
  report.folds.resize(k);
  parallel_for(k, jobs, [&](std::size_t f) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < ds.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
    const auto train = ds.subset(train_rows);
    std::vector<bool> mask;
    if (selector) mask = selector(train, f);
    const auto model = svm_train_normalized(train, params, mask);

    FoldResult r;
    r.selected_features = mask.empty() ? ds.dims()
                                       : static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    for (std::size_t i : test_rows) {
      const auto pred = model.predict(ds.x.row(i));
      const bool stego = ds.y[i] == Label::Stego;
      if (stego) {
        (pred.label == Label::Stego ? r.tp : r.fn)++;
      } else {
        (pred.label == Label::Cover ? r.tn : r.fp)++;
      }
    }
    finish(r);
    report.folds[f] = r;
  });

  for (const auto& r : report.folds) {
    report.mean_sensitivity += r.sensitivity / static_cast<double>(k);
    report.mean_specificity += r.specificity / static_cast<double>(k);
    report.mean_accuracy += r.accuracy / static_cast<double>(k);
    report.pooled.tp += r.tp;
    report.pooled.fn += r.fn;
    report.pooled.tn += r.tn;
    report.pooled.fp += r.fp;
  }
  finish(report.pooled);
  return report;
}

std::string CvReport::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["seed"] = seed;
  j["mean"] = {{"sensitivity", mean_sensitivity},
               {"specificity", mean_specificity},
               {"accuracy", mean_accuracy}};
  j["pooled"] = {{"tp", pooled.tp}, {"fn", pooled.fn}, {"tn", pooled.tn}, {"fp", pooled.fp},
                 {"sensitivity", pooled.sensitivity}, {"specificity", pooled.specificity},
                 {"accuracy", pooled.accuracy}};
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& r = folds[f];
    arr.push_back({{"fold", f}, {"tp", r.tp}, {"fn", r.fn}, {"tn", r.tn}, {"fp", r.fp},
                   {"sensitivity", r.sensitivity}, {"specificity", r.specificity},
                   {"accuracy", r.accuracy}, {"features", r.selected_features}});
  }
  j["folds"] = arr;
  return j.dump(2) + "\n";
}

std::string CvReport::to_csv() const {
  std::ostringstream os;
  os << "fold,se_pct,sp_pct,acc_pct,tp,fn,tn,fp,features\n";
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& r = folds[f];
    os << f << ',' << fixed(100 * r.sensitivity, 1) << ',' << fixed(100 * r.specificity, 1) << ','
       << fixed(100 * r.accuracy, 1) << ',' << r.tp << ',' << r.fn << ',' << r.tn << ',' << r.fp
       << ',' << r.selected_features << '\n';
  }
  os << "mean," << fixed(100 * mean_sensitivity, 1) << ',' << fixed(100 * mean_specificity, 1)
     << ',' << fixed(100 * mean_accuracy, 1) << ',' << pooled.tp << ',' << pooled.fn << ','
     << pooled.tn << ',' << pooled.fp << ",\n";
  return os.str();
}

}  // namespace stegcal::ml
