#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "stegcal/ml/anova.hpp"
#include "stegcal/ml/cross_validation.hpp"
#include "stegcal/ml/dataset.hpp"
#include "stegcal/ml/ga_select.hpp"
#include "stegcal/ml/normalize.hpp"
#include "stegcal/ml/svm.hpp"
#include "support.hpp"

using namespace stegcal;
using namespace stegcal::ml;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels) {
  Dataset ds;
  ds.x = Matrix(0, rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ds.x.append_row(rows[i]);
    ds.y.push_back(labels[i] ? Label::Stego : Label::Cover);
    ds.ids.push_back("r" + std::to_string(i));
  }
  return ds;
}

// Two Gaussian clouds; `shift` moves the stego mean along feature 0 only.
Dataset clouds(std::size_t per_class, std::size_t dims, double shift, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int lab = i % 2;
    std::vector<double> r(dims);
    for (auto& v : r) v = n01(gen);
    if (lab) r[0] += shift;
    rows.push_back(r);
    labels.push_back(lab);
  }
  return make_dataset(rows, labels);
}

// Solves A z = b by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> z(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * z[k];
    z[i] = s / a[i][i];
  }
  return z;
}

}  // namespace

TEST_CASE("normalization") {
  Matrix m(3, 2);
  m(0, 0) = 1;
  m(1, 0) = 2;
  m(2, 0) = 3;
  for (int r = 0; r < 3; ++r) m(r, 1) = 4;
  const auto st = fit_norm(m);
  CHECK(st.sd[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  const auto z = apply_norm(m, st);
  CHECK(z(0, 0) == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(z(1, 0) == doctest::Approx(0.0));
  CHECK(z(2, 0) == doctest::Approx(1.2247).epsilon(1e-4));
  for (int r = 0; r < 3; ++r) CHECK(z(r, 1) == 0.0);
  CHECK_ERRC(fit_norm(Matrix(0, 3)), Errc::Empty);

  const auto ds = clouds(50, 4, 3.0, 1);
  const auto zs = apply_norm(ds.x, fit_norm(ds.x));
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0, var = 0;
    for (std::size_t r = 0; r < zs.rows(); ++r) mean += zs(r, c) / zs.rows();
    for (std::size_t r = 0; r < zs.rows(); ++r) var += (zs(r, c) - mean) * (zs(r, c) - mean) / zs.rows();
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1) < 1e-9);
  }
}

TEST_CASE("dataset helpers") {
  auto ds = clouds(5, 3, 1.0, 2);
  CHECK(ds.count(Label::Cover) == 5);
  const std::vector<std::size_t> rows{0, 3};
  const auto sub = ds.subset(rows);
  CHECK(sub.size() == 2);
  CHECK(sub.ids[1] == "r3");
  const auto cols = ds.select_columns({true, false, true});
  CHECK(cols.dims() == 2);
  CHECK(cols.x(4, 1) == ds.x(4, 2));
  ds.x(0, 0) = std::nan("");
  CHECK_ERRC(ds.validate(), Errc::OutOfRange);
}

TEST_CASE("svm on separable data") {
  const auto ds = make_dataset({{0, 0}, {0.5, 1}, {1, 0.2}, {4, 4}, {4.5, 5}, {5, 4.2}},
                               {0, 0, 0, 1, 1, 1});
  SvmParams p;
  p.kernel = KernelKind::Linear;
  p.c = 1000;
  const auto model = svm_train(ds, p);
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(model.predict(ds.x.row(i)).label == ds.y[i]);
  for (double a : model.dual_coef) {
    CHECK(a >= 0.0);
    CHECK(a <= p.c);
  }
  // Support vectors of a hard-margin solution sit on the margin.
  for (std::size_t s = 0; s < model.support_vectors.rows(); ++s) {
    CHECK(std::abs(model.decision(model.support_vectors.row(s))) >= 1 - 1e-3);
  }

  const auto single = make_dataset({{0, 0}, {1, 1}}, {1, 1});
  CHECK_ERRC(svm_train(single, p), Errc::SingleClass);
}

TEST_CASE("svm XOR matches the dual QP oracle") {
  const std::vector<std::vector<double>> pts{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> lab{1, 1, 0, 0};
  const auto ds = make_dataset(pts, lab);
  SvmParams p;
  p.gamma = 1.0;
  p.c = 10.0;
  p.tolerance = 1e-6;
  const auto model = svm_train(ds, p);
  for (std::size_t i = 0; i < 4; ++i) CHECK(model.predict(ds.x.row(i)).label == ds.y[i]);

  // Interior optimum: [Q -y; y' 0] [alpha; rho] = [1; 0].
  const std::vector<double> y{1, 1, -1, -1};
  std::vector<std::vector<double>> a(5, std::vector<double>(5, 0.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double d2 = std::pow(pts[i][0] - pts[j][0], 2) + std::pow(pts[i][1] - pts[j][1], 2);
      a[i][j] = y[i] * y[j] * std::exp(-d2);
    }
    a[i][4] = -y[i];
    a[4][i] = y[i];
  }
  const auto z = solve(a, {1, 1, 1, 1, 0});
  for (int i = 0; i < 4; ++i) {
    REQUIRE(z[i] > 0.0);
    REQUIRE(z[i] < p.c);
  }
  auto oracle_decision = [&](std::span<const double> x) {
    double s = -z[4];
    for (int i = 0; i < 4; ++i) {
      const double d2 = std::pow(pts[i][0] - x[0], 2) + std::pow(pts[i][1] - x[1], 2);
      s += z[i] * y[i] * std::exp(-d2);
    }
    return s;
  };
  REQUIRE(model.dual_coef.size() == 4);
  std::vector<double> got = model.dual_coef, want(z.begin(), z.begin() + 4);
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (int i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-4));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-1, 2);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> x{u(gen), u(gen)};
    CHECK(model.decision(x) == doctest::Approx(oracle_decision(x)).epsilon(1e-4));
  }
}

TEST_CASE("svm predictions depend only on the sign") {
  const auto ds = clouds(40, 3, 2.0, 5);
  auto model = svm_train_normalized(ds, {});
  auto scaled = model;
  for (double& a : scaled.dual_coef) a *= 3.7;
  scaled.bias *= 3.7;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto a = model.predict(ds.x.row(i)), b = scaled.predict(ds.x.row(i));
    CHECK(a.label == b.label);
    CHECK(b.margin == doctest::Approx(3.7 * a.margin));
  }
  SvmModel zero = model;
  for (double& a : zero.dual_coef) a = 0.0;
  zero.bias = 0.0;
  CHECK(zero.predict(ds.x.row(0)).label == Label::Cover);
}

TEST_CASE("model json round trip") {
  const auto ds = clouds(30, 5, 2.0, 6);
  const auto model = svm_train_normalized(ds, {}, {true, false, true, true, false});
  std::string extra;
  const auto back = model_from_json(model_to_json(model, R"({"feature_set":"proposed"})"), &extra);
  CHECK(extra.find("proposed") != std::string::npos);
  CHECK(back.input_dims() == 5);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.predict(ds.x.row(i)).margin == model.predict(ds.x.row(i)).margin);
  }
  CHECK_ERRC(model_from_json("{\"format_version\": 99}"), Errc::ParseError);
  CHECK_ERRC(model.predict(std::vector<double>(3, 0.0)), Errc::DimensionMismatch);
}

TEST_CASE("stratified folds") {
  std::vector<Label> y(97, Label::Cover);
  for (std::size_t i = 0; i < 41; ++i) y[i * 2] = Label::Stego;
  const auto f = stratified_folds(y, 10, 3);
  for (Label cls : {Label::Cover, Label::Stego}) {
    std::vector<std::size_t> sizes(10, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == cls) ++sizes[f[i]];
    }
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  }
  CHECK(stratified_folds(y, 10, 3) == f);
  CHECK(stratified_folds(y, 10, 4) != f);
}

TEST_CASE("k-fold cross-validation") {
  // Duplicated, perfectly separable data.
  auto base = clouds(20, 2, 8.0, 7);
  Dataset dup = base;
  for (std::size_t i = 0; i < base.size(); ++i) {
    dup.x.append_row(base.x.row(i));
    dup.y.push_back(base.y[i]);
    dup.ids.push_back(base.ids[i] + "b");
  }
  const auto rep = kfold_cv(dup, 10, {}, 1);
  for (const auto& r : rep.folds) {
    CHECK(r.sensitivity == 1.0);
    CHECK(r.specificity == 1.0);
  }

  // Random labels: chance accuracy.
  auto noise = clouds(200, 5, 0.0, 8);
  const auto chance = kfold_cv(noise, 10, {}, 2);
  CHECK(std::abs(chance.mean_accuracy - 0.5) <= 0.08);

  const auto ds = clouds(60, 4, 1.5, 9);
  const auto a = kfold_cv(ds, 10, {}, 5);
  const auto b = kfold_cv(ds, 10, {}, 5, {}, 4);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
  const auto c = kfold_cv(ds, 10, {}, 6);
  CHECK(std::abs(a.mean_accuracy - c.mean_accuracy) < 0.05 + 1e-12);
  CHECK(a.pooled.tp + a.pooled.fn == 60);
  CHECK(a.pooled.tn + a.pooled.fp == 60);

  CHECK_ERRC(kfold_cv(clouds(4, 2, 1.0, 1), 10, {}, 1), Errc::TooFewSamples);
}

TEST_CASE("normalization never reads evaluation rows") {
  const auto ds = clouds(30, 3, 2.0, 10);
  const auto folds = stratified_folds(ds.y, 5, 11);
  std::vector<NormStats> seen;
  auto capture = [&](const Dataset& train, std::size_t fold) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      const auto id = std::stoul(train.ids[i].substr(1));
      CHECK(folds[id] != fold);
    }
    seen.push_back(fit_norm(train.x));
    return std::vector<bool>{};
  };
  kfold_cv(ds, 5, {}, 11, capture);
  auto mutated = ds;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (folds[i] == 0) mutated.x(i, 0) += 1000.0;
  }
  std::vector<NormStats> seen_before = seen;
  seen.clear();
  kfold_cv(mutated, 5, {}, 11, capture);
  CHECK(seen[0].mean == seen_before[0].mean);
  CHECK(seen[0].sd == seen_before[0].sd);
}

TEST_CASE("genetic feature selection") {
  // Feature 0 separates the classes; the rest is noise.
  const auto ds = clouds(30, 6, 6.0, 12);
  GaConfig cfg;
  cfg.population = 16;
  cfg.generations = 6;
  cfg.seed = 3;
  const auto r = ga_select(ds, cfg);
  CHECK(r.mask[0]);
  CHECK(r.trace.size() == 7);
  for (std::size_t g = 1; g < r.trace.size(); ++g) CHECK(r.trace[g] >= r.trace[g - 1]);
  auto without = r.mask;
  without[0] = false;
  CHECK(r.fitness >= mask_fitness(ds, without, cfg));
  CHECK(r.fitness == mask_fitness(ds, r.mask, cfg));

  cfg.generations = 0;
  const auto r0 = ga_select(ds, cfg);
  CHECK(r0.trace.size() == 1);
  CHECK(r0.fitness == r0.trace[0]);

  cfg.population = 7;
  CHECK_ERRC(ga_select(ds, cfg), Errc::OutOfRange);
  CHECK(mask_fitness(ds, std::vector<bool>(6, false), GaConfig{}) == 0.0);
}

TEST_CASE("anova F test") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  const auto r = anova_f(a, b);
  CHECK(r.f == doctest::Approx(1.5));
  const auto same = anova_f(a, a);
  CHECK(same.f == 0.0);
  CHECK(same.p == doctest::Approx(1.0));
  const auto sep = anova_f(std::vector<double>{1, 1}, std::vector<double>{2, 2});
  CHECK(std::isinf(sep.f));
  CHECK(sep.p == 0.0);
  CHECK_ERRC(anova_f(std::vector<double>{1}, b), Errc::TooShort);

  std::mt19937_64 gen(13);
  std::normal_distribution<double> n01(0, 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t na = 2 + t % 17, nb = 2 + (t * 7) % 23;
    std::vector<double> ga(na), gb(nb);
    for (auto& v : ga) v = n01(gen);
    for (auto& v : gb) v = n01(gen) + 0.02 * t;
    const auto res = anova_f(ga, gb);
    const boost::math::fisher_f_distribution<double> dist(1.0, static_cast<double>(na + nb - 2));
    const double want = boost::math::cdf(boost::math::complement(dist, res.f));
    CHECK(std::abs(res.p - want) <= 1e-8 * std::max(want, 1e-300));
    const auto sym = anova_f(gb, ga);
    CHECK(sym.f == doctest::Approx(res.f).epsilon(1e-12));
    std::vector<double> sa = ga, sb = gb;
    for (auto& v : sa) v += 17.0;
    for (auto& v : sb) v += 17.0;
    CHECK(anova_f(sa, sb).f == doctest::Approx(res.f).epsilon(1e-8));
  }

  for (double x : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    for (double pa : {0.5, 1.0, 3.5, 40.0}) {
      for (double pb : {0.5, 2.0, 15.0}) {
        const double want = boost::math::ibeta(pa, pb, x);
        CHECK(std::abs(incomplete_beta(pa, pb, x) - want) <= 1e-8 * std::max(want, 1e-300));
      }
    }
  }

  // Under the null, p-values are uniform.
  std::vector<double> ps;
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> ga(10), gb(12);
    for (auto& v : ga) v = n01(gen);
    for (auto& v : gb) v = n01(gen);
    ps.push_back(anova_f(ga, gb).p);
  }
  std::sort(ps.begin(), ps.end());
  double ks = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    ks = std::max({ks, std::abs(ps[i] - static_cast<double>(i) / ps.size()),
                   std::abs(ps[i] - static_cast<double>(i + 1) / ps.size())});
  }
  CHECK(ks < 0.02);
}
