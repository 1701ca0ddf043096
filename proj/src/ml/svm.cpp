#include "stegcal/ml/svm.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "stegcal/error.hpp"

namespace stegcal::ml {

namespace {

constexpr double kTau = 1e-12;
constexpr int kModelFormatVersion = 1;
// Above this many rows the Gram matrix is computed row by row on demand.
constexpr std::size_t kMaxCachedRows = 6000;

class GramMatrix {
 public:
  GramMatrix(const Matrix& x, KernelKind kind, double gamma)
      : x_(x), kind_(kind), gamma_(gamma), cached_(x.rows() <= kMaxCachedRows) {
    const std::size_t n = x.rows();
    diag_.resize(n);
    for (std::size_t i = 0; i < n; ++i) diag_[i] = kernel_value(kind_, gamma_, x.row(i), x.row(i));
    if (cached_) {
      full_.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        full_[i * n + i] = diag_[i];
        for (std::size_t j = i + 1; j < n; ++j) {
          const double v = kernel_value(kind_, gamma_, x.row(i), x.row(j));
          full_[i * n + j] = v;
          full_[j * n + i] = v;
        }
      }
    }
  }

  std::span<const double> row(std::size_t i) {
    const std::size_t n = x_.rows();
    if (cached_) return {full_.data() + i * n, n};
    scratch_.resize(n);
    for (std::size_t j = 0; j < n; ++j) scratch_[j] = kernel_value(kind_, gamma_, x_.row(i), x_.row(j));
    return scratch_;
  }

  double diag(std::size_t i) const { return diag_[i]; }

 private:
  const Matrix& x_;
  KernelKind kind_;
  double gamma_;
  bool cached_;
  std::vector<double> diag_;
  std::vector<double> full_;
  std::vector<double> scratch_;
};

std::string kernel_name(KernelKind k) { return k == KernelKind::Linear ? "linear" : "rbf"; }

KernelKind parse_kernel(const std::string& s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  throw Error(Errc::ParseError, "unknown kernel '" + s + "'");
}

}  // namespace

double kernel_value(KernelKind kind, double gamma, std::span<const double> a,
                    std::span<const double> b) {
  if (kind == KernelKind::Linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

std::size_t SvmModel::input_dims() const {
  if (!feature_mask.empty()) return feature_mask.size();
  return support_vectors.cols();
}

double SvmModel::decision(std::span<const double> x) const {
  double f = bias;
  for (std::size_t i = 0; i < support_vectors.rows(); ++i) {
    f += dual_coef[i] * sv_labels[i] * kernel_value(kernel, gamma, support_vectors.row(i), x);
  }
  return f;
}

Prediction SvmModel::predict(std::span<const double> raw) const {
  if (raw.size() != input_dims()) {
    throw Error(Errc::DimensionMismatch, "model expects " + std::to_string(input_dims()) +
                                             " features, got " + std::to_string(raw.size()));
  }
  std::vector<double> x;
  if (feature_mask.empty()) {
    x.assign(raw.begin(), raw.end());
  } else {
    for (std::size_t c = 0; c < raw.size(); ++c) {
      if (feature_mask[c]) x.push_back(raw[c]);
    }
  }
  if (norm) apply_norm_row(x, *norm);
  Prediction p;
  p.margin = decision(x);
  p.label = p.margin > 0.0 ? Label::Stego : Label::Cover;
  return p;
}

SvmModel svm_train(const Dataset& train, const SvmParams& params) {
  const std::size_t n = train.size();
  if (n == 0) throw Error(Errc::Empty, "svm_train on an empty dataset");
  if (train.count(Label::Stego) == 0 || train.count(Label::Cover) == 0) {
    throw Error(Errc::SingleClass, "training data must contain both cover and stego rows");
  }
  if (!(params.c > 0.0)) throw Error(Errc::OutOfRange, "C must be positive");

  const double gamma = params.gamma > 0.0 ? params.gamma
                                          : 1.0 / static_cast<double>(std::max<std::size_t>(1, train.dims()));
  const double cap = params.c;
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = train.y[i] == Label::Stego ? 1 : -1;

  GramMatrix gram(train.x, params.kernel, gamma);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  auto upper = [&](std::size_t t) { return alpha[t] >= cap; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  std::size_t iter = 0;
  for (;; ++iter) {
    // Working set selection, second-order (Fan, Chen & Lin style).
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i = t; }
      } else {
        if (!lower(t) && grad[t] >= gmax) { gmax = grad[t]; i = t; }
      }
    }
    if (i == n) break;

    const auto ki = gram.row(i);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0.0) {
          const double quad = gram.diag(i) + gram.diag(t) - 2.0 * ki[t];
          const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (obj <= best) { best = obj; j = t; }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0.0) {
          const double quad = gram.diag(i) + gram.diag(t) - 2.0 * ki[t];
          const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (obj <= best) { best = obj; j = t; }
        }
      }
    }
    if (gmax + gmax2 < params.tolerance || j == n) break;
    if (iter >= params.max_iterations) {
      throw Error(Errc::NotConverged, "SMO did not reach KKT tolerance within " +
                                          std::to_string(params.max_iterations) + " iterations");
    }

    const double kij = ki[j];
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = gram.diag(i) + gram.diag(j) - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > cap) { alpha[i] = cap; alpha[j] = cap - diff; }
      } else {
        if (alpha[j] > cap) { alpha[j] = cap; alpha[i] = cap + diff; }
      }
    } else {
      double quad = gram.diag(i) + gram.diag(j) - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > cap) {
        if (alpha[i] > cap) { alpha[i] = cap; alpha[j] = sum - cap; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > cap) {
        if (alpha[j] > cap) { alpha[j] = cap; alpha[i] = sum - cap; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }

    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    // G_t += Q_ti * d_i + Q_tj * d_j with Q_ts = y_t y_s K_ts. Rows are
    // re-fetched because the uncached Gram path reuses one buffer.
    const auto kj = gram.row(j);
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[j] * kj[t] * dj);
    }
    const auto ki2 = gram.row(i);
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * ki2[t] * di);
    }
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  SvmModel model;
  model.kernel = params.kernel;
  model.gamma = gamma;
  model.c = cap;
  model.bias = -rho;
  model.seed = params.seed;
  model.support_vectors = Matrix(0, train.dims());
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.append_row(train.x.row(t));
      model.dual_coef.push_back(alpha[t]);
      model.sv_labels.push_back(y[t]);
    }
  }
  return model;
}

SvmModel svm_train_normalized(const Dataset& train, const SvmParams& params,
                              const std::vector<bool>& mask) {
  Dataset work = mask.empty() ? train : train.select_columns(mask);
  auto stats = fit_norm(work.x);
  work.x = apply_norm(work.x, stats);
  auto model = svm_train(work, params);
  model.norm = std::move(stats);
  model.feature_mask = mask;
  return model;
}

std::string model_to_json(const SvmModel& model, const std::string& extra_json) {
  nlohmann::ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["kernel"] = kernel_name(model.kernel);
  j["gamma"] = model.gamma;
  j["C"] = model.c;
  j["bias"] = model.bias;
  j["seed"] = model.seed;
  j["dims"] = model.support_vectors.cols();
  std::vector<std::vector<double>> svs;
  for (std::size_t r = 0; r < model.support_vectors.rows(); ++r) {
    const auto row = model.support_vectors.row(r);
    svs.emplace_back(row.begin(), row.end());
  }
  j["support_vectors"] = svs;
  j["dual_coef"] = model.dual_coef;
  j["sv_labels"] = model.sv_labels;
  if (model.norm) {
    j["norm"] = {{"mean", model.norm->mean}, {"sd", model.norm->sd}};
  } else {
    j["norm"] = nullptr;
  }
  std::vector<int> mask(model.feature_mask.begin(), model.feature_mask.end());
  j["feature_mask"] = mask;
  j["extractor"] = nlohmann::ordered_json::parse(extra_json);
  return j.dump(1) + "\n";
}

SvmModel model_from_json(const std::string& text, std::string* extra_json) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format_version", 0) != kModelFormatVersion) {
      throw Error(Errc::ParseError, "unsupported model format version");
    }
    SvmModel m;
    m.kernel = parse_kernel(j.at("kernel").get<std::string>());
    m.gamma = j.at("gamma").get<double>();
    m.c = j.at("C").get<double>();
    m.bias = j.at("bias").get<double>();
    m.seed = j.value("seed", std::uint64_t{0});
    const auto dims = j.at("dims").get<std::size_t>();
    m.support_vectors = Matrix(0, dims);
    for (const auto& row : j.at("support_vectors")) {
      m.support_vectors.append_row(row.get<std::vector<double>>());
    }
    m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
    m.sv_labels = j.at("sv_labels").get<std::vector<int>>();
    if (m.dual_coef.size() != m.support_vectors.rows() || m.sv_labels.size() != m.dual_coef.size()) {
      throw Error(Errc::ParseError, "support vector arrays differ in length");
    }
    if (!j.at("norm").is_null()) {
      m.norm = NormStats{j["norm"].at("mean").get<std::vector<double>>(),
                         j["norm"].at("sd").get<std::vector<double>>()};
    }
    for (int b : j.at("feature_mask").get<std::vector<int>>()) m.feature_mask.push_back(b != 0);
    if (extra_json) *extra_json = j.value("extractor", nlohmann::json::object()).dump();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("model file: ") + e.what());
  }
}

}  // namespace stegcal::ml
