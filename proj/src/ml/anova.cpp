#include "stegcal/ml/anova.hpp"

#include <cmath>
#include <limits>

#include "stegcal/error.hpp"

namespace stegcal::ml {

namespace {

// Continued fraction for I_x(a, b), modified Lentz; converges for x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(Errc::NotConverged, "incomplete beta continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw Error(Errc::OutOfRange, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::OutOfRange, "incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_survival(double f, double df1, double df2) {
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  // P(F > f) = I_{df2/(df2 + df1 f)}(df2/2, df1/2)
  const double x = df2 / (df2 + df1 * f);
  return incomplete_beta(df2 / 2.0, df1 / 2.0, x);
}

AnovaResult anova_f(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(Errc::TooShort, "ANOVA needs at least 2 values per group");
  auto mean = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double ma = mean(a), mb = mean(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double grand = (na * ma + nb * mb) / (na + nb);
  const double ssb = na * (ma - grand) * (ma - grand) + nb * (mb - grand) * (mb - grand);
  double ssw = 0.0;
  for (double x : a) ssw += (x - ma) * (x - ma);
  for (double x : b) ssw += (x - mb) * (x - mb);
  const double df2 = na + nb - 2.0;

  if (ssw == 0.0) {
    if (ssb == 0.0) return {0.0, 1.0};
    return {std::numeric_limits<double>::infinity(), 0.0};
  }
  AnovaResult r;
  r.f = ssb / (ssw / df2);
  r.p = f_survival(r.f, 1.0, df2);
  return r;
}

}  // namespace stegcal::ml
