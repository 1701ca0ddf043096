#pragma once

#include <span>

namespace stegcal::ml {

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
};

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// Survival function of F(df1, df2) at f.
double f_survival(double f, double df1, double df2);

// One-way ANOVA with two groups (df1 = 1, df2 = n - 2). Zero within-group
// variance reports F = +inf, p = 0 (or F = 0, p = 1 when the means agree too).
AnovaResult anova_f(std::span<const double> a, std::span<const double> b);

}  // namespace stegcal::ml
