#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msnet/distributions.hpp"

namespace msnet {

/// (d / (a - b)) Fs(x). Throws when a <= b or d < 0.
double veraverbeke(double d, double a, double b, const HeavyTailDist& F, double x);

/// d / (a - gamma0).
double network_upper_const(double d, double a, double gamma0);

/// sum_j d_j / (a - b_j).
double network_lower_const(const std::vector<double>& d, double a, const std::vector<double>& b);

/// (d1 / (a - max(b1, b2)) + d2 / (a - b2)) Fs(x).
double tandem_exact(double d1, double d2, double a, double b1, double b2, const HeavyTailDist& F, double x);
double tandem_exact_const(double d1, double d2, double a, double b1, double b2);

struct TandemW2Params {
  double d1 = 0.0;
  double d2 = 0.0;
  double a = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  /// Var sigma^(1), Var sigma^(2); needed when b1 == b2.
  double var1 = 0.0;
  double var2 = 0.0;
  /// The equal-means formula is only defined for independent services.
  bool independent = true;
};

struct W2Asymptote {
  double value;
  bool certified;
  std::string regime;  // "b1>b2", "b1=b2", "b1<b2"
  double integral = 0.0;        // equal-means integral term (before the 2 d1 factor)
  double integral_error = 0.0;
};

/// Tail asymptote of the stationary waiting time at station 2.
W2Asymptote tandem_w2(const TandemW2Params& p, const HeavyTailDist& F, double x);

struct QuadratureEstimate {
  double value;
  double error;
};

/// int_0^inf Fbar(x + y(a - b)) Phibar(x / (v sqrt y)) dy, relative accuracy rel_tol.
QuadratureEstimate w2_equal_means_integral(const HeavyTailDist& F, double x, double a, double b, double v,
                                           double rel_tol = 1e-8);

/// (1/a) Fs(x) + (1/(m a - b) - 1/a)^+ Fs(b x / (b - (m - 1) a)).
double multiserver_exact(double a, double b, int m, const HeavyTailDist& F, double x);

/// d = l * E nu for a compound sum of nu services with tails ~ l Fbar.
double compound_tail_weight(double l, std::optional<double> mean_visits);
/// d Fs(x) for the compound component.
double integrated_tail_of_Y(double l, std::optional<double> mean_visits, const HeavyTailDist& F, double x);

}  // namespace msnet
