#include "msnet/asymptotics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace msnet {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool same_mean(double b1, double b2) { return std::abs(b1 - b2) <= 1e-12 * std::max({1.0, std::abs(b1), std::abs(b2)}); }

}  // namespace

double veraverbeke(double d, double a, double b, const HeavyTailDist& F, double x) {
  require(a > b, "veraverbeke: need a > b");
  require(d >= 0.0, "veraverbeke: need d >= 0");
  if (d == 0.0) return 0.0;
  return d / (a - b) * F.integrated_tail(x);
}

double network_upper_const(double d, double a, double gamma0) {
  require(a > gamma0, "network_upper_const: need a > gamma(0)");
  require(d >= 0.0, "network_upper_const: need d >= 0");
  return d / (a - gamma0);
}

double network_lower_const(const std::vector<double>& d, double a, const std::vector<double>& b) {
  require(d.size() == b.size() && !d.empty(), "network_lower_const: need one weight per component");
  double sum = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    require(a > b[j], "network_lower_const: need a > b_j for every component");
    require(d[j] >= 0.0, "network_lower_const: need d_j >= 0");
    sum += d[j] / (a - b[j]);
  }
  return sum;
}

double tandem_exact_const(double d1, double d2, double a, double b1, double b2) {
  const double b = std::max(b1, b2);
  require(a > b, "tandem_exact: need a > max(b1, b2)");
  require(d1 >= 0.0 && d2 >= 0.0, "tandem_exact: need nonnegative weights");
  return d1 / (a - b) + d2 / (a - b2);
}

double tandem_exact(double d1, double d2, double a, double b1, double b2, const HeavyTailDist& F, double x) {
  const double c = tandem_exact_const(d1, d2, a, b1, b2);
  return c == 0.0 ? 0.0 : c * F.integrated_tail(x);
}

QuadratureEstimate w2_equal_means_integral(const HeavyTailDist& F, double x, double a, double b, double v,
                                           double rel_tol) {
  require(a > b, "w2 integral: need a > b");
  require(v > 0.0 && std::isfinite(v), "w2 integral: need finite positive v");
  if (x == std::numeric_limits<double>::infinity()) return {0.0, 0.0};
  const double drift = a - b;
  // y = scale * t puts the normal factor's transition near t = 1.
  const double scale = x > 0.0 ? (x / v) * (x / v) : 1.0;
  auto integrand = [&](double t) {
    const double y = scale * t;
    const double normal = x > 0.0 ? (t > 0.0 ? normal_tail(x / (v * std::sqrt(y))) : 0.0) : 0.5;
    return F.tail(x + y * drift) * normal;
  };
  const double floor = 1e-14 * F.tail(x);
  double t_hi = 1.0;
  while (t_hi < 1e4 && F.tail(x + scale * t_hi * drift) >= floor) t_hi *= 2.0;
  t_hi = std::min(t_hi, 1e4);

  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  double error = 0.0;
  double lo = 0.0;
  for (double hi = std::min(1.0, t_hi); lo < t_hi; lo = hi, hi = std::min(2.0 * hi, t_hi)) {
    double err = 0.0;
    const double piece = GK::integrate(integrand, lo, hi, 20, rel_tol, &err);
    total += piece;
    error += err;
  }
  return {scale * total, scale * error};
}

W2Asymptote tandem_w2(const TandemW2Params& p, const HeavyTailDist& F, double x) {
  require(p.a > std::max(p.b1, p.b2), "tandem_w2: need a > max(b1, b2)");
  require(p.d1 >= 0.0 && p.d2 >= 0.0, "tandem_w2: need nonnegative weights");
  const auto cls = is_subexponential_family(F);
  W2Asymptote out{0.0, false, "", 0.0, 0.0};
  if (same_mean(p.b1, p.b2)) {
    require(p.independent, "tandem_w2: the equal-means formula needs independent services");
    require(std::isfinite(p.var1) && std::isfinite(p.var2), "tandem_w2: the equal-means formula needs finite variances");
    const double b = std::max(p.b1, p.b2);
    const double v = std::sqrt(p.var1 + p.var2);
    out.regime = "b1=b2";
    double integral_term = 0.0;
    if (p.d1 > 0.0) {
      const auto q = w2_equal_means_integral(F, x, p.a, b, v, 1e-8);
      out.integral = q.value;
      out.integral_error = q.error;
      integral_term = 2.0 * p.d1 * q.value;
    }
    out.value = integral_term + (p.d2 > 0.0 ? p.d2 / (p.a - b) * F.integrated_tail(x) : 0.0);
    out.certified = p.d2 > 0.0 || (p.d1 > 0.0 && cls.cond_56 == Flag::yes);
  } else if (p.b1 > p.b2) {
    out.regime = "b1>b2";
    out.value = p.d2 > 0.0 ? p.d2 / (p.a - p.b2) * F.integrated_tail(x) : 0.0;
    out.certified = p.d2 > 0.0;
  } else {
    out.regime = "b1<b2";
    double value = p.d2 > 0.0 ? p.d2 / (p.a - p.b2) * F.integrated_tail(x) : 0.0;
    if (p.d1 > 0.0) value += p.d1 / (p.a - p.b2) * F.integrated_tail(x * (p.a - p.b1) / (p.b2 - p.b1));
    out.value = value;
    out.certified = p.d2 > 0.0 || (p.d1 > 0.0 && cls.cond_58 == Flag::yes);
  }
  return out;
}

double multiserver_exact(double a, double b, int m, const HeavyTailDist& F, double x) {
  require(m >= 1, "multiserver_exact: need m >= 1");
  require(a > 0.0 && b > 0.0, "multiserver_exact: need a > 0 and b > 0");
  require(b < m * a, "multiserver_exact: need b < m a");
  double value = F.integrated_tail(x) / a;
  const double c2 = 1.0 / (m * a - b) - 1.0 / a;
  if (c2 > 0.0 && b > (m - 1) * a) value += c2 * F.integrated_tail(b * x / (b - (m - 1) * a));
  return value;
}

double compound_tail_weight(double l, std::optional<double> mean_visits) {
  if (!mean_visits) throw std::invalid_argument("compound tail weight: E nu unknown");
  require(l >= 0.0 && *mean_visits >= 0.0, "compound tail weight: need l >= 0 and E nu >= 0");
  return l * *mean_visits;
}

double integrated_tail_of_Y(double l, std::optional<double> mean_visits, const HeavyTailDist& F, double x) {
  const double d = compound_tail_weight(l, mean_visits);
  return d == 0.0 ? 0.0 : d * F.integrated_tail(x);
}

}  // namespace msnet
