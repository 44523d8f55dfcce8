#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "msnet/asymptotics.hpp"

using namespace msnet;

namespace {

const HeavyTailDist kPareto = HeavyTailDist::pareto(2.5, 1.0);

double fs(double x) { return std::min(1.0, std::pow(x, -1.5) / 1.5); }

// Integral over [0, inf) by composite Simpson on doubling pieces.
double integrate_half_line(const std::function<double(double)>& f) {
  double total = 0.0, lo = 0.0, width = 0.5;
  for (int piece = 0; piece < 80; ++piece) {
    const double hi = lo + width;
    const int n = 4000;
    const double h = width / n;
    double s = f(lo) + f(hi);
    for (int k = 1; k < n; ++k) s += f(lo + k * h) * (k % 2 ? 4.0 : 2.0);
    const double part = s * h / 3.0;
    total += part;
    if (piece > 4 && part < 1e-13 * total) break;
    lo = hi;
    width *= 2.0;
  }
  return total;
}

}  // namespace

TEST_CASE("single-server formula") {
  CHECK(veraverbeke(1.0, 1.0, 0.5, kPareto, 4.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  for (double x : {0.0, 1.0, 10.0}) CHECK(veraverbeke(0.0, 1.0, 0.5, kPareto, x) == 0.0);
  CHECK(veraverbeke(1.0, 1.0, 0.5, kPareto, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(veraverbeke(1.0, 1.0, 1.0, kPareto, 1.0), std::invalid_argument);
}

TEST_CASE("network bound constants") {
  CHECK(network_upper_const(1.0, 1.0, 0.5) == doctest::Approx(1.0 / (1.0 - 0.5)));
  CHECK(network_upper_const(2.0, 1.0, 0.5) == doctest::Approx(4.0));
  CHECK(network_upper_const(1.0, 1.0, 1.0 - 1e-9) > 1e8);
  CHECK(network_lower_const({1.0, 1.0}, 1.0, {0.5, 0.25}) == doctest::Approx(10.0 / 3.0));
  CHECK(network_lower_const({1.0}, 1.0, {0.5}) == doctest::Approx(network_upper_const(1.0, 1.0, 0.5)));
  CHECK(network_lower_const({1.0, 0.0}, 1.0, {0.5, 0.25}) == doctest::Approx(2.0));
}

TEST_CASE("tandem dater constant") {
  CHECK(tandem_exact_const(1.0, 1.0, 1.0, 0.5, 0.25) == doctest::Approx(10.0 / 3.0));
  CHECK(tandem_exact_const(1.0, 1.0, 1.0, 0.5, 0.25) ==
        doctest::Approx(network_lower_const({1.0, 1.0}, 1.0, {0.5, 0.25})));
  CHECK(tandem_exact_const(0.7, 1.3, 1.0, 0.25, 0.5) == doctest::Approx(2.0 / 0.5));
  CHECK(tandem_exact_const(0.0, 0.0, 1.0, 0.25, 0.5) == 0.0);
  CHECK(tandem_exact(1.0, 1.0, 1.0, 0.5, 0.25, kPareto, 4.0) == doctest::Approx(10.0 / 3.0 / 12.0));
}

TEST_CASE("station-2 waiting time regimes") {
  TandemW2Params p;
  p.d1 = 0.0;
  p.d2 = 1.0;
  p.b1 = 0.5;
  p.b2 = 0.25;
  const auto hi = tandem_w2(p, kPareto, 4.0);
  CHECK(hi.regime == "b1>b2");
  CHECK(hi.certified);
  CHECK(hi.value == doctest::Approx(fs(4.0) / 0.75));

  p.d1 = 1.0;
  p.d2 = 0.0;
  p.b1 = 0.25;
  p.b2 = 0.5;
  for (double x : {1.0, 4.0, 20.0}) {
    const auto lo = tandem_w2(p, kPareto, x);
    CHECK(lo.regime == "b1<b2");
    CHECK(lo.certified);
    CHECK(lo.value == doctest::Approx(fs(3.0 * x) / 0.5).epsilon(1e-12));
  }
  p.d1 = 0.0;
  CHECK_FALSE(tandem_w2(p, kPareto, 4.0).certified);
}

TEST_CASE("equal-means integral against an independent quadrature") {
  const double a = 1.0, b = 0.5, v = 0.8;
  for (double x : {1.0, 5.0, 25.0}) {
    const double oracle = integrate_half_line([&](double y) {
      if (y == 0.0) return 0.0;
      return kPareto.tail(x + y * (a - b)) * 0.5 * std::erfc(x / (v * std::sqrt(y)) / std::sqrt(2.0));
    });
    const auto q = w2_equal_means_integral(kPareto, x, a, b, v);
    CAPTURE(x);
    CHECK(q.value == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(q.error <= 1e-6 * q.value);
  }
  // The integral is o(Fs(x)) for Pareto laws.
  const double r5 = w2_equal_means_integral(kPareto, 5.0, a, b, v).value / fs(5.0);
  const double r500 = w2_equal_means_integral(kPareto, 500.0, a, b, v).value / fs(500.0);
  CHECK(r500 < r5);

  TandemW2Params p;
  p.d1 = 1.0;
  p.d2 = 1.0;
  p.b1 = p.b2 = 0.5;
  p.var1 = 0.4;
  p.var2 = 0.24;
  const auto eq = tandem_w2(p, kPareto, 5.0);
  CHECK(eq.regime == "b1=b2");
  CHECK(eq.certified);
  CHECK(eq.value == doctest::Approx(2.0 * eq.integral + fs(5.0) / 0.5).epsilon(1e-12));
  CHECK(eq.integral == doctest::Approx(w2_equal_means_integral(kPareto, 5.0, 1.0, 0.5, 0.8).value).epsilon(1e-12));
  p.d2 = 0.0;
  CHECK_FALSE(tandem_w2(p, kPareto, 5.0).certified);
  p.independent = false;
  CHECK_THROWS_AS(tandem_w2(p, kPareto, 5.0), std::invalid_argument);
}

TEST_CASE("multiserver formula") {
  for (double x : {1.0, 4.0, 30.0}) {
    CHECK(multiserver_exact(1.0, 0.8, 2, kPareto, x) == doctest::Approx(fs(x)));
    CHECK(multiserver_exact(1.0, 1.6, 2, kPareto, x) == doctest::Approx(fs(x) + 1.5 * fs(8.0 * x / 3.0)));
    CHECK(multiserver_exact(1.0, 0.5, 1, kPareto, x) == doctest::Approx(veraverbeke(1.0, 1.0, 0.5, kPareto, x)));
  }
  CHECK_THROWS_AS(multiserver_exact(1.0, 2.0, 2, kPareto, 1.0), std::invalid_argument);
}

TEST_CASE("compound component weights") {
  CHECK(compound_tail_weight(0.7, 1.0) == doctest::Approx(0.7));
  CHECK(compound_tail_weight(1.0, 2.0) == doctest::Approx(2.0));
  CHECK(compound_tail_weight(0.0, 2.0) == 0.0);
  CHECK(integrated_tail_of_Y(1.0, 2.0, kPareto, 4.0) == doctest::Approx(2.0 / 12.0));
  CHECK_THROWS_AS(compound_tail_weight(1.0, std::nullopt), std::invalid_argument);
}
