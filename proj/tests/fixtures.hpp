#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "msnet/models.hpp"
#include "msnet/window.hpp"

namespace fixtures {

using namespace msnet;

inline RealizedWindow window(long first, const std::vector<double>& epochs,
                             const std::vector<std::vector<Visit>>& visits) {
  RealizedWindow w(first);
  for (std::size_t i = 0; i < epochs.size(); ++i) w.push_back(epochs[i], visits[i]);
  return w;
}

inline RealizedWindow tandem_window(long first, const std::vector<double>& epochs, const std::vector<double>& s1,
                                    const std::vector<double>& s2) {
  RealizedWindow w(first);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const Visit v[2] = {{0, s1[i]}, {1, s2[i]}};
    w.push_back(epochs[i], v);
  }
  return w;
}

inline RealizedWindow single_window(long first, const std::vector<double>& epochs, const std::vector<double>& s) {
  RealizedWindow w(first);
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const Visit v[1] = {{0, s[i]}};
    w.push_back(epochs[i], v);
  }
  return w;
}

inline ArrivalSpec unit_arrivals() { return ArrivalSpec::deterministic(1.0); }

inline std::unique_ptr<SingleServerModel> pareto_single(double b = 0.5) {
  return std::make_unique<SingleServerModel>(HeavyTailDist::pareto_with_mean(2.5, b), unit_arrivals());
}

inline std::unique_ptr<TandemModel> pareto_tandem(double b1 = 0.5, double b2 = 0.25) {
  return std::make_unique<TandemModel>(HeavyTailDist::pareto_with_mean(2.5, b1), HeavyTailDist::pareto_with_mean(2.5, b2),
                                       unit_arrivals());
}

inline std::unique_ptr<MultiServerModel> pareto_multi(int m = 2, double b = 0.8) {
  return std::make_unique<MultiServerModel>(m, HeavyTailDist::pareto_with_mean(2.5, b), unit_arrivals());
}

inline std::unique_ptr<JacksonModel> pareto_jackson() {
  return std::make_unique<JacksonModel>(
      std::vector<HeavyTailDist>{HeavyTailDist::pareto_with_mean(2.5, 0.2), HeavyTailDist::pareto_with_mean(2.5, 0.15)},
      std::vector<std::vector<double>>{{0.0, 0.5, 0.5}, {0.3, 0.0, 0.7}}, std::vector<double>{1.0, 0.0},
      unit_arrivals());
}

/// Route 1 -> 2 -> exit with external arrivals at station 1.
inline std::unique_ptr<JacksonModel> jackson_tandem(const HeavyTailDist& s1, const HeavyTailDist& s2,
                                                    ArrivalSpec arrivals = unit_arrivals()) {
  return std::make_unique<JacksonModel>(std::vector<HeavyTailDist>{s1, s2},
                                        std::vector<std::vector<double>>{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}},
                                        std::vector<double>{1.0, 0.0}, std::move(arrivals));
}

/// Integral of tail over [x, inf) by composite Simpson on doubling pieces.
inline double integrate_tail(const std::function<double(double)>& tail, double x) {
  double total = 0.0;
  double lo = x, width = std::max(1.0, std::abs(x));
  for (int piece = 0; piece < 200; ++piece) {
    const double hi = lo + width;
    const int n = 2000;
    const double h = (hi - lo) / n;
    double s = tail(lo) + tail(hi);
    for (int k = 1; k < n; ++k) s += tail(lo + k * h) * (k % 2 ? 4.0 : 2.0);
    const double part = s * h / 3.0;
    total += part;
    if (part < 1e-15 * total) break;
    lo = hi;
    width *= 2.0;
  }
  return total;
}

}  // namespace fixtures

namespace fixtures {

/// Single server whose last activity drifts with the input's offset, so only
/// homogeneity fails.
class BrokenHomogeneity final : public msnet::NetworkKernel {
 public:
  BrokenHomogeneity() : NetworkKernel(msnet::ArrivalSpec::deterministic(1.0)) {}
  std::string name() const override { return "broken_homogeneity"; }
  int stations() const override { return 1; }
  bool has_aa() const override { return true; }
  double gamma0_reference() const override { return 0.5; }
  std::vector<double> component_means() const override { return {0.5}; }
  void sample_customer(msnet::RngStream& rng, std::vector<msnet::Visit>& out) const override {
    out.assign(1, msnet::Visit{0, msnet::HeavyTailDist::pareto_with_mean(2.5, 0.5).sample(rng)});
  }
  std::unique_ptr<msnet::NetworkKernel> with_arrivals(msnet::ArrivalSpec) const override {
    return std::make_unique<BrokenHomogeneity>();
  }

 protected:
  double evaluate(const msnet::RealizedWindow& w) const override {
    double x = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) x = std::max(x, w.epoch(i)) + w.visits(i)[0].work;
    return x + 1e-3 * w.shift();
  }
  bool visits_fit(std::span<const msnet::Visit> v) const override { return v.size() == 1; }
};

}  // namespace fixtures
