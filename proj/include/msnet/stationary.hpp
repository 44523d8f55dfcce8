#pragma once

#include <cstdint>
#include <vector>

#include "msnet/kernel.hpp"
#include "msnet/parallel.hpp"

namespace msnet {

/// Customers 0, -1, -2, ... of one replication, generated backwards from
/// T_0 = 0. Extending the pool never changes customers already drawn, so the
/// windows [-n, 0] for growing n are nested with identical driving variables.
class CustomerPool {
 public:
  CustomerPool(const NetworkKernel& kernel, std::uint64_t seed, std::uint64_t replication);

  /// Makes customers 0..-n available.
  void ensure(std::size_t n);
  std::size_t depth() const { return epochs_.size() == 0 ? 0 : epochs_.size() - 1; }

  /// Window [-n, 0].
  void fill(std::size_t n, RealizedWindow& w);
  /// Window [-n, -1] with every epoch at 0 (the saturated input).
  void fill_saturated(std::size_t n, RealizedWindow& w);

  /// T_{-k}.
  double epoch(std::size_t k) const { return epochs_[k]; }

 private:
  const NetworkKernel* kernel_;
  RngStream service_;
  RngStream arrival_;
  std::vector<double> epochs_;        // epochs_[k] = T_{-k}
  std::vector<std::size_t> offsets_;  // CSR over customers 0, -1, ...
  std::vector<Visit> visits_;
  std::vector<Visit> scratch_;
};

/// What a stationary replication reports from its window.
enum class Quantity {
  dater,          // Z_[-n,0]
  station2_wait,  // W^(2) of customer 0 in a tandem
};

struct HorizonPolicy {
  std::size_t n0 = 128;
  std::size_t n_max = std::size_t{1} << 20;

  void validate() const;
};

struct StationarySample {
  double value;
  std::size_t horizon;    // least evaluated n whose window already gave the value; n of the last window if censored
  std::size_t evaluated;  // n of the last window [-n, 0]
  bool censored;
};

double evaluate_quantity(const NetworkKernel& kernel, const RealizedWindow& w, Quantity q);

/// Z = lim Z_[-n,0] by doubling n from n0 until two consecutive doublings
/// leave the value unchanged. `trace` receives every evaluated value and
/// `final_window` the last window, when given.
StationarySample stationary_sample(const NetworkKernel& kernel, const HorizonPolicy& policy, std::uint64_t seed,
                                   std::uint64_t replication, Quantity q = Quantity::dater,
                                   std::vector<double>* trace = nullptr, RealizedWindow* final_window = nullptr);

struct StationaryRun {
  std::vector<double> values;
  std::vector<std::uint32_t> horizons;
  std::vector<std::uint8_t> censored;
  std::size_t censored_count = 0;
};

/// Replications 0..count-1 of stationary_sample, in index order.
StationaryRun run_stationary(const NetworkKernel& kernel, const HorizonPolicy& policy, std::size_t count,
                             std::uint64_t seed, const ParallelOptions& par, Quantity q = Quantity::dater);

}  // namespace msnet
