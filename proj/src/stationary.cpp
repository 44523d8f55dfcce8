#include "msnet/stationary.hpp"

#include <stdexcept>

#include "msnet/models.hpp"

namespace msnet {

CustomerPool::CustomerPool(const NetworkKernel& kernel, std::uint64_t seed, std::uint64_t replication)
    : kernel_(&kernel),
      service_(RngStream::for_replication(seed, replication, Lane::service)),
      arrival_(RngStream::for_replication(seed, replication, Lane::arrival)),
      offsets_{0} {}

void CustomerPool::ensure(std::size_t n) {
  const auto& arrivals = kernel_->arrivals();
  while (epochs_.size() < n + 1) {
    const std::size_t k = epochs_.size();
    if (k == 0) {
      epochs_.push_back(0.0);
    } else if (arrivals.is_deterministic()) {
      epochs_.push_back(-static_cast<double>(k) * arrivals.mean_spacing());
    } else {
      epochs_.push_back(epochs_.back() - arrivals.next_gap(arrival_));
    }
    kernel_->sample_customer(service_, scratch_);
    visits_.insert(visits_.end(), scratch_.begin(), scratch_.end());
    offsets_.push_back(visits_.size());
  }
}

void CustomerPool::fill(std::size_t n, RealizedWindow& w) {
  ensure(n);
  w.clear(-static_cast<long>(n));
  for (std::size_t k = n + 1; k-- > 0;) {
    w.push_back(epochs_[k], {visits_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]});
  }
}

void CustomerPool::fill_saturated(std::size_t n, RealizedWindow& w) {
  if (n == 0) throw std::invalid_argument("fill_saturated: need at least one customer");
  ensure(n);
  w.clear(-static_cast<long>(n));
  for (std::size_t k = n; k >= 1; --k) {
    w.push_back(0.0, {visits_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]});
  }
}

void HorizonPolicy::validate() const {
  if (n0 < 1) throw std::invalid_argument("horizon policy: n0 must be >= 1");
  if (n_max < 4 * n0) throw std::invalid_argument("horizon policy: n_max must be >= 4 * n0");
}

double evaluate_quantity(const NetworkKernel& kernel, const RealizedWindow& w, Quantity q) {
  switch (q) {
    case Quantity::dater:
      return kernel.maximal_dater_unchecked(w);
    case Quantity::station2_wait:
      return tandem_path(w).wait2.back();
  }
  return 0.0;
}

StationarySample stationary_sample(const NetworkKernel& kernel, const HorizonPolicy& policy, std::uint64_t seed,
                                   std::uint64_t replication, Quantity q, std::vector<double>* trace,
                                   RealizedWindow* final_window) {
  thread_local RealizedWindow window;
  CustomerPool pool(kernel, seed, replication);
  std::size_t n = policy.n0;
  pool.fill(n, window);
  double value = evaluate_quantity(kernel, window, q);
  if (trace) trace->assign(1, value);
  std::size_t settled = n;
  int unchanged = 0;
  bool censored = false;
  while (unchanged < 2) {
    if (2 * n > policy.n_max) {
      censored = true;
      break;
    }
    n *= 2;
    pool.fill(n, window);
    const double next = evaluate_quantity(kernel, window, q);
    if (trace) trace->push_back(next);
    if (next == value) {
      ++unchanged;
    } else {
      unchanged = 0;
      settled = n;
    }
    value = next;
  }
  if (final_window) *final_window = window;
  return {value, censored ? n : settled, n, censored};
}

StationaryRun run_stationary(const NetworkKernel& kernel, const HorizonPolicy& policy, std::size_t count,
                             std::uint64_t seed, const ParallelOptions& par, Quantity q) {
  policy.validate();
  StationaryRun run;
  run.values.resize(count);
  run.horizons.resize(count);
  run.censored.resize(count);
  for_each_index(count, par, [&](std::size_t i) {
    const auto s = stationary_sample(kernel, policy, seed, i, q);
    run.values[i] = s.value;
    run.horizons[i] = static_cast<std::uint32_t>(s.horizon);
    run.censored[i] = s.censored ? 1 : 0;
  });
  for (auto c : run.censored) run.censored_count += c;
  return run;
}

}  // namespace msnet
