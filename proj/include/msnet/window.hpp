#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace msnet {

/// One service requirement of a customer at a station.
struct Visit {
  int station;
  double work;
};

/// Finite sample [m, n] of the input: arrival epochs plus per-customer driving
/// variables.
///
/// Driving variables are stored as a compressed list of visits per customer.
/// Single-station models carry one visit, the tandem carries two, and a
/// Jackson customer carries the route it would follow through an empty network.
///
/// Epochs are held relative to a symbolic offset `shift()`, so translating the
/// whole input by c changes one number and leaves the base epochs untouched.
class RealizedWindow {
 public:
  RealizedWindow() = default;

  /// Window whose first customer has index `first`.
  explicit RealizedWindow(long first) : first_(first) {}

  void clear(long first);
  void reserve(std::size_t customers, std::size_t visits);

  /// Appends the next customer (index last() + 1) arriving at base epoch `epoch`.
  void push_back(double epoch, std::span<const Visit> visits);

  std::size_t size() const { return epochs_.size(); }
  bool empty() const { return epochs_.empty(); }
  long first() const { return first_; }
  long last() const { return first_ + static_cast<long>(epochs_.size()) - 1; }

  /// Base epoch of the customer at position i (0-based); T = shift() + epoch(i).
  double epoch(std::size_t i) const { return epochs_[i]; }
  std::span<const double> epochs() const { return epochs_; }
  std::span<double> mutable_epochs() { return epochs_; }
  double shift() const { return shift_; }

  /// Interarrival gap tau between positions i and i + 1.
  double gap(std::size_t i) const { return epochs_[i + 1] - epochs_[i]; }

  std::span<const Visit> visits(std::size_t i) const {
    return {visits_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const Visit> all_visits() const { return visits_; }

  /// Sum of the customer's work at `station` (the Y^(j) component).
  double station_work(std::size_t i, int station) const;

  /// Same driving variables, input translated by c.
  RealizedWindow shifted(double c) const;
  /// Positions [lo, hi] as a standalone window with the same offset.
  RealizedWindow subwindow(std::size_t lo, std::size_t hi) const;
  /// Same customers with every base epoch set to zero (the saturated input).
  RealizedWindow saturated() const;

  /// Throws std::invalid_argument when epochs decrease or the window is empty.
  void validate() const;

 private:
  long first_ = 0;
  double shift_ = 0.0;
  std::vector<double> epochs_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Visit> visits_;
};

}  // namespace msnet
