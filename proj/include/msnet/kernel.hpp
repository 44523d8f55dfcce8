#pragma once

#include <memory>
#include <string>
#include <vector>

#include "msnet/arrivals.hpp"
#include "msnet/rng.hpp"
#include "msnet/window.hpp"

namespace msnet {

/// A monotone-separable network: maps a realized window to the time of the
/// last activity X_[m,n] and the maximal dater Z_[m,n] = X_[m,n] - T_n.
///
/// Implementations evaluate on base epochs; the window's symbolic offset is
/// added afterwards, which makes translation of the input exact.
class NetworkKernel {
 public:
  explicit NetworkKernel(ArrivalSpec arrivals) : arrivals_(std::move(arrivals)) {}
  virtual ~NetworkKernel() = default;

  virtual std::string name() const = 0;

  /// Number of components r of the (AA) decomposition, or of stations.
  virtual int stations() const = 0;
  /// Whether Z_i = Y_i^(1) + ... + Y_i^(r) with the saturated max lower bound.
  virtual bool has_aa() const = 0;
  /// Known value of gamma(0) for this model.
  virtual double gamma0_reference() const = 0;
  /// b^(j) = E Y^(j) for each component.
  virtual std::vector<double> component_means() const = 0;

  /// Draws the driving variables of one customer.
  virtual void sample_customer(RngStream& service, std::vector<Visit>& out) const = 0;

  /// Same network fed by a different arrival process.
  virtual std::unique_ptr<NetworkKernel> with_arrivals(ArrivalSpec arrivals) const = 0;

  const ArrivalSpec& arrivals() const { return arrivals_; }

  /// X_[m,n]. Throws std::invalid_argument on a malformed window.
  double last_activity(const RealizedWindow& w) const;
  /// Z_[m,n] = X_[m,n] - T_n. Throws std::invalid_argument on a malformed window.
  double maximal_dater(const RealizedWindow& w) const;
  /// Z_[m,n] for windows the caller built from sample_customer.
  double maximal_dater_unchecked(const RealizedWindow& w) const { return evaluate(w) - w.epochs().back(); }

  /// Y^(j) of the customer at position i.
  double component(const RealizedWindow& w, std::size_t i, int j) const { return w.station_work(i, j); }

  /// Checks epoch order and that every customer's visits fit this model.
  void check_window(const RealizedWindow& w) const;

 protected:
  /// Last activity on base epochs (offset excluded).
  virtual double evaluate(const RealizedWindow& w) const = 0;
  /// Model-specific shape check for one customer's visits.
  virtual bool visits_fit(std::span<const Visit> visits) const = 0;

 private:
  ArrivalSpec arrivals_;
};

}  // namespace msnet
