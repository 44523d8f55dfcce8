#pragma once

#include <optional>

#include "msnet/distributions.hpp"

namespace msnet {

/// Arrival process: constant spacing or i.i.d. renewal gaps.
class ArrivalSpec {
 public:
  static ArrivalSpec deterministic(double spacing);
  static ArrivalSpec renewal(HeavyTailDist gaps);

  bool is_deterministic() const { return !gaps_.has_value(); }
  const std::optional<HeavyTailDist>& gaps() const { return gaps_; }

  /// a = E tau.
  double mean_spacing() const { return spacing_; }
  double rate() const { return 1.0 / spacing_; }

  double next_gap(RngStream& rng) const { return gaps_ ? gaps_->sample(rng) : spacing_; }

 private:
  ArrivalSpec(double spacing, std::optional<HeavyTailDist> gaps) : spacing_(spacing), gaps_(std::move(gaps)) {}

  double spacing_;
  std::optional<HeavyTailDist> gaps_;
};

}  // namespace msnet
