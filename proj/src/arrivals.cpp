#include "msnet/arrivals.hpp"

#include <cmath>
#include <stdexcept>

namespace msnet {

ArrivalSpec ArrivalSpec::deterministic(double spacing) {
  if (!(std::isfinite(spacing) && spacing > 0.0)) {
    throw std::invalid_argument("deterministic arrivals: spacing must be positive");
  }
  return ArrivalSpec(spacing, std::nullopt);
}

ArrivalSpec ArrivalSpec::renewal(HeavyTailDist gaps) {
  if (!(gaps.mean() > 0.0)) throw std::invalid_argument("renewal arrivals: mean gap must be positive");
  const double mean = gaps.mean();
  return ArrivalSpec(mean, std::move(gaps));
}

}  // namespace msnet
