#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "msnet/rng.hpp"

namespace msnet {

struct Pareto {
  double alpha;  // tail index, > 1
  double xm;     // scale, > 0
  double shift = 0.0;  // location; the support starts at xm + shift >= 0
};
struct Weibull {
  double shape;  // in (0, 1)
  double scale;
};
struct Lognormal {
  double mu;
  double sigma;  // spread, > 0
};
struct Exponential {
  double rate;
};
struct Deterministic {
  double value;
};

enum class Family { pareto, weibull, lognormal, exponential, deterministic };

std::string_view family_name(Family f);

/// Service or interarrival law. Immutable once built; parameters are checked
/// by the constructor, so every live object has a finite mean.
class HeavyTailDist {
 public:
  using Params = std::variant<Pareto, Weibull, Lognormal, Exponential, Deterministic>;

  explicit HeavyTailDist(Params params);

  static HeavyTailDist pareto(double alpha, double xm, double shift = 0.0) {
    return HeavyTailDist(Pareto{alpha, xm, shift});
  }
  static HeavyTailDist pareto_with_mean(double alpha, double mean);
  static HeavyTailDist weibull(double shape, double scale) { return HeavyTailDist(Weibull{shape, scale}); }
  static HeavyTailDist lognormal(double mu, double sigma) { return HeavyTailDist(Lognormal{mu, sigma}); }
  static HeavyTailDist exponential(double rate) { return HeavyTailDist(Exponential{rate}); }
  static HeavyTailDist deterministic(double value) { return HeavyTailDist(Deterministic{value}); }

  Family family() const;
  const Params& params() const { return params_; }

  /// Inverse cdf. Nondecreasing in u, so a fixed uniform gives a coupled draw.
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform()); }

  /// P(xi > x).
  double tail(double x) const;
  /// min(1, integral of tail over [x, inf)); closed form where available.
  double integrated_tail(double x) const;
  /// Integral of the tail over [x, inf) without the cap at 1.
  double tail_integral(double x) const;

  double mean() const { return mean_; }
  /// +inf when the second moment diverges.
  double variance() const;
  /// Left end of the support.
  double lower_bound() const;

  bool is_light_tailed() const;

  std::string describe() const;

  friend bool operator==(const HeavyTailDist& a, const HeavyTailDist& b);

 private:
  Params params_;
  double mean_;
};

enum class Flag { no, yes, not_applicable };

std::string_view flag_name(Flag f);

struct SubexponentialClass {
  Flag f_subexponential;
  Flag fs_subexponential;
  Flag cond_56;  // liminf Fs(x^2) / Fs(x) > 0
  Flag cond_58;  // liminf Fs(2x) / Fs(x) > 0
};

/// Analytic per-family table; nothing here is estimated from samples.
SubexponentialClass is_subexponential_family(const HeavyTailDist& dist);

/// lim tail(x) / reference.tail(x) as x -> inf when it exists and is finite.
/// Empty when the limit is infinite or the pair is not comparable analytically.
std::optional<double> tail_equivalence_constant(const HeavyTailDist& dist, const HeavyTailDist& reference);

/// Standard normal survival function.
double normal_tail(double x);

}  // namespace msnet
