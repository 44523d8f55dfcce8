#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msnet/kernel.hpp"
#include "msnet/parallel.hpp"
#include "msnet/stationary.hpp"

namespace msnet {

using nlohmann::json;

struct TailLevel {
  double x;
  std::size_t exceedances;
  double p_hat;
  double half_width;  // 95% normal approximation
  double ci_lo;
  double ci_hi;
  std::optional<double> formula;
  std::optional<double> ratio;  // p_hat / formula
};

struct TailEstimate {
  std::vector<TailLevel> levels;
  std::size_t replications = 0;
  std::size_t censored = 0;
  double censor_fraction = 0.0;
  bool tainted = false;  // censor_fraction > 1e-3
};

using TailFormula = std::function<double(double)>;

/// Survival estimates of `values` on an increasing grid.
TailEstimate summarize_tail(const std::vector<double>& values, std::size_t censored, const std::vector<double>& grid,
                            const TailFormula& formula = nullptr);

TailEstimate estimate_tail(const NetworkKernel& kernel, const std::vector<double>& grid, std::size_t replications,
                           const HorizonPolicy& policy, std::uint64_t seed, const ParallelOptions& par,
                           const TailFormula& formula = nullptr, Quantity q = Quantity::dater);

struct HillEstimate {
  double index;
  double std_error;  // bootstrap, 200 resamples
  std::size_t k;
};

/// Hill estimator over the k largest order statistics. Throws on k < 10,
/// k >= n / 2, or degenerate samples.
HillEstimate hill_tail_index(const std::vector<double>& samples, std::size_t k, std::uint64_t seed = 1);

/// Dekkers-Einmahl-de Haan moment estimator of the extreme-value index over
/// the k largest samples: 1 / alpha for regularly varying tails, 0 for
/// exponential-type tails.
double moment_extreme_index(const std::vector<double>& samples, std::size_t k);

struct MomentReport {
  double service_index;
  double target;  // service_index - 1
  HillEstimate hill;
  std::vector<HillEstimate> by_k;  // k/4, k/2, k
  double gap;                      // hill - target
  double extreme_value_index;      // moment estimator over the k largest
  bool heavy_tailed;               // extreme_value_index more than 3 standard errors above 0
  std::size_t samples;
  std::size_t censored;

  json to_json() const;
};

MomentReport moment_order_check(const NetworkKernel& kernel, double service_index, std::size_t samples, std::size_t k,
                                const HorizonPolicy& policy, std::uint64_t seed, const ParallelOptions& par);
/// Same check on samples already drawn.
MomentReport moment_order_from_samples(const std::vector<double>& values, std::size_t censored, double service_index,
                                       std::size_t k, std::uint64_t seed);

struct BigJumpReport {
  double x;
  std::vector<double> thetas;
  std::size_t replications_used = 0;
  std::size_t conditioned = 0;
  bool starved = false;  // budget ran out before reaching the target
  /// histogram[t][c]: conditioned paths with exactly c jumps above thetas[t] * x (last bin is "c or more").
  std::vector<std::vector<std::size_t>> histogram;
  std::vector<double> frac_zero;
  std::vector<double> frac_one;
  std::vector<double> frac_two_plus;

  json to_json() const;
};

/// Conditions on Z > x and counts components Y_i^(j) > theta x inside the
/// relevant window [-n*, 0], n* the least n with Z_[-n,0] = Z.
BigJumpReport big_jump_diagnostic(const NetworkKernel& kernel, double x, const std::vector<double>& thetas,
                                  std::size_t target, std::size_t budget, const HorizonPolicy& policy,
                                  std::uint64_t seed, const ParallelOptions& par);

/// Diagnostic over replications already known to exceed x.
BigJumpReport big_jump_from_run(const NetworkKernel& kernel, double x, const std::vector<double>& thetas,
                                const StationaryRun& run, const HorizonPolicy& policy, std::uint64_t seed,
                                const ParallelOptions& par);

using ComponentSampler = std::function<void(RngStream&, std::vector<double>&)>;

struct RatioCI {
  double value;
  double lo;
  double hi;
};

struct HLevel {
  double x;
  double p_sum;
  double p_max;
  double p_marginals;  // sum_j P(Y^(j) > x)
  std::size_t max_exceedances;
  RatioCI sum_over_marginals;
  RatioCI max_over_marginals;
  RatioCI sum_over_max;
};

struct HReport {
  std::vector<HLevel> levels;
  std::size_t samples = 0;
  std::size_t deepest = 0;  // index of the deepest resolvable level
  bool grid_shrunk = false;
  bool consistent = false;

  json to_json() const;
};

/// Empirical check of P(sum Y > x) ~ P(max Y > x) ~ sum_j P(Y^(j) > x).
/// A level is resolvable with at least `min_exceedances` samples of max Y > x.
HReport check_assumption_H(const ComponentSampler& sampler, const std::vector<double>& grid, std::size_t samples,
                           std::uint64_t seed, const ParallelOptions& par, std::size_t min_exceedances = 100);

struct InsensitivityLevel {
  double x;
  double p_deterministic;
  double p_renewal;
  std::size_t exceed_deterministic;
  std::size_t exceed_renewal;
  RatioCI ratio;  // p_deterministic / p_renewal
};

struct InsensitivityReport {
  double a_deterministic;
  double a_renewal;
  bool parameter_mismatch;
  std::vector<InsensitivityLevel> levels;
  std::optional<std::size_t> deepest;  // deepest level with both sides resolved
  bool deepest_contains_one = false;

  json to_json() const;
};

/// Tails of the same network under two arrival processes, sharing service
/// streams. The report's spacing fields hold the two mean spacings.
InsensitivityReport compare_arrival_processes(const NetworkKernel& kernel, const ArrivalSpec& first,
                                              const ArrivalSpec& second, const std::vector<double>& grid,
                                              std::size_t replications, const HorizonPolicy& policy,
                                              std::uint64_t seed, const ParallelOptions& par,
                                              std::size_t min_exceedances = 30);
/// Tails under deterministic(a_det) and exponential(mean a_ren) arrivals with
/// the same service streams.
InsensitivityReport interarrival_insensitivity_check(const NetworkKernel& kernel, double a_det, double a_ren,
                                                     const std::vector<double>& grid, std::size_t replications,
                                                     const HorizonPolicy& policy, std::uint64_t seed,
                                                     const ParallelOptions& par, std::size_t min_exceedances = 30);

json tail_to_json(const TailEstimate& est);

}  // namespace msnet
