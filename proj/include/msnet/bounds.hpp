#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msnet/axioms.hpp"
#include "msnet/kernel.hpp"
#include "msnet/parallel.hpp"

namespace msnet {

struct Gamma0Estimate {
  std::size_t n = 0;
  std::size_t replications = 0;
  double estimate = 0.0;    // mean of Z_[-n,-1](Q) / n
  double half_width = 0.0;  // 95% normal approximation
  double std_error = 0.0;
  std::optional<double> reference;
};

/// Saturated input: all n customers of [-n, -1] arrive at epoch 0.
Gamma0Estimate estimate_gamma0(const NetworkKernel& kernel, std::size_t n, std::size_t replications,
                               std::uint64_t seed, const ParallelOptions& par);

enum class Stability { stable, unstable, inconclusive };
std::string stability_name(Stability s);

/// Compares the CI of lambda * gamma(0) with 1.
Stability stability_verdict(double mean_spacing, const Gamma0Estimate& gamma0);

class ScanCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LSelection {
  std::size_t L;
  double mean;       // estimated E Z_[-L,-1](Q)
  double std_error;
  double target;     // (1 - delta) L a
};

/// Smallest L in 1, 2, 4, ... with mean + 3 standard errors <= (1 - delta) L a.
/// Throws ScanCapExceeded past L = 2^20.
LSelection select_L(const NetworkKernel& kernel, double delta, std::uint64_t seed, const ParallelOptions& par,
                    std::size_t replications = 400);

struct UpperPath {
  std::size_t L = 0;
  std::vector<double> s_hat;    // batch services, oldest block first
  std::vector<double> tau_hat;  // tau_hat[k] = block-end epoch k+1 minus block-end epoch k
  std::vector<double> response; // R_hat after each block
  double bound = 0.0;           // R_hat of the last block
  double max_fastpath_gap = 0.0;  // tandem only: |explicit - generic| over blocks
};

struct LowerPath {
  std::vector<double> station_response;  // R^(j)
  double bound = 0.0;                    // max_j R^(j)
};

/// Blocks of L consecutive customers; the last block ends with the window.
/// Throws std::invalid_argument when the window length is not a multiple of L.
UpperPath upper_bound_path(const NetworkKernel& kernel, const RealizedWindow& w, std::size_t L);

/// Batch service of a tandem block under saturation:
/// max_j (sum_{i<=j} sigma1_i + sum_{i>=j} sigma2_i).
double tandem_block_service(const RealizedWindow& w, std::size_t lo, std::size_t hi);

/// Fork-join lower bound over the window. Requires has_aa().
LowerPath lower_bound_path(const NetworkKernel& kernel, const RealizedWindow& w);

struct SandwichReport {
  std::size_t realizations = 0;
  std::size_t violations = 0;       // lower > Z or Z > upper
  std::size_t block_violations = 0; // max_j sum Y <= s_hat <= sum_j sum Y and s_hat <= sum Z_i
  std::size_t fastpath_mismatches = 0;
  double worst_lower_margin = 0.0;  // min over realizations of Z - lower
  double worst_upper_margin = 0.0;  // min of upper - Z
  std::optional<json> counterexample;

  bool passed() const { return violations == 0 && block_violations == 0 && fastpath_mismatches == 0; }
  json to_json() const;
};

/// Checks one window.
SandwichReport sandwich_check(const NetworkKernel& kernel, const RealizedWindow& w, std::size_t L);

/// Windows [-(blocks*L - 1), 0] from independent replications.
SandwichReport sandwich_suite(const NetworkKernel& kernel, std::size_t L, std::size_t blocks,
                              std::size_t realizations, std::uint64_t seed, const ParallelOptions& par);

}  // namespace msnet
