#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msnet/kernel.hpp"
#include "msnet/parallel.hpp"

namespace msnet {

using nlohmann::json;

/// Tally of one property over many instances; keeps the first counterexample.
struct CheckOutcome {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::optional<json> counterexample;

  bool passed() const { return failed == 0; }
  void record(bool ok, const std::function<json()>& witness);
};

struct AxiomReport {
  std::deque<CheckOutcome> checks;  // deque: get() keeps earlier references valid

  bool passed() const;
  CheckOutcome& get(const std::string& name);
  const CheckOutcome* find(const std::string& name) const;
  void merge(const AxiomReport& other);
  json to_json() const;
};

/// lhs <= rhs up to 1e-9 * max(1, |lhs|, |rhs|).
bool leq_tol(double lhs, double rhs);

/// Perturbations applied to one window.
struct PerturbationPlan {
  /// Nonnegative raises; epoch i becomes max(previous new epoch, T_i + raise_i).
  std::vector<std::vector<double>> raises;
  /// Translation for the homogeneity check.
  double shift = 7.25;
  /// Split position l (0-based) for separability; ignored for one-customer windows.
  std::size_t split = 0;
};

/// Causality, determinism, external monotonicity, homogeneity (exact) and
/// separability, the last both on the realized gaps (when the premise holds)
/// and with the gap after `split` enlarged to force it. Homogeneity is exact
/// for windows with zero offset, which is how every sampler builds them.
AxiomReport verify_axioms(const NetworkKernel& kernel, const RealizedWindow& w, const PerturbationPlan& plan);

/// Internal monotonicity over every prefix drop, subadditivity and the
/// one-step bound Z_[m,0] <= Z_[n,0] + (Z_[m,n-1] - tau_{n-1})^+ at every
/// split. The window's last customer must arrive at epoch 0.
AxiomReport verify_dater_lemmas(const NetworkKernel& kernel, const RealizedWindow& w);

struct AxiomSuiteOptions {
  std::size_t windows = 500;
  std::size_t max_size = 64;
  std::size_t perturbations = 10;
};

/// Random windows [-(size-1), 0] of uniformly drawn size, each checked by
/// verify_axioms and verify_dater_lemmas.
AxiomReport run_axiom_suite(const NetworkKernel& kernel, const AxiomSuiteOptions& opts, std::uint64_t seed,
                            const ParallelOptions& par);

json window_to_json(const RealizedWindow& w);

}  // namespace msnet
