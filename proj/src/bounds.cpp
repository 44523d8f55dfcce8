#include "msnet/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "msnet/models.hpp"
#include "msnet/stationary.hpp"

namespace msnet {

namespace {

struct Moments {
  double mean;
  double std_error;
};

Moments mean_and_error(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

std::vector<double> saturated_daters(const NetworkKernel& kernel, std::size_t n, std::size_t replications,
                                     std::uint64_t seed, const ParallelOptions& par) {
  std::vector<double> z(replications);
  for_each_index(replications, par, [&](std::size_t i) {
    CustomerPool pool(kernel, seed, i);
    RealizedWindow w;
    pool.fill_saturated(n, w);
    z[i] = kernel.maximal_dater_unchecked(w);
  });
  return z;
}

}  // namespace

Gamma0Estimate estimate_gamma0(const NetworkKernel& kernel, std::size_t n, std::size_t replications,
                               std::uint64_t seed, const ParallelOptions& par) {
  if (n < 1) throw std::invalid_argument("estimate_gamma0: n must be >= 1");
  if (replications < 1) throw std::invalid_argument("estimate_gamma0: need at least one replication");
  auto z = saturated_daters(kernel, n, replications, seed, par);
  for (auto& v : z) v /= static_cast<double>(n);
  const auto m = mean_and_error(z);
  Gamma0Estimate est;
  est.n = n;
  est.replications = replications;
  est.estimate = m.mean;
  est.std_error = m.std_error;
  est.half_width = 1.96 * m.std_error;
  est.reference = kernel.gamma0_reference();
  return est;
}

std::string stability_name(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::inconclusive: return "boundary-inconclusive";
  }
  return "boundary-inconclusive";
}

Stability stability_verdict(double mean_spacing, const Gamma0Estimate& gamma0) {
  if (!(mean_spacing > 0.0)) throw std::invalid_argument("stability_verdict: mean spacing must be positive");
  const double hi = (gamma0.estimate + gamma0.half_width) / mean_spacing;
  const double lo = (gamma0.estimate - gamma0.half_width) / mean_spacing;
  if (hi < 1.0) return Stability::stable;
  if (lo > 1.0) return Stability::unstable;
  return Stability::inconclusive;
}

LSelection select_L(const NetworkKernel& kernel, double delta, std::uint64_t seed, const ParallelOptions& par,
                    std::size_t replications) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("select_L: delta must lie in (0, 1)");
  const double a = kernel.arrivals().mean_spacing();
  constexpr std::size_t cap = std::size_t{1} << 20;
  for (std::size_t L = 1; L <= cap; L *= 2) {
    // Fewer replications for long blocks; the 3-sigma margin absorbs the noise.
    const std::size_t reps = std::max<std::size_t>(50, std::min(replications, (std::size_t{1} << 22) / L));
    const auto m = mean_and_error(saturated_daters(kernel, L, reps, mix64(seed ^ L), par));
    const double target = (1.0 - delta) * static_cast<double>(L) * a;
    if (m.mean + 3.0 * m.std_error <= target) return {L, m.mean, m.std_error, target};
  }
  throw ScanCapExceeded("select_L: no L <= 2^20 certifies E Z_[-L,-1](Q) < (1 - delta) L a; load too close to 1");
}

double tandem_block_service(const RealizedWindow& w, std::size_t lo, std::size_t hi) {
  double suffix2 = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) suffix2 += w.visits(i)[1].work;
  double prefix1 = 0.0;
  double best = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) {
    prefix1 += w.visits(j)[0].work;
    best = std::max(best, prefix1 + suffix2);
    suffix2 -= w.visits(j)[1].work;
  }
  return best;
}

UpperPath upper_bound_path(const NetworkKernel& kernel, const RealizedWindow& w, std::size_t L) {
  if (L < 1) throw std::invalid_argument("upper_bound_path: L must be >= 1");
  if (w.size() % L != 0) throw std::invalid_argument("upper_bound_path: window length must be a multiple of L");
  kernel.check_window(w);
  const auto* tandem = dynamic_cast<const TandemModel*>(&kernel);
  const std::size_t blocks = w.size() / L;
  UpperPath path;
  path.L = L;
  path.s_hat.resize(blocks);
  path.response.resize(blocks);
  path.tau_hat.resize(blocks > 0 ? blocks - 1 : 0);
  for (std::size_t k = 0; k < blocks; ++k) {
    const std::size_t lo = k * L;
    const std::size_t hi = lo + L - 1;
    const double generic = kernel.maximal_dater_unchecked(w.subwindow(lo, hi).saturated());
    if (tandem) {
      const double fast = tandem_block_service(w, lo, hi);
      path.max_fastpath_gap = std::max(path.max_fastpath_gap, std::abs(fast - generic) / std::max(1.0, generic));
      path.s_hat[k] = fast;
    } else {
      path.s_hat[k] = generic;
    }
    if (k == 0) {
      path.response[k] = path.s_hat[k];
    } else {
      path.tau_hat[k - 1] = w.epoch(hi) - w.epoch(hi - L);
      path.response[k] = path.s_hat[k] + std::max(0.0, path.response[k - 1] - path.tau_hat[k - 1]);
    }
  }
  path.bound = path.response.back();
  return path;
}

LowerPath lower_bound_path(const NetworkKernel& kernel, const RealizedWindow& w) {
  if (!kernel.has_aa()) throw std::invalid_argument("lower_bound_path: " + kernel.name() + " has no (AA) decomposition");
  kernel.check_window(w);
  LowerPath path;
  path.station_response.resize(static_cast<std::size_t>(kernel.stations()));
  for (int j = 0; j < kernel.stations(); ++j) {
    double wait = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      wait = std::max(0.0, wait + kernel.component(w, i, j) - w.gap(i));
    }
    path.station_response[static_cast<std::size_t>(j)] = wait + kernel.component(w, w.size() - 1, j);
  }
  path.bound = *std::max_element(path.station_response.begin(), path.station_response.end());
  return path;
}

json SandwichReport::to_json() const {
  json out = {{"realizations", realizations},
              {"violations", violations},
              {"block_violations", block_violations},
              {"fastpath_mismatches", fastpath_mismatches},
              {"worst_lower_margin", worst_lower_margin},
              {"worst_upper_margin", worst_upper_margin},
              {"passed", passed()}};
  if (counterexample) out["counterexample"] = *counterexample;
  return out;
}

SandwichReport sandwich_check(const NetworkKernel& kernel, const RealizedWindow& w, std::size_t L) {
  SandwichReport rep;
  rep.realizations = 1;
  const double z = kernel.maximal_dater(w);
  const auto upper = upper_bound_path(kernel, w, L);
  rep.worst_upper_margin = upper.bound - z;
  bool ok = leq_tol(z, upper.bound);
  if (upper.max_fastpath_gap > 1e-9) rep.fastpath_mismatches = 1;
  double lower = -std::numeric_limits<double>::infinity();
  if (kernel.has_aa()) {
    lower = lower_bound_path(kernel, w).bound;
    rep.worst_lower_margin = z - lower;
    ok = ok && leq_tol(lower, z);
  }
  if (!ok) rep.violations = 1;

  bool blocks_ok = true;
  const int r = kernel.stations();
  for (std::size_t k = 0; k < upper.s_hat.size(); ++k) {
    const double s = upper.s_hat[k];
    double sum_z = 0.0;
    for (std::size_t i = k * L; i < (k + 1) * L; ++i) sum_z += kernel.maximal_dater_unchecked(w.subwindow(i, i));
    blocks_ok = blocks_ok && leq_tol(s, sum_z);
    if (!kernel.has_aa()) continue;
    double max_station = 0.0;
    double total = 0.0;
    for (int j = 0; j < r; ++j) {
      double station = 0.0;
      for (std::size_t i = k * L; i < (k + 1) * L; ++i) station += kernel.component(w, i, j);
      max_station = std::max(max_station, station);
      total += station;
    }
    blocks_ok = blocks_ok && leq_tol(max_station, s) && leq_tol(s, total);
  }
  if (!blocks_ok) rep.block_violations = 1;
  if (!rep.passed()) {
    rep.counterexample = json{{"window", window_to_json(w)}, {"L", L}, {"Z", z},
                              {"upper", upper.bound}, {"s_hat", upper.s_hat}};
    if (kernel.has_aa()) (*rep.counterexample)["lower"] = lower;
  }
  return rep;
}

SandwichReport sandwich_suite(const NetworkKernel& kernel, std::size_t L, std::size_t blocks,
                              std::size_t realizations, std::uint64_t seed, const ParallelOptions& par) {
  if (L < 1 || blocks < 1) throw std::invalid_argument("sandwich_suite: L and blocks must be >= 1");
  std::vector<SandwichReport> reports(realizations);
  for_each_index(realizations, par, [&](std::size_t i) {
    CustomerPool pool(kernel, seed, i);
    RealizedWindow w;
    pool.fill(blocks * L - 1, w);
    reports[i] = sandwich_check(kernel, w, L);
  });
  SandwichReport total;
  total.worst_lower_margin = std::numeric_limits<double>::infinity();
  total.worst_upper_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : reports) {
    total.realizations += r.realizations;
    total.violations += r.violations;
    total.block_violations += r.block_violations;
    total.fastpath_mismatches += r.fastpath_mismatches;
    if (kernel.has_aa()) total.worst_lower_margin = std::min(total.worst_lower_margin, r.worst_lower_margin);
    total.worst_upper_margin = std::min(total.worst_upper_margin, r.worst_upper_margin);
    if (!total.counterexample && r.counterexample) total.counterexample = r.counterexample;
  }
  if (!kernel.has_aa() || realizations == 0) total.worst_lower_margin = 0.0;
  if (realizations == 0) total.worst_upper_margin = 0.0;
  return total;
}

}  // namespace msnet
