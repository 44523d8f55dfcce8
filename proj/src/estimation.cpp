#include "msnet/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace msnet {

namespace {

constexpr double kZ95 = 1.96;

void require_increasing(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("level grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("level grid must be strictly increasing");
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Ratio of means E A / E C from per-sample sums, delta-method CI.
RatioCI ratio_of_means(double sa, double sc, double saa, double scc, double sac, double n) {
  if (sc <= 0.0) return {std::numeric_limits<double>::quiet_NaN(), 0.0, std::numeric_limits<double>::infinity()};
  const double ma = sa / n;
  const double mc = sc / n;
  const double r = ma / mc;
  const double va = saa / n - ma * ma;
  const double vc = scc / n - mc * mc;
  const double cac = sac / n - ma * mc;
  const double var = std::max(0.0, (va - 2.0 * r * cac + r * r * vc) / (mc * mc * n));
  const double hw = kZ95 * std::sqrt(var);
  return {r, r - hw, r + hw};
}

json ratio_json(const RatioCI& r) { return {{"value", r.value}, {"ci_lo", r.lo}, {"ci_hi", r.hi}}; }

}  // namespace

TailEstimate summarize_tail(const std::vector<double>& values, std::size_t censored, const std::vector<double>& grid,
                            const TailFormula& formula) {
  require_increasing(grid);
  if (values.empty()) throw std::invalid_argument("summarize_tail: no samples");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  TailEstimate est;
  est.replications = sorted.size();
  est.censored = censored;
  est.censor_fraction = static_cast<double>(censored) / n;
  est.tainted = est.censor_fraction > 1e-3;
  for (double x : grid) {
    const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x));
    const double p = static_cast<double>(above) / n;
    const double hw = kZ95 * std::sqrt(p * (1.0 - p) / n);
    TailLevel lvl{x, above, p, hw, std::max(0.0, p - hw), std::min(1.0, p + hw), std::nullopt, std::nullopt};
    if (formula) {
      lvl.formula = formula(x);
      if (*lvl.formula > 0.0) lvl.ratio = p / *lvl.formula;
    }
    est.levels.push_back(lvl);
  }
  return est;
}

TailEstimate estimate_tail(const NetworkKernel& kernel, const std::vector<double>& grid, std::size_t replications,
                           const HorizonPolicy& policy, std::uint64_t seed, const ParallelOptions& par,
                           const TailFormula& formula, Quantity q) {
  require_increasing(grid);
  const auto run = run_stationary(kernel, policy, replications, seed, par, q);
  return summarize_tail(run.values, run.censored_count, grid, formula);
}

json tail_to_json(const TailEstimate& est) {
  json levels = json::array();
  for (const auto& l : est.levels) {
    levels.push_back({{"x", l.x},
                      {"exceedances", l.exceedances},
                      {"p_hat", l.p_hat},
                      {"ci_lo", l.ci_lo},
                      {"ci_hi", l.ci_hi},
                      {"formula", optional_number(l.formula)},
                      {"ratio", optional_number(l.ratio)}});
  }
  return {{"replications", est.replications},
          {"censored", est.censored},
          {"censor_frac", est.censor_fraction},
          {"tainted", est.tainted},
          {"levels", levels}};
}

// --- Hill ---------------------------------------------------------------------------------

namespace {

double hill_core(std::vector<double>& scratch, std::size_t k) {
  // scratch is consumed: the k+1 largest end up in front.
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<long>(k), scratch.end(), std::greater<>());
  const double threshold = scratch[k];
  if (!(threshold > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(scratch[i] / threshold);
  if (!(sum > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(k) / sum;
}

}  // namespace

double moment_extreme_index(const std::vector<double>& samples, std::size_t k) {
  if (k < 10 || 2 * k >= samples.size()) throw std::invalid_argument("moment_extreme_index: need 10 <= k < n / 2");
  std::vector<double> scratch(samples);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<long>(k), scratch.end(), std::greater<>());
  const double threshold = scratch[k];
  if (!(threshold > 0.0)) throw std::invalid_argument("moment_extreme_index: nonpositive threshold");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double l = std::log(scratch[i] / threshold);
    m1 += l;
    m2 += l * l;
  }
  m1 /= static_cast<double>(k);
  m2 /= static_cast<double>(k);
  if (!(m2 > 0.0)) throw std::invalid_argument("moment_extreme_index: degenerate samples");
  return m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2);
}

HillEstimate hill_tail_index(const std::vector<double>& samples, std::size_t k, std::uint64_t seed) {
  if (k < 10) throw std::invalid_argument("hill_tail_index: k must be >= 10");
  if (2 * k >= samples.size()) throw std::invalid_argument("hill_tail_index: need k < sample count / 2");
  std::vector<double> scratch(samples);
  const double index = hill_core(scratch, k);
  if (!std::isfinite(index)) throw std::invalid_argument("hill_tail_index: degenerate samples (no spread in the top order statistics)");

  constexpr int kResamples = 200;
  RngStream rng(seed, 0x4b11);
  double sum = 0.0;
  double sum2 = 0.0;
  int used = 0;
  for (int b = 0; b < kResamples; ++b) {
    for (auto& v : scratch) v = samples[static_cast<std::size_t>(rng.uniform() * static_cast<double>(samples.size()))];
    const double h = hill_core(scratch, k);
    if (!std::isfinite(h)) continue;
    sum += h;
    sum2 += h * h;
    ++used;
  }
  double se = std::numeric_limits<double>::quiet_NaN();
  if (used > 1) {
    const double mean = sum / used;
    se = std::sqrt(std::max(0.0, (sum2 - used * mean * mean) / (used - 1)));
  }
  return {index, se, k};
}

json MomentReport::to_json() const {
  json ks = json::array();
  for (const auto& h : by_k) ks.push_back({{"k", h.k}, {"index", h.index}, {"std_error", h.std_error}});
  return {{"service_index", service_index},
          {"target", target},
          {"hill_index", hill.index},
          {"hill_std_error", hill.std_error},
          {"k", hill.k},
          {"gap", gap},
          {"heavy_tailed", heavy_tailed},
          {"extreme_value_index", extreme_value_index},
          {"by_k", ks},
          {"samples", samples},
          {"censored", censored}};
}

MomentReport moment_order_from_samples(const std::vector<double>& values, std::size_t censored, double service_index,
                                       std::size_t k, std::uint64_t seed) {
  MomentReport rep;
  rep.service_index = service_index;
  rep.target = service_index - 1.0;
  rep.samples = values.size();
  rep.censored = censored;
  rep.hill = hill_tail_index(values, k, seed);
  for (std::size_t div : {8, 4, 2}) {
    if (k / div >= 10) rep.by_k.push_back(hill_tail_index(values, k / div, seed));
  }
  rep.by_k.push_back(rep.hill);
  rep.gap = rep.hill.index - rep.target;
  // Regular variation has a positive extreme-value index; exponential-type
  // tails sit at zero even though their Hill estimates keep climbing.
  rep.extreme_value_index = moment_extreme_index(values, k);
  const double se = std::sqrt(1.0 + std::pow(std::max(0.0, rep.extreme_value_index), 2)) / std::sqrt(static_cast<double>(k));
  rep.heavy_tailed = rep.extreme_value_index > 3.0 * se;
  return rep;
}

MomentReport moment_order_check(const NetworkKernel& kernel, double service_index, std::size_t samples, std::size_t k,
                                const HorizonPolicy& policy, std::uint64_t seed, const ParallelOptions& par) {
  const auto run = run_stationary(kernel, policy, samples, seed, par);
  return moment_order_from_samples(run.values, run.censored_count, service_index, k, seed);
}

// --- single big jump ---------------------------------------------------------------------

json BigJumpReport::to_json() const {
  json per_theta = json::array();
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    per_theta.push_back({{"theta", thetas[t]},
                         {"histogram", histogram[t]},
                         {"frac_zero", frac_zero[t]},
                         {"frac_one", frac_one[t]},
                         {"frac_two_plus", frac_two_plus[t]}});
  }
  return {{"x", x},
          {"replications_used", replications_used},
          {"conditioned", conditioned},
          {"starved", starved},
          {"thetas", per_theta}};
}

namespace {

constexpr std::size_t kHistogramBins = 6;  // 0..4, then 5+

// Counts for one conditioned replication, per theta.
std::vector<std::size_t> count_jumps(const NetworkKernel& kernel, const RealizedWindow& w, double z, double x,
                                     const std::vector<double>& thetas) {
  const std::size_t last = w.size() - 1;
  // Least n with Z_[-n,0] = z; Z_[-n,0] is nondecreasing in n.
  std::size_t lo = 0;
  std::size_t hi = last;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (kernel.maximal_dater_unchecked(w.subwindow(last - mid, last)) == z) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::vector<std::size_t> counts(thetas.size(), 0);
  for (std::size_t i = last - lo; i <= last; ++i) {
    for (int j = 0; j < kernel.stations(); ++j) {
      const double y = kernel.component(w, i, j);
      for (std::size_t t = 0; t < thetas.size(); ++t) {
        if (y > thetas[t] * x) ++counts[t];
      }
    }
  }
  return counts;
}

void finish(BigJumpReport& rep) {
  const std::size_t T = rep.thetas.size();
  rep.frac_zero.assign(T, 0.0);
  rep.frac_one.assign(T, 0.0);
  rep.frac_two_plus.assign(T, 0.0);
  if (rep.conditioned == 0) return;
  const double c = static_cast<double>(rep.conditioned);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& h = rep.histogram[t];
    rep.frac_zero[t] = static_cast<double>(h[0]) / c;
    rep.frac_one[t] = static_cast<double>(h[1]) / c;
    rep.frac_two_plus[t] = static_cast<double>(rep.conditioned - h[0] - h[1]) / c;
  }
}

void add_counts(BigJumpReport& rep, const std::vector<std::size_t>& counts) {
  for (std::size_t t = 0; t < counts.size(); ++t) ++rep.histogram[t][std::min(counts[t], kHistogramBins - 1)];
  ++rep.conditioned;
}

BigJumpReport empty_report(double x, const std::vector<double>& thetas) {
  if (thetas.empty()) throw std::invalid_argument("big_jump_diagnostic: need at least one theta");
  for (double t : thetas) {
    if (!(t > 0.0)) throw std::invalid_argument("big_jump_diagnostic: thetas must be positive");
  }
  BigJumpReport rep;
  rep.x = x;
  rep.thetas = thetas;
  rep.histogram.assign(thetas.size(), std::vector<std::size_t>(kHistogramBins, 0));
  return rep;
}

}  // namespace

BigJumpReport big_jump_from_run(const NetworkKernel& kernel, double x, const std::vector<double>& thetas,
                                const StationaryRun& run, const HorizonPolicy& policy, std::uint64_t seed,
                                const ParallelOptions& par) {
  auto rep = empty_report(x, thetas);
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < run.values.size(); ++i) {
    if (run.values[i] > x) hits.push_back(i);
  }
  std::vector<std::vector<std::size_t>> counts(hits.size());
  for_each_index(hits.size(), par, [&](std::size_t h) {
    RealizedWindow w;
    const auto s = stationary_sample(kernel, policy, seed, hits[h], Quantity::dater, nullptr, &w);
    counts[h] = count_jumps(kernel, w, s.value, x, thetas);
  });
  for (const auto& c : counts) add_counts(rep, c);
  rep.replications_used = run.values.size();
  finish(rep);
  return rep;
}

BigJumpReport big_jump_diagnostic(const NetworkKernel& kernel, double x, const std::vector<double>& thetas,
                                  std::size_t target, std::size_t budget, const HorizonPolicy& policy,
                                  std::uint64_t seed, const ParallelOptions& par) {
  policy.validate();
  auto rep = empty_report(x, thetas);
  constexpr std::size_t chunk = std::size_t{1} << 16;
  std::size_t next = 0;
  while (rep.conditioned < target && next < budget) {
    const std::size_t count = std::min(chunk, budget - next);
    std::vector<std::vector<std::size_t>> counts(count);
    std::vector<std::uint8_t> hit(count, 0);
    for_each_index(count, par, [&](std::size_t i) {
      RealizedWindow w;
      const auto s = stationary_sample(kernel, policy, seed, next + i, Quantity::dater, nullptr, &w);
      if (s.value > x) {
        hit[i] = 1;
        counts[i] = count_jumps(kernel, w, s.value, x, thetas);
      }
    });
    for (std::size_t i = 0; i < count && rep.conditioned < target; ++i) {
      if (hit[i]) add_counts(rep, counts[i]);
    }
    next += count;
  }
  rep.replications_used = next;
  rep.starved = rep.conditioned < target;
  finish(rep);
  return rep;
}

// --- assumption (H) ------------------------------------------------------------------------

json HReport::to_json() const {
  json lv = json::array();
  for (const auto& l : levels) {
    lv.push_back({{"x", l.x},
                  {"p_sum", l.p_sum},
                  {"p_max", l.p_max},
                  {"p_marginals", l.p_marginals},
                  {"max_exceedances", l.max_exceedances},
                  {"sum_over_marginals", ratio_json(l.sum_over_marginals)},
                  {"max_over_marginals", ratio_json(l.max_over_marginals)},
                  {"sum_over_max", ratio_json(l.sum_over_max)}});
  }
  return {{"samples", samples},
          {"levels", lv},
          {"deepest_level", deepest},
          {"grid_shrunk", grid_shrunk},
          {"consistent_with_H", consistent}};
}

HReport check_assumption_H(const ComponentSampler& sampler, const std::vector<double>& grid, std::size_t samples,
                           std::uint64_t seed, const ParallelOptions& par, std::size_t min_exceedances) {
  require_increasing(grid);
  if (samples < 2) throw std::invalid_argument("check_assumption_H: need samples");
  std::vector<std::vector<double>> ys(samples);
  for_each_index(samples, par, [&](std::size_t i) {
    RngStream rng = RngStream::for_replication(seed, i, Lane::service);
    sampler(rng, ys[i]);
  });
  const std::size_t r = ys.front().size();
  for (const auto& y : ys) {
    if (y.size() != r || r == 0) throw std::invalid_argument("check_assumption_H: sampler must return a fixed nonempty vector");
  }
  HReport rep;
  rep.samples = samples;
  const double n = static_cast<double>(samples);
  for (double x : grid) {
    double s_sum = 0, s_max = 0, s_marg = 0, s_marg2 = 0, s_sum_marg = 0, s_max_marg = 0, s_sum_max = 0;
    for (const auto& y : ys) {
      double total = 0.0;
      double mx = -std::numeric_limits<double>::infinity();
      double marg = 0.0;
      for (double v : y) {
        total += v;
        mx = std::max(mx, v);
        marg += v > x ? 1.0 : 0.0;
      }
      const double a = total > x ? 1.0 : 0.0;
      const double b = mx > x ? 1.0 : 0.0;
      s_sum += a;
      s_max += b;
      s_marg += marg;
      s_marg2 += marg * marg;
      s_sum_marg += a * marg;
      s_max_marg += b * marg;
      s_sum_max += a * b;
    }
    HLevel lvl;
    lvl.x = x;
    lvl.p_sum = s_sum / n;
    lvl.p_max = s_max / n;
    lvl.p_marginals = s_marg / n;
    lvl.max_exceedances = static_cast<std::size_t>(s_max);
    lvl.sum_over_marginals = ratio_of_means(s_sum, s_marg, s_sum, s_marg2, s_sum_marg, n);
    lvl.max_over_marginals = ratio_of_means(s_max, s_marg, s_max, s_marg2, s_max_marg, n);
    lvl.sum_over_max = ratio_of_means(s_sum, s_max, s_sum, s_max, s_sum_max, n);
    rep.levels.push_back(lvl);
  }
  std::optional<std::size_t> deepest;
  for (std::size_t i = 0; i < rep.levels.size(); ++i) {
    if (rep.levels[i].max_exceedances >= min_exceedances) deepest = i;
  }
  if (!deepest) {
    rep.grid_shrunk = true;
    rep.consistent = false;
    return rep;
  }
  rep.deepest = *deepest;
  rep.grid_shrunk = *deepest + 1 < rep.levels.size();
  const auto& d = rep.levels[*deepest];
  auto near_one = [](const RatioCI& c) { return c.lo <= 1.25 && c.hi >= 0.8; };
  rep.consistent = near_one(d.sum_over_marginals) && near_one(d.max_over_marginals) && near_one(d.sum_over_max);
  return rep;
}

// --- interarrival insensitivity ----------------------------------------------------------------

json InsensitivityReport::to_json() const {
  json lv = json::array();
  for (const auto& l : levels) {
    lv.push_back({{"x", l.x},
                  {"p_deterministic", l.p_deterministic},
                  {"p_renewal", l.p_renewal},
                  {"exceed_deterministic", l.exceed_deterministic},
                  {"exceed_renewal", l.exceed_renewal},
                  {"ratio", ratio_json(l.ratio)}});
  }
  return {{"a_deterministic", a_deterministic},
          {"a_renewal", a_renewal},
          {"parameter_mismatch", parameter_mismatch},
          {"levels", lv},
          {"deepest_level", deepest ? json(*deepest) : json(nullptr)},
          {"deepest_ratio_ci_contains_one", deepest_contains_one}};
}

InsensitivityReport compare_arrival_processes(const NetworkKernel& kernel, const ArrivalSpec& first,
                                              const ArrivalSpec& second, const std::vector<double>& grid,
                                              std::size_t replications, const HorizonPolicy& policy,
                                              std::uint64_t seed, const ParallelOptions& par,
                                              std::size_t min_exceedances) {
  const auto det = kernel.with_arrivals(first);
  const auto ren = kernel.with_arrivals(second);
  const auto e_det = estimate_tail(*det, grid, replications, policy, seed, par);
  const auto e_ren = estimate_tail(*ren, grid, replications, policy, seed, par);
  const double a_det = first.mean_spacing();
  const double a_ren = second.mean_spacing();
  InsensitivityReport rep;
  rep.a_deterministic = a_det;
  rep.a_renewal = a_ren;
  rep.parameter_mismatch = std::abs(a_det - a_ren) > 1e-12 * std::max(a_det, a_ren);
  const double n = static_cast<double>(replications);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& ld = e_det.levels[i];
    const auto& lr = e_ren.levels[i];
    InsensitivityLevel lvl{grid[i], ld.p_hat, lr.p_hat, ld.exceedances, lr.exceedances,
                           {std::numeric_limits<double>::quiet_NaN(), 0.0, std::numeric_limits<double>::infinity()}};
    if (ld.exceedances > 0 && lr.exceedances > 0) {
      const double r = ld.p_hat / lr.p_hat;
      const double sd = std::sqrt((1.0 - ld.p_hat) / (n * ld.p_hat) + (1.0 - lr.p_hat) / (n * lr.p_hat));
      lvl.ratio = {r, r * std::exp(-kZ95 * sd), r * std::exp(kZ95 * sd)};
    }
    if (ld.exceedances >= min_exceedances && lr.exceedances >= min_exceedances) rep.deepest = i;
    rep.levels.push_back(lvl);
  }
  if (rep.deepest) {
    const auto& c = rep.levels[*rep.deepest].ratio;
    rep.deepest_contains_one = c.lo <= 1.0 && c.hi >= 1.0;
  }
  return rep;
}

InsensitivityReport interarrival_insensitivity_check(const NetworkKernel& kernel, double a_det, double a_ren,
                                                     const std::vector<double>& grid, std::size_t replications,
                                                     const HorizonPolicy& policy, std::uint64_t seed,
                                                     const ParallelOptions& par, std::size_t min_exceedances) {
  return compare_arrival_processes(kernel, ArrivalSpec::deterministic(a_det),
                                   ArrivalSpec::renewal(HeavyTailDist::exponential(1.0 / a_ren)), grid, replications,
                                   policy, seed, par, min_exceedances);
}

}  // namespace msnet
