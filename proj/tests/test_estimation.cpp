#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "msnet/estimation.hpp"

using namespace msnet;

namespace {

std::vector<double> pareto_samples(std::size_t n, double alpha, std::uint64_t seed) {
  RngStream r(seed, 0);
  const auto d = HeavyTailDist::pareto(alpha, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = d.sample(r);
  return out;
}

}  // namespace

TEST_CASE("stationary sampler on a queue without waiting") {
  const SingleServerModel k(HeavyTailDist::deterministic(0.5), fixtures::unit_arrivals());
  HorizonPolicy policy;
  policy.n0 = 16;
  const auto s = stationary_sample(k, policy, 1, 0);
  CHECK(s.value == 0.5);
  CHECK(s.horizon == 16);
  CHECK(s.evaluated == 64);
  CHECK_FALSE(s.censored);
}

TEST_CASE("stationary sampler agrees with a brute-force sup over the final window") {
  const auto k = fixtures::pareto_single(0.7);
  HorizonPolicy policy;
  policy.n0 = 8;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    std::vector<double> trace;
    RealizedWindow w;
    const auto s = stationary_sample(*k, policy, 3, rep, Quantity::dater, &trace, &w);
    double best = -INFINITY;
    for (std::size_t p = 0; p < w.size(); ++p) {
      double sum = w.epoch(p);
      for (std::size_t i = p; i < w.size(); ++i) sum += w.visits(i)[0].work;
      best = std::max(best, sum - w.epoch(w.size() - 1));
    }
    CHECK(s.value == doctest::Approx(best).epsilon(1e-12));
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1]);
    CHECK(trace.back() == s.value);
  }
}

TEST_CASE("station-2 waiting time quantity") {
  const auto k = fixtures::pareto_tandem();
  RealizedWindow w;
  const auto s = stationary_sample(*k, HorizonPolicy{}, 2, 7, Quantity::station2_wait, nullptr, &w);
  CHECK(s.value == tandem_path(w).wait2.back());
  CHECK(evaluate_quantity(*k, w, Quantity::dater) == k->maximal_dater(w));
}

TEST_CASE("censoring and horizon validation") {
  const auto k = fixtures::pareto_single(0.97);
  HorizonPolicy policy;
  policy.n0 = 2;
  policy.n_max = 8;
  const auto run = run_stationary(*k, policy, 500, 1, ParallelOptions{});
  CHECK(run.censored_count > 0);
  HorizonPolicy bad;
  bad.n0 = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("stationary runs do not depend on the schedule") {
  const auto k = fixtures::pareto_jackson();
  const auto a = run_stationary(*k, HorizonPolicy{}, 300, 4, ParallelOptions{1, true});
  const auto b = run_stationary(*k, HorizonPolicy{}, 300, 4, ParallelOptions{4, false});
  CHECK(a.values == b.values);
  CHECK(a.horizons == b.horizons);
}

TEST_CASE("tail summaries") {
  const std::vector<double> v{0.5, 1.0, 2.0, 3.0, 10.0};
  const auto est = summarize_tail(v, 0, {0.1, 1.5, 2.5, 20.0}, [](double x) { return 1.0 / x; });
  CHECK(est.levels[0].p_hat == 1.0);
  CHECK(est.levels[1].p_hat == doctest::Approx(0.6));
  CHECK(est.levels[1].exceedances == 3);
  CHECK(est.levels[3].p_hat == 0.0);
  CHECK(*est.levels[1].ratio == doctest::Approx(0.6 * 1.5));
  for (std::size_t i = 1; i < est.levels.size(); ++i) CHECK(est.levels[i].p_hat <= est.levels[i - 1].p_hat);
  for (const auto& l : est.levels) {
    CHECK(l.ci_lo <= l.p_hat);
    CHECK(l.ci_hi >= l.p_hat);
  }
  const auto tainted = summarize_tail(v, 1, {1.0});
  CHECK(tainted.tainted);
  CHECK(tail_to_json(tainted).contains("levels"));
}

TEST_CASE("tail estimates are monotone and reproducible") {
  const auto k = fixtures::pareto_single();
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
  const auto a = estimate_tail(*k, grid, 4000, HorizonPolicy{}, 8, ParallelOptions{1, true});
  const auto b = estimate_tail(*k, grid, 4000, HorizonPolicy{}, 8, ParallelOptions{4, false});
  CHECK(tail_to_json(a).dump() == tail_to_json(b).dump());
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(a.levels[i].p_hat <= a.levels[i - 1].p_hat);
}

TEST_CASE("Hill estimator") {
  const auto s = pareto_samples(100000, 2.5, 1);
  const auto h = hill_tail_index(s, 1000);
  CHECK(std::abs(h.index - 2.5) <= 0.1);
  CHECK(h.std_error > 0.0);
  CHECK(h.k == 1000);
  auto scaled = s;
  for (auto& x : scaled) x *= 7.5;
  CHECK(hill_tail_index(scaled, 1000).index == doctest::Approx(h.index).epsilon(1e-12));
  CHECK_THROWS_AS(hill_tail_index(std::vector<double>(1000, 2.0), 100), std::invalid_argument);
  CHECK_THROWS_AS(hill_tail_index(s, 5), std::invalid_argument);
  CHECK_THROWS_AS(hill_tail_index(std::vector<double>(100, 1.0), 60), std::invalid_argument);
}

TEST_CASE("moment check flags light tails") {
  const SingleServerModel light(HeavyTailDist::exponential(2.0), fixtures::unit_arrivals());
  const auto rep = moment_order_check(light, 2.5, 200000, 1000, HorizonPolicy{}, 3, ParallelOptions{});
  CHECK_FALSE(rep.heavy_tailed);
  CHECK(rep.by_k.size() >= 2);

  const auto heavy = moment_order_from_samples(pareto_samples(200000, 1.5, 9), 0, 2.5, 1000, 1);
  CHECK(heavy.heavy_tailed);
  CHECK(heavy.target == 1.5);
  CHECK(std::abs(heavy.gap) < 0.15);
}

TEST_CASE("big-jump diagnostic") {
  const SingleServerModel light(HeavyTailDist::exponential(2.0), fixtures::unit_arrivals());
  const auto starved = big_jump_diagnostic(light, 40.0, {0.25}, 10, 20000, HorizonPolicy{}, 1, ParallelOptions{});
  CHECK(starved.starved);
  CHECK(starved.conditioned == 0);

  const auto k = fixtures::pareto_single();
  const auto rep = big_jump_diagnostic(*k, 4.0, {0.1, 0.25, 0.5}, 200, 1000000, HorizonPolicy{}, 2, ParallelOptions{});
  CHECK_FALSE(rep.starved);
  CHECK(rep.conditioned >= 200);
  REQUIRE(rep.histogram.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    std::size_t total = 0;
    for (auto c : rep.histogram[t]) total += c;
    CHECK(total == rep.conditioned);
    CHECK(rep.frac_zero[t] + rep.frac_one[t] + rep.frac_two_plus[t] == doctest::Approx(1.0));
  }
  // Lower thresholds catch at least as many jumps.
  CHECK(rep.frac_zero[0] <= rep.frac_zero[2]);
  CHECK(rep.frac_zero[1] <= 0.1);
}

TEST_CASE("assumption (H) checks") {
  const ParallelOptions par{};
  const auto p = HeavyTailDist::pareto(2.5, 1.0);
  const ComponentSampler independent = [&](RngStream& r, std::vector<double>& y) {
    y.assign({p.sample(r), p.sample(r)});
  };
  const ComponentSampler comonotone = [&](RngStream& r, std::vector<double>& y) { y.assign(2, p.sample(r)); };
  const std::vector<double> grid{2.0, 5.0, 10.0, 20.0};
  const auto ind = check_assumption_H(independent, grid, 200000, 1, par);
  CHECK(ind.consistent);
  const auto com = check_assumption_H(comonotone, grid, 200000, 1, par);
  CHECK_FALSE(com.consistent);
  const auto& deep = com.levels[com.deepest];
  CHECK(deep.max_over_marginals.value == doctest::Approx(0.5).epsilon(1e-12));

  const auto j = fixtures::pareto_jackson();
  const ComponentSampler compound = [&](RngStream& r, std::vector<double>& y) {
    const auto lone = j->single_customer(r);
    y = lone.work;
  };
  CHECK(check_assumption_H(compound, {1.0, 2.0, 4.0, 8.0}, 1000000, 2, par).consistent);

  const auto shrunk = check_assumption_H(independent, {2.0, 5.0, 1e6}, 100000, 1, par);
  CHECK(shrunk.grid_shrunk);
  CHECK(shrunk.deepest == 1);
  CHECK(ind.to_json().contains("levels"));
}

TEST_CASE("arrival comparisons") {
  const auto k = fixtures::pareto_single();
  const std::vector<double> grid{1.0, 2.0, 4.0};
  const auto same = compare_arrival_processes(*k, fixtures::unit_arrivals(), fixtures::unit_arrivals(), grid, 5000,
                                              HorizonPolicy{}, 3, ParallelOptions{});
  CHECK_FALSE(same.parameter_mismatch);
  for (const auto& l : same.levels) CHECK(l.ratio.value == 1.0);
  CHECK(same.deepest_contains_one);

  const auto bad = interarrival_insensitivity_check(*k, 1.0, 0.6, grid, 5000, HorizonPolicy{}, 3, ParallelOptions{});
  CHECK(bad.parameter_mismatch);
  REQUIRE(bad.deepest.has_value());
  CHECK(bad.levels[*bad.deepest].ratio.hi < 0.8);
}
