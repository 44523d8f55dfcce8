#include "msnet/axioms.hpp"

#include <algorithm>
#include <cmath>

#include "msnet/stationary.hpp"

namespace msnet {

void CheckOutcome::record(bool ok, const std::function<json()>& witness) {
  ++checked;
  if (ok) return;
  ++failed;
  if (!counterexample) counterexample = witness();
}

bool AxiomReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.passed(); });
}

CheckOutcome& AxiomReport::get(const std::string& name) {
  for (auto& c : checks) {
    if (c.name == name) return c;
  }
  checks.push_back(CheckOutcome{name, 0, 0, std::nullopt});
  return checks.back();
}

const CheckOutcome* AxiomReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void AxiomReport::merge(const AxiomReport& other) {
  for (const auto& c : other.checks) {
    auto& mine = get(c.name);
    mine.checked += c.checked;
    mine.failed += c.failed;
    if (!mine.counterexample && c.counterexample) mine.counterexample = c.counterexample;
  }
}

json AxiomReport::to_json() const {
  json out = json::object();
  for (const auto& c : checks) {
    json entry = {{"passed", c.passed()}, {"checked", c.checked}, {"failed", c.failed}};
    if (c.counterexample) entry["counterexample"] = *c.counterexample;
    out[c.name] = entry;
  }
  return out;
}

bool leq_tol(double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return lhs <= rhs + 1e-9 * scale;
}

json window_to_json(const RealizedWindow& w) {
  json customers = json::array();
  for (std::size_t i = 0; i < w.size(); ++i) {
    json visits = json::array();
    for (const auto& v : w.visits(i)) visits.push_back({v.station + 1, v.work});
    customers.push_back({{"epoch", w.shift() + w.epoch(i)}, {"visits", visits}});
  }
  return {{"first", w.first()}, {"customers", customers}};
}

namespace {

RealizedWindow with_epochs(const RealizedWindow& w, const std::vector<double>& epochs) {
  RealizedWindow out = w;
  auto e = out.mutable_epochs();
  std::copy(epochs.begin(), epochs.end(), e.begin());
  return out;
}

}  // namespace

AxiomReport verify_axioms(const NetworkKernel& kernel, const RealizedWindow& w, const PerturbationPlan& plan) {
  AxiomReport report;
  const double x = kernel.last_activity(w);
  const double z = kernel.maximal_dater(w);
  const double t_n = w.shift() + w.epochs().back();

  report.get("causality").record(leq_tol(t_n, x) && z >= -1e-9 * std::max(1.0, x), [&] {
    return json{{"window", window_to_json(w)}, {"X", x}, {"T_n", t_n}};
  });

  const double again = kernel.last_activity(w);
  report.get("determinism").record(again == x, [&] {
    return json{{"window", window_to_json(w)}, {"first", x}, {"second", again}};
  });

  auto& mono = report.get("external_monotonicity");
  for (const auto& raise : plan.raises) {
    if (raise.size() != w.size()) throw std::invalid_argument("verify_axioms: raise vector length mismatch");
    std::vector<double> epochs(w.size());
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (raise[i] < 0.0) throw std::invalid_argument("verify_axioms: raises must be nonnegative");
      prev = std::max(prev, w.epoch(i) + raise[i]);
      epochs[i] = prev;
    }
    const auto raised = with_epochs(w, epochs);
    const double xr = kernel.last_activity(raised);
    mono.record(leq_tol(x, xr), [&] {
      return json{{"window", window_to_json(w)}, {"raised", window_to_json(raised)}, {"X", x}, {"X_raised", xr}};
    });
  }

  const double xs = kernel.last_activity(w.shifted(plan.shift));
  report.get("homogeneity").record(xs == x + plan.shift, [&] {
    return json{{"window", window_to_json(w)}, {"c", plan.shift}, {"X", x}, {"X_shifted", xs}};
  });

  auto& sep = report.get("separability");
  if (w.size() >= 2) {
    const std::size_t l = std::min(plan.split, w.size() - 2);
    const double x_left = kernel.last_activity(w.subwindow(0, l));
    if (x_left <= w.shift() + w.epoch(l + 1)) {
      const double x_right = kernel.last_activity(w.subwindow(l + 1, w.size() - 1));
      sep.record(x == x_right, [&] {
        return json{{"window", window_to_json(w)}, {"split", l}, {"X", x}, {"X_right", x_right}};
      });
    }
    // Enlarge the gap after l so that T_{l+1} = X_[m,l] + 1.
    const double lift = std::max(0.0, (x_left - w.shift()) + 1.0 - w.epoch(l + 1));
    std::vector<double> epochs(w.epochs().begin(), w.epochs().end());
    for (std::size_t i = l + 1; i < epochs.size(); ++i) epochs[i] += lift;
    const auto gapped = with_epochs(w, epochs);
    const double xg = kernel.last_activity(gapped);
    const double xg_right = kernel.last_activity(gapped.subwindow(l + 1, w.size() - 1));
    sep.record(xg == xg_right, [&] {
      return json{{"window", window_to_json(gapped)}, {"split", l}, {"X", xg}, {"X_right", xg_right}};
    });
  }
  return report;
}

AxiomReport verify_dater_lemmas(const NetworkKernel& kernel, const RealizedWindow& w) {
  AxiomReport report;
  const std::size_t n = w.size();
  const std::size_t end = n - 1;
  // suffix[k] = Z over positions [k, end]
  std::vector<double> suffix(n);
  for (std::size_t k = 0; k < n; ++k) suffix[k] = kernel.maximal_dater(w.subwindow(k, end));

  auto& lemma1 = report.get("internal_monotonicity");
  for (std::size_t k = 1; k < n; ++k) {
    lemma1.record(leq_tol(suffix[k], suffix[k - 1]), [&] {
      return json{{"window", window_to_json(w)}, {"drop", k}, {"Z_longer", suffix[k - 1]}, {"Z_shorter", suffix[k]}};
    });
  }

  auto& sub = report.get("subadditivity");
  auto& one_step = report.get("one_step_bound");
  const bool zero_last = w.shift() + w.epochs().back() == 0.0;
  for (std::size_t l = 0; l + 1 < n; ++l) {
    const double z_left = kernel.maximal_dater(w.subwindow(0, l));
    sub.record(leq_tol(suffix[0], z_left + suffix[l + 1]), [&] {
      return json{{"window", window_to_json(w)}, {"split", l}, {"Z", suffix[0]}, {"Z_left", z_left},
                  {"Z_right", suffix[l + 1]}};
    });
    if (!zero_last) continue;
    const double bound = suffix[l + 1] + std::max(0.0, z_left - w.gap(l));
    one_step.record(leq_tol(suffix[0], bound), [&] {
      return json{{"window", window_to_json(w)}, {"split", l + 1}, {"Z", suffix[0]}, {"bound", bound}};
    });
  }
  return report;
}

AxiomReport run_axiom_suite(const NetworkKernel& kernel, const AxiomSuiteOptions& opts, std::uint64_t seed,
                            const ParallelOptions& par) {
  if (opts.max_size < 1) throw std::invalid_argument("axiom suite: max_size must be >= 1");
  std::vector<AxiomReport> reports(opts.windows);
  const double a = kernel.arrivals().mean_spacing();
  for_each_index(opts.windows, par, [&](std::size_t i) {
    RngStream aux = RngStream::for_replication(seed, i, Lane::auxiliary);
    const auto size = 1 + static_cast<std::size_t>(aux.uniform() * static_cast<double>(opts.max_size));
    CustomerPool pool(kernel, seed, i);
    RealizedWindow w;
    pool.fill(size - 1, w);

    PerturbationPlan plan;
    plan.shift = std::ldexp(std::floor(aux.uniform() * 4096.0) - 2048.0, -3);
    plan.split = static_cast<std::size_t>(aux.uniform() * static_cast<double>(size));
    for (std::size_t p = 0; p < opts.perturbations; ++p) {
      std::vector<double> raise(size);
      for (auto& r : raise) r = aux.uniform() < 0.5 ? 0.0 : 2.0 * a * aux.uniform();
      plan.raises.push_back(std::move(raise));
    }
    reports[i] = verify_axioms(kernel, w, plan);
    reports[i].merge(verify_dater_lemmas(kernel, w));
  });
  AxiomReport total;
  for (const auto& r : reports) total.merge(r);
  return total;
}

}  // namespace msnet
