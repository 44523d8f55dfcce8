#include "msnet/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "msnet/asymptotics.hpp"
#include "msnet/axioms.hpp"
#include "msnet/bounds.hpp"
#include "msnet/estimation.hpp"
#include "msnet/models.hpp"

namespace msnet {

namespace fs = std::filesystem;

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const NetworkKernel& kernel;
  std::uint64_t seed;
  ParallelOptions par;
  fs::path out;
  std::ostream& log;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
  if (!os) throw ConfigError("failed writing " + path.string());
}

json artifact_header(const Context& ctx, const std::string& subcommand) {
  return {{"subcommand", subcommand},
          {"config_hash", ctx.cfg.hash},
          {"seed", ctx.seed},
          {"model", ctx.kernel.name()}};
}

void write_json(const Context& ctx, const std::string& name, const json& body) {
  write_text(ctx.out / (name + ".json"), body.dump(2) + "\n");
}

std::vector<double> parse_grid(const json& sec, const char* key, const std::string& where) {
  if (!sec.contains(key)) throw ConfigError(where + ": missing \"" + key + "\" grid");
  const auto& g = sec.at(key);
  std::vector<double> grid;
  if (g.is_array()) {
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError(where + ": grid entries must be numbers");
      grid.push_back(v.get<double>());
    }
  } else if (g.is_number()) {
    grid.push_back(g.get<double>());
  } else {
    throw ConfigError(where + ": grid must be a number or an array");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError(where + ": grid must be strictly increasing");
  }
  if (grid.empty()) throw ConfigError(where + ": grid is empty");
  return grid;
}

HorizonPolicy parse_horizon(const json& sec, const std::string& where) {
  HorizonPolicy p;
  if (!sec.contains("horizon")) return p;
  const auto& h = sec.at("horizon");
  check_keys(h, {"n0", "n_max"}, where + ".horizon");
  p.n0 = get_count_or(h, "n0", p.n0, where + ".horizon");
  p.n_max = get_count_or(h, "n_max", p.n_max, where + ".horizon");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return p;
}

Quantity parse_quantity(const json& sec, const NetworkKernel& kernel, const std::string& where) {
  if (!sec.contains("quantity")) return Quantity::dater;
  const auto q = sec.at("quantity");
  if (q == "dater") return Quantity::dater;
  if (q == "station2_wait") {
    if (!dynamic_cast<const TandemModel*>(&kernel)) throw ConfigError(where + ": station2_wait needs a tandem model");
    return Quantity::station2_wait;
  }
  throw ConfigError(where + ": quantity must be \"dater\" or \"station2_wait\"");
}

std::pair<double, double> parse_band(const json& sec, const char* key, std::pair<double, double> fallback,
                                     const std::string& where) {
  if (!sec.contains(key)) return fallback;
  const auto& b = sec.at(key);
  if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
    throw ConfigError(where + ": \"" + key + "\" must be [lo, hi]");
  }
  return {b[0].get<double>(), b[1].get<double>()};
}

std::optional<double> pareto_index(const HeavyTailDist& d) {
  if (const auto* p = std::get_if<Pareto>(&d.params())) return p->alpha;
  return std::nullopt;
}

// --- subcommands -------------------------------------------------------------------------

int cmd_axioms(Context& ctx) {
  const auto sec = ctx.cfg.section("axioms");
  check_keys(sec, {"windows", "max_size", "perturbations"}, "axioms");
  AxiomSuiteOptions opts;
  opts.windows = get_count_or(sec, "windows", opts.windows, "axioms");
  opts.max_size = get_count_or(sec, "max_size", opts.max_size, "axioms");
  opts.perturbations = get_count_or(sec, "perturbations", opts.perturbations, "axioms");
  if (opts.max_size < 1) throw ConfigError("axioms: max_size must be >= 1");
  const auto report = run_axiom_suite(ctx.kernel, opts, ctx.seed, ctx.par);
  auto out = artifact_header(ctx, "axioms");
  out["windows"] = opts.windows;
  out["checks"] = report.to_json();
  out["passed"] = report.passed();
  write_json(ctx, "axioms", out);
  std::size_t failed = 0;
  for (const auto& c : report.checks) failed += c.passed() ? 0 : 1;
  ctx.log << "axioms: " << ctx.kernel.name() << ", " << opts.windows << " windows, "
          << (report.passed() ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
  return report.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_gamma0(Context& ctx) {
  const auto sec = ctx.cfg.section("gamma0");
  check_keys(sec, {"n", "replications", "tolerance"}, "gamma0");
  const auto n = get_count_or(sec, "n", 1000, "gamma0");
  const auto reps = get_count_or(sec, "replications", 200, "gamma0");
  if (n < 1 || reps < 2) throw ConfigError("gamma0: need n >= 1 and replications >= 2");
  const auto est = estimate_gamma0(ctx.kernel, n, reps, ctx.seed, ctx.par);
  const double a = ctx.kernel.arrivals().mean_spacing();
  const auto verdict = stability_verdict(a, est);
  const double ref = *est.reference;
  const double rel = ref != 0.0 ? std::abs(est.estimate - ref) / ref : std::abs(est.estimate);
  auto out = artifact_header(ctx, "gamma0");
  out["n"] = n;
  out["replications"] = reps;
  out["gamma0"] = est.estimate;
  out["half_width"] = est.half_width;
  out["ci"] = {est.estimate - est.half_width, est.estimate + est.half_width};
  out["reference"] = ref;
  out["relative_error"] = rel;
  out["load"] = est.estimate / a;
  out["verdict"] = stability_name(verdict);
  int status = kExitOk;
  if (sec.contains("tolerance")) {
    const double tol = get_number(sec, "tolerance", "gamma0");
    out["tolerance"] = tol;
    out["within_tolerance"] = rel <= tol;
    if (rel > tol) status = kExitCheckFailed;
  }
  write_json(ctx, "gamma0", out);
  ctx.log << "gamma0: estimate " << short_num(est.estimate) << " +/- " << short_num(est.half_width) << ", reference "
          << short_num(ref) << ", " << stability_name(verdict) << "\n";
  return status;
}

int cmd_bounds(Context& ctx) {
  const auto sec = ctx.cfg.section("bounds");
  check_keys(sec, {"L", "delta", "blocks", "realizations", "multipliers"}, "bounds");
  const double delta = get_number_or(sec, "delta", 0.1, "bounds");
  const auto blocks = get_count_or(sec, "blocks", 16, "bounds");
  const auto reals = get_count_or(sec, "realizations", 10000, "bounds");
  std::vector<std::size_t> mult{1, 2};
  if (sec.contains("multipliers")) {
    mult.clear();
    for (const auto& m : sec.at("multipliers")) {
      if (!m.is_number_unsigned() || m.get<std::size_t>() < 1) throw ConfigError("bounds: multipliers must be positive integers");
      mult.push_back(m.get<std::size_t>());
    }
  }
  auto out = artifact_header(ctx, "bounds");
  std::size_t L = 0;
  const bool automatic = !sec.contains("L") || sec.at("L") == "auto";
  if (automatic) {
    const auto sel = select_L(ctx.kernel, delta, ctx.seed, ctx.par);
    L = sel.L;
    out["selection"] = {{"L", sel.L}, {"mean", sel.mean}, {"std_error", sel.std_error}, {"target", sel.target},
                        {"delta", delta}};
  } else {
    L = get_count_or(sec, "L", 0, "bounds");
    if (L < 1) throw ConfigError("bounds: L must be \"auto\" or a positive integer");
  }
  out["L"] = L;
  out["L_auto"] = automatic;
  json runs = json::array();
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t m : mult) {
    const auto rep = sandwich_suite(ctx.kernel, m * L, blocks, reals, ctx.seed, ctx.par);
    auto j = rep.to_json();
    j["L"] = m * L;
    runs.push_back(j);
    violations += rep.violations + rep.block_violations + rep.fastpath_mismatches;
    worst = std::min({worst, rep.worst_upper_margin, ctx.kernel.has_aa() ? rep.worst_lower_margin : worst});
  }
  out["runs"] = runs;
  out["violations"] = violations;
  out["worst_margin"] = worst;
  write_json(ctx, "bounds", out);
  ctx.log << "bounds: L=" << L << (automatic ? " (auto)" : "") << ", " << reals << " realizations per L, " << violations
          << " violations\n";
  return violations == 0 ? kExitOk : kExitCheckFailed;
}

AsymptoteFormula formula_for(const Context& ctx, const json& sec, Quantity q, const std::string& where) {
  const json spec = sec.contains("asymptote") ? sec.at("asymptote") : json("none");
  if (spec == "none") return {};
  if (spec == "auto") {
    try {
      return derive_asymptote(ctx.kernel, q);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return parse_asymptote(spec, where + ".asymptote");
}

int cmd_tail(Context& ctx) {
  const auto sec = ctx.cfg.section("tail");
  check_keys(sec, {"x", "replications", "horizon", "quantity", "asymptote", "ratio_band", "min_exceedances"}, "tail");
  const auto grid = parse_grid(sec, "x", "tail");
  const auto reps = get_count_or(sec, "replications", 100000, "tail");
  if (reps < 1) throw ConfigError("tail: replications must be >= 1");
  const auto policy = parse_horizon(sec, "tail");
  const auto q = parse_quantity(sec, ctx.kernel, "tail");
  const auto formula = formula_for(ctx, sec, q, "tail");
  const auto est = estimate_tail(ctx.kernel, grid, reps, policy, ctx.seed, ctx.par, formula.value, q);

  std::ostringstream csv;
  csv << "x,p_hat,ci_lo,ci_hi,formula,ratio,censor_frac\n";
  for (const auto& l : est.levels) {
    csv << fmt(l.x) << ',' << fmt(l.p_hat) << ',' << fmt(l.ci_lo) << ',' << fmt(l.ci_hi) << ','
        << (l.formula ? fmt(*l.formula) : "") << ',' << (l.ratio ? fmt(*l.ratio) : "") << ','
        << fmt(est.censor_fraction) << '\n';
  }
  write_text(ctx.out / "tail.csv", csv.str());

  auto out = artifact_header(ctx, "tail");
  out["quantity"] = q == Quantity::dater ? "dater" : "station2_wait";
  out["horizon"] = {{"n0", policy.n0}, {"n_max", policy.n_max}};
  out["estimate"] = tail_to_json(est);
  if (formula.value) {
    out["asymptote"] = formula.description;
    out["certified"] = formula.certified;
  }
  int status = kExitOk;
  const auto min_exc = get_count_or(sec, "min_exceedances", 30, "tail");
  std::optional<std::size_t> deepest;
  for (std::size_t i = 0; i < est.levels.size(); ++i) {
    if (est.levels[i].exceedances >= min_exc && est.levels[i].ratio) deepest = i;
  }
  if (sec.contains("ratio_band")) {
    if (!formula.value) throw ConfigError("tail: ratio_band needs an asymptote");
    const auto band = parse_band(sec, "ratio_band", {0, 0}, "tail");
    const bool ok = deepest && *est.levels[*deepest].ratio >= band.first && *est.levels[*deepest].ratio <= band.second;
    out["ratio_band"] = {band.first, band.second};
    out["ratio_check_passed"] = ok;
    if (!ok) status = kExitCheckFailed;
  }
  if (deepest) out["deepest_level"] = *deepest;
  write_json(ctx, "tail", out);
  ctx.log << "tail: " << est.levels.size() << " levels, " << reps << " replications, censor_frac "
          << short_num(est.censor_fraction);
  if (deepest) {
    ctx.log << ", ratio " << short_num(*est.levels[*deepest].ratio) << " at x=" << short_num(est.levels[*deepest].x);
  }
  ctx.log << "\n";
  return status;
}

int cmd_asymptote(Context& ctx) {
  const auto sec = ctx.cfg.section("asymptote");
  check_keys(sec, {"x", "formula", "quantity"}, "asymptote");
  const auto grid = parse_grid(sec, "x", "asymptote");
  const auto q = parse_quantity(sec, ctx.kernel, "asymptote");
  json wrapped = {{"asymptote", sec.contains("formula") ? sec.at("formula") : json("auto")}};
  const auto formula = formula_for(ctx, wrapped, q, "asymptote");
  if (!formula.value) throw ConfigError("asymptote: formula must not be \"none\"");
  std::ostringstream csv;
  csv << "x,formula_value,certified_flag\n";
  json values = json::array();
  for (double x : grid) {
    const double v = formula.value(x);
    csv << fmt(x) << ',' << fmt(v) << ',' << (formula.certified ? 1 : 0) << '\n';
    values.push_back({{"x", x}, {"formula_value", v}});
  }
  write_text(ctx.out / "asymptote.csv", csv.str());
  auto out = artifact_header(ctx, "asymptote");
  out["formula"] = formula.description;
  out["certified"] = formula.certified;
  out["values"] = values;
  write_json(ctx, "asymptote", out);
  ctx.log << "asymptote: " << formula.description.value("kind", std::string("formula")) << ", " << grid.size()
          << " levels, certified=" << (formula.certified ? "yes" : "no") << "\n";
  return kExitOk;
}

std::optional<double> heaviest_pareto_index(const NetworkKernel& k) {
  std::vector<HeavyTailDist> services;
  if (const auto* s = dynamic_cast<const SingleServerModel*>(&k)) services = {s->service()};
  if (const auto* t = dynamic_cast<const TandemModel*>(&k)) services = {t->first(), t->second()};
  if (const auto* m = dynamic_cast<const MultiServerModel*>(&k)) services = {m->service()};
  if (const auto* j = dynamic_cast<const JacksonModel*>(&k)) services = j->services();
  std::optional<double> best;
  for (const auto& d : services) {
    if (auto a = pareto_index(d)) best = best ? std::min(*best, *a) : *a;
  }
  return best;
}

int cmd_moments(Context& ctx) {
  const auto sec = ctx.cfg.section("moments");
  check_keys(sec, {"samples", "k", "service_index", "horizon", "band"}, "moments");
  const auto samples = get_count_or(sec, "samples", 1000000, "moments");
  const auto k = get_count_or(sec, "k", 1000, "moments");
  const auto policy = parse_horizon(sec, "moments");
  std::optional<double> index;
  if (sec.contains("service_index") && sec.at("service_index") != "auto") {
    index = get_number(sec, "service_index", "moments");
  } else {
    index = heaviest_pareto_index(ctx.kernel);
  }
  const double service_index = index.value_or(std::numeric_limits<double>::quiet_NaN());
  MomentReport rep;
  try {
    rep = moment_order_check(ctx.kernel, service_index, samples, k, policy, ctx.seed, ctx.par);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("moments: ") + e.what());
  }
  auto out = artifact_header(ctx, "moments");
  out["report"] = rep.to_json();
  bool ok = rep.heavy_tailed;
  if (index) {
    const auto band = parse_band(sec, "band", {rep.target - 0.3, rep.target + 0.3}, "moments");
    out["band"] = {band.first, band.second};
    ok = ok && rep.hill.index >= band.first && rep.hill.index <= band.second;
  } else {
    ok = false;
  }
  out["passed"] = ok;
  write_json(ctx, "moments", out);
  ctx.log << "moments: Hill index " << short_num(rep.hill.index) << " (se " << short_num(rep.hill.std_error)
          << "), target " << (index ? short_num(rep.target) : std::string("n/a"))
          << (rep.heavy_tailed ? "" : ", not heavy-tailed") << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_bigjump(Context& ctx) {
  const auto sec = ctx.cfg.section("bigjump");
  check_keys(sec, {"x", "theta", "target", "budget", "horizon", "check_theta", "min_one", "max_two_plus"}, "bigjump");
  const double x = get_number(sec, "x", "bigjump");
  std::vector<double> thetas{0.1, 0.25, 0.5};
  if (sec.contains("theta")) thetas = parse_grid(sec, "theta", "bigjump");
  const auto target = get_count_or(sec, "target", 1000, "bigjump");
  const auto budget = get_count_or(sec, "budget", 1000000, "bigjump");
  const auto policy = parse_horizon(sec, "bigjump");
  const double check_theta = get_number_or(sec, "check_theta", 0.25, "bigjump");
  const double min_one = get_number_or(sec, "min_one", 0.8, "bigjump");
  const double max_two = get_number_or(sec, "max_two_plus", 0.1, "bigjump");
  const auto rep = big_jump_diagnostic(ctx.kernel, x, thetas, target, budget, policy, ctx.seed, ctx.par);
  auto out = artifact_header(ctx, "bigjump");
  out["report"] = rep.to_json();
  bool ok = !rep.starved && rep.conditioned > 0;
  bool found = false;
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    if (thetas[t] != check_theta) continue;
    found = true;
    ok = ok && rep.frac_one[t] >= min_one && rep.frac_two_plus[t] <= max_two;
    ctx.log << "bigjump: " << rep.conditioned << " conditioned paths, theta " << short_num(thetas[t])
            << ": one jump " << short_num(rep.frac_one[t]) << ", two or more " << short_num(rep.frac_two_plus[t])
            << (rep.starved ? ", conditioning starved" : "") << "\n";
  }
  if (!found) throw ConfigError("bigjump: check_theta must be one of the thetas");
  out["check"] = {{"theta", check_theta}, {"min_one", min_one}, {"max_two_plus", max_two}, {"passed", ok}};
  write_json(ctx, "bigjump", out);
  return ok ? kExitOk : kExitCheckFailed;
}

ComponentSampler parse_vector(const json& v, const NetworkKernel& kernel) {
  check_keys(v, {"kind", "components", "component", "copies"}, "hcheck.vector");
  const auto kind = v.value("kind", std::string());
  if (kind == "independent") {
    if (!v.contains("components") || !v.at("components").is_array() || v.at("components").empty()) {
      throw ConfigError("hcheck.vector: independent needs a nonempty \"components\" array");
    }
    std::vector<HeavyTailDist> comps;
    for (const auto& c : v.at("components")) comps.push_back(parse_distribution(c, "hcheck.vector.components"));
    return [comps](RngStream& rng, std::vector<double>& y) {
      y.resize(comps.size());
      for (std::size_t j = 0; j < comps.size(); ++j) y[j] = comps[j].sample(rng);
    };
  }
  if (kind == "comonotone") {
    if (!v.contains("component")) throw ConfigError("hcheck.vector: comonotone needs \"component\"");
    const auto comp = parse_distribution(v.at("component"), "hcheck.vector.component");
    const auto copies = get_count_or(v, "copies", 2, "hcheck.vector");
    if (copies < 1) throw ConfigError("hcheck.vector: copies must be >= 1");
    return [comp, copies](RngStream& rng, std::vector<double>& y) { y.assign(copies, comp.sample(rng)); };
  }
  if (kind == "model") {
    if (!kernel.has_aa()) throw ConfigError("hcheck.vector: the model has no (AA) decomposition");
    return [&kernel](RngStream& rng, std::vector<double>& y) {
      std::vector<Visit> visits;
      kernel.sample_customer(rng, visits);
      y.assign(static_cast<std::size_t>(kernel.stations()), 0.0);
      for (const auto& vis : visits) y[static_cast<std::size_t>(vis.station)] += vis.work;
    };
  }
  throw ConfigError("hcheck.vector: kind must be independent, comonotone or model");
}

int cmd_hcheck(Context& ctx) {
  const auto sec = ctx.cfg.section("hcheck");
  check_keys(sec, {"vector", "x", "samples", "min_exceedances", "expect"}, "hcheck");
  if (!sec.contains("vector")) throw ConfigError("hcheck: missing \"vector\"");
  const auto sampler = parse_vector(sec.at("vector"), ctx.kernel);
  const auto grid = parse_grid(sec, "x", "hcheck");
  const auto samples = get_count_or(sec, "samples", 1000000, "hcheck");
  if (samples < 100000) throw ConfigError("hcheck: need at least 1e5 samples");
  const auto min_exc = get_count_or(sec, "min_exceedances", 100, "hcheck");
  const std::string expect = sec.value("expect", std::string("consistent"));
  if (expect != "consistent" && expect != "inconsistent") {
    throw ConfigError("hcheck: expect must be \"consistent\" or \"inconsistent\"");
  }
  const auto rep = check_assumption_H(sampler, grid, samples, ctx.seed, ctx.par, min_exc);
  auto out = artifact_header(ctx, "hcheck");
  out["report"] = rep.to_json();
  const bool ok = rep.consistent == (expect == "consistent") && !(rep.grid_shrunk && rep.levels.size() == 0);
  out["expect"] = expect;
  out["passed"] = ok;
  write_json(ctx, "hcheck", out);
  const auto& d = rep.levels[rep.deepest];
  ctx.log << "hcheck: " << (rep.consistent ? "consistent with (H)" : "not consistent with (H)") << " at x="
          << short_num(d.x) << ", max/marginals " << short_num(d.max_over_marginals.value) << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_insensitivity(Context& ctx) {
  const auto sec = ctx.cfg.section("insensitivity");
  check_keys(sec, {"a", "a_renewal", "x", "replications", "horizon", "min_exceedances"}, "insensitivity");
  const double a = get_number_or(sec, "a", ctx.kernel.arrivals().mean_spacing(), "insensitivity");
  const double a_ren = get_number_or(sec, "a_renewal", a, "insensitivity");
  if (!(a > 0.0 && a_ren > 0.0)) throw ConfigError("insensitivity: spacings must be positive");
  const auto grid = parse_grid(sec, "x", "insensitivity");
  const auto reps = get_count_or(sec, "replications", 100000, "insensitivity");
  const auto policy = parse_horizon(sec, "insensitivity");
  const auto min_exc = get_count_or(sec, "min_exceedances", 30, "insensitivity");
  const auto rep = interarrival_insensitivity_check(ctx.kernel, a, a_ren, grid, reps, policy, ctx.seed, ctx.par, min_exc);
  auto out = artifact_header(ctx, "insensitivity");
  out["report"] = rep.to_json();
  const bool ok = !rep.parameter_mismatch && rep.deepest && rep.deepest_contains_one;
  out["passed"] = ok;
  write_json(ctx, "insensitivity", out);
  ctx.log << "insensitivity: ";
  if (rep.deepest) {
    const auto& l = rep.levels[*rep.deepest];
    ctx.log << "ratio " << short_num(l.ratio.value) << " [" << short_num(l.ratio.lo) << ", " << short_num(l.ratio.hi)
            << "] at x=" << short_num(l.x);
  } else {
    ctx.log << "no mutually resolvable level";
  }
  ctx.log << (rep.parameter_mismatch ? ", parameter mismatch" : "") << "\n";
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

// --- formulas ------------------------------------------------------------------------------

AsymptoteFormula parse_asymptote(const json& spec, const std::string& where) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string()) {
    throw ConfigError(where + ": needs a string field \"kind\"");
  }
  const auto kind = spec.at("kind").get<std::string>();
  auto ref_of = [&](const json& s) {
    if (!s.contains("reference")) throw ConfigError(where + ": missing \"reference\" distribution");
    return parse_distribution(s.at("reference"), where + ".reference");
  };
  auto vec = [&](const char* key) {
    if (!spec.contains(key) || !spec.at(key).is_array()) throw ConfigError(where + ": \"" + key + "\" must be an array");
    return spec.at(key).get<std::vector<double>>();
  };
  AsymptoteFormula f;
  f.description = spec;
  try {
    if (kind == "veraverbeke") {
      check_keys(spec, {"kind", "d", "a", "b", "reference"}, where);
      const double d = get_number(spec, "d", where), a = get_number(spec, "a", where), b = get_number(spec, "b", where);
      const auto F = ref_of(spec);
      veraverbeke(d, a, b, F, 0.0);
      f.value = [=](double x) { return veraverbeke(d, a, b, F, x); };
      f.certified = is_subexponential_family(F).fs_subexponential == Flag::yes;
    } else if (kind == "network_upper") {
      check_keys(spec, {"kind", "d", "a", "gamma0", "reference"}, where);
      const double c = network_upper_const(get_number(spec, "d", where), get_number(spec, "a", where),
                                           get_number(spec, "gamma0", where));
      const auto F = ref_of(spec);
      f.value = [=](double x) { return c * F.integrated_tail(x); };
      f.certified = is_subexponential_family(F).fs_subexponential == Flag::yes;
    } else if (kind == "network_lower") {
      check_keys(spec, {"kind", "d", "a", "b", "reference"}, where);
      const double c = network_lower_const(vec("d"), get_number(spec, "a", where), vec("b"));
      const auto F = ref_of(spec);
      f.value = [=](double x) { return c * F.integrated_tail(x); };
      f.certified = is_subexponential_family(F).fs_subexponential == Flag::yes;
    } else if (kind == "tandem_exact") {
      check_keys(spec, {"kind", "d1", "d2", "a", "b1", "b2", "reference"}, where);
      const double d1 = get_number(spec, "d1", where), d2 = get_number(spec, "d2", where);
      const double a = get_number(spec, "a", where), b1 = get_number(spec, "b1", where), b2 = get_number(spec, "b2", where);
      const auto F = ref_of(spec);
      tandem_exact_const(d1, d2, a, b1, b2);
      f.value = [=](double x) { return tandem_exact(d1, d2, a, b1, b2, F, x); };
      f.certified = is_subexponential_family(F).fs_subexponential == Flag::yes;
    } else if (kind == "tandem_w2") {
      check_keys(spec, {"kind", "d1", "d2", "a", "b1", "b2", "var1", "var2", "independent", "reference"}, where);
      TandemW2Params p;
      p.d1 = get_number(spec, "d1", where);
      p.d2 = get_number(spec, "d2", where);
      p.a = get_number(spec, "a", where);
      p.b1 = get_number(spec, "b1", where);
      p.b2 = get_number(spec, "b2", where);
      p.var1 = get_number_or(spec, "var1", 0.0, where);
      p.var2 = get_number_or(spec, "var2", 0.0, where);
      p.independent = spec.value("independent", true);
      const auto F = ref_of(spec);
      f.certified = tandem_w2(p, F, 1.0).certified;
      f.value = [=](double x) { return tandem_w2(p, F, x).value; };
    } else if (kind == "multiserver") {
      check_keys(spec, {"kind", "a", "b", "m", "reference"}, where);
      const double a = get_number(spec, "a", where), b = get_number(spec, "b", where);
      const int m = static_cast<int>(get_count_or(spec, "m", 0, where));
      const auto F = ref_of(spec);
      multiserver_exact(a, b, m, F, 0.0);
      f.value = [=](double x) { return multiserver_exact(a, b, m, F, x); };
      f.certified = is_subexponential_family(F).fs_subexponential == Flag::yes;
    } else {
      throw ConfigError(where + ": unknown formula kind \"" + kind + "\"");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return f;
}

AsymptoteFormula derive_asymptote(const NetworkKernel& kernel, Quantity q) {
  const double a = kernel.arrivals().mean_spacing();
  json spec;
  if (const auto* s = dynamic_cast<const SingleServerModel*>(&kernel)) {
    spec = {{"kind", "veraverbeke"}, {"d", 1.0}, {"a", a}, {"b", s->service().mean()},
            {"reference", distribution_to_json(s->service())}};
  } else if (const auto* t = dynamic_cast<const TandemModel*>(&kernel)) {
    // Reference law: station 2 for its waiting time, station 1 otherwise;
    // fall back to the other station when the pair is not comparable.
    const HeavyTailDist* ref = q == Quantity::station2_wait ? &t->second() : &t->first();
    auto d1 = tail_equivalence_constant(t->first(), *ref);
    auto d2 = tail_equivalence_constant(t->second(), *ref);
    if (!d1 || !d2) {
      ref = ref == &t->first() ? &t->second() : &t->first();
      d1 = tail_equivalence_constant(t->first(), *ref);
      d2 = tail_equivalence_constant(t->second(), *ref);
    }
    if (!d1 || !d2) throw std::invalid_argument("tandem services have no common reference tail");
    if (q == Quantity::station2_wait) {
      spec = {{"kind", "tandem_w2"}, {"d1", *d1}, {"d2", *d2}, {"a", a}, {"b1", t->first().mean()},
              {"b2", t->second().mean()}, {"var1", t->first().variance()}, {"var2", t->second().variance()},
              {"independent", t->coupling() == ServiceCoupling::independent},
              {"reference", distribution_to_json(*ref)}};
      if (!std::isfinite(t->first().variance())) spec.erase("var1");
      if (!std::isfinite(t->second().variance())) spec.erase("var2");
    } else {
      spec = {{"kind", "tandem_exact"}, {"d1", *d1}, {"d2", *d2}, {"a", a}, {"b1", t->first().mean()},
              {"b2", t->second().mean()}, {"reference", distribution_to_json(*ref)}};
    }
  } else if (const auto* m = dynamic_cast<const MultiServerModel*>(&kernel)) {
    if (!kernel.arrivals().is_deterministic()) {
      throw std::invalid_argument("the multiserver formula is stated for deterministic interarrivals");
    }
    spec = {{"kind", "multiserver"}, {"a", a}, {"b", m->service().mean()}, {"m", m->servers()},
            {"reference", distribution_to_json(m->service())}};
  } else {
    throw std::invalid_argument("no closed-form asymptote for model " + kernel.name());
  }
  return parse_asymptote(spec, "asymptote");
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"axioms",  "gamma0",  "bounds", "tail",         "asymptote",
                                              "moments", "bigjump", "hcheck", "insensitivity"};
  return names;
}

int run(const json& config, const RunOptions& opts, const KernelRegistry& registry) {
  std::ostream& log = opts.log ? *opts.log : std::cout;
  std::ostream& err = opts.errors ? *opts.errors : std::cerr;
  try {
    const auto cfg = parse_config(config);
    const auto sub = opts.subcommand ? opts.subcommand : cfg.subcommand;
    if (!sub) throw ConfigError("no subcommand given (flag --subcommand or config field \"subcommand\")");
    const auto& names = subcommand_names();
    if (std::find(names.begin(), names.end(), *sub) == names.end()) throw ConfigError("unknown subcommand \"" + *sub + "\"");
    const auto kernel = registry.build(cfg.model);
    const int threads = opts.threads ? *opts.threads : cfg.threads;
    if (threads < 0) throw ConfigError("threads must be >= 0");
    fs::path out(opts.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
    Context ctx{cfg, *kernel, opts.seed.value_or(cfg.seed), ParallelOptions{threads, false}, out, log};
    if (*sub == "axioms") return cmd_axioms(ctx);
    if (*sub == "gamma0") return cmd_gamma0(ctx);
    if (*sub == "bounds") return cmd_bounds(ctx);
    if (*sub == "tail") return cmd_tail(ctx);
    if (*sub == "asymptote") return cmd_asymptote(ctx);
    if (*sub == "moments") return cmd_moments(ctx);
    if (*sub == "bigjump") return cmd_bigjump(ctx);
    if (*sub == "hcheck") return cmd_hcheck(ctx);
    return cmd_insensitivity(ctx);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "error: malformed configuration: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitConfigError;
}

int run_file(const std::string& path, const RunOptions& opts, const KernelRegistry& registry) {
  std::ifstream is(path);
  if (!is) {
    (opts.errors ? *opts.errors : std::cerr) << "error: cannot read config " << path << "\n";
    return kExitConfigError;
  }
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::exception& e) {
    (opts.errors ? *opts.errors : std::cerr) << "error: config " << path << " is not valid JSON: " << e.what() << "\n";
    return kExitConfigError;
  }
  return run(doc, opts, registry);
}

}  // namespace msnet
