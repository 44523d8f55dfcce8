#include "msnet/config.hpp"

#include <cmath>
#include <cstdio>

#include "msnet/models.hpp"

namespace msnet {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ConfigError(where + ": unknown field \"" + item.key() + "\"");
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

std::size_t get_count_or(const json& obj, const char* key, std::size_t fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::size_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1e18) return static_cast<std::size_t>(d);
  }
  throw ConfigError(where + ": field \"" + key + "\" must be a nonnegative integer");
}

namespace {

std::string get_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    throw ConfigError(where + ": field \"" + key + "\" must be a string");
  }
  return obj.at(key).get<std::string>();
}

template <class Fn>
auto wrap(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

HeavyTailDist parse_distribution(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": distribution must be an object");
  const auto family = get_string(j, "family", where);
  return wrap(where, [&] {
    if (family == "pareto") {
      check_keys(j, {"family", "alpha", "xm", "mean", "shift"}, where);
      const double alpha = get_number(j, "alpha", where);
      if (j.contains("mean") && j.contains("shift")) throw ConfigError(where + ": pareto takes shift only with xm");
      if (j.contains("mean") == j.contains("xm")) throw ConfigError(where + ": pareto needs exactly one of xm, mean");
      if (j.contains("mean")) return HeavyTailDist::pareto_with_mean(alpha, get_number(j, "mean", where));
      return HeavyTailDist::pareto(alpha, get_number(j, "xm", where), get_number_or(j, "shift", 0.0, where));
    }
    if (family == "weibull") {
      check_keys(j, {"family", "shape", "scale"}, where);
      return HeavyTailDist::weibull(get_number(j, "shape", where), get_number(j, "scale", where));
    }
    if (family == "lognormal") {
      check_keys(j, {"family", "mu", "sigma"}, where);
      return HeavyTailDist::lognormal(get_number(j, "mu", where), get_number(j, "sigma", where));
    }
    if (family == "exponential") {
      check_keys(j, {"family", "rate", "mean"}, where);
      if (j.contains("mean") == j.contains("rate")) throw ConfigError(where + ": exponential needs exactly one of rate, mean");
      if (j.contains("mean")) return HeavyTailDist::exponential(1.0 / get_number(j, "mean", where));
      return HeavyTailDist::exponential(get_number(j, "rate", where));
    }
    if (family == "deterministic") {
      check_keys(j, {"family", "value"}, where);
      return HeavyTailDist::deterministic(get_number(j, "value", where));
    }
    throw ConfigError(where + ": unknown distribution family \"" + family + "\"");
  });
}

json distribution_to_json(const HeavyTailDist& d) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, Pareto>) {
          json j = {{"family", "pareto"}, {"alpha", p.alpha}, {"xm", p.xm}};
          if (p.shift != 0.0) j["shift"] = p.shift;
          return j;
        }
        if constexpr (std::is_same_v<P, Weibull>) return {{"family", "weibull"}, {"shape", p.shape}, {"scale", p.scale}};
        if constexpr (std::is_same_v<P, Lognormal>) return {{"family", "lognormal"}, {"mu", p.mu}, {"sigma", p.sigma}};
        if constexpr (std::is_same_v<P, Exponential>) return {{"family", "exponential"}, {"rate", p.rate}};
        if constexpr (std::is_same_v<P, Deterministic>) return {{"family", "deterministic"}, {"value", p.value}};
      },
      d.params());
}

ArrivalSpec parse_arrivals(const json& j, const std::string& where) {
  const auto kind = get_string(j, "kind", where);
  if (kind == "deterministic") {
    check_keys(j, {"kind", "spacing"}, where);
    return wrap(where, [&] { return ArrivalSpec::deterministic(get_number(j, "spacing", where)); });
  }
  if (kind == "renewal") {
    check_keys(j, {"kind", "dist"}, where);
    if (!j.contains("dist")) throw ConfigError(where + ": renewal arrivals need \"dist\"");
    return wrap(where, [&] { return ArrivalSpec::renewal(parse_distribution(j.at("dist"), where + ".dist")); });
  }
  throw ConfigError(where + ": unknown arrival kind \"" + kind + "\"");
}

KernelRegistry KernelRegistry::builtin() {
  KernelRegistry reg;
  reg.add("single_server", [](const json& m) -> std::unique_ptr<NetworkKernel> {
    check_keys(m, {"kind", "service", "arrivals"}, "model");
    if (!m.contains("service") || !m.contains("arrivals")) throw ConfigError("model: needs service and arrivals");
    return std::make_unique<SingleServerModel>(parse_distribution(m.at("service"), "model.service"),
                                               parse_arrivals(m.at("arrivals"), "model.arrivals"));
  });
  reg.add("tandem", [](const json& m) -> std::unique_ptr<NetworkKernel> {
    check_keys(m, {"kind", "service1", "service2", "coupling", "arrivals"}, "model");
    if (!m.contains("service1") || !m.contains("service2") || !m.contains("arrivals")) {
      throw ConfigError("model: tandem needs service1, service2 and arrivals");
    }
    auto coupling = ServiceCoupling::independent;
    if (m.contains("coupling")) {
      const auto c = m.at("coupling");
      if (c == "comonotone") {
        coupling = ServiceCoupling::comonotone;
      } else if (c != "independent") {
        throw ConfigError("model.coupling: expected \"independent\" or \"comonotone\"");
      }
    }
    return std::make_unique<TandemModel>(parse_distribution(m.at("service1"), "model.service1"),
                                         parse_distribution(m.at("service2"), "model.service2"),
                                         parse_arrivals(m.at("arrivals"), "model.arrivals"), coupling);
  });
  reg.add("multiserver", [](const json& m) -> std::unique_ptr<NetworkKernel> {
    check_keys(m, {"kind", "servers", "service", "arrivals"}, "model");
    const auto servers = get_count_or(m, "servers", 0, "model");
    if (servers < 1) throw ConfigError("model: multiserver needs servers >= 1");
    if (!m.contains("service") || !m.contains("arrivals")) throw ConfigError("model: needs service and arrivals");
    return std::make_unique<MultiServerModel>(static_cast<int>(servers),
                                              parse_distribution(m.at("service"), "model.service"),
                                              parse_arrivals(m.at("arrivals"), "model.arrivals"));
  });
  reg.add("jackson", [](const json& m) -> std::unique_ptr<NetworkKernel> {
    check_keys(m, {"kind", "services", "routing", "entry", "arrivals", "event_cap"}, "model");
    for (const char* k : {"services", "routing", "entry", "arrivals"}) {
      if (!m.contains(k)) throw ConfigError(std::string("model: jackson needs \"") + k + "\"");
    }
    std::vector<HeavyTailDist> services;
    for (std::size_t i = 0; i < m.at("services").size(); ++i) {
      services.push_back(parse_distribution(m.at("services").at(i), "model.services[" + std::to_string(i) + "]"));
    }
    try {
      auto routing = m.at("routing").get<std::vector<std::vector<double>>>();
      auto entry = m.at("entry").get<std::vector<double>>();
      const auto cap = get_count_or(m, "event_cap", JacksonModel::kDefaultEventCap, "model");
      return std::make_unique<JacksonModel>(std::move(services), std::move(routing), std::move(entry),
                                            parse_arrivals(m.at("arrivals"), "model.arrivals"), cap);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("model: malformed routing or entry: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("model: ") + e.what());
    }
  });
  return reg;
}

void KernelRegistry::add(const std::string& kind, KernelFactory factory) { factories_[kind] = std::move(factory); }

std::unique_ptr<NetworkKernel> KernelRegistry::build(const json& model) const {
  if (!model.is_object() || !model.contains("kind") || !model.at("kind").is_string()) {
    throw ConfigError("model: needs a string field \"kind\"");
  }
  const auto kind = model.at("kind").get<std::string>();
  const auto it = factories_.find(kind);
  if (it == factories_.end()) throw ConfigError("model: unknown kind \"" + kind + "\"");
  return it->second(model);
}

std::string config_hash(const json& doc) {
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json ExperimentConfig::section(const std::string& name) const {
  return doc.contains(name) ? doc.at(name) : json::object();
}

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc, {"model", "seed", "threads", "subcommand", "axioms", "gamma0", "bounds", "tail", "asymptote",
                   "moments", "bigjump", "hcheck", "insensitivity"},
             "config");
  ExperimentConfig cfg;
  cfg.doc = doc;
  cfg.hash = config_hash(doc);
  if (!doc.contains("model")) throw ConfigError("config: missing \"model\"");
  cfg.model = doc.at("model");
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) throw ConfigError("config: seed must be a nonnegative integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("threads")) {
    if (!doc.at("threads").is_number_unsigned()) throw ConfigError("config: threads must be a nonnegative integer");
    cfg.threads = doc.at("threads").get<int>();
  }
  if (doc.contains("subcommand")) {
    if (!doc.at("subcommand").is_string()) throw ConfigError("config: subcommand must be a string");
    cfg.subcommand = doc.at("subcommand").get<std::string>();
  }
  for (const char* s : {"axioms", "gamma0", "bounds", "tail", "asymptote", "moments", "bigjump", "hcheck", "insensitivity"}) {
    if (doc.contains(s) && !doc.at(s).is_object()) throw ConfigError(std::string("config: section \"") + s + "\" must be an object");
  }
  return cfg;
}

}  // namespace msnet
