#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "msnet/arrivals.hpp"
#include "msnet/distributions.hpp"
#include "msnet/kernel.hpp"

namespace msnet {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError when `obj` is not an object or has a key outside `allowed`.
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where);

double get_number(const json& obj, const char* key, const std::string& where);
double get_number_or(const json& obj, const char* key, double fallback, const std::string& where);
std::size_t get_count_or(const json& obj, const char* key, std::size_t fallback, const std::string& where);

/// {"family":"pareto","alpha":2.5,"xm":1.0}, {"family":"weibull","shape","scale"},
/// {"family":"lognormal","mu","sigma"}, {"family":"exponential","rate"},
/// {"family":"deterministic","value"}.
HeavyTailDist parse_distribution(const json& j, const std::string& where);
json distribution_to_json(const HeavyTailDist& d);

/// {"kind":"deterministic","spacing":a} or {"kind":"renewal","dist":{...}}.
ArrivalSpec parse_arrivals(const json& j, const std::string& where);

using KernelFactory = std::function<std::unique_ptr<NetworkKernel>(const json& model)>;

/// Maps model "kind" names to factories. The built-in set covers the four
/// shipped models; callers may register more.
class KernelRegistry {
 public:
  static KernelRegistry builtin();

  void add(const std::string& kind, KernelFactory factory);
  std::unique_ptr<NetworkKernel> build(const json& model) const;
  bool has(const std::string& kind) const { return factories_.count(kind) > 0; }

 private:
  std::map<std::string, KernelFactory> factories_;
};

/// 64-bit FNV-1a of the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const json& doc);

struct ExperimentConfig {
  json doc;
  json model;
  std::uint64_t seed = 1;
  int threads = 0;
  std::optional<std::string> subcommand;
  std::string hash;

  /// Section for a subcommand; an empty object when absent.
  json section(const std::string& name) const;
};

/// Validates the top level: model, seed, threads, subcommand and one optional
/// section per subcommand. Section contents are validated by the subcommand.
ExperimentConfig parse_config(const json& doc);

}  // namespace msnet
