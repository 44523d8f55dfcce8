#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msnet/config.hpp"
#include "msnet/distributions.hpp"
#include "msnet/kernel.hpp"
#include "msnet/stationary.hpp"

namespace msnet {

enum ExitStatus : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

struct RunOptions {
  std::optional<std::string> subcommand;  // overrides the config's
  std::optional<std::uint64_t> seed;      // overrides the config's
  std::optional<int> threads;
  std::string out_dir = ".";
  std::ostream* log = nullptr;    // one summary line per subcommand; std::cout when null
  std::ostream* errors = nullptr; // std::cerr when null
};

/// Tail formula with its certification flag.
struct AsymptoteFormula {
  std::function<double(double)> value;
  bool certified = true;
  json description;
};

/// Explicit formula, e.g. {"kind":"veraverbeke","d":1,"a":1,"b":0.5,"reference":{...}}.
AsymptoteFormula parse_asymptote(const json& spec, const std::string& where);
/// Formula implied by the model for the requested quantity.
AsymptoteFormula derive_asymptote(const NetworkKernel& kernel, Quantity q);

const std::vector<std::string>& subcommand_names();

/// Loads, validates, dispatches and writes artifacts under out_dir.
int run(const json& config, const RunOptions& opts, const KernelRegistry& registry = KernelRegistry::builtin());
int run_file(const std::string& path, const RunOptions& opts,
             const KernelRegistry& registry = KernelRegistry::builtin());

}  // namespace msnet
