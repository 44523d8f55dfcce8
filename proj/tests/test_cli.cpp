#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "msnet/experiment.hpp"

using namespace msnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("msnet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json single_server_config() {
  return json::parse(R"({
    "model": {"kind": "single_server",
              "service": {"family": "pareto", "alpha": 2.5, "mean": 0.5},
              "arrivals": {"kind": "deterministic", "spacing": 1.0}},
    "seed": 99,
    "tail": {"x": [0.5, 1, 2, 4], "replications": 3000, "asymptote": "auto"},
    "asymptote": {"x": [1, 2, 4]},
    "axioms": {"windows": 30}
  })");
}

struct Outcome {
  int code;
  std::string log;
  std::string errors;
};

Outcome run_in(const json& cfg, const fs::path& out, const std::string& sub,
               const KernelRegistry& reg = KernelRegistry::builtin(), std::optional<int> threads = std::nullopt) {
  std::ostringstream log, err;
  RunOptions opts;
  opts.subcommand = sub;
  opts.out_dir = out.string();
  opts.log = &log;
  opts.errors = &err;
  opts.threads = threads;
  const int code = run(cfg, opts, reg);
  return {code, log.str(), err.str()};
}

int exec_cli(const std::string& args) {
  const std::string cmd = std::string(MSNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("tail writes the CSV contract and a JSON report") {
  const auto dir = scratch_dir("tail");
  const auto r = run_in(single_server_config(), dir, "tail");
  REQUIRE(r.code == kExitOk);
  CHECK(r.log.rfind("tail:", 0) == 0);
  CHECK(std::count(r.log.begin(), r.log.end(), '\n') == 1);
  const auto csv = slurp(dir / "tail.csv");
  CHECK(csv.rfind("x,p_hat,ci_lo,ci_hi,formula,ratio,censor_frac\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const auto j = json::parse(slurp(dir / "tail.json"));
  CHECK(j["seed"] == 99);
  CHECK(j["config_hash"] == config_hash(single_server_config()));
  CHECK(j["config_hash"].get<std::string>().size() == 16);
  CHECK(j["asymptote"]["kind"] == "veraverbeke");
}

TEST_CASE("artifacts are byte-identical across runs and thread counts") {
  const auto a = scratch_dir("repro_a"), b = scratch_dir("repro_b");
  REQUIRE(run_in(single_server_config(), a, "tail", KernelRegistry::builtin(), 1).code == kExitOk);
  REQUIRE(run_in(single_server_config(), b, "tail", KernelRegistry::builtin(), 4).code == kExitOk);
  CHECK(slurp(a / "tail.csv") == slurp(b / "tail.csv"));
  CHECK(slurp(a / "tail.json") == slurp(b / "tail.json"));
}

TEST_CASE("asymptote CSV") {
  const auto dir = scratch_dir("asym");
  REQUIRE(run_in(single_server_config(), dir, "asymptote").code == kExitOk);
  const auto csv = slurp(dir / "asymptote.csv");
  CHECK(csv.rfind("x,formula_value,certified_flag\n", 0) == 0);
  const auto j = json::parse(slurp(dir / "asymptote.json"));
  const auto F = HeavyTailDist::pareto_with_mean(2.5, 0.5);
  CHECK(j["values"][1]["formula_value"].get<double>() == doctest::Approx(F.integrated_tail(2.0) / 0.5));
}

TEST_CASE("broken homogeneity exits with a check failure and a counterexample") {
  auto reg = KernelRegistry::builtin();
  reg.add("broken_homogeneity", [](const json&) { return std::make_unique<fixtures::BrokenHomogeneity>(); });
  auto cfg = single_server_config();
  cfg["model"] = {{"kind", "broken_homogeneity"}};
  const auto dir = scratch_dir("broken");
  const auto r = run_in(cfg, dir, "axioms", reg);
  CHECK(r.code == kExitCheckFailed);
  const auto j = json::parse(slurp(dir / "axioms.json"));
  CHECK(j["passed"] == false);
  CHECK(j["checks"]["homogeneity"]["failed"].get<int>() > 0);
  CHECK(j["checks"]["homogeneity"].contains("counterexample"));
  CHECK(run_in(single_server_config(), dir, "axioms").code == kExitOk);
}

TEST_CASE("gamma0 on the deterministic tandem fixture") {
  const auto cfg = json::parse(R"({
    "model": {"kind": "tandem",
              "service1": {"family": "deterministic", "value": 2.0},
              "service2": {"family": "deterministic", "value": 1.0},
              "arrivals": {"kind": "deterministic", "spacing": 1.0}},
    "gamma0": {"n": 100, "replications": 20}
  })");
  const auto dir = scratch_dir("gamma0");
  REQUIRE(run_in(cfg, dir, "gamma0").code == kExitOk);
  const auto j = json::parse(slurp(dir / "gamma0.json"));
  CHECK(j["reference"] == 2.0);
  CHECK(std::abs(j["gamma0"].get<double>() - 2.0) <= 0.1);
  CHECK(j["verdict"] == "unstable");
}

TEST_CASE("configuration errors exit with status 2") {
  const auto dir = scratch_dir("errors");
  auto cfg = single_server_config();
  cfg["bogus"] = 1;
  CHECK(run_in(cfg, dir, "tail").code == kExitConfigError);

  cfg = single_server_config();
  cfg.erase("model");
  CHECK(run_in(cfg, dir, "tail").code == kExitConfigError);

  CHECK(run_in(single_server_config(), dir, "nonsense").code == kExitConfigError);

  cfg = single_server_config();
  cfg["model"]["service"] = {{"family", "pareto"}, {"alpha", 0.9}, {"xm", 1.0}};
  const auto r = run_in(cfg, dir, "tail");
  CHECK(r.code == kExitConfigError);
  CHECK(r.errors.find("model.service") != std::string::npos);

  cfg = single_server_config();
  cfg["tail"]["x"] = {2, 1};
  CHECK(run_in(cfg, dir, "tail").code == kExitConfigError);

  cfg = single_server_config();
  cfg["tail"]["extra"] = true;
  CHECK(run_in(cfg, dir, "tail").code == kExitConfigError);

  cfg = single_server_config();
  cfg["model"] = json::parse(R"({"kind": "jackson", "services": [{"family": "exponential", "rate": 1}],
                                 "routing": [[1.0, 0.0]], "entry": [1.0],
                                 "arrivals": {"kind": "deterministic", "spacing": 1.0}})");
  CHECK(run_in(cfg, dir, "axioms").code == kExitConfigError);
  cfg["model"]["routing"] = {{0.5, 0.5}};
  CHECK(run_in(cfg, dir, "tail").code == kExitConfigError);  // no closed form for "auto"

  std::ostringstream err;
  RunOptions opts;
  opts.errors = &err;
  CHECK(run_file("/nonexistent/config.json", opts) == kExitConfigError);
}

TEST_CASE("explicit and derived formulas") {
  const auto F = HeavyTailDist::pareto(2.5, 1.0);
  const auto f = parse_asymptote(json::parse(R"({"kind": "tandem_exact", "d1": 1, "d2": 1, "a": 1, "b1": 0.5,
      "b2": 0.25, "reference": {"family": "pareto", "alpha": 2.5, "xm": 1}})"),
                                 "test");
  CHECK(f.value(4.0) == doctest::Approx(10.0 / 3.0 * F.integrated_tail(4.0)));
  CHECK(f.certified);
  CHECK_THROWS_AS(parse_asymptote(json::parse(R"({"kind": "veraverbeke", "d": 1, "a": 1, "b": 2,
      "reference": {"family": "pareto", "alpha": 2.5, "xm": 1}})"),
                                  "test"),
                  ConfigError);
  CHECK_THROWS_AS(parse_asymptote(json::parse(R"({"kind": "nope"})"), "test"), ConfigError);

  const TandemModel tandem(HeavyTailDist::pareto_with_mean(2.5, 0.5), HeavyTailDist::pareto_with_mean(2.5, 0.25),
                           fixtures::unit_arrivals());
  const auto d = derive_asymptote(tandem, Quantity::dater);
  const double d2 = std::pow(0.5, 2.5);
  const auto F1 = HeavyTailDist::pareto_with_mean(2.5, 0.5);
  CHECK(d.value(10.0) == doctest::Approx((1.0 / 0.5 + d2 / 0.75) * F1.integrated_tail(10.0)));

  const TandemModel w2(HeavyTailDist::exponential(2.0), HeavyTailDist::pareto_with_mean(2.5, 0.25),
                       fixtures::unit_arrivals());
  const auto g = derive_asymptote(w2, Quantity::station2_wait);
  const auto F2 = HeavyTailDist::pareto_with_mean(2.5, 0.25);
  CHECK(g.value(3.0) == doctest::Approx(F2.integrated_tail(3.0) / 0.75));
  CHECK(g.certified);
  CHECK_THROWS_AS(derive_asymptote(*fixtures::pareto_jackson(), Quantity::dater), std::invalid_argument);
}

TEST_CASE("command-line tool exit codes") {
  const auto dir = scratch_dir("cli");
  const auto cfg_path = dir / "config.json";
  std::ofstream(cfg_path) << single_server_config().dump();
  const auto bad_path = dir / "bad.json";
  std::ofstream(bad_path) << "{ not json";
  const std::string out = " --out " + (dir / "out").string();
  CHECK(exec_cli("--config " + cfg_path.string() + " --subcommand axioms" + out) == 0);
  CHECK(exec_cli("axioms --config " + cfg_path.string() + out + " --seed 5 --threads 2") == 0);
  CHECK(fs::exists(dir / "out" / "axioms.json"));
  CHECK(json::parse(slurp(dir / "out" / "axioms.json"))["seed"] == 5);
  CHECK(exec_cli("--config " + bad_path.string() + " --subcommand axioms" + out) == 2);
  CHECK(exec_cli("--config " + cfg_path.string() + " --subcommand unknown" + out) == 2);
  CHECK(exec_cli("--config " + cfg_path.string() + out) == 2);
  CHECK(exec_cli("--subcommand axioms") == 2);
}

TEST_CASE("shipped example configs load and pass the axiom suite") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(MSNET_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    CAPTURE(entry.path().string());
    auto cfg = json::parse(slurp(entry.path()));
    cfg["axioms"] = {{"windows", 20}};
    const auto dir = scratch_dir("example_" + entry.path().stem().string());
    const auto r = run_in(cfg, dir, "axioms");
    CHECK(r.code == kExitOk);
    CHECK(r.errors.empty());
  }
  CHECK(seen >= 5);
}
