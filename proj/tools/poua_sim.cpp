// Scenario runner: one subcommand per experiment, plus test-vector emission.
// Exit codes: 0 ran and every property held, 1 a property failed,
// 2 configuration or IO error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "poua/config_file.hpp"
#include "poua/experiments.hpp"
#include "poua/test_vectors.hpp"

namespace fs = std::filesystem;
using poua::ExperimentResult;
using poua::RunOptions;
using poua::Scenario;

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailed = 1;
constexpr int kConfigError = 2;

struct Args {
  std::string config;
  std::string seed_text = "1";
  std::string out;
  int jobs = 1;
  bool production = false;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    return {static_cast<std::uint64_t>(poua::parse_int("--seed", text))};
  }
  const auto lo = poua::parse_int("--seeds", text.substr(0, dots));
  const auto hi = poua::parse_int("--seeds", text.substr(dots + 2));
  if (lo < 0 || hi < lo) throw poua::ConfigError("--seeds expects N..M with 0 <= N <= M");
  std::vector<std::uint64_t> seeds;
  for (auto s = lo; s <= hi; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  return seeds;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw poua::ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

void write_outputs(const ExperimentResult& r, const Scenario& s, const std::string& resolved,
                   const RunOptions& o, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [name, table] : r.tables) {
    std::ofstream out(dir / (name + ".csv"), std::ios::binary);
    poua::write_csv(out, table);
  }
  nlohmann::json props = nlohmann::json::array();
  for (const auto& p : r.properties) props.push_back({{"name", p.name}, {"pass", p.pass}, {"detail", p.detail}});
  const nlohmann::json summary = {{"subcommand", r.subcommand}, {"figure", r.figure},
                                  {"pass", r.all_pass()}, {"properties", props}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  nlohmann::json manifest = r.manifest;
  manifest["subcommand"] = r.subcommand;
  manifest["figure"] = r.figure;
  manifest["scenario"] = s.name;
  manifest["seeds"] = o.seeds;
  manifest["config_hash"] = hex64(poua::fnv1a64(resolved));
  if (!manifest.contains("scheduler")) manifest["scheduler"] = s.scheduler;
  if (!manifest.contains("policies")) {
    nlohmann::json pols = nlohmann::json::object();
    for (const auto& [i, text] : s.policies) pols[std::to_string(i)] = text;
    manifest["policies"] = pols;
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  write_text(dir / "resolved_config.txt", resolved);
}

int run_experiment(const std::string& name,
                   const std::function<ExperimentResult(const Scenario&, const RunOptions&)>& fn,
                   const Args& args) {
  Scenario s;
  RunOptions o;
  try {
    const auto base = args.production ? poua::ProtocolParams::v0() : poua::ProtocolParams::desk();
    s = args.config.empty() ? Scenario{} : poua::parse_scenario(read_file(args.config), base);
    if (args.config.empty()) s.params = base;
    const auto violations = poua::validate_params(s.params);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << "config: " << v << '\n';
      return kConfigError;
    }
    o.seeds = parse_seeds(args.seed_text);
    o.jobs = args.jobs;
  } catch (const poua::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kConfigError;
  }

  ExperimentResult r;
  try {
    r = fn(s, o);
  } catch (const poua::ConfigError& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kConfigError;
  }

  const fs::path dir = args.out.empty() ? fs::path("out") / name : fs::path(args.out);
  try {
    write_outputs(r, s, poua::format_scenario(s), o, dir);
  } catch (const std::exception& e) {
    std::cerr << "io: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& p : r.properties) {
    std::cout << (p.pass ? "PASS " : "FAIL ") << p.name << "  (" << p.detail << ")\n";
  }
  std::cout << r.subcommand << " [" << r.figure << "] -> " << dir.string() << '\n';
  return r.all_pass() ? kOk : kPropertyFailed;
}

int emit_test_vectors(const std::string& out) {
  try {
    const fs::path dir = out.empty() ? fs::path("out") / "test_vectors" : fs::path(out);
    fs::create_directories(dir);
    const auto p = poua::ProtocolParams::v0();
    write_text(dir / "alpha_eff.json", poua::alpha_eff_vectors(p).dump(2) + "\n");
    write_text(dir / "lemma1_floor.json", poua::lemma1_vectors(p).dump(2) + "\n");
    std::cout << "test vectors -> " << dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "io: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PoUA consensus simulator and analytics toolkit"};
  app.require_subcommand(1);

  const std::map<std::string, std::function<ExperimentResult(const Scenario&, const RunOptions&)>> runners = {
      {"run_capital_scan", poua::run_capital_scan},
      {"run_kappa_trajectory", poua::run_kappa_trajectory},
      {"run_lemma1_scan", poua::run_lemma1_scan},
      {"run_volume_deterrent", poua::run_volume_deterrent},
      {"run_a3_fpr_comparison", poua::run_a3_fpr_comparison},
      {"run_a3_tpr_scan", poua::run_a3_tpr_scan},
      {"run_strategy_search", poua::run_strategy_search},
      {"run_scale_benchmark", poua::run_scale_benchmark},
      {"run_adversarial_latency", poua::run_adversarial_latency},
      {"run_eclipse_recovery", poua::run_eclipse_recovery},
      {"run_rebase_sim", poua::run_rebase_sim},
      {"run_scenario", poua::run_scenario},
  };

  Args args;
  std::string chosen;
  for (const auto& [name, fn] : runners) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config, "Key/value scenario file");
    auto* seed = sub->add_option("--seed", args.seed_text, "Single seed");
    sub->add_option("--seeds", args.seed_text, "Seed range N..M")->excludes(seed);
    sub->add_option("--out", args.out, "Output directory");
    sub->add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--production-params", args.production, "Use production parameters instead of desk scale");
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  auto* vectors = app.add_subcommand("emit_test_vectors", "Write cross-implementation JSON vectors");
  vectors->add_option("--out", args.out, "Output directory");
  vectors->callback([&chosen] { chosen = "emit_test_vectors"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (chosen == "emit_test_vectors") return emit_test_vectors(args.out);
  return run_experiment(chosen, runners.at(chosen), args);
}
