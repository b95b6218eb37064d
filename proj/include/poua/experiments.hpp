#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "poua/chain.hpp"
#include "poua/config_file.hpp"
#include "poua/csv.hpp"
#include "poua/params.hpp"

namespace poua {

// Everything a subcommand needs besides seeds. Optional fields fall back to
// the subcommand's own defaults.
struct Scenario {
  std::string name = "default";
  ProtocolParams params = ProtocolParams::desk();
  std::optional<std::size_t> validators;
  double stake = 100.0;
  std::optional<Epoch> epochs;
  std::optional<Slot> slots;
  double traffic_saturation = 2.0;
  double fee = 10.0;
  // none | uniform | adversarial | partition | eclipse
  std::string scheduler = "none";
  Slot delay = 0;
  Slot delta_adv = 0;
  std::size_t cartel_size = 0;
  double drop_rate = 1.0;
  int partition_groups = 2;
  std::optional<Epoch> window_start;
  std::optional<Epoch> window_end;
  std::uint32_t eclipse_target = 0;
  bool eclipse_outbound = true;
  std::vector<double> grid;
  std::optional<Epoch> slash_epoch;
  double slash_share = 0.1;
  bool a3_enabled = false;
  bool layer2 = false;
  bool rebase_enabled = false;
  // Per-validator overrides, index → policy text such as "grind:3:0".
  std::vector<std::pair<std::size_t, std::string>> policies;
};

// Parses a flat key/value document. Parameter keys use ProtocolParams field
// names; scenario keys use the "scenario." prefix. Throws ConfigError.
Scenario parse_scenario(std::string_view text, ProtocolParams base);
std::string format_scenario(const Scenario& s);

BehaviorPolicy parse_policy(std::string_view text);
std::optional<Scheduler> build_scheduler(const Scenario& s, std::size_t n, Slot slots_per_epoch);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  std::string subcommand;
  std::string figure;
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<PropertyCheck> properties;
  nlohmann::json manifest = nlohmann::json::object();

  [[nodiscard]] bool all_pass() const;
  void check(std::string name, bool pass, std::string detail);
};

struct RunOptions {
  std::vector<std::uint64_t> seeds = {1};
  int jobs = 1;
};

ExperimentResult run_capital_scan(const Scenario& s, const RunOptions& o);
ExperimentResult run_kappa_trajectory(const Scenario& s, const RunOptions& o);
ExperimentResult run_lemma1_scan(const Scenario& s, const RunOptions& o);
ExperimentResult run_volume_deterrent(const Scenario& s, const RunOptions& o);
ExperimentResult run_a3_fpr_comparison(const Scenario& s, const RunOptions& o);
ExperimentResult run_a3_tpr_scan(const Scenario& s, const RunOptions& o);
ExperimentResult run_strategy_search(const Scenario& s, const RunOptions& o);
ExperimentResult run_scale_benchmark(const Scenario& s, const RunOptions& o);
ExperimentResult run_adversarial_latency(const Scenario& s, const RunOptions& o);
ExperimentResult run_eclipse_recovery(const Scenario& s, const RunOptions& o);
ExperimentResult run_rebase_sim(const Scenario& s, const RunOptions& o);
ExperimentResult run_scenario(const Scenario& s, const RunOptions& o);

// Shared building blocks, exposed for the test suites.

// Honest uniform-stake chain whose traffic saturates the good-score cap.
Chain make_saturated_chain(const ProtocolParams& p, std::size_t n, double stake,
                           double saturation, ChainOptions options, std::uint64_t seed);

// Mean κ over the last `tail` telemetry records.
double steady_kappa(const Chain& chain, std::size_t tail);

struct KappaTrajectory {
  std::vector<TelemetryRecord> records;
  std::vector<double> analytic;
  Epoch slash_record_epoch = -1;
};

KappaTrajectory kappa_trajectory(const ProtocolParams& p, std::size_t n, double stake,
                                 Epoch epochs, std::optional<Epoch> slash_epoch,
                                 double slash_share, std::uint64_t seed);

struct LatencyPoint {
  Slot delta_adv = 0;
  double kappa = 0.0;
  double commit_rate = 0.0;
};

std::vector<LatencyPoint> adversarial_latency(const ProtocolParams& p, std::size_t n,
                                              std::size_t cartel, const std::vector<Slot>& grid,
                                              Epoch epochs, std::uint64_t seed, int jobs);

struct EclipseTrace {
  std::vector<double> target;    // target reputation per record
  std::vector<double> baseline;  // same run, mean of honest non-target validators with
                                 // the same genesis, without the eclipse
  Epoch window_start = 0;
  Epoch window_end = 0;
  double honest_ramp_rate = 0.0;  // r per epoch at saturation
  double max_window_slope = 0.0;  // |Δr| per epoch inside the window
  Epoch recovery_epochs = -1;     // epochs after the window until within 5%
};

EclipseTrace eclipse_recovery(const ProtocolParams& p, std::size_t honest, std::size_t cartel,
                              Epoch window_start, Epoch window_end, Epoch epochs,
                              bool target_outbound, std::uint64_t seed);

struct RebaseTrace {
  std::vector<TelemetryRecord> records;
  std::vector<double> v;          // Lyapunov value per epoch
  std::vector<double> floor;      // Lemma 1 floor per epoch
  double max_floor_swing = 1.0;   // worst one-epoch factor
  bool v_non_increasing = true;   // across every rebase step
  bool double_step = false;       // some parameter moved twice within N epochs
  Epoch onset = 0;
};

// Synthetic drift plant: fee level, participation and slash outcomes drift
// together in the direction that shrinks the cost to grind, and the three
// controllers respond.
RebaseTrace rebase_correlated_drift(const ProtocolParams& p, const RebaseConfig& c,
                                    Epoch epochs, Epoch onset);

struct A2FlagRate {
  std::uint64_t evaluations = 0;  // validator-epochs with n_v >= n_min
  std::uint64_t flags = 0;
  double rate = 0.0;
};

// Honest chain with the distribution detector observing only.
A2FlagRate a2_honest_flag_rate(const ProtocolParams& p, std::size_t n, Epoch epochs,
                               const A2Config& config, std::uint64_t seed);

}  // namespace poua
