#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "poua/chain.hpp"
#include "poua/policy.hpp"
#include "poua/types.hpp"

namespace poua {

struct BuildContext {
  Slot slot = 0;
  const CartelInfo* cartel = nullptr;
  GrindConfig grind;
  std::uint64_t seed = 0;
  std::uint64_t payload_base = 0;
};

// Blocks a proposer emits for one slot: one normally, two when equivocating.
std::vector<Block> build_block(const BehaviorPolicy& policy, const Validator& proposer,
                               std::span<const Attestation> pending,
                               const BuildContext& ctx);

struct CapitalScanConfig {
  std::vector<double> kappas = {1.0, 4.0, 8.0};
  std::vector<double> rhos = {0.05, 0.1, 0.15, 0.2, 0.25, 1.0 / 3.0, 0.4, 0.45};
  int seeds = 30;
  Slot slots = 2000;
  std::size_t honest_validators = 10;
  double honest_stake = 100.0;
  std::uint64_t base_seed = 1;
  int jobs = 1;
};

struct CapitalScanRow {
  double rho = 0.0;
  double kappa = 0.0;
  double analytic = 0.0;       // κρ/(1−ρ)
  double empirical = 0.0;      // κρ̂/(1−ρ̂) from measured proposer share
  double sigma = 0.0;          // binomial sd of the empirical ratio
  double measured_share = 0.0; // ρ̂
  std::uint64_t draws = 0;
  bool within_3sigma = false;
};

// Fresh capital bonds at r_min against an honest set held at κ·r_min; its
// proposer frequency measures the weight fraction its stake buys.
std::vector<CapitalScanRow> capital_scan(const CapitalScanConfig& c);

enum class Panel { a, b, c };

std::string_view to_string(Panel p);
DefenseLayers panel_layers(Panel p);
bool panel_detector(Panel p);

struct StrategySearchConfig {
  std::vector<double> shares = {0.05, 0.10, 0.20, 0.30};
  std::vector<std::uint32_t> pools = {3, 10, 30};
  std::vector<Panel> panels = {Panel::a, Panel::b, Panel::c};
  bool other_policies = true;
  int seeds = 20;
  Slot slots = 200;
  std::size_t honest_validators = 12;
  std::size_t cartel_members = 3;
  double honest_rate = 0.05;
  double honest_fee = 10.0;
  double grind_fee = 1.0;
  ProtocolParams params = default_params();
  std::uint64_t base_seed = 1;
  int jobs = 1;

  // Figure-time gains with ten-slot epochs and no warmup, so a 200-slot
  // horizon spans twenty reputation updates.
  static ProtocolParams default_params();
};

struct HeatmapRow {
  Panel panel = Panel::a;
  std::string policy;
  double stake_share = 0.0;
  std::uint32_t pool_size = 0;
  double mean_reward = 0.0;
  double stdev = 0.0;
  int seeds = 0;
};

std::vector<HeatmapRow> strategy_search(const StrategySearchConfig& c);

// Final mean cartel reputation for one seed; exposed for tests.
double cartel_final_reputation(const StrategySearchConfig& c, Panel panel,
                               const BehaviorPolicy& cartel_policy, double share,
                               std::uint64_t seed);

struct Lemma1Row {
  int m = 0;
  int k = 0;
  BurnDestination destination = BurnDestination::pure_burn;
  double stake_share = 0.0;
  double analytic_injection = 0.0;   // η·α_eff
  double empirical_injection = 0.0;  // cartel Δr per fee unit
  double analytic_floor = 0.0;
  double empirical_floor = 0.0;
  double injection_rel_err = 0.0;
  double floor_rel_err = 0.0;
};

// One epoch of an m-member cartel rotating the proposer slot among k + 1
// validators and self-attesting with Layers 1–2 off.
Lemma1Row lemma1_empirical(const ProtocolParams& p, int m, int k,
                           BurnDestination destination, std::uint64_t seed);

}  // namespace poua
