#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "poua/defense.hpp"
#include "poua/detectors.hpp"
#include "poua/network.hpp"
#include "poua/params.hpp"
#include "poua/rebase.hpp"
#include "poua/registry.hpp"
#include "poua/reputation.hpp"
#include "poua/types.hpp"

namespace poua {

struct BlockHeader {
  Slot slot = 0;
  ValidatorId proposer{};
  std::uint32_t attestation_count = 0;
  double credited_fee = 0.0;
  std::uint32_t voter_denominator = 0;
};

struct ChainState {
  Slot slot = 0;
  Epoch epoch = 0;
  std::vector<Validator> validators;  // ascending id, id == index
  std::vector<BlockHeader> finalized_blocks;
  std::uint64_t rng_seed = 0;
  bool warmup_active = true;
};

// Weight as used for selection and commit: stake alone during warmup.
double consensus_weight(const Validator& v, bool warmup);
double total_active_weight(const ChainState& s);

// Weighted draw keyed by (seed, slot) over active validators in id order.
// Throws std::runtime_error if no active validator has positive weight.
ValidatorId select_proposer(const ChainState& s, Slot slot);

// Strict 2/3 of total active weight, counting voters and the proposer once.
bool tally_commit(const Block& block, const ChainState& s);

// Stake-weighted mean honest reputation over r_min; 1 during warmup.
double realized_kappa(const ChainState& s, double r_min);
double honest_rbar(const ChainState& s);

struct TrafficConfig {
  std::uint32_t schemas = 4;
  double fee = 10.0;
  // Relative emission rate per schema; uniform when empty.
  std::vector<double> schema_weights;
  double attestations_per_slot = 4.0;
  std::uint32_t attestor_set_size = 3;
  std::uint32_t submitter_pool = 256;
};

// Per-slot honest volume at which the voter channel alone delivers
// `saturation` × g_max to a validator in an n-validator uniform set.
double saturating_rate(const ProtocolParams& p, std::size_t n, double fee, double saturation);

struct GrindConfig {
  double fee = 10.0;
  std::uint32_t attestations_per_submitter = 1;
  std::uint32_t attestor_set_size = 3;
};

struct ChainOptions {
  TrafficConfig traffic;
  GrindConfig grind;
  DefenseLayers layers;
  // No scheduler means synchronous delivery.
  std::optional<Scheduler> scheduler;
  // Latest delivery (slots after creation) still counted for the commit
  // tally; unbounded when unset.
  std::optional<Slot> commit_horizon;
  // Latest delivery still credited to the voter's reputation.
  std::optional<Slot> vote_horizon;
  A3SlashConfig a3;
  A2Config a2;
  std::optional<RebaseConfig> rebase;
  double block_reward = 100.0;
  // Forces the proposer of a slot; falls back to the weighted draw.
  std::function<std::optional<ValidatorId>(Slot)> proposer_override;
};

struct ManualSlash {
  Slot slot = 0;
  ValidatorId validator{};
  SlashClass cls = SlashClass::a3;
};

struct CartelInfo {
  std::uint32_t id = 0;
  std::vector<ValidatorId> members;
  std::vector<Address> pool;  // staged submitter addresses
  SchemaId owned_schema{};
};

class Chain {
 public:
  Chain(ProtocolParams params, std::vector<Validator> validators, ChainOptions options,
        std::uint64_t seed);

  void step_slot();
  void run_slots(Slot n);
  // Applies the pending epoch boundary when the clock sits exactly on one,
  // so a run of whole epochs ends with its last update applied.
  void settle();
  void run_epochs(Epoch n);

  // Lifecycle requests take effect at the next epoch boundary.
  void request_exit(ValidatorId v);
  void request_reentry(ValidatorId v, double stake);
  // Bonds a new validator at the next boundary; returns its id.
  ValidatorId request_entry(double stake, BehaviorPolicy policy);

  SlashRecord slash(ValidatorId v, SlashClass cls);
  void reverse(SlashRecord& record);
  // Slashes applied automatically when the given slot is reached.
  void schedule_slash(ManualSlash s) { scheduled_slashes_.push_back(s); }

  [[nodiscard]] const ChainState& state() const { return state_; }
  [[nodiscard]] const ProtocolParams& params() const { return params_; }
  [[nodiscard]] ProtocolParams& mutable_params() { return params_; }
  [[nodiscard]] const EpochTally& tally() const { return tally_; }
  [[nodiscard]] const BurnLedger& ledger() const { return ledger_; }
  [[nodiscard]] const Registry& registry() const { return registry_; }
  [[nodiscard]] const std::vector<TelemetryRecord>& telemetry() const { return telemetry_; }
  [[nodiscard]] const std::vector<CartelInfo>& cartels() const { return cartels_; }
  [[nodiscard]] const std::vector<double>& redistribution_received() const { return redistribution_received_; }
  [[nodiscard]] const std::vector<SlashRecord>& slash_log() const { return slash_log_; }
  [[nodiscard]] std::uint64_t equivocations() const { return equivocations_; }
  [[nodiscard]] std::uint64_t committed_blocks() const { return committed_total_; }
  [[nodiscard]] std::size_t pending_attestations() const { return pending_.size(); }
  [[nodiscard]] const RebaseController* rebase() const {
    return rebase_ ? &*rebase_ : nullptr;
  }
  [[nodiscard]] RebaseController* rebase() { return rebase_ ? &*rebase_ : nullptr; }
  [[nodiscard]] const A2Detector* a2() const { return a2_ ? &*a2_ : nullptr; }
  [[nodiscard]] double kappa() const { return realized_kappa(state_, params_.r_min); }

 private:
  struct BlockCredit {
    ValidatorId proposer;
    Slot slot;
    double credited_fee;
    std::uint32_t denominator;
  };

  void setup_traffic();
  void setup_cartels();
  void generate_traffic(Slot slot);
  void epoch_boundary();
  void deliver_pending(Slot slot);
  void emit_telemetry();
  void distribute_redistribution();
  std::uint32_t active_count() const;

  ProtocolParams params_;
  ChainOptions options_;
  ChainState state_;
  Registry registry_;
  EpochTally tally_;
  BurnLedger ledger_;
  std::vector<SchemaId> honest_schemas_;
  std::vector<double> schema_cumulative_;
  std::vector<Address> submitters_;
  std::vector<CartelInfo> cartels_;
  std::vector<Attestation> pending_;
  std::vector<DeliveryQueue> queues_;
  std::vector<BlockCredit> credits_;
  std::vector<ProposerEpochView> epoch_views_;
  std::vector<std::size_t> view_index_;
  std::optional<A3Detector> a3_;
  std::optional<A2Detector> a2_;
  std::optional<RebaseController> rebase_;
  RampTracker ramps_;
  SlashDropTracker drops_;
  std::vector<TelemetryRecord> telemetry_;
  std::vector<double> redistribution_received_;
  std::vector<SlashRecord> slash_log_;
  std::vector<ManualSlash> scheduled_slashes_;
  std::vector<ValidatorId> exit_requests_;
  std::vector<std::pair<ValidatorId, double>> reentry_requests_;
  std::vector<Validator> entry_requests_;
  double redistribution_pool_ = 0.0;
  Slot last_boundary_ = 0;
  std::uint64_t payload_counter_ = 0;
  std::uint64_t equivocations_ = 0;
  std::uint64_t committed_total_ = 0;
  std::uint64_t committed_epoch_ = 0;
  std::uint64_t slots_epoch_ = 0;
  std::vector<double> epoch_fees_;
  double epoch_fee_total_ = 0.0;
  double fee_reference_ = 0.0;
  double last_fee_level_ = 1.0;
};

// Uniform-stake roster of honest validators with seed-derived addresses.
std::vector<Validator> make_roster(std::size_t n, double stake, double reputation,
                                   std::uint64_t seed);

}  // namespace poua
