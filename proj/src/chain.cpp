#include "poua/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "poua/adversary.hpp"
#include "poua/rng.hpp"

namespace poua {

namespace {

constexpr std::uint64_t kAttestorAddress = 1;
constexpr std::uint64_t kSubmitterAddress = 2;
constexpr std::uint64_t kCartelPoolAddress = 3;
constexpr std::uint64_t kCartelAttestorAddress = 4;
constexpr std::uint64_t kValidatorAddress = 5;

Address make_address(std::uint64_t seed, std::uint64_t kind, std::uint64_t a, std::uint64_t b = 0) {
  return Address{mix_key({seed, static_cast<std::uint64_t>(StreamTag::address), kind, a, b})};
}

}  // namespace

double consensus_weight(const Validator& v, bool warmup) {
  return warmup ? warmup_weight(v) : weight(v);
}

double total_active_weight(const ChainState& s) {
  double total = 0.0;
  for (const auto& v : s.validators) {
    if (v.is_active()) total += consensus_weight(v, s.warmup_active);
  }
  return total;
}

ValidatorId select_proposer(const ChainState& s, Slot slot) {
  const double total = total_active_weight(s);
  if (!(total > 0.0)) throw std::runtime_error("no active validator with positive weight");
  const double u =
      counter_uniform(s.rng_seed, StreamTag::selection, static_cast<std::uint64_t>(slot)) * total;
  double cumulative = 0.0;
  const Validator* last = nullptr;
  for (const auto& v : s.validators) {
    if (!v.is_active()) continue;
    const double w = consensus_weight(v, s.warmup_active);
    if (w <= 0.0) continue;
    cumulative += w;
    last = &v;
    if (u < cumulative) return v.id;
  }
  return last->id;  // u rounded onto the final boundary
}

bool tally_commit(const Block& block, const ChainState& s) {
  const double total = total_active_weight(s);
  double committing = 0.0;
  const auto& proposer = s.validators.at(block.proposer.value);
  if (proposer.is_active()) committing += consensus_weight(proposer, s.warmup_active);
  for (ValidatorId v : block.voters) {
    if (v == block.proposer) continue;
    const auto& val = s.validators.at(v.value);
    if (val.is_active()) committing += consensus_weight(val, s.warmup_active);
  }
  return committing > 2.0 / 3.0 * total;
}

double honest_rbar(const ChainState& s) {
  double stake = 0.0;
  double weighted = 0.0;
  for (const auto& v : s.validators) {
    if (!v.is_active() || v.policy.is_byzantine()) continue;
    stake += v.stake;
    weighted += v.stake * v.reputation;
  }
  return stake > 0.0 ? weighted / stake : std::numeric_limits<double>::quiet_NaN();
}

double realized_kappa(const ChainState& s, double r_min) {
  if (s.warmup_active) return 1.0;
  return honest_rbar(s) / r_min;
}

double saturating_rate(const ProtocolParams& p, std::size_t n, double fee, double saturation) {
  // A validator votes on about E(n−1)/n blocks per epoch and earns
  // β·F/(n−1) from each, so β·g_vote ≈ β·E·F/n.
  const double per_slot_fee =
      saturation * p.g_max * static_cast<double>(n) / (p.beta * static_cast<double>(p.epoch_length));
  return per_slot_fee / fee;
}

std::vector<Validator> make_roster(std::size_t n, double stake, double reputation,
                                   std::uint64_t seed) {
  std::vector<Validator> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(make_validator(ValidatorId{static_cast<std::uint32_t>(i)},
                                 make_address(seed, kValidatorAddress, i), stake, reputation));
  }
  return out;
}

Chain::Chain(ProtocolParams params, std::vector<Validator> validators, ChainOptions options,
             std::uint64_t seed)
    : params_(params), options_(std::move(options)) {
  if (const auto violations = validate_params(params_); !violations.empty()) {
    std::string msg = "invalid parameters:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw std::invalid_argument(msg);
  }
  for (std::size_t i = 0; i < validators.size(); ++i) {
    if (validators[i].id.value != i) throw std::invalid_argument("validator ids must be dense and ordered");
    validators[i].controlled_addresses.insert(validators[i].address);
  }
  if (options_.scheduler) validate_scheduler(*options_.scheduler);
  state_.validators = std::move(validators);
  state_.rng_seed = seed;
  state_.warmup_active = params_.t_warmup > 0;
  queues_.resize(state_.validators.size());
  redistribution_received_.assign(state_.validators.size(), 0.0);
  setup_traffic();
  setup_cartels();
  if (options_.a3.enabled) a3_.emplace(options_.a3);
  if (options_.a2.enabled) a2_.emplace(options_.a2);
  if (options_.rebase) rebase_.emplace(*options_.rebase, params_);
  fee_reference_ = options_.traffic.fee > 0.0 ? options_.traffic.fee : 1.0;
  ramps_.observe(0, state_.validators, params_);
  emit_telemetry();
}

void Chain::setup_traffic() {
  const auto& t = options_.traffic;
  for (std::uint32_t s = 0; s < t.schemas; ++s) {
    std::vector<Address> members;
    for (std::uint32_t j = 0; j < t.attestor_set_size; ++j) {
      members.push_back(make_address(state_.rng_seed, kAttestorAddress, s, j));
    }
    const Address recipient = members.empty() ? Address{} : members.front();
    const auto set = registry_.add_attestor_set(std::move(members));
    honest_schemas_.push_back(registry_.add_schema(set, 1, t.fee, recipient));
  }
  double cumulative = 0.0;
  for (std::uint32_t s = 0; s < t.schemas; ++s) {
    cumulative += t.schema_weights.empty() ? 1.0 : t.schema_weights.at(s);
    schema_cumulative_.push_back(cumulative);
  }
  for (std::uint32_t i = 0; i < t.submitter_pool; ++i) {
    submitters_.push_back(make_address(state_.rng_seed, kSubmitterAddress, i));
  }
}

void Chain::setup_cartels() {
  std::vector<std::uint32_t> ids;
  for (const auto& v : state_.validators) {
    if (v.policy.cartel_id) ids.push_back(*v.policy.cartel_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (std::uint32_t c : ids) {
    CartelInfo info;
    info.id = c;
    std::uint32_t pool = 0;
    for (const auto& v : state_.validators) {
      if (v.policy.cartel_id == c) {
        info.members.push_back(v.id);
        pool = std::max(pool, v.policy.pool_size);
      }
    }
    for (std::uint32_t i = 0; i < pool; ++i) {
      info.pool.push_back(make_address(state_.rng_seed, kCartelPoolAddress, c, i));
    }
    std::vector<Address> attestors;
    for (std::uint32_t j = 0; j < std::max<std::uint32_t>(1, options_.grind.attestor_set_size); ++j) {
      attestors.push_back(make_address(state_.rng_seed, kCartelAttestorAddress, c, j));
    }
    AddressSet universe;
    for (Address a : info.pool) universe.insert(a);
    for (Address a : attestors) universe.insert(a);
    for (ValidatorId m : info.members) universe.insert(state_.validators[m.value].address);
    const Address recipient = state_.validators[info.members.front().value].address;
    const auto set = registry_.add_attestor_set(std::move(attestors));
    info.owned_schema = registry_.add_schema(set, 1, options_.grind.fee, recipient);
    for (Address a : universe.items()) registry_.set_cartel(a, c);
    for (ValidatorId m : info.members) {
      state_.validators[m.value].controlled_addresses.insert_all(universe);
    }
    cartels_.push_back(std::move(info));
  }
}

void Chain::generate_traffic(Slot slot) {
  const auto& t = options_.traffic;
  if (t.attestations_per_slot <= 0.0 || honest_schemas_.empty() || submitters_.empty()) return;
  Stream rs(state_.rng_seed, StreamTag::traffic, static_cast<std::uint64_t>(slot));
  const auto count = rs.poisson(t.attestations_per_slot);
  const double total = schema_cumulative_.back();
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u = rs.uniform01() * total;
    const auto it = std::upper_bound(schema_cumulative_.begin(), schema_cumulative_.end(), u);
    const auto idx = static_cast<std::size_t>(
        std::min<std::ptrdiff_t>(it - schema_cumulative_.begin(),
                                 static_cast<std::ptrdiff_t>(honest_schemas_.size()) - 1));
    const Address submitter = submitters_[rs.below(submitters_.size())];
    pending_.emplace_back(honest_schemas_[idx], rs.next(), submitter, t.fee, true);
  }
}

std::uint32_t Chain::active_count() const {
  std::uint32_t n = 0;
  for (const auto& v : state_.validators) n += v.is_active() ? 1 : 0;
  return n;
}

void Chain::request_exit(ValidatorId v) { exit_requests_.push_back(v); }

void Chain::request_reentry(ValidatorId v, double stake) { reentry_requests_.emplace_back(v, stake); }

ValidatorId Chain::request_entry(double stake, BehaviorPolicy policy) {
  const auto id = static_cast<std::uint32_t>(state_.validators.size() + entry_requests_.size());
  entry_requests_.push_back(make_validator(ValidatorId{id},
                                           make_address(state_.rng_seed, kValidatorAddress, id),
                                           stake, params_.r_min, std::move(policy)));
  return ValidatorId{id};
}

SlashRecord Chain::slash(ValidatorId v, SlashClass cls) {
  auto rec = record_slash(tally_, v, cls, params_);
  slash_log_.push_back(rec);
  return rec;
}

void Chain::reverse(SlashRecord& record) {
  reverse_slash(tally_, record);
  for (auto& r : slash_log_) {
    if (r.validator == record.validator && r.epoch == record.epoch && r.cls == record.cls &&
        !r.reversed) {
      r.reversed = true;
      break;
    }
  }
}

void Chain::run_slots(Slot n) {
  for (Slot i = 0; i < n; ++i) step_slot();
}

void Chain::run_epochs(Epoch n) {
  run_slots(n * params_.epoch_length);
  settle();
}

void Chain::settle() {
  const Slot slot = state_.slot;
  if (slot > 0 && slot % params_.epoch_length == 0 && slot != last_boundary_) {
    last_boundary_ = slot;
    epoch_boundary();
  }
}

void Chain::step_slot() {
  const Slot slot = state_.slot;
  settle();

  for (const auto& s : scheduled_slashes_) {
    if (s.slot == slot) slash(s.validator, s.cls);
  }
  generate_traffic(slot);
  ++slots_epoch_;

  ValidatorId pid{};
  std::optional<ValidatorId> forced;
  if (options_.proposer_override) forced = options_.proposer_override(slot);
  if (forced && forced->value < state_.validators.size() &&
      state_.validators[forced->value].is_active()) {
    pid = *forced;
  } else {
    pid = select_proposer(state_, slot);
  }
  const Validator& proposer = state_.validators[pid.value];

  const bool sees_traffic =
      !options_.scheduler || sees_public_traffic(*options_.scheduler, pid, slot);
  std::span<const Attestation> visible;
  if (sees_traffic) visible = pending_;
  BuildContext ctx;
  ctx.slot = slot;
  ctx.grind = options_.grind;
  ctx.seed = state_.rng_seed;
  if (proposer.policy.cartel_id) {
    for (const auto& c : cartels_) {
      if (c.id == *proposer.policy.cartel_id) ctx.cartel = &c;
    }
  }
  auto blocks = build_block(proposer.policy, proposer, visible, ctx);

  if (blocks.size() > 1) {
    // Conflicting blocks for one slot: neither commits and the consensus
    // layer slashes the proposer.
    ++equivocations_;
    slash(pid, SlashClass::consensus);
    deliver_pending(slot);
    ++state_.slot;
    return;
  }

  Block& block = blocks.front();
  block.slot = slot;
  block.proposer = pid;
  block.voter_denominator = active_count() - 1;

  struct Recipient {
    ValidatorId id;
    Slot at;
  };
  std::vector<Recipient> recipients;
  recipients.reserve(state_.validators.size());
  for (const auto& v : state_.validators) {
    if (!v.is_active() || v.id == pid) continue;
    std::optional<Slot> at = slot;
    if (options_.scheduler) at = schedule_delivery(*options_.scheduler, slot, pid, v.id, state_.rng_seed);
    if (!at) continue;
    recipients.push_back({v.id, *at});
    if (!options_.commit_horizon || *at - slot <= *options_.commit_horizon) {
      block.voters.push_back(v.id);
    }
  }

  if (tally_commit(block, state_)) {
    double credited = 0.0;
    std::vector<Attestation> credited_list;
    const double redistributed_before = ledger_.redistributed;
    for (const auto& a : block.attestations) {
      if (!a.is_valid()) continue;
      apply_burn(a.fee(), params_, ledger_, 0.0);
      epoch_fees_.push_back(a.fee());
      epoch_fee_total_ += a.fee();
      if (earns_credit(options_.layers, proposer, a)) {
        credited += a.fee();
        credited_list.push_back(a);
      }
    }
    redistribution_pool_ += ledger_.redistributed - redistributed_before;
    auto& pe = tally_.entry(pid);
    pe.g_prop += credited;
    pe.fees_seen += credited;

    if (!block.attestations.empty() && !pending_.empty()) {
      std::vector<std::uint64_t> included;
      included.reserve(block.attestations.size());
      for (const auto& a : block.attestations) included.push_back(a.payload_hash());
      std::sort(included.begin(), included.end());
      std::erase_if(pending_, [&](const Attestation& a) {
        return std::binary_search(included.begin(), included.end(), a.payload_hash());
      });
    }

    const auto ref = static_cast<std::uint64_t>(credits_.size());
    credits_.push_back({pid, slot, credited, block.voter_denominator});
    for (const auto& r : recipients) {
      if (options_.vote_horizon && r.at - slot > *options_.vote_horizon) continue;
      if (r.at <= slot) {
        credit_voter(tally_, pid, r.id, credited, block.voter_denominator);
      } else {
        queues_[r.id.value].push({r.at, slot, ref});
      }
    }

    if (view_index_.size() <= pid.value) view_index_.resize(pid.value + 1, SIZE_MAX);
    if (view_index_[pid.value] == SIZE_MAX) {
      view_index_[pid.value] = epoch_views_.size();
      epoch_views_.push_back(ProposerEpochView{pid, {}});
    }
    auto& view = epoch_views_[view_index_[pid.value]].attestations;
    view.insert(view.end(), credited_list.begin(), credited_list.end());

    state_.finalized_blocks.push_back(BlockHeader{slot, pid,
                                                  static_cast<std::uint32_t>(block.attestations.size()),
                                                  credited, block.voter_denominator});
    ++committed_epoch_;
    ++committed_total_;
  }

  deliver_pending(slot);
  ++state_.slot;
}

void Chain::deliver_pending(Slot slot) {
  for (std::size_t i = 0; i < queues_.size(); ++i) {
    if (queues_[i].empty()) continue;
    const ValidatorId v{static_cast<std::uint32_t>(i)};
    for (const auto& d : queues_[i].drain(slot)) {
      const auto& c = credits_[d.block_ref];
      credit_voter(tally_, c.proposer, v, c.credited_fee, c.denominator);
    }
  }
}

void Chain::distribute_redistribution() {
  if (redistribution_pool_ <= 0.0) return;
  const double total = total_active_weight(state_);
  if (total > 0.0) {
    for (const auto& v : state_.validators) {
      if (!v.is_active()) continue;
      redistribution_received_[v.id.value] +=
          redistribution_pool_ * consensus_weight(v, state_.warmup_active) / total;
    }
  }
  redistribution_pool_ = 0.0;
}

void Chain::epoch_boundary() {
  const Epoch closing = state_.epoch;

  std::sort(epoch_views_.begin(), epoch_views_.end(),
            [](const auto& a, const auto& b) { return a.proposer < b.proposer; });
  if (a3_) {
    for (const auto& rec : a3_->evaluate(epoch_views_, registry_, params_, tally_)) {
      slash_log_.push_back(rec);
    }
  }
  if (a2_) {
    a2_->evaluate(epoch_views_, static_cast<std::uint32_t>(registry_.schema_count()), params_, tally_);
  }

  std::vector<int> severe(state_.validators.size(), 0);
  for (const auto& rec : slash_log_) {
    if (rec.epoch == closing && !rec.reversed && rec.cls == SlashClass::a3) ++severe[rec.validator.value];
  }
  for (auto& v : state_.validators) {
    if (v.lifecycle == Lifecycle::exited) continue;
    const double before = v.reputation;
    v.reputation = apply_epoch_update(before, tally_.at(v.id), params_);
    if (const int n = severe[v.id.value]; n > 0) {
      for (int i = 0; i < n; ++i) drops_.record((before - v.reputation) / n);
    }
  }
  distribute_redistribution();

  state_.epoch = closing + 1;
  state_.warmup_active = state_.epoch < params_.t_warmup;

  for (auto& v : state_.validators) {
    if (v.lifecycle == Lifecycle::unbonding && --v.unbond_epochs_left <= 0) {
      v.lifecycle = Lifecycle::exited;
      v.unbond_epochs_left = 0;
    }
  }
  for (ValidatorId id : exit_requests_) {
    auto& v = state_.validators.at(id.value);
    if (!v.is_active()) continue;
    v.lifecycle = params_.t_unbond > 0 ? Lifecycle::unbonding : Lifecycle::exited;
    v.unbond_epochs_left = params_.t_unbond;
  }
  exit_requests_.clear();
  for (const auto& [id, stake] : reentry_requests_) {
    auto& v = state_.validators.at(id.value);
    if (v.lifecycle != Lifecycle::exited) continue;
    v.lifecycle = Lifecycle::active;
    v.stake = stake;
    v.reputation = params_.r_min;
    v.entered_at = state_.epoch;
  }
  reentry_requests_.clear();
  for (auto& v : entry_requests_) {
    v.entered_at = state_.epoch;
    state_.validators.push_back(std::move(v));
    queues_.emplace_back();
    redistribution_received_.push_back(0.0);
  }
  entry_requests_.clear();

  ramps_.observe(state_.epoch, state_.validators, params_);
  emit_telemetry();

  tally_.reset(state_.epoch);
  epoch_views_.clear();
  view_index_.clear();
  epoch_fees_.clear();
  epoch_fee_total_ = 0.0;
  committed_epoch_ = 0;
  slots_epoch_ = 0;
}

void Chain::emit_telemetry() {
  TelemetryRecord rec;
  rec.epoch = state_.epoch;
  rec.r_bar_h = honest_rbar(state_);
  rec.kappa = realized_kappa(state_, params_.r_min);

  if (!epoch_fees_.empty()) {
    auto fees = epoch_fees_;
    last_fee_level_ = median_of(std::move(fees)) / fee_reference_;
  }
  rec.f_net_hat = f_net_estimate(params_, last_fee_level_);

  const double r_b = options_.block_reward * static_cast<double>(committed_epoch_);
  rec.rho_vol = r_b > 0.0 ? (r_b + epoch_fee_total_) / r_b : std::numeric_limits<double>::quiet_NaN();

  const RebaseConfig windows = options_.rebase.value_or(RebaseConfig{});
  rec.t_ramp_obs = ramps_.median_ramp(state_.epoch, windows.window_eta);
  rec.delta_r_obs = drops_.mean_last(windows.window_lambda);
  rec.severe_events = drops_.total();

  std::vector<double> weights;
  for (const auto& v : state_.validators) {
    if (v.is_active()) weights.push_back(consensus_weight(v, state_.warmup_active));
  }
  rec.validator_count = weights.size();
  rec.gini_w = gini(weights);
  std::sort(weights.begin(), weights.end(), std::greater<>());
  double total = 0.0;
  for (double w : weights) total += w;
  const std::size_t tops[3] = {1, 3, 10};
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < std::min(tops[i], weights.size()); ++j) s += weights[j];
    rec.top_shares[static_cast<std::size_t>(i)] = total > 0.0 ? s / total : 0.0;
  }
  rec.commit_rate = slots_epoch_ > 0
                        ? static_cast<double>(committed_epoch_) / static_cast<double>(slots_epoch_)
                        : 0.0;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.d_tau = rec.d_eta = rec.d_lambda = nan;
  if (rebase_ && state_.epoch > 0) rebase_->on_epoch(rec, params_);
  rec.tau = params_.tau_burn;
  rec.eta = params_.eta;
  rec.lambda = params_.lambda;
  telemetry_.push_back(rec);
}

}  // namespace poua
