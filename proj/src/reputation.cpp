#include "poua/reputation.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "poua/config_file.hpp"

namespace poua {

std::string_view to_string(SlashClass cls) {
  switch (cls) {
    case SlashClass::a1: return "a1";
    case SlashClass::a2: return "a2";
    case SlashClass::a3: return "a3";
    case SlashClass::consensus: return "consensus";
  }
  return "a1";
}

double severity(SlashClass cls, const ProtocolParams& p) {
  switch (cls) {
    case SlashClass::a1: return p.severities.a1;
    case SlashClass::a2: return p.severities.a2;
    case SlashClass::a3: return p.severities.a3;
    case SlashClass::consensus: return p.severity_eq;
  }
  return 0.0;
}

TallyEntry& EpochTally::entry(ValidatorId v) {
  if (v.value >= entries_.size()) entries_.resize(v.value + 1);
  return entries_[v.value];
}

TallyEntry EpochTally::at(ValidatorId v) const {
  return v.value < entries_.size() ? entries_[v.value] : TallyEntry{};
}

void EpochTally::reset(Epoch next) {
  std::fill(entries_.begin(), entries_.end(), TallyEntry{});
  epoch_ = next;
}

double valid_fee_sum(const Block& block, const AttestationFilter& accept) {
  double sum = 0.0;
  for (const auto& a : block.attestations) {
    if (a.is_valid() && (!accept || accept(a))) sum += a.fee();
  }
  return sum;
}

void credit_proposer(EpochTally& tally, const Block& block, const AttestationFilter& accept) {
  auto& e = tally.entry(block.proposer);
  const double credited = valid_fee_sum(block, accept);
  e.g_prop += credited;
  e.fees_seen += credited;
}

bool credit_voter(EpochTally& tally, ValidatorId proposer, ValidatorId voter,
                  double credited_fee, std::uint32_t voter_denominator) {
  if (voter == proposer || voter_denominator == 0) return false;
  auto& e = tally.entry(voter);
  e.g_vote += credited_fee / static_cast<double>(voter_denominator);
  e.fees_seen += credited_fee;
  return true;
}

bool credit_voter(EpochTally& tally, const Block& block, ValidatorId voter,
                  const AttestationFilter& accept) {
  return credit_voter(tally, block.proposer, voter, valid_fee_sum(block, accept),
                      block.voter_denominator);
}

double good_score(const TallyEntry& e, const ProtocolParams& p) {
  return std::min(p.g_max, p.alpha * e.g_prop + p.beta * e.g_vote);
}

SlashRecord record_slash(EpochTally& tally, ValidatorId v, SlashClass cls,
                         const ProtocolParams& p) {
  const double amount = severity(cls, p);
  tally.entry(v).b += amount;
  return SlashRecord{v, cls, amount, tally.epoch(), false};
}

void reverse_slash(EpochTally& tally, SlashRecord& record) {
  if (record.reversed) throw std::logic_error("slash already reversed");
  if (record.epoch != tally.epoch()) {
    throw std::logic_error("slash reversal after the epoch boundary");
  }
  auto& e = tally.entry(record.validator);
  e.b = std::max(0.0, e.b - record.amount);
  record.reversed = true;
}

double apply_epoch_update(double r, const TallyEntry& e, const ProtocolParams& p) {
  const double next = r + p.eta * good_score(e, p) - p.lambda * e.b;
  return std::clamp(next, p.r_min, p.r_max);
}

std::int64_t epochs_to_full_ramp(const ProtocolParams& p, double score) {
  if (!(score > 0.0)) return -1;
  TallyEntry e;
  e.g_prop = score / p.alpha;
  const double tol = 1e-9 * p.r_max;
  double r = p.r_min;
  std::int64_t n = 0;
  while (p.r_max - r > tol) {
    r = apply_epoch_update(r, e, p);
    if (++n > 100'000'000) return -1;
  }
  return n;
}

void write_reputation_snapshot_header(std::ostream& out) {
  out << "epoch,validator,stake,reputation,weight,g_prop,g_vote,b\n";
}

void write_reputation_snapshot(std::ostream& out, Epoch epoch,
                               std::span<const Validator> validators, const EpochTally& tally,
                               bool warmup) {
  for (const auto& v : validators) {
    if (v.lifecycle == Lifecycle::exited) continue;
    const auto e = tally.at(v.id);
    const double w = v.is_active() ? (warmup ? v.stake : v.stake * v.reputation) : 0.0;
    out << epoch << ',' << v.id.value << ',' << format_double(v.stake) << ','
        << format_double(v.reputation) << ',' << format_double(w) << ','
        << format_double(e.g_prop) << ',' << format_double(e.g_vote) << ','
        << format_double(e.b) << '\n';
  }
}

}  // namespace poua
