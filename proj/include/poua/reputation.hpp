#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "poua/params.hpp"
#include "poua/types.hpp"

namespace poua {

struct TallyEntry {
  double g_prop = 0.0;
  double g_vote = 0.0;
  double b = 0.0;
  double fees_seen = 0.0;
};

enum class SlashClass { a1, a2, a3, consensus };
std::string_view to_string(SlashClass cls);

double severity(SlashClass cls, const ProtocolParams& p);

struct SlashRecord {
  ValidatorId validator{};
  SlashClass cls = SlashClass::a1;
  double amount = 0.0;
  Epoch epoch = 0;
  bool reversed = false;
};

// Per-validator accumulators for one epoch, indexed by dense validator id.
class EpochTally {
 public:
  explicit EpochTally(Epoch epoch = 0) : epoch_(epoch) {}

  TallyEntry& entry(ValidatorId v);
  [[nodiscard]] TallyEntry at(ValidatorId v) const;
  [[nodiscard]] Epoch epoch() const { return epoch_; }
  // Zeroes every accumulator and moves to `next`.
  void reset(Epoch next);

 private:
  Epoch epoch_;
  std::vector<TallyEntry> entries_;
};

// Decides whether an attestation earns reputation for the block's proposer.
using AttestationFilter = std::function<bool(const Attestation&)>;

// Σ fee over valid attestations accepted by `accept` (all valid ones if empty).
double valid_fee_sum(const Block& block, const AttestationFilter& accept = {});

void credit_proposer(EpochTally& tally, const Block& block,
                     const AttestationFilter& accept = {});

// Adds credited_fee / voter_denominator to the voter. Returns false and
// credits nothing when the voter is the proposer.
bool credit_voter(EpochTally& tally, ValidatorId proposer, ValidatorId voter,
                  double credited_fee, std::uint32_t voter_denominator);
bool credit_voter(EpochTally& tally, const Block& block, ValidatorId voter,
                  const AttestationFilter& accept = {});

double good_score(const TallyEntry& e, const ProtocolParams& p);

SlashRecord record_slash(EpochTally& tally, ValidatorId v, SlashClass cls,
                         const ProtocolParams& p);

// Upheld appeal: removes the slash from the tally. Throws std::logic_error if
// the record's epoch has already closed or it was reversed before.
void reverse_slash(EpochTally& tally, SlashRecord& record);

double apply_epoch_update(double r, const TallyEntry& e, const ProtocolParams& p);

// Epochs needed to climb from r_min to r_max at a constant good score.
std::int64_t epochs_to_full_ramp(const ProtocolParams& p, double score);

void write_reputation_snapshot_header(std::ostream& out);
void write_reputation_snapshot(std::ostream& out, Epoch epoch,
                               std::span<const Validator> validators,
                               const EpochTally& tally, bool warmup);

}  // namespace poua
