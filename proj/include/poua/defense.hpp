#pragma once

#include "poua/params.hpp"
#include "poua/types.hpp"

namespace poua {

struct DefenseLayers {
  bool layer1 = true;  // self-submission exclusion
  bool layer2 = false; // controlled-membership rejection
};

bool layer1_allows(Address proposer_address, const Attestation& a);
bool layer2_allows(const Validator& proposer, const Attestation& a, bool enabled = true);

// True iff the attestation is valid and passes every enabled layer.
bool earns_credit(const DefenseLayers& layers, const Validator& proposer,
                  const Attestation& a);

struct BurnLedger {
  double burned = 0.0;
  double treasury = 0.0;
  double redistributed = 0.0;
  double routed_to_schemas = 0.0;
  double processed = 0.0;

  [[nodiscard]] double burn_share_total() const { return burned + treasury + redistributed; }
};

// Splits one fee and returns the adversary's expected recovery of the burn
// share. Throws std::invalid_argument for negative fees.
double apply_burn(double fee, const ProtocolParams& p, BurnLedger& ledger,
                  double adversary_stake_share);

// α + (m−1)β/k; throws std::invalid_argument unless 1 ≤ m ≤ k.
double alpha_eff(int m, int k, double alpha, double beta);

// Non-recoverable fee per cartel member per delta_r of reputation gained.
double lemma1_floor(double delta_r, const ProtocolParams& p, int m, int k,
                    BurnDestination destination, double stake_share);
double lemma1_floor_for_alpha_eff(double delta_r, const ProtocolParams& p,
                                  double alpha_eff_value,
                                  BurnDestination destination, double stake_share);

struct FrontierRow {
  double alpha = 0.0;
  double beta = 0.0;
  double cartel_discount = 0.0;    // at m/k = 1/3
  double relative_voter_ramp = 0.0; // relative to alpha = 0.5
};

FrontierRow frontier_row(double alpha);

}  // namespace poua
