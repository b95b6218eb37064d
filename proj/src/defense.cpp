#include "poua/defense.hpp"

#include <stdexcept>

namespace poua {

bool layer1_allows(Address proposer_address, const Attestation& a) {
  return a.submitter() != proposer_address;
}

bool layer2_allows(const Validator& proposer, const Attestation& a, bool enabled) {
  return !enabled || !proposer.controlled_addresses.contains(a.submitter());
}

bool earns_credit(const DefenseLayers& layers, const Validator& proposer, const Attestation& a) {
  if (!a.is_valid()) return false;
  if (layers.layer1 && !layer1_allows(proposer.address, a)) return false;
  return layer2_allows(proposer, a, layers.layer2);
}

double apply_burn(double fee, const ProtocolParams& p, BurnLedger& ledger,
                  double adversary_stake_share) {
  if (fee < 0.0) throw std::invalid_argument("negative fee");
  const double burn = p.tau_burn * fee;
  ledger.routed_to_schemas += fee - burn;
  ledger.processed += fee;
  switch (p.burn_destination) {
    case BurnDestination::pure_burn:
      ledger.burned += burn;
      return 0.0;
    case BurnDestination::treasury:
      ledger.treasury += burn;
      return p.rho_gov * burn;
    case BurnDestination::redistribution:
      ledger.redistributed += burn;
      return adversary_stake_share * burn;
  }
  return 0.0;
}

double alpha_eff(int m, int k, double alpha, double beta) {
  if (m < 1 || k < 1 || m > k) throw std::invalid_argument("alpha_eff requires 1 <= m <= k");
  return alpha + static_cast<double>(m - 1) * beta / static_cast<double>(k);
}

double lemma1_floor_for_alpha_eff(double delta_r, const ProtocolParams& p,
                                  double alpha_eff_value, BurnDestination destination,
                                  double stake_share) {
  if (!(delta_r > 0.0)) throw std::invalid_argument("delta_r must be > 0");
  const double base = p.tau_burn * delta_r / (p.eta * alpha_eff_value);
  switch (destination) {
    case BurnDestination::pure_burn: return base;
    case BurnDestination::treasury: return (1.0 - p.rho_gov) * base;
    case BurnDestination::redistribution: return (1.0 - stake_share) * base;
  }
  return base;
}

double lemma1_floor(double delta_r, const ProtocolParams& p, int m, int k,
                    BurnDestination destination, double stake_share) {
  return lemma1_floor_for_alpha_eff(delta_r, p, alpha_eff(m, k, p.alpha, p.beta), destination,
                                    stake_share);
}

FrontierRow frontier_row(double alpha) {
  if (alpha < 0.5 || alpha > 1.0) throw std::invalid_argument("frontier alpha outside [0.5, 1]");
  const double beta = 1.0 - alpha;
  return FrontierRow{alpha, beta, beta / (3.0 * alpha + beta), beta / 0.5};
}

}  // namespace poua
