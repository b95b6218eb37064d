#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "poua/ids.hpp"

namespace poua {

double capital_cost_ratio(double rho, double kappa);

double churn_adjusted_rbar(double mu, double t_ramp, double r_min, double r_max);

double post_slash_drop(double stake_share, double r_min, double r_max);

double pv_marginal_reputation(double s_v, double s_total, double r_b, double r_f,
                              double delta, double horizon);

// PV reported as a bracket: the stake-share form is the upper value, the
// exact weight-share correction (1 − w_v/S) the lower one.
struct PvBracket {
  double upper = 0.0;
  double lower = 0.0;
};
PvBracket pv_bracket(double s_v, double s_total, double w_v_over_total, double r_b,
                     double r_f, double delta, double horizon);

double volume_deterrent_ratio(double r_f, double r_b);

double reputation_adversary_gross_fee(double target_r, double r_min, double eta,
                                      double alpha);

// Mixer cost of laundering a submitter through `hops` intermediates.
double staging_cost(double hops, double mixer_fee_rate, double submitter_stake);

enum class Phase { warmup, ramp, steady, post_slash };
std::string_view to_string(Phase p);

struct EnvelopePoint {
  Epoch epoch = 0;
  Phase phase = Phase::steady;
  double kappa_analytic = 0.0;
  double kappa_empirical = 0.0;
};

struct EnvelopeSpec {
  std::int64_t t_warmup = 14;
  std::int64_t t_ramp = 30;
  double r_min = 1.0;
  double r_max = 8.0;
  double churn_mu = 0.0;
  // Epoch whose record first shows the slash, and the slashed stake share.
  std::int64_t slash_epoch = -1;
  double slash_share = 0.0;
};

// Analytic κ for the record at `epoch` (state at the start of that epoch):
// 1 during warmup, linear ramp from genesis, churn-adjusted plateau, then a
// post-slash dip that recovers linearly over t_ramp epochs.
double kappa_envelope(const EnvelopeSpec& s, Epoch epoch);
Phase envelope_phase(const EnvelopeSpec& s, Epoch epoch);
// True for epochs where the piecewise form changes branch.
bool is_transition_epoch(const EnvelopeSpec& s, Epoch epoch);

}  // namespace poua
