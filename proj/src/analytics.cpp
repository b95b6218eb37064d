#include "poua/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace poua {

double capital_cost_ratio(double rho, double kappa) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0,1)");
  return kappa * rho / (1.0 - rho);
}

double churn_adjusted_rbar(double mu, double t_ramp, double r_min, double r_max) {
  const double share = mu * t_ramp;
  if (share < 0.0 || share > 1.0) throw std::invalid_argument("mu * t_ramp must lie in [0,1]");
  return (1.0 - share) * r_max + share * (r_min + r_max) / 2.0;
}

double post_slash_drop(double stake_share, double r_min, double r_max) {
  if (stake_share < 0.0 || stake_share > 1.0) throw std::invalid_argument("stake share must lie in [0,1]");
  return -stake_share * (r_max - r_min);
}

double pv_marginal_reputation(double s_v, double s_total, double r_b, double r_f, double delta,
                              double horizon) {
  if (!(delta > 0.0)) throw std::invalid_argument("discount rate must be > 0");
  if (!(s_total > 0.0)) throw std::invalid_argument("total stake must be > 0");
  // expm1 keeps the small-δΔ limit exact.
  return (s_v / s_total) * (r_b + r_f) * (-std::expm1(-delta * horizon)) / delta;
}

PvBracket pv_bracket(double s_v, double s_total, double w_v_over_total, double r_b, double r_f,
                     double delta, double horizon) {
  if (w_v_over_total < 0.0 || w_v_over_total > 1.0) throw std::invalid_argument("weight share must lie in [0,1]");
  const double upper = pv_marginal_reputation(s_v, s_total, r_b, r_f, delta, horizon);
  return {upper, upper * (1.0 - w_v_over_total)};
}

double volume_deterrent_ratio(double r_f, double r_b) {
  if (!(r_b > 0.0)) throw std::invalid_argument("block reward must be > 0");
  return 1.0 + r_f / r_b;
}

double reputation_adversary_gross_fee(double target_r, double r_min, double eta, double alpha) {
  if (!(eta > 0.0 && alpha > 0.0)) throw std::invalid_argument("eta and alpha must be > 0");
  if (target_r < r_min) throw std::invalid_argument("target below r_min");
  return (target_r - r_min) / (eta * alpha);
}

double staging_cost(double hops, double mixer_fee_rate, double submitter_stake) {
  if (hops < 0.0 || mixer_fee_rate < 0.0 || submitter_stake < 0.0) {
    throw std::invalid_argument("staging inputs must be non-negative");
  }
  return hops * mixer_fee_rate * submitter_stake;
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::warmup: return "warmup";
    case Phase::ramp: return "ramp";
    case Phase::steady: return "steady";
    case Phase::post_slash: return "post_slash";
  }
  return "unknown";
}

namespace {

bool in_slash_window(const EnvelopeSpec& s, Epoch e) {
  return s.slash_epoch >= 0 && e >= s.slash_epoch && e < s.slash_epoch + s.t_ramp;
}

}  // namespace

Phase envelope_phase(const EnvelopeSpec& s, Epoch e) {
  if (e < s.t_warmup) return Phase::warmup;
  if (in_slash_window(s, e)) return Phase::post_slash;
  if (e < s.t_ramp) return Phase::ramp;
  return Phase::steady;
}

double kappa_envelope(const EnvelopeSpec& s, Epoch e) {
  if (e < s.t_warmup) return 1.0;
  const double range = s.r_max - s.r_min;
  const double ramp = std::min(1.0, static_cast<double>(e) / static_cast<double>(s.t_ramp));
  const double plateau = churn_adjusted_rbar(s.churn_mu, static_cast<double>(s.t_ramp), s.r_min, s.r_max);
  double rbar = std::min(s.r_min + ramp * range, plateau);
  if (s.slash_epoch >= 0 && e >= s.slash_epoch) {
    const double recovered =
        std::min(1.0, static_cast<double>(e - s.slash_epoch) / static_cast<double>(s.t_ramp));
    rbar += post_slash_drop(s.slash_share, s.r_min, s.r_max) * (1.0 - recovered);
  }
  return rbar / s.r_min;
}

bool is_transition_epoch(const EnvelopeSpec& s, Epoch e) {
  if (e == s.t_warmup || e == s.t_ramp) return true;
  return s.slash_epoch >= 0 && (e == s.slash_epoch || e == s.slash_epoch + s.t_ramp);
}

}  // namespace poua
