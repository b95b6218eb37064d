#include "poua/params.hpp"

#include <cmath>
#include <stdexcept>

namespace poua {

std::string_view to_string(BurnDestination d) {
  switch (d) {
    case BurnDestination::pure_burn: return "pure_burn";
    case BurnDestination::treasury: return "treasury";
    case BurnDestination::redistribution: return "redistribution";
  }
  return "pure_burn";
}

BurnDestination parse_burn_destination(std::string_view text) {
  if (text == "pure_burn") return BurnDestination::pure_burn;
  if (text == "treasury") return BurnDestination::treasury;
  if (text == "redistribution") return BurnDestination::redistribution;
  throw std::invalid_argument("unknown burn destination: " + std::string(text));
}

double default_g_max(double r_min, double r_max, double eta, std::int64_t t_ramp) {
  return (r_max - r_min) / (eta * static_cast<double>(t_ramp));
}

ProtocolParams ProtocolParams::desk() {
  ProtocolParams p;
  p.epoch_length = 100;
  p.eta = 0.05;
  p.t_ramp = 14;
  p.g_max = 10.0;
  return p;
}

bool operator==(const Severities& a, const Severities& b) {
  return a.a1 == b.a1 && a.a2 == b.a2 && a.a3 == b.a3;
}

bool operator==(const ProtocolParams& a, const ProtocolParams& b) {
  return a.r_min == b.r_min && a.r_max == b.r_max && a.eta == b.eta && a.lambda == b.lambda &&
         a.epoch_length == b.epoch_length && a.alpha == b.alpha && a.beta == b.beta &&
         a.tau_burn == b.tau_burn && a.burn_destination == b.burn_destination &&
         a.g_max == b.g_max && a.t_warmup == b.t_warmup && a.t_ramp == b.t_ramp &&
         a.t_unbond == b.t_unbond && a.fee_min == b.fee_min && a.severities == b.severities &&
         a.severity_eq == b.severity_eq && a.graph_distance_d == b.graph_distance_d &&
         a.rho_gov == b.rho_gov;
}

std::vector<std::string> validate_params(const ProtocolParams& p) {
  std::vector<std::string> v;
  if (!(p.r_min > 0.0)) v.emplace_back("r_min must be > 0");
  if (!(p.r_min < p.r_max)) v.emplace_back("r_min must be < r_max");
  if (!std::isfinite(p.r_max)) v.emplace_back("r_max must be finite");
  if (std::abs(p.alpha + p.beta - 1.0) > 1e-12) v.emplace_back("alpha+beta≠1");
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) v.emplace_back("alpha must lie in (0,1]");
  if (!(p.beta >= 0.0)) v.emplace_back("beta must be >= 0");
  if (!(p.tau_burn > 0.0 && p.tau_burn <= 1.0)) v.emplace_back("tau_burn must lie in (0,1]");
  if (!(p.severities.a1 < p.severities.a2 && p.severities.a2 < p.severities.a3)) {
    v.emplace_back("severities must satisfy a1 < a2 < a3");
  }
  if (!(p.severities.a1 >= 0.0)) v.emplace_back("severities must be >= 0");
  if (!(p.severity_eq >= 0.0)) v.emplace_back("severity_eq must be >= 0");
  if (!(p.eta > 0.0)) v.emplace_back("eta must be > 0");
  if (!(p.lambda > 0.0)) v.emplace_back("lambda must be > 0");
  if (p.epoch_length < 1) v.emplace_back("epoch_length must be >= 1");
  if (!(p.g_max > 0.0)) v.emplace_back("g_max must be > 0");
  if (p.t_warmup < 0) v.emplace_back("t_warmup must be >= 0");
  if (p.t_ramp < 1) v.emplace_back("t_ramp must be >= 1");
  if (p.t_unbond < 0) v.emplace_back("t_unbond must be >= 0");
  if (!(p.fee_min >= 0.0)) v.emplace_back("fee_min must be >= 0");
  if (p.graph_distance_d < 1) v.emplace_back("graph_distance_d must be >= 1");
  if (!(p.rho_gov >= 0.0 && p.rho_gov <= 1.0)) v.emplace_back("rho_gov must lie in [0,1]");
  return v;
}

}  // namespace poua
