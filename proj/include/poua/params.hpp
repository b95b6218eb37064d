#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace poua {

enum class BurnDestination { pure_burn, treasury, redistribution };

std::string_view to_string(BurnDestination d);
BurnDestination parse_burn_destination(std::string_view text);

struct Severities {
  double a1 = 1.0;
  double a2 = 3.0;
  double a3 = 7.0;
};

// g_max that makes a full ramp from r_min to r_max take exactly t_ramp epochs.
double default_g_max(double r_min, double r_max, double eta, std::int64_t t_ramp);

struct ProtocolParams {
  double r_min = 1.0;
  double r_max = 8.0;
  double eta = 0.001;
  double lambda = 1.0;
  std::int64_t epoch_length = 14400;
  double alpha = 0.7;
  double beta = 0.3;
  double tau_burn = 0.5;
  BurnDestination burn_destination = BurnDestination::pure_burn;
  double g_max = default_g_max(1.0, 8.0, 0.001, 30);
  std::int64_t t_warmup = 14;
  std::int64_t t_ramp = 30;
  std::int64_t t_unbond = 42;
  double fee_min = 1.0;
  Severities severities;
  // Equivocation slash magnitude; uncalibrated knob.
  double severity_eq = 3.0;
  int graph_distance_d = 3;
  double rho_gov = 0.1;

  // Recommended production values.
  static ProtocolParams v0() { return {}; }

  // Desk-scale values: E = 100 slots, eta = 0.05, g_max = 10, so a full
  // ramp takes 14 epochs.
  static ProtocolParams desk();

  friend bool operator==(const ProtocolParams&, const ProtocolParams&);
};

bool operator==(const Severities& a, const Severities& b);

// Every violated invariant, empty iff the record is usable.
std::vector<std::string> validate_params(const ProtocolParams& p);

}  // namespace poua
