#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "poua/defense.hpp"
#include "poua/params.hpp"
#include "poua/types.hpp"

namespace poua {

struct RebaseRule {
  double step = 0.1;
  Epoch cooldown = 30;
  double lo = 0.0;
  double hi = 0.0;
};

struct RebaseConfig {
  bool tau_enabled = true;
  bool eta_enabled = true;
  bool lambda_enabled = true;
  RebaseRule tau{0.1, 30, 0.1, 0.9};
  RebaseRule eta{0.1, 30, 0.0001, 0.01};
  RebaseRule lambda{0.1, 30, 0.5, 2.0};
  double floor_multiple = 0.7;
  double ceiling_multiple = 2.0;
  // Run length required before τ or η steps.
  Epoch consecutive = 30;
  double phi = 0.30;
  Epoch window_eta = 100;
  int window_lambda = 50;
  int window_lambda_min = 10;
  // Zero means "derive from params": t_ramp and r_max − r_min.
  double t_ramp_target = 0.0;
  double delta_r_target = 0.0;
};

// Scales the η bounds by eta / 0.001 so runs with figure-time gains keep the
// same relative band around their base η.
RebaseConfig scaled_for(RebaseConfig c, const ProtocolParams& p);

struct TelemetryRecord {
  Epoch epoch = 0;
  double r_bar_h = 0.0;
  double kappa = 1.0;
  double f_net_hat = 0.0;
  double rho_vol = 0.0;
  double t_ramp_obs = 0.0;   // NaN when no ramp completed in the window
  double delta_r_obs = 0.0;  // NaN before the first severe slash
  double gini_w = 0.0;
  std::array<double, 3> top_shares{};  // top 1, 3, 10 validators by weight
  double commit_rate = 0.0;
  std::size_t validator_count = 0;
  double tau = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  double d_tau = 0.0;
  double d_eta = 0.0;     // NaN while dormant
  double d_lambda = 0.0;  // NaN while dormant
  int severe_events = 0;
  bool saturation_alert = false;
};

void write_telemetry_header(std::ostream& out);
void write_telemetry_row(std::ostream& out, const TelemetryRecord& r);

struct StepOutcome {
  double value = 0.0;
  bool stepped = false;
  bool saturated = false;  // wanted to move past a clip bound
};

// Length of the trailing run of entries satisfying `pred`.
template <typename Pred>
std::size_t trailing_run(std::span<const double> xs, Pred pred) {
  std::size_t n = 0;
  for (auto it = xs.rbegin(); it != xs.rend() && pred(*it); ++it) ++n;
  return n;
}

// `since_step` counts epochs since this parameter last moved (rate limit).
StepOutcome step_tau(std::span<const double> f_net_history, double f_calib,
                     const RebaseConfig& c, double tau, Epoch since_step);
StepOutcome step_eta(std::span<const double> d_eta_history, const RebaseConfig& c,
                     double eta, Epoch since_step);
StepOutcome step_lambda(double d_lambda, int event_count, const RebaseConfig& c,
                        double lambda, Epoch since_step);

double lyapunov(double d_tau, double d_eta, double d_lambda);

// Worst one-step factor on the deterrent when τ and λ step up and η steps
// down together.
double floor_swing_bound(const RebaseConfig& c);

// Cost-to-grind estimate the τ controller tracks: the single-proposer floor
// at the current parameters, scaled by the observed fee level.
double f_net_estimate(const ProtocolParams& p, double fee_level);

double gini(std::span<const double> xs);

// Ramp completions (epochs from r_min to within 1% of r_max).
class RampTracker {
 public:
  void observe(Epoch epoch, std::span<const Validator> validators, const ProtocolParams& p);
  // Median completion time over the last `window` epochs; NaN if none.
  [[nodiscard]] double median_ramp(Epoch now, Epoch window) const;

 private:
  struct Completion {
    Epoch at;
    double duration;
  };
  std::vector<Epoch> start_;
  std::vector<bool> ramping_;
  std::deque<Completion> completions_;
};

// Median over a population of ramp times, the robust statistic behind the
// η controller.
double median_of(std::vector<double> xs);

// Reputation drops caused by severe slashes.
class SlashDropTracker {
 public:
  void record(double drop) { drops_.push_back(drop); ++total_; }
  [[nodiscard]] double mean_last(int window) const;
  [[nodiscard]] int total() const { return total_; }

 private:
  std::vector<double> drops_;
  int total_ = 0;
};

struct AuditEntry {
  Epoch epoch = 0;
  std::string parameter;
  double old_value = 0.0;
  double new_value = 0.0;
  std::string reason;
};

class RebaseController {
 public:
  RebaseController(RebaseConfig config, const ProtocolParams& initial);

  // Fills the record's drift fields, applies permitted steps to `p`, and
  // stores the post-step parameters in the record.
  void on_epoch(TelemetryRecord& rec, ProtocolParams& p);

  void override_tau(ProtocolParams& p, double value, Epoch epoch, std::string reason);
  void override_eta(ProtocolParams& p, double value, Epoch epoch, std::string reason);
  void override_lambda(ProtocolParams& p, double value, Epoch epoch, std::string reason);

  [[nodiscard]] const std::vector<AuditEntry>& audit_log() const { return audit_; }
  [[nodiscard]] double f_calib() const { return f_calib_; }
  [[nodiscard]] const RebaseConfig& config() const { return config_; }

 private:
  struct Track {
    std::vector<double> history;
    Epoch since_step = 0;
    Epoch at_bound = 0;
  };

  void log(Epoch epoch, std::string parameter, double old_value, double new_value,
           std::string reason);

  RebaseConfig config_;
  double f_calib_;
  double t_ramp_target_;
  double delta_r_target_;
  Track tau_;
  Track eta_;
  Track lambda_;
  std::vector<AuditEntry> audit_;
};

}  // namespace poua
