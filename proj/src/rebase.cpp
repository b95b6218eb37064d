#include "poua/rebase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "poua/config_file.hpp"

namespace poua {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double x) { return std::isnan(x) ? std::string{} : format_double(x); }

// Multiplies by (1 ± step) and clips; reports a trigger pinned at a bound.
StepOutcome apply_step(double value, int direction, const RebaseRule& rule) {
  StepOutcome out{value, false, false};
  if (direction == 0) return out;
  if (value < rule.lo || value > rule.hi) {
    // Never jump into the band from outside it.
    out.saturated = true;
    return out;
  }
  const double target = value * (1.0 + direction * rule.step);
  const double clipped = std::clamp(target, rule.lo, rule.hi);
  if (clipped == value) {
    out.saturated = true;
    return out;
  }
  out.value = clipped;
  out.stepped = true;
  out.saturated = clipped != target;
  return out;
}

}  // namespace

RebaseConfig scaled_for(RebaseConfig c, const ProtocolParams& p) {
  constexpr double kReferenceEta = 0.001;
  const double f = p.eta / kReferenceEta;
  c.eta.lo *= f;
  c.eta.hi *= f;
  return c;
}

void write_telemetry_header(std::ostream& out) {
  out << "epoch,r_bar_h,kappa,f_net_hat,rho_vol,t_ramp_obs,delta_r_obs,gini_w,top1_share,"
         "top3_share,top10_share,commit_rate,validator_count,tau,eta,lambda,d_tau,d_eta,"
         "d_lambda,severe_events,saturation_alert\n";
}

void write_telemetry_row(std::ostream& out, const TelemetryRecord& r) {
  out << r.epoch << ',' << cell(r.r_bar_h) << ',' << cell(r.kappa) << ',' << cell(r.f_net_hat)
      << ',' << cell(r.rho_vol) << ',' << cell(r.t_ramp_obs) << ',' << cell(r.delta_r_obs) << ','
      << cell(r.gini_w) << ',' << cell(r.top_shares[0]) << ',' << cell(r.top_shares[1]) << ','
      << cell(r.top_shares[2]) << ',' << cell(r.commit_rate) << ',' << r.validator_count << ','
      << cell(r.tau) << ',' << cell(r.eta) << ',' << cell(r.lambda) << ',' << cell(r.d_tau) << ','
      << cell(r.d_eta) << ',' << cell(r.d_lambda) << ',' << r.severe_events << ','
      << (r.saturation_alert ? 1 : 0) << '\n';
}

StepOutcome step_tau(std::span<const double> f_net_history, double f_calib,
                     const RebaseConfig& c, double tau, Epoch since_step) {
  if (since_step < c.tau.cooldown || c.consecutive < 1) return {tau, false, false};
  const double floor = c.floor_multiple * f_calib;
  const double ceiling = c.ceiling_multiple * f_calib;
  const auto n = static_cast<std::size_t>(c.consecutive);
  int direction = 0;
  if (trailing_run(f_net_history, [&](double f) { return f < floor; }) >= n) direction = +1;
  if (trailing_run(f_net_history, [&](double f) { return f > ceiling; }) >= n) direction = -1;
  return apply_step(tau, direction, c.tau);
}

StepOutcome step_eta(std::span<const double> d_eta_history, const RebaseConfig& c, double eta,
                     Epoch since_step) {
  if (since_step < c.eta.cooldown || c.consecutive < 1) return {eta, false, false};
  const auto n = static_cast<std::size_t>(c.consecutive);
  int direction = 0;
  // NaN (dormant) entries fail both predicates and break the run.
  if (trailing_run(d_eta_history, [&](double d) { return d > c.phi; }) >= n) direction = +1;
  if (trailing_run(d_eta_history, [&](double d) { return d < -c.phi; }) >= n) direction = -1;
  return apply_step(eta, direction, c.eta);
}

StepOutcome step_lambda(double d_lambda, int event_count, const RebaseConfig& c, double lambda,
                        Epoch since_step) {
  if (event_count < c.window_lambda_min || std::isnan(d_lambda)) return {lambda, false, false};
  if (since_step < c.lambda.cooldown) return {lambda, false, false};
  int direction = 0;
  if (d_lambda > c.phi) direction = -1;  // slash over-calibrated
  if (d_lambda < -c.phi) direction = +1;
  return apply_step(lambda, direction, c.lambda);
}

double lyapunov(double d_tau, double d_eta, double d_lambda) {
  auto sq = [](double x) { return std::isnan(x) ? 0.0 : x * x; };
  return sq(d_tau) + sq(d_eta) + sq(d_lambda);
}

double floor_swing_bound(const RebaseConfig& c) {
  return (1.0 + c.tau.step) * (1.0 + c.lambda.step) / (1.0 - c.eta.step);
}

double f_net_estimate(const ProtocolParams& p, double fee_level) {
  return lemma1_floor(p.r_max - p.r_min, p, 1, 1, BurnDestination::pure_burn, 0.0) * fee_level;
}

double gini(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  double total = 0.0;
  double weighted = 0.0;
  const auto n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    total += v[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * v[i];
  }
  return total > 0.0 ? weighted / (n * total) : 0.0;
}

void RampTracker::observe(Epoch epoch, std::span<const Validator> validators,
                          const ProtocolParams& p) {
  const double done = 0.99 * p.r_max;
  for (const auto& v : validators) {
    const auto i = v.id.value;
    if (start_.size() <= i) {
      start_.resize(i + 1, 0);
      ramping_.resize(i + 1, false);
    }
    if (!v.is_active()) {
      ramping_[i] = false;
      continue;
    }
    if (v.reputation <= p.r_min) {
      start_[i] = epoch;
      ramping_[i] = true;
    } else if (ramping_[i] && v.reputation >= done) {
      completions_.push_back({epoch, static_cast<double>(epoch - start_[i])});
      ramping_[i] = false;
    }
  }
}

double RampTracker::median_ramp(Epoch now, Epoch window) const {
  std::vector<double> xs;
  for (const auto& c : completions_) {
    if (c.at > now - window) xs.push_back(c.duration);
  }
  return median_of(std::move(xs));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return kNaN;
  const auto mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
  const double upper = xs[mid];
  if (xs.size() % 2 == 1) return upper;
  const double lower = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double SlashDropTracker::mean_last(int window) const {
  if (drops_.empty() || window < 1) return kNaN;
  const auto n = std::min(drops_.size(), static_cast<std::size_t>(window));
  double sum = 0.0;
  for (auto it = drops_.end() - static_cast<std::ptrdiff_t>(n); it != drops_.end(); ++it) sum += *it;
  return sum / static_cast<double>(n);
}

RebaseController::RebaseController(RebaseConfig config, const ProtocolParams& initial)
    : config_(config),
      f_calib_(f_net_estimate(initial, 1.0)),
      t_ramp_target_(config.t_ramp_target > 0.0 ? config.t_ramp_target
                                                : static_cast<double>(initial.t_ramp)),
      delta_r_target_(config.delta_r_target > 0.0 ? config.delta_r_target
                                                  : initial.r_max - initial.r_min) {
  tau_.since_step = config_.tau.cooldown;
  eta_.since_step = config_.eta.cooldown;
  lambda_.since_step = config_.lambda.cooldown;
}

void RebaseController::on_epoch(TelemetryRecord& rec, ProtocolParams& p) {
  ++tau_.since_step;
  ++eta_.since_step;
  ++lambda_.since_step;

  rec.d_tau = f_calib_ > 0.0 ? rec.f_net_hat / f_calib_ - 1.0 : kNaN;
  rec.d_eta = std::isnan(rec.t_ramp_obs) ? kNaN : rec.t_ramp_obs / t_ramp_target_ - 1.0;
  const bool lambda_live =
      rec.severe_events >= config_.window_lambda_min && !std::isnan(rec.delta_r_obs);
  rec.d_lambda = lambda_live ? rec.delta_r_obs / delta_r_target_ - 1.0 : kNaN;

  tau_.history.push_back(rec.f_net_hat);
  eta_.history.push_back(rec.d_eta);
  lambda_.history.push_back(rec.d_lambda);

  bool saturated = false;
  auto settle = [&](Track& track, const StepOutcome& o, double& value, const char* name,
                    const char* reason) {
    saturated = saturated || o.saturated;
    if (o.saturated) ++track.at_bound;
    if (!o.stepped) return;
    log(rec.epoch, name, value, o.value, reason);
    value = o.value;
    track.since_step = 0;
  };

  if (config_.tau_enabled) {
    settle(tau_, step_tau(tau_.history, f_calib_, config_, p.tau_burn, tau_.since_step),
           p.tau_burn, "tau", "f_net_hat outside band");
  }
  if (config_.eta_enabled) {
    settle(eta_, step_eta(eta_.history, config_, p.eta, eta_.since_step), p.eta, "eta",
           "ramp drift outside tolerance");
  }
  if (config_.lambda_enabled) {
    settle(lambda_,
           step_lambda(rec.d_lambda, rec.severe_events, config_, p.lambda, lambda_.since_step),
           p.lambda, "lambda", "slash drift outside tolerance");
  }
  rec.saturation_alert = saturated;
  rec.tau = p.tau_burn;
  rec.eta = p.eta;
  rec.lambda = p.lambda;
}

void RebaseController::override_tau(ProtocolParams& p, double value, Epoch epoch,
                                    std::string reason) {
  log(epoch, "tau", p.tau_burn, value, std::move(reason));
  p.tau_burn = value;
  tau_.since_step = 0;
}

void RebaseController::override_eta(ProtocolParams& p, double value, Epoch epoch,
                                    std::string reason) {
  log(epoch, "eta", p.eta, value, std::move(reason));
  p.eta = value;
  eta_.since_step = 0;
}

void RebaseController::override_lambda(ProtocolParams& p, double value, Epoch epoch,
                                       std::string reason) {
  log(epoch, "lambda", p.lambda, value, std::move(reason));
  p.lambda = value;
  lambda_.since_step = 0;
}

void RebaseController::log(Epoch epoch, std::string parameter, double old_value,
                           double new_value, std::string reason) {
  audit_.push_back({epoch, std::move(parameter), old_value, new_value, std::move(reason)});
}

}  // namespace poua
