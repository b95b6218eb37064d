#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "poua/analytics.hpp"
#include "poua/experiments.hpp"

using namespace poua;

TEST(CapitalCost, ReferenceValues) {
  EXPECT_NEAR(capital_cost_ratio(1.0 / 3.0, 8), 4.0, 1e-12);
  EXPECT_NEAR(capital_cost_ratio(1.0 / 3.0, 1), 0.5, 1e-12);
  EXPECT_NEAR(capital_cost_ratio(0.5, 4), 4.0, 1e-12);
  EXPECT_LT(capital_cost_ratio(1e-12, 8), 1e-10);
  EXPECT_THROW((void)capital_cost_ratio(1.0, 8), std::invalid_argument);
  EXPECT_THROW((void)capital_cost_ratio(0.0, 8), std::invalid_argument);
}

TEST(CapitalCost, IncreasingAndConvexInRho) {
  double prev = 0.0;
  double prev_slope = 0.0;
  for (double rho = 0.01; rho < 0.95; rho += 0.01) {
    const double v = capital_cost_ratio(rho, 8);
    const double slope = v - prev;
    EXPECT_GT(v, prev);
    if (rho > 0.015) {
      EXPECT_GT(slope, prev_slope);
    }
    prev = v;
    prev_slope = slope;
  }
}

TEST(ChurnRbar, MatchesPlateauFormula) {
  // (1−μT)·r_max + μT·(r_min + r_max)/2, written independently.
  auto oracle = [](double mu, double t, double lo, double hi) {
    return hi - mu * t * (hi - lo) / 2.0;
  };
  for (double mu : {0.0, 0.001, 0.005, 0.01, 1.0 / 30.0}) {
    EXPECT_NEAR(churn_adjusted_rbar(mu, 30, 1, 8), oracle(mu, 30, 1, 8), 1e-12) << mu;
  }
  EXPECT_DOUBLE_EQ(churn_adjusted_rbar(0.0, 30, 1, 8), 8.0);
  EXPECT_THROW((void)churn_adjusted_rbar(0.04, 30, 1, 8), std::invalid_argument);
}

TEST(PostSlashDrop, ReferenceValues) {
  EXPECT_NEAR(post_slash_drop(0.1, 1, 8), -0.7, 1e-12);
  EXPECT_DOUBLE_EQ(post_slash_drop(0.0, 1, 8), 0.0);
  EXPECT_DOUBLE_EQ(post_slash_drop(1.0, 1, 8), -7.0);
}

TEST(PresentValue, Limits) {
  const double s = 10.0, total = 100.0, rb = 3.0, rf = 2.0;
  EXPECT_NEAR(pv_marginal_reputation(s, total, rb, rf, 1e-12, 50), 0.1 * 5.0 * 50, 1e-6);
  EXPECT_NEAR(pv_marginal_reputation(s, total, rb, rf, 0.2, 1e6), 0.1 * 5.0 / 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(pv_marginal_reputation(0, total, rb, rf, 0.2, 10), 0.0);
}

TEST(PresentValue, MonotoneInHorizonAndDiscount) {
  double prev = 0.0;
  for (double h = 1; h <= 200; h += 1) {
    const double v = pv_marginal_reputation(1, 10, 1, 1, 0.05, h);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = 1e300;
  for (double d = 0.01; d <= 1.0; d += 0.01) {
    const double v = pv_marginal_reputation(1, 10, 1, 1, d, 20);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(PresentValue, BracketOrdersUpperAndLower) {
  const auto b = pv_bracket(10, 100, 0.25, 1, 1, 0.1, 20);
  EXPECT_DOUBLE_EQ(b.upper, pv_marginal_reputation(10, 100, 1, 1, 0.1, 20));
  EXPECT_NEAR(b.lower, 0.75 * b.upper, 1e-15);
}

TEST(VolumeDeterrent, ReferenceValues) {
  EXPECT_DOUBLE_EQ(volume_deterrent_ratio(0, 5), 1.0);
  EXPECT_DOUBLE_EQ(volume_deterrent_ratio(5, 5), 2.0);
  EXPECT_DOUBLE_EQ(volume_deterrent_ratio(10, 5), 3.0);
  EXPECT_THROW((void)volume_deterrent_ratio(1, 0), std::invalid_argument);
}

TEST(AdversaryGrossFee, ReferenceValues) {
  EXPECT_NEAR(reputation_adversary_gross_fee(8, 1, 0.001, 0.7), 10000.0, 1e-8);
  EXPECT_DOUBLE_EQ(reputation_adversary_gross_fee(1, 1, 0.001, 0.7), 0.0);
  EXPECT_NEAR(reputation_adversary_gross_fee(8, 1, 0.0005, 0.7),
              2.0 * reputation_adversary_gross_fee(8, 1, 0.001, 0.7), 1e-8);
}

TEST(StagingCost, ThreeHopsAtOnePercent) {
  EXPECT_NEAR(staging_cost(3, 0.01, 1000), 30.0, 1e-12);
}

TEST(Envelope, PiecewiseShape) {
  EnvelopeSpec s;
  s.t_warmup = 14;
  s.t_ramp = 30;
  EXPECT_DOUBLE_EQ(kappa_envelope(s, 0), 1.0);
  EXPECT_DOUBLE_EQ(kappa_envelope(s, 13), 1.0);
  EXPECT_NEAR(kappa_envelope(s, 15), 1.0 + 7.0 * 15 / 30, 1e-12);
  EXPECT_DOUBLE_EQ(kappa_envelope(s, 40), 8.0);
  s.slash_epoch = 50;
  s.slash_share = 0.1;
  EXPECT_NEAR(kappa_envelope(s, 50), 7.3, 1e-12);
  EXPECT_NEAR(kappa_envelope(s, 65), 7.65, 1e-12);
  EXPECT_DOUBLE_EQ(kappa_envelope(s, 80), 8.0);
  EXPECT_EQ(envelope_phase(s, 3), Phase::warmup);
  EXPECT_EQ(envelope_phase(s, 20), Phase::ramp);
  EXPECT_EQ(envelope_phase(s, 45), Phase::steady);
  EXPECT_EQ(envelope_phase(s, 60), Phase::post_slash);
  EXPECT_TRUE(is_transition_epoch(s, 14));
  EXPECT_TRUE(is_transition_epoch(s, 80));
  EXPECT_FALSE(is_transition_epoch(s, 81));
}

TEST(Envelope, AgreesWithSimulatedTrajectory) {
  // Desk scale, 10 validators, 10%-stake validator slashed mid-run.
  const auto p = ProtocolParams::desk();
  const auto traj = kappa_trajectory(p, 10, 100.0, 60, 35, 0.1, 1);
  EnvelopeSpec s;
  s.t_warmup = p.t_warmup;
  s.t_ramp = p.t_ramp;
  s.slash_epoch = traj.slash_record_epoch;
  s.slash_share = 0.1;
  ASSERT_EQ(traj.records.size(), traj.analytic.size());
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const auto e = traj.records[i].epoch;
    if (is_transition_epoch(s, e) || is_transition_epoch(s, e - 1)) continue;
    EXPECT_NEAR(traj.records[i].kappa, traj.analytic[i], 0.05 * traj.analytic[i]) << "epoch " << e;
  }
}
