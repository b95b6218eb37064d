#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "poua/analytics.hpp"
#include "poua/chain.hpp"
#include "poua/experiments.hpp"

using namespace poua;

namespace {

ChainState state_of(std::vector<std::pair<double, double>> stake_rep, bool warmup = false) {
  ChainState s;
  s.warmup_active = warmup;
  s.rng_seed = 17;
  for (std::size_t i = 0; i < stake_rep.size(); ++i) {
    s.validators.push_back(make_validator(ValidatorId{static_cast<std::uint32_t>(i)},
                                          Address{i + 1}, stake_rep[i].first, stake_rep[i].second));
  }
  return s;
}

double frequency_of(const ChainState& s, ValidatorId who, int slots) {
  int hits = 0;
  for (Slot t = 0; t < slots; ++t) hits += select_proposer(s, t) == who ? 1 : 0;
  return static_cast<double>(hits) / slots;
}

ProtocolParams fast_params() {
  auto p = ProtocolParams::desk();
  p.epoch_length = 10;
  return p;
}

}  // namespace

TEST(Selection, SingleValidatorAlwaysWins) {
  const auto s = state_of({{5.0, 2.0}});
  for (Slot t = 0; t < 100; ++t) EXPECT_EQ(select_proposer(s, t), ValidatorId{0});
}

TEST(Selection, FrequencyFollowsWeight) {
  // Weights 1 and 3.
  const auto s = state_of({{1.0, 1.0}, {3.0, 1.0}});
  const int n = 10000;
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  EXPECT_NEAR(frequency_of(s, ValidatorId{1}, n), 0.75, 3 * sigma);
}

TEST(Selection, WarmupUsesStakeOnly) {
  const auto s = state_of({{1.0, 8.0}, {1.0, 1.0}}, true);
  const int n = 10000;
  EXPECT_NEAR(frequency_of(s, ValidatorId{0}, n), 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(Selection, RejectsEmptyOrZeroWeightSets) {
  EXPECT_THROW((void)select_proposer(state_of({}), 0), std::runtime_error);
  EXPECT_THROW((void)select_proposer(state_of({{0.0, 1.0}}), 0), std::runtime_error);
}

TEST(Selection, SkipsInactiveValidators) {
  auto s = state_of({{1.0, 1.0}, {1.0, 1.0}});
  s.validators[0].lifecycle = Lifecycle::unbonding;
  for (Slot t = 0; t < 50; ++t) EXPECT_EQ(select_proposer(s, t), ValidatorId{1});
}

TEST(Commit, StrictTwoThirds) {
  auto s = state_of({{6.0, 1.0}, {3.0, 1.0}});
  Block b;
  b.proposer = ValidatorId{0};
  EXPECT_FALSE(tally_commit(b, s));
  s = state_of({{6.01, 1.0}, {2.99, 1.0}});
  EXPECT_TRUE(tally_commit(b, s));
}

TEST(Commit, ProposerCountedOnce) {
  auto s = state_of({{6.0, 1.0}, {3.0, 1.0}});
  Block b;
  b.proposer = ValidatorId{0};
  b.voters = {ValidatorId{0}, ValidatorId{0}};
  EXPECT_FALSE(tally_commit(b, s));
}

TEST(ChainRun, HonestSynchronousEpochCommitsEverySlot) {
  const auto p = fast_params();
  auto chain = make_saturated_chain(p, 8, 100.0, 2.0, ChainOptions{}, 3);
  chain.run_epochs(1);
  EXPECT_EQ(chain.committed_blocks(), static_cast<std::uint64_t>(p.epoch_length));
}

TEST(ChainRun, KappaIsOneDuringWarmupThenReachesCeiling) {
  const auto p = fast_params();
  auto chain = make_saturated_chain(p, 6, 100.0, 2.0, ChainOptions{}, 5);
  for (Epoch e = 0; e < p.t_warmup - 1; ++e) {
    chain.run_epochs(1);
    EXPECT_DOUBLE_EQ(chain.kappa(), 1.0) << "epoch " << e;
  }
  chain.run_epochs(p.t_ramp + 2);
  EXPECT_NEAR(chain.kappa(), 8.0, 1e-9);
}

TEST(ChainRun, ExitUnbondsForTUnbondThenLeaves) {
  auto p = fast_params();
  p.t_warmup = 0;
  auto chain = make_saturated_chain(p, 5, 100.0, 2.0, ChainOptions{}, 7);
  chain.run_epochs(2);
  chain.request_exit(ValidatorId{2});
  chain.run_epochs(1);
  EXPECT_EQ(chain.state().validators[2].lifecycle, Lifecycle::unbonding);
  // Still slashable while unbonding.
  const double before = chain.state().validators[2].reputation;
  chain.slash(ValidatorId{2}, SlashClass::a3);
  chain.run_epochs(1);
  EXPECT_LT(chain.state().validators[2].reputation, before);
  chain.run_epochs(p.t_unbond - 2);
  EXPECT_EQ(chain.state().validators[2].lifecycle, Lifecycle::unbonding);
  chain.run_epochs(1);
  EXPECT_EQ(chain.state().validators[2].lifecycle, Lifecycle::exited);
}

TEST(ChainRun, ReentryRestartsAtRMin) {
  auto p = fast_params();
  p.t_warmup = 0;
  p.t_unbond = 1;
  auto chain = make_saturated_chain(p, 4, 100.0, 2.0, ChainOptions{}, 9);
  chain.run_epochs(5);
  ASSERT_GT(chain.state().validators[1].reputation, p.r_min);
  chain.request_exit(ValidatorId{1});
  chain.run_epochs(2);
  ASSERT_EQ(chain.state().validators[1].lifecycle, Lifecycle::exited);
  chain.request_reentry(ValidatorId{1}, 100.0);
  chain.run_epochs(1);
  EXPECT_TRUE(chain.state().validators[1].is_active());
  EXPECT_DOUBLE_EQ(chain.state().validators[1].reputation, p.r_min);
}

TEST(Kappa, ReferenceCases) {
  auto s = state_of({{1.0, 8.0}, {3.0, 8.0}});
  EXPECT_DOUBLE_EQ(realized_kappa(s, 1.0), 8.0);
  s.warmup_active = true;
  EXPECT_DOUBLE_EQ(realized_kappa(s, 1.0), 1.0);
}

TEST(Kappa, IgnoresByzantineValidators) {
  auto s = state_of({{1.0, 8.0}, {1.0, 1.0}});
  s.validators[1].policy = BehaviorPolicy::grind(3, 0);
  EXPECT_DOUBLE_EQ(realized_kappa(s, 1.0), 8.0);
}
