#include <gtest/gtest.h>

#include <stdexcept>

#include "poua/defense.hpp"

using namespace poua;

namespace {

Attestation from(Address submitter, bool valid = true) {
  return Attestation(SchemaId{0}, 1, submitter, 10.0, valid);
}

// Independent restatement of the floor: τ·Δr / (η·α_eff) with the recoverable
// part of the burn removed.
double floor_oracle(double tau, double dr, double eta, double a_eff, double keep) {
  return keep * tau * dr / (eta * a_eff);
}

}  // namespace

TEST(Layer1, ExcludesOnlyTheProposersOwnAddress) {
  EXPECT_FALSE(layer1_allows(Address{7}, from(Address{7})));
  EXPECT_TRUE(layer1_allows(Address{7}, from(Address{8})));
  auto v = make_validator(ValidatorId{0}, Address{7}, 1, 1);
  v.controlled_addresses.insert(Address{9});
  // A staged submitter is Layer 2's concern.
  EXPECT_TRUE(layer1_allows(v.address, from(Address{9})));
}

TEST(Layer2, RejectsControlledSubmitters) {
  auto v = make_validator(ValidatorId{0}, Address{7}, 1, 1);
  v.controlled_addresses.insert(Address{9});
  EXPECT_FALSE(layer2_allows(v, from(Address{9})));
  EXPECT_TRUE(layer2_allows(v, from(Address{10})));
  EXPECT_TRUE(layer2_allows(v, from(Address{9}), false));
}

TEST(EarnsCredit, CombinesLayersAndValidity) {
  auto v = make_validator(ValidatorId{0}, Address{7}, 1, 1);
  v.controlled_addresses.insert(Address{9});
  EXPECT_FALSE(earns_credit({true, true}, v, from(Address{10}, false)));
  EXPECT_TRUE(earns_credit({true, false}, v, from(Address{9})));
  EXPECT_FALSE(earns_credit({true, true}, v, from(Address{9})));
  EXPECT_TRUE(earns_credit({false, false}, v, from(Address{7})));
}

TEST(Burn, DestinationsSplitTheFee) {
  auto p = ProtocolParams::v0();
  BurnLedger l;
  EXPECT_DOUBLE_EQ(apply_burn(100, p, l, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(l.burned, 50.0);
  EXPECT_DOUBLE_EQ(l.routed_to_schemas, 50.0);

  p.burn_destination = BurnDestination::treasury;
  BurnLedger t;
  EXPECT_DOUBLE_EQ(apply_burn(100, p, t, 0.3), 5.0);
  EXPECT_DOUBLE_EQ(t.treasury, 50.0);

  p.burn_destination = BurnDestination::redistribution;
  BurnLedger r;
  const double recovered = apply_burn(100, p, r, 1.0 / 3.0);
  EXPECT_NEAR(50.0 - recovered, 33.333333333, 1e-6);
  EXPECT_NEAR((50.0 - recovered) / 50.0, 2.0 / 3.0, 1e-12);
  EXPECT_THROW(apply_burn(-1, p, r, 0.0), std::invalid_argument);
}

TEST(Burn, LedgerConservation) {
  auto p = ProtocolParams::v0();
  BurnLedger l;
  for (auto d : {BurnDestination::pure_burn, BurnDestination::treasury, BurnDestination::redistribution}) {
    p.burn_destination = d;
    for (double f : {1.0, 2.5, 1000.0}) apply_burn(f, p, l, 0.2);
  }
  EXPECT_NEAR(l.burn_share_total() + l.routed_to_schemas, l.processed, 1e-9);
  EXPECT_NEAR(l.processed, 3 * 1003.5, 1e-9);
}

TEST(AlphaEff, ReferenceValues) {
  EXPECT_NEAR(alpha_eff(1, 12, 0.7, 0.3), 0.7, 1e-12);
  EXPECT_NEAR(alpha_eff(4, 12, 0.7, 0.3), 0.775, 1e-12);
  EXPECT_NEAR(alpha_eff(33, 100, 0.7, 0.3), 0.796, 1e-12);
  EXPECT_THROW((void)alpha_eff(13, 12, 0.7, 0.3), std::invalid_argument);
  EXPECT_THROW((void)alpha_eff(0, 12, 0.7, 0.3), std::invalid_argument);
}

TEST(Lemma1, ReferenceFloors) {
  const auto p = ProtocolParams::v0();
  EXPECT_NEAR(lemma1_floor(7, p, 1, 12, BurnDestination::pure_burn, 0) / 5000.0, 1.0, 1e-9);
  EXPECT_NEAR(lemma1_floor(7, p, 4, 12, BurnDestination::pure_burn, 0), 4516.129032258, 1e-6);
  EXPECT_NEAR(lemma1_floor_for_alpha_eff(7, p, 0.8, BurnDestination::pure_burn, 0) / 4375.0, 1.0,
              1e-9);
}

TEST(Lemma1, MatchesIndependentFormulaAcrossDestinations) {
  auto p = ProtocolParams::v0();
  for (int m = 1; m <= 12; ++m) {
    const double ae = 0.7 + (m - 1) * 0.3 / 12.0;
    EXPECT_NEAR(lemma1_floor(7, p, m, 12, BurnDestination::pure_burn, 0),
                floor_oracle(0.5, 7, 0.001, ae, 1.0), 1e-9);
    EXPECT_NEAR(lemma1_floor(7, p, m, 12, BurnDestination::treasury, 0),
                floor_oracle(0.5, 7, 0.001, ae, 0.9), 1e-9);
    EXPECT_NEAR(lemma1_floor(7, p, m, 12, BurnDestination::redistribution, 0.25),
                floor_oracle(0.5, 7, 0.001, ae, 0.75), 1e-9);
  }
}

TEST(Frontier, TableRows) {
  const auto a07 = frontier_row(0.7);
  EXPECT_NEAR(a07.cartel_discount, 0.125, 1e-12);
  EXPECT_NEAR(a07.relative_voter_ramp, 0.6, 1e-12);
  const auto a05 = frontier_row(0.5);
  EXPECT_NEAR(a05.cartel_discount, 0.25, 1e-12);
  EXPECT_NEAR(a05.relative_voter_ramp, 1.0, 1e-12);
  const auto a10 = frontier_row(1.0);
  EXPECT_DOUBLE_EQ(a10.cartel_discount, 0.0);
  EXPECT_DOUBLE_EQ(a10.relative_voter_ramp, 0.0);
}
