#include <gtest/gtest.h>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "poua/detectors.hpp"
#include "poua/rng.hpp"

using namespace poua;

namespace {

// P(X > floor(threshold · n)) for X ~ Binomial(n, p): the exact rate at which
// an ER graph's density clears the threshold.
double exact_er_fpr(double p, double threshold, int n) {
  const boost::math::binomial dist(n, p);
  const double k = std::floor(threshold * n + 1e-12);
  return boost::math::cdf(boost::math::complement(dist, k));
}

std::vector<double> random_distribution(Stream& s, std::size_t k, bool allow_zero) {
  std::vector<double> d(k);
  for (auto& x : d) x = allow_zero && s.bernoulli(0.2) ? 0.0 : -std::log(1.0 - s.uniform01());
  double sum = std::accumulate(d.begin(), d.end(), 0.0);
  if (sum == 0.0) {
    d[0] = 1.0;
    sum = 1.0;
  }
  for (auto& x : d) x /= sum;
  return d;
}

}  // namespace

TEST(KL, ReferenceValues) {
  const std::vector<double> a{0.5, 0.5};
  EXPECT_DOUBLE_EQ(kl_divergence(a, a), 0.0);
  const std::vector<double> point{1.0, 0.0};
  EXPECT_NEAR(kl_divergence(point, a), std::log(2.0), 1e-15);
  EXPECT_NEAR(kl_divergence(point, a), 0.6931, 1e-4);
}

TEST(KL, SupportViolationsThrow) {
  const std::vector<double> a{0.5, 0.5};
  const std::vector<double> b{1.0, 0.0};
  EXPECT_THROW((void)kl_divergence(a, b), std::invalid_argument);
  const std::vector<double> three{0.2, 0.3, 0.5};
  EXPECT_THROW((void)kl_divergence(a, three), std::invalid_argument);
  const std::vector<double> unnormalized{0.5, 0.6};
  EXPECT_THROW((void)kl_divergence(unnormalized, a), std::invalid_argument);
}

TEST(KL, NonNegativeOverRandomPairs) {
  Stream s(2024, StreamTag::sampling);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = 2 + s.below(9);
    const auto q = random_distribution(s, k, false);
    const auto p = random_distribution(s, k, true);
    ASSERT_GE(kl_divergence(p, q), 0.0);
  }
}

TEST(A2Threshold, MatchesChiSquaredOracle) {
  const boost::math::chi_squared one(1);
  const double q = boost::math::quantile(one, 0.99);
  EXPECT_NEAR(q, 6.635, 1e-3);
  EXPECT_NEAR(*a2_threshold(100, 2, 0.01), q / 200.0, 1e-12);
  EXPECT_NEAR(*a2_threshold(100, 2, 0.01), 0.03317, 1e-5);
  for (int k : {3, 5, 12}) {
    const boost::math::chi_squared d(k - 1);
    EXPECT_NEAR(*a2_threshold(40, k, 0.05), boost::math::quantile(d, 0.95) / 80.0, 1e-10);
  }
}

TEST(A2Threshold, LimitsAndScaling) {
  const boost::math::chi_squared three(3);
  const double tiny = boost::math::quantile(three, 1e-9) / 200.0;
  EXPECT_NEAR(*a2_threshold(100, 4, 1.0 - 1e-9), tiny, 1e-6 * tiny);
  EXPECT_LT(tiny, 1e-7);
  EXPECT_NEAR(*a2_threshold(200, 4, 0.01) * 2.0, *a2_threshold(100, 4, 0.01), 1e-15);
  EXPECT_FALSE(a2_threshold(9, 4, 0.01, 10).has_value());
  EXPECT_TRUE(a2_threshold(10, 4, 0.01, 10).has_value());
}

TEST(A2Flag, NeedsConsecutiveExceedances) {
  const std::vector<double> th{1, 1, 1, 1};
  EXPECT_TRUE(a2_flag(std::vector<double>{0, 2, 2, 2}, th, 3));
  EXPECT_FALSE(a2_flag(std::vector<double>{2, 2, 2, 0}, th, 3));
  EXPECT_FALSE(a2_flag(std::vector<double>{2, 2}, std::vector<double>{1, 1}, 3));
  // Equality is not an exceedance.
  EXPECT_FALSE(a2_flag(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1, 1}, 3));
}

TEST(A3Threshold, MatchesNormalOracle) {
  const boost::math::normal n;
  const double z = boost::math::quantile(n, 0.99);
  EXPECT_NEAR(z, 2.326, 1e-3);
  EXPECT_NEAR(a3_threshold(0.05, 900, 0.01), 0.05 + z * std::sqrt(0.05 * 0.95 / 900), 1e-12);
  EXPECT_NEAR(a3_threshold(0.05, 900, 0.01), 0.0669, 1e-4);
  EXPECT_NEAR(a3_threshold(0.05, 1e18, 0.01), 0.05, 1e-9);
  EXPECT_THROW((void)a3_threshold(0.0, 900, 0.01), std::invalid_argument);
  EXPECT_THROW((void)a3_threshold(0.05, 0.5, 0.01), std::invalid_argument);
}

TEST(NullGraph, ErdosRenyiEdgeCount) {
  double total = 0.0;
  const int graphs = 400;
  for (int i = 0; i < graphs; ++i) {
    total += static_cast<double>(generate_null_graph(ErdosRenyi{0.05}, 30, 30, i).edges.size());
  }
  const double sd_mean = std::sqrt(900 * 0.05 * 0.95 / graphs);
  EXPECT_NEAR(total / graphs, 45.0, 3 * sd_mean);
  EXPECT_TRUE(generate_null_graph(ErdosRenyi{0.0}, 30, 30, 1).edges.empty());
  EXPECT_EQ(generate_null_graph(ErdosRenyi{1.0}, 4, 5, 1).edges.size(), 20U);
}

TEST(NullGraph, ChungLuProbabilitiesMatchIndependentConstruction) {
  for (double gamma : {2.0, 2.5, 3.0}) {
    for (double p : {0.02, 0.2}) {
      const auto probs = pair_probabilities(ChungLu{p, gamma}, 30, 20);
      std::vector<double> wl(30);
      std::vector<double> wr(20);
      for (std::size_t i = 0; i < wl.size(); ++i) wl[i] = std::pow(i + 1.0, -1.0 / (gamma - 1.0));
      for (std::size_t i = 0; i < wr.size(); ++i) wr[i] = std::pow(i + 1.0, -1.0 / (gamma - 1.0));
      const double c = p * 600.0 /
                       (std::accumulate(wl.begin(), wl.end(), 0.0) * std::accumulate(wr.begin(), wr.end(), 0.0));
      double unclipped = 0.0;
      for (std::size_t u = 0; u < 30; ++u) {
        for (std::size_t w = 0; w < 20; ++w) {
          const double raw = c * wl[u] * wr[w];
          unclipped += raw;
          ASSERT_NEAR(probs[u * 20 + w], std::min(1.0, raw), 1e-15);
        }
      }
      // Before clipping the expected density is exactly the target.
      EXPECT_NEAR(unclipped / 600.0, p, 1e-12);
    }
  }
}

TEST(NullGraph, ChungLuSampledDensityMatchesClippedExpectation) {
  const auto m = ChungLu{0.2, 2.0};
  const auto probs = pair_probabilities(m, 30, 30);
  const double expected = std::accumulate(probs.begin(), probs.end(), 0.0) / 900.0;
  // Hub-pair clipping pulls the realised density below the target.
  EXPECT_LT(expected, 0.2);
  double var = 0.0;
  for (double q : probs) var += q * (1 - q);
  const int graphs = 300;
  double total = 0.0;
  for (int i = 0; i < graphs; ++i) total += generate_null_graph(m, 30, 30, 1000 + i).density();
  EXPECT_NEAR(total / graphs, expected, 4 * std::sqrt(var / graphs) / 900.0);
}

TEST(Fpr, ErdosRenyiMatchesExactBinomialTail) {
  // The Normal-approximation threshold is compared with the exact tail rate,
  // which is what the Monte Carlo should reproduce.
  FprGrid grid;
  grid.p_base = {0.05, 0.2};
  grid.include_chung_lu = false;
  grid.trials = 4000;
  for (double beta : {0.01, 0.5}) {
    grid.beta_3 = beta;
    for (const auto& row : fpr_experiment(grid, 77, 4)) {
      const double want = exact_er_fpr(row.p_base, a3_threshold(row.p_base, 900, beta), 900);
      const double sd = std::sqrt(want * (1 - want) / grid.trials);
      EXPECT_NEAR(row.realized_fpr, want, 4 * sd) << "p=" << row.p_base << " beta=" << beta;
    }
  }
}

TEST(Fpr, MedianThresholdFlagsAboutHalf) {
  FprGrid grid;
  grid.p_base = {0.2};
  grid.include_chung_lu = false;
  grid.trials = 2000;
  grid.beta_3 = 0.5;
  const auto rows = fpr_experiment(grid, 5, 2);
  EXPECT_NEAR(rows[0].realized_fpr, 0.5, 0.06);
}

TEST(Fpr, IndependentOfThreadCount) {
  FprGrid grid;
  grid.p_base = {0.05, 0.1};
  grid.exponents = {2.5};
  grid.trials = 300;
  const auto a = fpr_experiment(grid, 3, 1);
  const auto b = fpr_experiment(grid, 3, 8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].flagged, b[i].flagged);
}

TEST(Tpr, FullCartelBlockIsAlwaysFlagged) {
  const auto rows = tpr_scan({0.05}, {2, 10}, 200, 0.01, 30, 30, 4);
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_LT(rows[0].realized_tpr, rows[1].realized_tpr);
  EXPECT_DOUBLE_EQ(rows[1].realized_tpr, 1.0);
}

namespace {

struct CartelFixture {
  Registry registry;
  SchemaId honest_schema;
  SchemaId cartel_schema;
  std::vector<Address> pool;

  CartelFixture() {
    const auto hs = registry.add_attestor_set({Address{1}, Address{2}, Address{3}});
    honest_schema = registry.add_schema(hs, 1, 1.0, Address{4});
    const std::vector<Address> cm{Address{11}, Address{12}, Address{13}};
    const auto cs = registry.add_attestor_set(cm);
    cartel_schema = registry.add_schema(cs, 1, 1.0, Address{14});
    for (Address a : cm) registry.set_cartel(a, 0);
    for (std::uint64_t i = 0; i < 5; ++i) {
      pool.push_back(Address{100 + i});
      registry.set_cartel(pool.back(), 0);
    }
  }

  std::vector<ProposerEpochView> epoch() const {
    ProposerEpochView grinder{ValidatorId{0}, {}};
    for (Address a : pool) grinder.attestations.emplace_back(cartel_schema, a.value, a, 1.0, true);
    ProposerEpochView honest{ValidatorId{1}, {}};
    for (std::uint64_t i = 0; i < 20; ++i) {
      honest.attestations.emplace_back(honest_schema, i, Address{1000 + i}, 1.0, true);
    }
    return {grinder, honest};
  }
};

}  // namespace

TEST(CorrelationGraph, CountsCartelPairs) {
  CartelFixture f;
  const auto views = f.epoch();
  const auto g = correlation_graph(views[0].attestations, f.registry);
  EXPECT_EQ(g.left, 5U);
  EXPECT_EQ(g.right, 3U);
  EXPECT_EQ(g.edges, 15U);
  const auto h = correlation_graph(views[1].attestations, f.registry);
  EXPECT_EQ(h.edges, 0U);
}

TEST(A3DetectorTest, SlashesGrinderAfterTDetectEpochs) {
  CartelFixture f;
  const auto p = ProtocolParams::v0();
  A3SlashConfig cfg;
  cfg.enabled = true;
  A3Detector det(cfg);
  for (int e = 0; e < 2; ++e) {
    EpochTally t(e);
    EXPECT_TRUE(det.evaluate(f.epoch(), f.registry, p, t).empty());
  }
  EpochTally t(2);
  const auto slashes = det.evaluate(f.epoch(), f.registry, p, t);
  ASSERT_EQ(slashes.size(), 1U);
  EXPECT_EQ(slashes[0].validator, ValidatorId{0});
  EXPECT_DOUBLE_EQ(t.at(ValidatorId{0}).b, p.severities.a3);
  EXPECT_DOUBLE_EQ(t.at(ValidatorId{1}).b, 0.0);
  // One epoch takes a maximal-reputation grinder to the floor.
  EXPECT_DOUBLE_EQ(apply_epoch_update(p.r_max, t.at(ValidatorId{0}), p), p.r_min);
}

TEST(A3DetectorTest, DisabledNeverSlashes) {
  CartelFixture f;
  A3Detector det(A3SlashConfig{});
  for (int e = 0; e < 10; ++e) {
    EpochTally t(e);
    EXPECT_TRUE(det.evaluate(f.epoch(), f.registry, ProtocolParams::v0(), t).empty());
  }
}

TEST(A2DetectorTest, FlagsSkewedProposerOnly) {
  A2Config cfg;
  cfg.enabled = true;
  A2Detector det(cfg);
  const auto p = ProtocolParams::v0();
  // Validator 0 serves only schema 0; the rest spread evenly over 4 schemas.
  auto epoch = [] {
    std::vector<ProposerEpochView> views;
    for (std::uint32_t v = 0; v < 6; ++v) {
      ProposerEpochView view{ValidatorId{v}, {}};
      for (std::uint32_t i = 0; i < 40; ++i) {
        const SchemaId s{v == 0 ? 0U : i % 4};
        view.attestations.emplace_back(s, i, Address{i + 1}, 1.0, true);
      }
      views.push_back(view);
    }
    return views;
  };
  std::vector<ValidatorId> flagged;
  for (int e = 0; e < 3; ++e) {
    EpochTally t(e);
    flagged = det.evaluate(epoch(), 4, p, t);
  }
  ASSERT_EQ(flagged.size(), 1U);
  EXPECT_EQ(flagged[0], ValidatorId{0});
  EXPECT_EQ(det.evaluations(), 18U);
  EXPECT_EQ(det.flags(), 1U);
}
