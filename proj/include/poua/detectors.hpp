#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "poua/params.hpp"
#include "poua/registry.hpp"
#include "poua/reputation.hpp"
#include "poua/types.hpp"

namespace poua {

struct A3SlashConfig {
  bool enabled = false;
  double beta_3 = 0.01;
  // Funding-history horizon of the production correlation predicate. The
  // simulator uses exact cartel membership, so this is carried but unused.
  std::int64_t t_lookback = 100;
  int t_detect = 3;
  // Defaults to the params' A3 severity when unset.
  std::optional<double> severity;
  // Use the previous epoch's chain-wide density as the baseline instead of
  // the same epoch's.
  bool prior_epoch_baseline = false;
};

struct A2Config {
  bool enabled = false;
  double beta_2 = 0.01;
  std::int64_t n_min = 10;
  int t_detect = 3;
  bool slash = false;
};

// Σ d_v ln(d_v/d_net) in nats. Throws std::invalid_argument on size mismatch,
// unnormalized input, or d_net = 0 where d_v > 0.
double kl_divergence(std::span<const double> d_v, std::span<const double> d_net);

// χ²_{num_schemas−1, 1−β2} / (2 n_v); nullopt (abstain) when n_v < n_min.
std::optional<double> a2_threshold(std::int64_t n_v, int num_schemas, double beta_2,
                                   std::int64_t n_min = 10);

// True iff each of the last t_detect values exceeds its threshold.
bool a2_flag(std::span<const double> kl_history, std::span<const double> thresholds,
             int t_detect);

// p + z_{1−β3} sqrt(p(1−p)/|U||W|).
double a3_threshold(double p_base, double product_uw, double beta_3);

struct BipartiteGraph {
  std::uint32_t left_size = 0;
  std::uint32_t right_size = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  [[nodiscard]] double density() const;
};

struct ErdosRenyi {
  double p = 0.0;
};

// Power-law expected degrees w_i ∝ (i+1)^{-1/(exponent−1)} on both sides, so
// the degree distribution has tail exponent `exponent`. Pair probability is
// min(1, c·w_u·w_w) with c fixed so the unclipped expected density equals
// p_target; clipping of hub pairs is deliberate.
struct ChungLu {
  double p_target = 0.0;
  double exponent = 2.5;
};

using NullModel = std::variant<ErdosRenyi, ChungLu>;

std::string null_kind_name(const NullModel& m);

// Pair probability matrix (row-major, left × right) for a null model.
std::vector<double> pair_probabilities(const NullModel& m, std::uint32_t left,
                                       std::uint32_t right);

BipartiteGraph generate_null_graph(const NullModel& m, std::uint32_t left,
                                   std::uint32_t right, std::uint64_t seed);

struct FprRow {
  std::string null_kind;
  double p_base = 0.0;
  std::optional<double> exponent;
  int trials = 0;
  int flagged = 0;
  double realized_fpr = 0.0;
  double nominal_beta3 = 0.0;
  double mean_density = 0.0;
};

struct FprGrid {
  std::vector<double> p_base = {0.02, 0.05, 0.10, 0.15, 0.20};
  std::vector<double> exponents = {2.0, 2.5, 3.0};
  int trials = 5000;
  double beta_3 = 0.01;
  std::uint32_t left = 30;
  std::uint32_t right = 30;
  bool include_erdos_renyi = true;
  bool include_chung_lu = true;
};

// Fraction of null graphs whose density exceeds the threshold built from the
// cell's nominal p_base. Trials are split across `jobs` threads; each trial
// has its own seed so the result does not depend on `jobs`.
std::vector<FprRow> fpr_experiment(const FprGrid& grid, std::uint64_t seed, int jobs = 1);

struct TprRow {
  double p_base = 0.0;
  std::uint32_t cartel_submitters = 0;
  std::uint32_t cartel_attestors = 0;
  int trials = 0;
  double realized_tpr = 0.0;
  double nominal_beta3 = 0.0;
};

// ER background with a fully connected planted cartel block.
std::vector<TprRow> tpr_scan(const std::vector<double>& p_grid,
                             const std::vector<std::uint32_t>& cartel_sizes,
                             int trials, double beta_3, std::uint32_t left,
                             std::uint32_t right, std::uint64_t seed);

// Attestations one proposer got credit for during an epoch.
struct ProposerEpochView {
  ValidatorId proposer{};
  std::vector<Attestation> attestations;
};

struct GraphCounts {
  std::uint64_t left = 0;
  std::uint64_t right = 0;
  std::uint64_t edges = 0;

  [[nodiscard]] double product() const { return static_cast<double>(left) * static_cast<double>(right); }
  [[nodiscard]] double density() const;
};

// Submitters × attestor-set members graph; (u, w) is an edge when both lie in
// the same cartel's controlled-address universe.
GraphCounts correlation_graph(std::span<const Attestation> attestations,
                              const Registry& registry);

class A3Detector {
 public:
  explicit A3Detector(A3SlashConfig config) : config_(std::move(config)) {}

  // Evaluates one closing epoch and records a severe slash for every
  // proposer flagged t_detect epochs in a row.
  std::vector<SlashRecord> evaluate(std::span<const ProposerEpochView> epoch,
                                    const Registry& registry,
                                    const ProtocolParams& params, EpochTally& tally);

  [[nodiscard]] const A3SlashConfig& config() const { return config_; }
  [[nodiscard]] double last_baseline() const { return last_baseline_; }

 private:
  A3SlashConfig config_;
  std::vector<int> run_length_;
  std::optional<double> prior_baseline_;
  double last_baseline_ = 0.0;
};

class A2Detector {
 public:
  explicit A2Detector(A2Config config) : config_(config) {}

  // Returns the ids flagged this epoch; records A2 slashes if configured.
  std::vector<ValidatorId> evaluate(std::span<const ProposerEpochView> epoch,
                                    std::uint32_t num_schemas,
                                    const ProtocolParams& params, EpochTally& tally);

  // Validator-epochs that were tested, and how many ended in a flag.
  [[nodiscard]] std::uint64_t evaluations() const { return evaluations_; }
  [[nodiscard]] std::uint64_t flags() const { return flags_; }

 private:
  A2Config config_;
  std::vector<int> run_length_;
  std::uint64_t evaluations_ = 0;
  std::uint64_t flags_ = 0;
};

}  // namespace poua
