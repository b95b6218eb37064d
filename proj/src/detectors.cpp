#include "poua/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "poua/parallel.hpp"
#include "poua/rng.hpp"
#include "poua/special_functions.hpp"

namespace poua {

double kl_divergence(std::span<const double> d_v, std::span<const double> d_net) {
  if (d_v.size() != d_net.size()) throw std::invalid_argument("distribution size mismatch");
  const double sv = std::accumulate(d_v.begin(), d_v.end(), 0.0);
  const double sn = std::accumulate(d_net.begin(), d_net.end(), 0.0);
  if (std::abs(sv - 1.0) > 1e-9 || std::abs(sn - 1.0) > 1e-9) {
    throw std::invalid_argument("distributions must sum to 1");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < d_v.size(); ++i) {
    if (d_v[i] < 0.0 || d_net[i] < 0.0) throw std::invalid_argument("negative probability");
    if (d_v[i] == 0.0) continue;
    if (d_net[i] == 0.0) throw std::invalid_argument("d_net has no mass where d_v does");
    kl += d_v[i] * std::log(d_v[i] / d_net[i]);
  }
  // Rounding can leave a -1e-17 residue for identical inputs.
  return std::max(kl, 0.0);
}

std::optional<double> a2_threshold(std::int64_t n_v, int num_schemas, double beta_2,
                                   std::int64_t n_min) {
  if (n_v < n_min || n_v <= 0) return std::nullopt;
  if (num_schemas < 2) throw std::invalid_argument("a2 threshold needs at least two schemas");
  if (!(beta_2 > 0.0 && beta_2 < 1.0)) throw std::invalid_argument("beta_2 must lie in (0,1)");
  return chi_squared_quantile(num_schemas - 1, 1.0 - beta_2) / (2.0 * static_cast<double>(n_v));
}

bool a2_flag(std::span<const double> kl_history, std::span<const double> thresholds, int t_detect) {
  if (kl_history.size() != thresholds.size()) throw std::invalid_argument("history size mismatch");
  if (t_detect < 1 || kl_history.size() < static_cast<std::size_t>(t_detect)) return false;
  for (std::size_t i = kl_history.size() - static_cast<std::size_t>(t_detect); i < kl_history.size(); ++i) {
    if (!(kl_history[i] > thresholds[i])) return false;
  }
  return true;
}

double a3_threshold(double p_base, double product_uw, double beta_3) {
  if (!(p_base > 0.0 && p_base < 1.0)) throw std::invalid_argument("p_base must lie in (0,1)");
  if (!(product_uw >= 1.0)) throw std::invalid_argument("|U||W| must be >= 1");
  if (!(beta_3 > 0.0 && beta_3 < 1.0)) throw std::invalid_argument("beta_3 must lie in (0,1)");
  return p_base + normal_quantile(1.0 - beta_3) * std::sqrt(p_base * (1.0 - p_base) / product_uw);
}

double BipartiteGraph::density() const {
  const double product = static_cast<double>(left_size) * static_cast<double>(right_size);
  return product > 0.0 ? static_cast<double>(edges.size()) / product : 0.0;
}

std::string null_kind_name(const NullModel& m) {
  return std::holds_alternative<ErdosRenyi>(m) ? "erdos_renyi" : "chung_lu";
}

namespace {

std::vector<double> power_law_weights(std::uint32_t n, double exponent) {
  if (!(exponent > 1.0)) throw std::invalid_argument("Chung-Lu exponent must be > 1");
  std::vector<double> w(n);
  for (std::uint32_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i) + 1.0, -1.0 / (exponent - 1.0));
  return w;
}

}  // namespace

std::vector<double> pair_probabilities(const NullModel& m, std::uint32_t left, std::uint32_t right) {
  std::vector<double> probs(static_cast<std::size_t>(left) * right);
  if (const auto* er = std::get_if<ErdosRenyi>(&m)) {
    if (er->p < 0.0 || er->p > 1.0) throw std::invalid_argument("ER p must lie in [0,1]");
    std::fill(probs.begin(), probs.end(), er->p);
    return probs;
  }
  const auto& cl = std::get<ChungLu>(m);
  if (cl.p_target < 0.0 || cl.p_target > 1.0) throw std::invalid_argument("p_target must lie in [0,1]");
  const auto wl = power_law_weights(left, cl.exponent);
  const auto wr = power_law_weights(right, cl.exponent);
  const double sl = std::accumulate(wl.begin(), wl.end(), 0.0);
  const double sr = std::accumulate(wr.begin(), wr.end(), 0.0);
  // Unclipped mean of c·w_u·w_w is c·ΣwL·ΣwR/(L·R); solve for c.
  const double c = cl.p_target * static_cast<double>(left) * static_cast<double>(right) / (sl * sr);
  for (std::uint32_t u = 0; u < left; ++u) {
    for (std::uint32_t w = 0; w < right; ++w) {
      probs[static_cast<std::size_t>(u) * right + w] = std::min(1.0, c * wl[u] * wr[w]);
    }
  }
  return probs;
}

namespace {

BipartiteGraph sample_graph(const std::vector<double>& probs, std::uint32_t left, std::uint32_t right,
                            std::uint64_t seed) {
  BipartiteGraph g{left, right, {}};
  Stream rs(seed, StreamTag::graph);
  for (std::uint32_t u = 0; u < left; ++u) {
    for (std::uint32_t w = 0; w < right; ++w) {
      if (rs.uniform01() < probs[static_cast<std::size_t>(u) * right + w]) g.edges.emplace_back(u, w);
    }
  }
  return g;
}

}  // namespace

BipartiteGraph generate_null_graph(const NullModel& m, std::uint32_t left, std::uint32_t right,
                                   std::uint64_t seed) {
  return sample_graph(pair_probabilities(m, left, right), left, right, seed);
}

std::vector<FprRow> fpr_experiment(const FprGrid& grid, std::uint64_t seed, int jobs) {
  if (grid.trials < 1) throw std::invalid_argument("fpr experiment needs trials >= 1");
  std::vector<NullModel> models;
  if (grid.include_erdos_renyi) {
    for (double p : grid.p_base) models.emplace_back(ErdosRenyi{p});
  }
  if (grid.include_chung_lu) {
    for (double p : grid.p_base) {
      for (double e : grid.exponents) models.emplace_back(ChungLu{p, e});
    }
  }
  const double product = static_cast<double>(grid.left) * static_cast<double>(grid.right);
  return parallel_map<FprRow>(models.size(), jobs, [&](std::size_t i) {
    const auto& m = models[i];
    FprRow row;
    row.null_kind = null_kind_name(m);
    if (const auto* er = std::get_if<ErdosRenyi>(&m)) {
      row.p_base = er->p;
    } else {
      row.p_base = std::get<ChungLu>(m).p_target;
      row.exponent = std::get<ChungLu>(m).exponent;
    }
    row.trials = grid.trials;
    row.nominal_beta3 = grid.beta_3;
    const double threshold = a3_threshold(row.p_base, product, grid.beta_3);
    const auto probs = pair_probabilities(m, grid.left, grid.right);
    double density_sum = 0.0;
    for (int t = 0; t < grid.trials; ++t) {
      const auto g = sample_graph(probs, grid.left, grid.right,
                                  mix_key({seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t)}));
      const double d = g.density();
      density_sum += d;
      if (d > threshold) ++row.flagged;
    }
    row.realized_fpr = static_cast<double>(row.flagged) / grid.trials;
    row.mean_density = density_sum / grid.trials;
    return row;
  });
}

std::vector<TprRow> tpr_scan(const std::vector<double>& p_grid,
                             const std::vector<std::uint32_t>& cartel_sizes, int trials,
                             double beta_3, std::uint32_t left, std::uint32_t right,
                             std::uint64_t seed) {
  std::vector<TprRow> rows;
  const double product = static_cast<double>(left) * static_cast<double>(right);
  std::uint64_t cell = 0;
  for (double p : p_grid) {
    for (std::uint32_t size : cartel_sizes) {
      TprRow row;
      row.p_base = p;
      row.cartel_submitters = std::min(size, left);
      row.cartel_attestors = std::min(size, right);
      row.trials = trials;
      row.nominal_beta3 = beta_3;
      auto probs = pair_probabilities(ErdosRenyi{p}, left, right);
      for (std::uint32_t u = 0; u < row.cartel_submitters; ++u) {
        for (std::uint32_t w = 0; w < row.cartel_attestors; ++w) probs[static_cast<std::size_t>(u) * right + w] = 1.0;
      }
      const double threshold = a3_threshold(p, product, beta_3);
      int hits = 0;
      for (int t = 0; t < trials; ++t) {
        const auto g = sample_graph(probs, left, right, mix_key({seed, cell, static_cast<std::uint64_t>(t)}));
        if (g.density() > threshold) ++hits;
      }
      row.realized_tpr = static_cast<double>(hits) / trials;
      rows.push_back(row);
      ++cell;
    }
  }
  return rows;
}

double GraphCounts::density() const {
  const double p = product();
  return p > 0.0 ? static_cast<double>(edges) / p : 0.0;
}

GraphCounts correlation_graph(std::span<const Attestation> attestations, const Registry& registry) {
  std::vector<Address> submitters;
  std::vector<Address> members;
  std::vector<SchemaId> schemas;
  for (const auto& a : attestations) {
    submitters.push_back(a.submitter());
    schemas.push_back(a.schema());
  }
  std::sort(schemas.begin(), schemas.end());
  schemas.erase(std::unique(schemas.begin(), schemas.end()), schemas.end());
  for (SchemaId s : schemas) {
    const auto& set = registry.attestor_set(registry.schema(s).attestor_set);
    members.insert(members.end(), set.members.begin(), set.members.end());
  }
  auto dedupe = [](std::vector<Address>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  };
  dedupe(submitters);
  dedupe(members);

  std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> per_cartel;
  for (Address a : submitters) {
    if (auto c = registry.cartel_of(a)) ++per_cartel[*c].first;
  }
  for (Address a : members) {
    if (auto c = registry.cartel_of(a)) ++per_cartel[*c].second;
  }
  GraphCounts g{submitters.size(), members.size(), 0};
  for (const auto& [c, counts] : per_cartel) g.edges += counts.first * counts.second;
  return g;
}

std::vector<SlashRecord> A3Detector::evaluate(std::span<const ProposerEpochView> epoch,
                                              const Registry& registry,
                                              const ProtocolParams& params, EpochTally& tally) {
  if (!config_.enabled) return {};
  std::vector<Attestation> all;
  for (const auto& view : epoch) all.insert(all.end(), view.attestations.begin(), view.attestations.end());
  const double same_epoch = correlation_graph(all, registry).density();
  const double baseline =
      config_.prior_epoch_baseline ? prior_baseline_.value_or(same_epoch) : same_epoch;
  prior_baseline_ = same_epoch;
  last_baseline_ = baseline;

  std::vector<SlashRecord> out;
  const double amount = config_.severity.value_or(params.severities.a3);
  for (const auto& view : epoch) {
    const auto g = correlation_graph(view.attestations, registry);
    if (g.product() < 1.0) continue;  // abstain: nothing to test
    const auto id = view.proposer.value;
    if (run_length_.size() <= id) run_length_.resize(id + 1, 0);
    bool exceeds = false;
    if (baseline > 0.0 && baseline < 1.0) {
      exceeds = g.density() > a3_threshold(baseline, g.product(), config_.beta_3);
    }
    run_length_[id] = exceeds ? run_length_[id] + 1 : 0;
    if (run_length_[id] >= config_.t_detect) {
      tally.entry(view.proposer).b += amount;
      out.push_back(SlashRecord{view.proposer, SlashClass::a3, amount, tally.epoch(), false});
    }
  }
  return out;
}

std::vector<ValidatorId> A2Detector::evaluate(std::span<const ProposerEpochView> epoch,
                                              std::uint32_t num_schemas,
                                              const ProtocolParams& params, EpochTally& tally) {
  if (!config_.enabled) return {};
  std::vector<double> net(num_schemas, 0.0);
  double total = 0.0;
  for (const auto& view : epoch) {
    for (const auto& a : view.attestations) {
      net.at(a.schema().value) += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) return {};
  // Only schemas present in the network distribution carry degrees of freedom.
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < net.size(); ++s) {
    if (net[s] > 0.0) support.push_back(s);
  }
  if (support.size() < 2) return {};
  std::vector<double> d_net;
  for (std::size_t s : support) d_net.push_back(net[s] / total);

  std::vector<ValidatorId> flagged;
  for (const auto& view : epoch) {
    const auto n_v = static_cast<std::int64_t>(view.attestations.size());
    const auto threshold =
        a2_threshold(n_v, static_cast<int>(support.size()), config_.beta_2, config_.n_min);
    if (!threshold) continue;
    ++evaluations_;
    std::vector<double> counts(net.size(), 0.0);
    for (const auto& a : view.attestations) counts[a.schema().value] += 1.0;
    std::vector<double> d_v;
    for (std::size_t s : support) d_v.push_back(counts[s] / static_cast<double>(n_v));
    const auto id = view.proposer.value;
    if (run_length_.size() <= id) run_length_.resize(id + 1, 0);
    run_length_[id] = kl_divergence(d_v, d_net) > *threshold ? run_length_[id] + 1 : 0;
    if (run_length_[id] >= config_.t_detect) {
      flagged.push_back(view.proposer);
      ++flags_;
      if (config_.slash) record_slash(tally, view.proposer, SlashClass::a2, params);
    }
  }
  return flagged;
}

}  // namespace poua
