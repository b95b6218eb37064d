#include "poua/adversary.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "poua/parallel.hpp"
#include "poua/rng.hpp"

namespace poua {

std::vector<Block> build_block(const BehaviorPolicy& policy, const Validator& proposer,
                               std::span<const Attestation> pending, const BuildContext& ctx) {
  Block block;
  block.slot = ctx.slot;
  block.proposer = proposer.id;
  auto include_if = [&](auto&& keep) {
    for (const auto& a : pending) {
      if (a.is_valid() && keep(a)) block.attestations.push_back(a);
    }
  };
  auto all = [](const Attestation&) { return true; };

  switch (policy.kind) {
    case PolicyKind::honest:
    case PolicyKind::capital_entrant:
      include_if(all);
      break;
    case PolicyKind::censor_schema:
      include_if([&](const Attestation& a) { return a.schema() != policy.censored_schema; });
      break;
    case PolicyKind::free_riding_voter:
      break;
    case PolicyKind::grind_via_staged_submitters: {
      include_if(all);
      if (ctx.cartel == nullptr) break;
      const auto& pool = ctx.cartel->pool;
      const auto n = std::min<std::size_t>(policy.pool_size, pool.size());
      Stream gs(ctx.seed, StreamTag::grind, static_cast<std::uint64_t>(ctx.slot));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < ctx.grind.attestations_per_submitter; ++j) {
          block.attestations.emplace_back(ctx.cartel->owned_schema, gs.next(), pool[i],
                                          ctx.grind.fee, true);
        }
      }
      break;
    }
    case PolicyKind::equivocate: {
      include_if(all);
      Block twin = block;
      twin.attestations.clear();
      return {std::move(block), std::move(twin)};
    }
  }
  return {std::move(block)};
}

std::vector<CapitalScanRow> capital_scan(const CapitalScanConfig& c) {
  struct Cell {
    double kappa;
    double rho;
  };
  std::vector<Cell> cells;
  for (double k : c.kappas) {
    for (double r : c.rhos) {
      if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("capital scan rho must lie in (0,1)");
      cells.push_back({k, r});
    }
  }
  const double s_h = c.honest_stake * static_cast<double>(c.honest_validators);
  return parallel_map<CapitalScanRow>(cells.size(), c.jobs, [&](std::size_t i) {
    const auto [kappa, rho] = cells[i];
    CapitalScanRow row;
    row.rho = rho;
    row.kappa = kappa;
    row.analytic = kappa * rho / (1.0 - rho);

    ChainState state;
    state.warmup_active = false;
    state.validators = make_roster(c.honest_validators, c.honest_stake, kappa, c.base_seed);
    const ValidatorId entrant{static_cast<std::uint32_t>(c.honest_validators)};
    // Fresh capital enters at r_min = 1 with the stake the analytic bound
    // says buys a ρ share of weight.
    auto ent = make_validator(entrant, Address{~std::uint64_t{0}}, row.analytic * s_h, 1.0,
                              BehaviorPolicy::capital_entrant(row.analytic * s_h, 0));
    state.validators.push_back(ent);

    std::uint64_t hits = 0;
    for (int s = 0; s < c.seeds; ++s) {
      state.rng_seed = mix_key({c.base_seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(s)});
      for (Slot slot = 0; slot < c.slots; ++slot) {
        if (select_proposer(state, slot) == entrant) ++hits;
      }
    }
    row.draws = static_cast<std::uint64_t>(c.seeds) * static_cast<std::uint64_t>(c.slots);
    row.measured_share = static_cast<double>(hits) / static_cast<double>(row.draws);
    row.empirical = kappa * row.measured_share / (1.0 - row.measured_share);
    // Delta method: d/dρ κρ/(1−ρ) = κ/(1−ρ)².
    const double sd_share = std::sqrt(rho * (1.0 - rho) / static_cast<double>(row.draws));
    row.sigma = kappa / ((1.0 - rho) * (1.0 - rho)) * sd_share;
    row.within_3sigma = std::abs(row.empirical - row.analytic) <= 3.0 * row.sigma;
    return row;
  });
}

std::string_view to_string(Panel p) {
  switch (p) {
    case Panel::a: return "A";
    case Panel::b: return "B";
    case Panel::c: return "C";
  }
  return "A";
}

DefenseLayers panel_layers(Panel p) {
  return DefenseLayers{true, p == Panel::c};
}

bool panel_detector(Panel p) { return p != Panel::a; }

ProtocolParams StrategySearchConfig::default_params() {
  ProtocolParams p = ProtocolParams::desk();
  p.epoch_length = 10;
  p.t_warmup = 0;
  return p;
}

double cartel_final_reputation(const StrategySearchConfig& c, Panel panel,
                               const BehaviorPolicy& cartel_policy, double share,
                               std::uint64_t seed) {
  const double total_stake = 1000.0;
  const auto n_h = c.honest_validators;
  const auto m = c.cartel_members;
  std::vector<Validator> roster = make_roster(n_h + m, 0.0, c.params.r_min, seed);
  for (std::size_t i = 0; i < n_h; ++i) roster[i].stake = total_stake * (1.0 - share) / static_cast<double>(n_h);
  for (std::size_t i = n_h; i < n_h + m; ++i) {
    roster[i].stake = total_stake * share / static_cast<double>(m);
    BehaviorPolicy p = cartel_policy;
    p.cartel_id = 0;
    p.adversary_label = true;
    roster[i].policy = p;
  }

  ChainOptions opt;
  opt.traffic.attestations_per_slot = c.honest_rate;
  opt.traffic.fee = c.honest_fee;
  opt.grind.fee = c.grind_fee;
  opt.layers = panel_layers(panel);
  opt.a3.enabled = panel_detector(panel);
  Chain chain(c.params, std::move(roster), opt, seed);
  chain.run_slots(c.slots);
  chain.settle();

  double sum = 0.0;
  for (std::size_t i = n_h; i < n_h + m; ++i) sum += chain.state().validators[i].reputation;
  return sum / static_cast<double>(m);
}

std::vector<HeatmapRow> strategy_search(const StrategySearchConfig& c) {
  struct Cell {
    Panel panel;
    BehaviorPolicy policy;
    double share;
    std::uint32_t pool;
  };
  std::vector<Cell> cells;
  for (Panel panel : c.panels) {
    for (double share : c.shares) {
      cells.push_back({panel, BehaviorPolicy::honest(), share, 0});
      for (std::uint32_t pool : c.pools) cells.push_back({panel, BehaviorPolicy::grind(pool, 0), share, pool});
      if (c.other_policies) {
        cells.push_back({panel, BehaviorPolicy::free_riding_voter(), share, 0});
        cells.push_back({panel, BehaviorPolicy::censor(SchemaId{0}), share, 0});
        cells.push_back({panel, BehaviorPolicy::equivocate(), share, 0});
      }
    }
  }
  const auto seeds = static_cast<std::size_t>(c.seeds);
  // Every (cell, seed) run is independent; the HONEST cell of each
  // (panel, share) doubles as the normalizer.
  const auto finals = parallel_map<double>(cells.size() * seeds, c.jobs, [&](std::size_t i) {
    const auto& cell = cells[i / seeds];
    const std::uint64_t seed = c.base_seed + i % seeds;
    return cartel_final_reputation(c, cell.panel, cell.policy, cell.share, seed);
  });

  std::vector<HeatmapRow> rows;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    std::size_t base = ci;
    while (cells[base].policy.kind != PolicyKind::honest) --base;
    double mean_p = 0.0;
    double mean_h = 0.0;
    std::vector<double> ratios;
    for (std::size_t s = 0; s < seeds; ++s) {
      const double fp = finals[ci * seeds + s];
      const double fh = finals[base * seeds + s];
      mean_p += fp;
      mean_h += fh;
      ratios.push_back(fp / fh);
    }
    const double mean_ratio = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(seeds);
    double var = 0.0;
    for (double r : ratios) var += (r - mean_ratio) * (r - mean_ratio);
    HeatmapRow row;
    row.panel = cell.panel;
    row.policy = std::string(to_string(cell.policy.kind));
    row.stake_share = cell.share;
    row.pool_size = cell.pool;
    row.mean_reward = mean_p / mean_h;
    row.stdev = seeds > 1 ? std::sqrt(var / static_cast<double>(seeds - 1)) : 0.0;
    row.seeds = c.seeds;
    rows.push_back(row);
  }
  return rows;
}

Lemma1Row lemma1_empirical(const ProtocolParams& base, int m, int k,
                           BurnDestination destination, std::uint64_t seed) {
  if (m < 1 || m > k) throw std::invalid_argument("lemma1 scan requires 1 <= m <= k");
  constexpr int kBlocksPerMember = 2;
  ProtocolParams p = base;
  p.burn_destination = destination;
  p.t_warmup = 0;
  p.epoch_length = static_cast<std::int64_t>(m) * kBlocksPerMember;
  // The lemma measures injection below the good-score cap; lift the cap so
  // desk-scale gains do not clip the grinding score.
  p.g_max = 1e12;

  std::vector<Validator> roster = make_roster(static_cast<std::size_t>(k) + 1, 100.0, p.r_min, seed);
  for (int i = 0; i < m; ++i) roster[static_cast<std::size_t>(i)].policy = BehaviorPolicy::grind(1, 0);

  ChainOptions opt;
  opt.traffic.attestations_per_slot = 0.0;
  opt.layers = DefenseLayers{false, false};
  opt.grind.fee = 10.0;
  opt.proposer_override = [m](Slot s) {
    return std::optional<ValidatorId>(ValidatorId{static_cast<std::uint32_t>(s % m)});
  };
  Chain chain(p, std::move(roster), opt, seed);
  chain.run_epochs(1);

  double delta_r = 0.0;
  double received = 0.0;
  for (int i = 0; i < m; ++i) {
    delta_r += chain.state().validators[static_cast<std::size_t>(i)].reputation - p.r_min;
    received += chain.redistribution_received()[static_cast<std::size_t>(i)];
  }
  const auto& ledger = chain.ledger();
  const double fees = ledger.processed;
  double non_recoverable = 0.0;
  double share = 0.0;
  switch (destination) {
    case BurnDestination::pure_burn:
      non_recoverable = ledger.burned;
      break;
    case BurnDestination::treasury:
      non_recoverable = ledger.treasury * (1.0 - p.rho_gov);
      break;
    case BurnDestination::redistribution:
      share = received / ledger.redistributed;
      non_recoverable = ledger.redistributed - received;
      break;
  }

  Lemma1Row row;
  row.m = m;
  row.k = k;
  row.destination = destination;
  row.stake_share = share;
  row.analytic_injection = p.eta * alpha_eff(m, k, p.alpha, p.beta);
  row.empirical_injection = delta_r / fees;
  const double target = p.r_max - p.r_min;
  row.analytic_floor = lemma1_floor(target, p, m, k, destination, share);
  row.empirical_floor = non_recoverable * target / delta_r;
  row.injection_rel_err =
      std::abs(row.empirical_injection - row.analytic_injection) / row.analytic_injection;
  row.floor_rel_err = std::abs(row.empirical_floor - row.analytic_floor) / row.analytic_floor;
  return row;
}

}  // namespace poua
