#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "poua/adversary.hpp"
#include "poua/analytics.hpp"
#include "poua/defense.hpp"
#include "poua/detectors.hpp"
#include "poua/experiments.hpp"
#include "poua/rebase.hpp"
#include "poua/rng.hpp"

using namespace poua;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }

  void absorb(const ExperimentResult& r) {
    for (const auto& p : r.properties) require(p.pass, p.name + " (" + p.detail + ")");
  }
};

std::string num(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

bool rel_close(double got, double want, double tol) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

RunOptions opts(int jobs) {
  RunOptions o;
  o.jobs = jobs;
  return o;
}

Outcome criterion1(int) {
  Outcome o;
  const auto p = ProtocolParams::v0();
  struct Case {
    int m, k;
    double want;
  };
  for (auto [m, k, want] : {Case{1, 12, 0.7}, Case{4, 12, 0.775}, Case{33, 100, 0.796}}) {
    const double got = alpha_eff(m, k, p.alpha, p.beta);
    o.require(std::abs(got - want) <= 1e-12,
              "(" + std::to_string(m) + "," + std::to_string(k) + ") alpha_eff " + num(got));
  }
  return o;
}

Outcome criterion2(int) {
  Outcome o;
  const auto p = ProtocolParams::v0();
  const double dr = p.r_max - p.r_min;
  const double f1 = lemma1_floor(dr, p, 1, 12, BurnDestination::pure_burn, 0.0);
  const double f4 = lemma1_floor(dr, p, 4, 12, BurnDestination::pure_burn, 0.0);
  const double fa = lemma1_floor_for_alpha_eff(dr, p, 0.8, BurnDestination::pure_burn, 0.0);
  o.require(rel_close(f1, 5000.0, 1e-9), "floor m=1 " + num(f1));
  o.require(rel_close(f4, 3500.0 / 0.775, 1e-9) && std::round(f4) == 4516.0, "floor m=4 " + num(f4));
  o.require(rel_close(fa, 4375.0, 1e-9), "floor alpha_eff=0.8 " + num(fa));
  for (int m = 1; m <= 4; ++m) {
    const auto row = lemma1_empirical(p, m, 12, BurnDestination::pure_burn, 1);
    o.require(row.injection_rel_err <= 1e-9 && row.floor_rel_err <= 1e-9,
              "empirical m=" + std::to_string(m) + " injection err " + num(row.injection_rel_err) +
                  " floor err " + num(row.floor_rel_err));
  }
  return o;
}

Outcome criterion3(int jobs) {
  Outcome o;
  Scenario s;
  s.grid = {0.1, 0.2, 1.0 / 3.0};
  o.absorb(run_capital_scan(s, opts(jobs)));
  return o;
}

Outcome criterion4(int jobs) {
  Outcome o;
  const auto r = run_kappa_trajectory(Scenario{}, opts(jobs));
  for (const auto& p : r.properties) {
    if (p.name != "envelope_agreement_5pct") o.require(p.pass, p.name + " (" + p.detail + ")");
  }
  return o;
}

Outcome criterion5(int) {
  Outcome o;
  const double low = churn_adjusted_rbar(0.001, 30, 1, 8);
  const double high = churn_adjusted_rbar(0.01, 30, 1, 8);
  o.require(std::abs(low - 7.93) < 0.005, "mu=0.001 gives " + num(low) + " want 7.93");
  o.require(std::abs(high - 6.65) < 0.005, "mu=0.01 gives " + num(high) + " want 6.65");
  return o;
}

Outcome criterion6(int jobs) {
  Outcome o;
  Scenario s;
  s.grid = {50, 100, 250, 500, 1000};
  o.absorb(run_scale_benchmark(s, opts(jobs)));
  return o;
}

Outcome criterion7(int jobs) {
  Outcome o;
  o.absorb(run_adversarial_latency(Scenario{}, opts(jobs)));
  return o;
}

Outcome criterion8(int jobs) {
  Outcome o;
  o.absorb(run_eclipse_recovery(Scenario{}, opts(jobs)));
  return o;
}

Outcome criterion9(int jobs) {
  Outcome o;
  o.absorb(run_strategy_search(Scenario{}, opts(jobs)));
  return o;
}

Outcome criterion10(int jobs) {
  Outcome o;
  o.absorb(run_a3_fpr_comparison(Scenario{}, opts(jobs)));
  return o;
}

Outcome criterion11(int) {
  Outcome o;
  Stream s(11, StreamTag::sampling);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto k = 2 + s.below(10);
    std::vector<double> a(k), b(k);
    double sa = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      a[j] = s.bernoulli(0.2) ? 0.0 : s.uniform01();
      b[j] = 1e-3 + s.uniform01();
      sa += a[j];
      sb += b[j];
    }
    if (sa == 0.0) a[0] = sa = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      a[j] /= sa;
      b[j] /= sb;
    }
    worst = std::min(worst, kl_divergence(a, b));
  }
  o.require(worst >= 0.0, "min KL over 10^4 pairs " + num(worst));

  A2Config c;
  c.enabled = true;
  c.t_detect = 3;
  const auto rate = a2_honest_flag_rate(ProtocolParams::desk(), 12, 60, c, 1);
  const double base = std::pow(c.beta_2, c.t_detect);
  const double bound =
      base + 3.0 * std::sqrt(base * (1.0 - base) / std::max<double>(1.0, static_cast<double>(rate.evaluations)));
  o.require(rate.evaluations > 0 && rate.rate <= bound,
            "A2 honest flag rate " + num(rate.rate) + " over " + std::to_string(rate.evaluations) +
                " evaluations, bound " + num(bound));
  return o;
}

Outcome criterion12(int jobs) {
  Outcome o;
  Scenario s;
  s.params = ProtocolParams::v0();
  o.absorb(run_rebase_sim(s, opts(jobs)));
  return o;
}

Outcome criterion13(int jobs) {
  Outcome o;
  const auto p = ProtocolParams::v0();
  Stream s(13, StreamTag::sampling);
  bool bounded = true;
  bool monotone = true;
  for (int i = 0; i < 20000; ++i) {
    const double r = p.r_min + (p.r_max - p.r_min) * s.uniform01();
    const double g = 500.0 * s.uniform01();
    const double b = 3.0 * s.uniform01() * s.bernoulli(0.3);
    const double base = apply_epoch_update(r, {g, 0, b, 0}, p);
    bounded = bounded && base >= p.r_min && base <= p.r_max;
    monotone = monotone && apply_epoch_update(r, {g + 10.0 * s.uniform01(), 0, b, 0}, p) >= base &&
               apply_epoch_update(r, {g, 0, b + s.uniform01(), 0}, p) <= base;
  }
  o.require(bounded, "update bounded");
  o.require(monotone, "update monotone");

  int checked = 0;
  bool intersect = true;
  for (int trial = 0; trial < 3000; ++trial) {
    ChainState st;
    const auto n = 2 + s.below(14);
    for (std::uint32_t i = 0; i < n; ++i) {
      st.validators.push_back(
          make_validator(ValidatorId{i}, Address{i + 1}, 0.1 + 10 * s.uniform01(), 1.0 + 7.0 * s.uniform01()));
    }
    const double total = total_active_weight(st);
    auto quorum = [&] {
      Block blk;
      blk.proposer = ValidatorId{static_cast<std::uint32_t>(s.below(n))};
      for (std::uint32_t i = 0; i < n; ++i) {
        if (s.bernoulli(0.85)) blk.voters.push_back(ValidatorId{i});
      }
      return blk;
    };
    const auto q1 = quorum();
    const auto q2 = quorum();
    if (!tally_commit(q1, st) || !tally_commit(q2, st)) continue;
    std::vector<int> in(n, 0);
    in[q1.proposer.value] |= 1;
    for (auto v : q1.voters) in[v.value] |= 1;
    in[q2.proposer.value] |= 2;
    for (auto v : q2.voters) in[v.value] |= 2;
    double shared = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (in[i] == 3) shared += consensus_weight(st.validators[i], st.warmup_active);
    }
    intersect = intersect && shared > total / 3.0 - 1e-9 * total;
    ++checked;
  }
  o.require(intersect && checked > 500, "quorum intersection over " + std::to_string(checked) + " pairs");

  Scenario sc;
  sc.validators = 10;
  sc.epochs = 20;
  sc.a3_enabled = true;
  sc.scheduler = "uniform";
  sc.delay = 1;
  sc.policies = {{7, "GRIND_VIA_STAGED_SUBMITTERS:4:0"}, {8, "EQUIVOCATE"}, {9, "CENSOR_SCHEMA:1"}};
  RunOptions one = opts(1);
  RunOptions many = opts(jobs);
  const auto a = run_scenario(sc, one);
  const auto b = run_scenario(sc, many);
  o.absorb(a);
  bool same = a.tables.size() == b.tables.size();
  for (std::size_t i = 0; same && i < a.tables.size(); ++i) {
    std::ostringstream x, y;
    write_csv(x, a.tables[i].second);
    write_csv(y, b.tables[i].second);
    same = x.str() == y.str();
  }
  o.require(same, "byte-identical rerun across job counts");

  bool ramp = true;
  for (std::int64_t t_ramp : {5, 14, 30, 90}) {
    auto q = p;
    q.t_ramp = t_ramp;
    q.g_max = default_g_max(q.r_min, q.r_max, q.eta, q.t_ramp);
    ramp = ramp && epochs_to_full_ramp(q, q.g_max) == t_ramp && epochs_to_full_ramp(q, 100 * q.g_max) == t_ramp;
  }
  o.require(ramp, "ramp floor equals t_ramp");
  return o;
}

const std::vector<std::function<Outcome(int)>> kCriteria = {
    criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6, criterion7,
    criterion8, criterion9, criterion10, criterion11, criterion12, criterion13};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  int jobs = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--criterion" || arg == "-c") && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if ((arg == "--jobs" || arg == "-j") && i + 1 < argc) {
      jobs = std::max(1, std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]... [--jobs J]\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (int n = 1; n <= static_cast<int>(kCriteria.size()); ++n) selected.push_back(n);
  }
  bool all = true;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::cerr << "unknown criterion " << n << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = kCriteria[static_cast<std::size_t>(n - 1)](jobs);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
