#include "poua/test_vectors.hpp"

#include "poua/defense.hpp"

namespace poua {

namespace {

constexpr int kVersion = 1;

nlohmann::json params_block(const ProtocolParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta},         {"eta", p.eta},
          {"tau_burn", p.tau_burn}, {"rho_gov", p.rho_gov}, {"r_min", p.r_min},
          {"r_max", p.r_max}};
}

}  // namespace

nlohmann::json alpha_eff_vectors(const ProtocolParams& p) {
  nlohmann::json entries = nlohmann::json::array();
  for (int k : {4, 12, 100}) {
    for (int m = 1; m <= k; ++m) {
      if (k == 100 && m % 11 != 0 && m != 1 && m != 33 && m != 100) continue;
      entries.push_back({{"m", m}, {"k", k}, {"alpha_eff", alpha_eff(m, k, p.alpha, p.beta)}});
    }
  }
  return {{"kind", "alpha_eff"}, {"version", kVersion}, {"params", params_block(p)},
          {"entries", entries}};
}

nlohmann::json lemma1_vectors(const ProtocolParams& p) {
  nlohmann::json entries = nlohmann::json::array();
  const double delta_r = p.r_max - p.r_min;
  for (auto dest : {BurnDestination::pure_burn, BurnDestination::treasury,
                    BurnDestination::redistribution}) {
    for (int m = 1; m <= 4; ++m) {
      for (double share : {0.0, 0.1, 1.0 / 3.0}) {
        if (dest != BurnDestination::redistribution && share != 0.0) continue;
        entries.push_back({{"m", m},
                           {"k", 12},
                           {"destination", std::string(to_string(dest))},
                           {"stake_share", share},
                           {"delta_r", delta_r},
                           {"floor", lemma1_floor(delta_r, p, m, 12, dest, share)}});
      }
    }
    // Large-cartel limit m/k → 1/3, where α_eff = α + β/3.
    const double ae = p.alpha + p.beta / 3.0;
    entries.push_back({{"alpha_eff", ae},
                       {"destination", std::string(to_string(dest))},
                       {"stake_share", 0.0},
                       {"delta_r", delta_r},
                       {"floor", lemma1_floor_for_alpha_eff(delta_r, p, ae, dest, 0.0)}});
  }
  return {{"kind", "lemma1_floor"}, {"version", kVersion}, {"params", params_block(p)},
          {"entries", entries}};
}

namespace {

ProtocolParams params_from(const nlohmann::json& doc) {
  const auto& j = doc.at("params");
  ProtocolParams p;
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.eta = j.at("eta").get<double>();
  p.tau_burn = j.at("tau_burn").get<double>();
  p.rho_gov = j.at("rho_gov").get<double>();
  p.r_min = j.at("r_min").get<double>();
  p.r_max = j.at("r_max").get<double>();
  return p;
}

}  // namespace

int verify_alpha_eff_vectors(const nlohmann::json& doc) {
  const auto p = params_from(doc);
  int bad = 0;
  for (const auto& e : doc.at("entries")) {
    const double got = alpha_eff(e.at("m").get<int>(), e.at("k").get<int>(), p.alpha, p.beta);
    if (got != e.at("alpha_eff").get<double>()) ++bad;
  }
  return bad;
}

int verify_lemma1_vectors(const nlohmann::json& doc) {
  const auto p = params_from(doc);
  int bad = 0;
  for (const auto& e : doc.at("entries")) {
    const auto dest = parse_burn_destination(e.at("destination").get<std::string>());
    const double dr = e.at("delta_r").get<double>();
    const double share = e.at("stake_share").get<double>();
    const double got = e.contains("alpha_eff")
                           ? lemma1_floor_for_alpha_eff(dr, p, e.at("alpha_eff").get<double>(),
                                                        dest, share)
                           : lemma1_floor(dr, p, e.at("m").get<int>(), e.at("k").get<int>(),
                                          dest, share);
    if (got != e.at("floor").get<double>()) ++bad;
  }
  return bad;
}

}  // namespace poua
