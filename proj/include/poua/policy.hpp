#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "poua/ids.hpp"

namespace poua {

enum class PolicyKind {
  honest,
  grind_via_staged_submitters,
  free_riding_voter,
  censor_schema,
  equivocate,
  capital_entrant,
};

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view text);

struct BehaviorPolicy {
  PolicyKind kind = PolicyKind::honest;
  std::uint32_t pool_size = 0;
  SchemaId censored_schema{};
  double entrant_stake = 0.0;
  Epoch entry_epoch = 0;
  std::optional<std::uint32_t> cartel_id;
  // Marks an otherwise honest-behaving validator as adversary-controlled,
  // e.g. the colluding set of a latency or eclipse scenario.
  bool adversary_label = false;

  [[nodiscard]] bool is_byzantine() const {
    return adversary_label || kind != PolicyKind::honest;
  }

  static BehaviorPolicy honest() { return {}; }
  static BehaviorPolicy grind(std::uint32_t pool_size, std::uint32_t cartel);
  static BehaviorPolicy free_riding_voter();
  static BehaviorPolicy censor(SchemaId schema);
  static BehaviorPolicy equivocate();
  static BehaviorPolicy capital_entrant(double stake, Epoch entry_epoch);
  static BehaviorPolicy colluding(std::uint32_t cartel);
};

std::string describe(const BehaviorPolicy& policy);

}  // namespace poua
