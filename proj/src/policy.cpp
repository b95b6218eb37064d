#include "poua/policy.hpp"

#include <stdexcept>

namespace poua {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::honest: return "HONEST";
    case PolicyKind::grind_via_staged_submitters: return "GRIND_VIA_STAGED_SUBMITTERS";
    case PolicyKind::free_riding_voter: return "FREE_RIDING_VOTER";
    case PolicyKind::censor_schema: return "CENSOR_SCHEMA";
    case PolicyKind::equivocate: return "EQUIVOCATE";
    case PolicyKind::capital_entrant: return "CAPITAL_ENTRANT";
  }
  return "HONEST";
}

PolicyKind parse_policy_kind(std::string_view text) {
  for (auto k : {PolicyKind::honest, PolicyKind::grind_via_staged_submitters,
                 PolicyKind::free_riding_voter, PolicyKind::censor_schema,
                 PolicyKind::equivocate, PolicyKind::capital_entrant}) {
    if (text == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown policy kind: " + std::string(text));
}

BehaviorPolicy BehaviorPolicy::grind(std::uint32_t pool_size, std::uint32_t cartel) {
  if (pool_size < 1) throw std::invalid_argument("grinding pool_size must be >= 1");
  BehaviorPolicy p;
  p.kind = PolicyKind::grind_via_staged_submitters;
  p.pool_size = pool_size;
  p.cartel_id = cartel;
  return p;
}

BehaviorPolicy BehaviorPolicy::free_riding_voter() {
  BehaviorPolicy p;
  p.kind = PolicyKind::free_riding_voter;
  return p;
}

BehaviorPolicy BehaviorPolicy::censor(SchemaId schema) {
  BehaviorPolicy p;
  p.kind = PolicyKind::censor_schema;
  p.censored_schema = schema;
  return p;
}

BehaviorPolicy BehaviorPolicy::equivocate() {
  BehaviorPolicy p;
  p.kind = PolicyKind::equivocate;
  return p;
}

BehaviorPolicy BehaviorPolicy::capital_entrant(double stake, Epoch entry_epoch) {
  BehaviorPolicy p;
  p.kind = PolicyKind::capital_entrant;
  p.entrant_stake = stake;
  p.entry_epoch = entry_epoch;
  return p;
}

BehaviorPolicy BehaviorPolicy::colluding(std::uint32_t cartel) {
  BehaviorPolicy p;
  p.cartel_id = cartel;
  p.adversary_label = true;
  return p;
}

std::string describe(const BehaviorPolicy& policy) {
  std::string s(to_string(policy.kind));
  switch (policy.kind) {
    case PolicyKind::grind_via_staged_submitters:
      s += "(pool_size=" + std::to_string(policy.pool_size) + ")";
      break;
    case PolicyKind::censor_schema:
      s += "(schema=" + std::to_string(policy.censored_schema.value) + ")";
      break;
    case PolicyKind::capital_entrant:
      s += "(entry_epoch=" + std::to_string(policy.entry_epoch) + ")";
      break;
    default:
      break;
  }
  if (policy.cartel_id) s += "[cartel=" + std::to_string(*policy.cartel_id) + "]";
  if (policy.adversary_label && policy.kind == PolicyKind::honest) s += "[adversary]";
  return s;
}

}  // namespace poua
