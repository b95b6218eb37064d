#include "poua/types.hpp"

#include <algorithm>
#include <stdexcept>

#include "poua/params.hpp"

namespace poua {

AddressSet::AddressSet(std::initializer_list<Address> addresses) {
  for (Address a : addresses) insert(a);
}

void AddressSet::insert(Address a) {
  auto it = std::lower_bound(items_.begin(), items_.end(), a);
  if (it == items_.end() || *it != a) items_.insert(it, a);
}

void AddressSet::insert_all(const AddressSet& other) {
  std::vector<Address> merged;
  merged.reserve(items_.size() + other.items_.size());
  std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                 std::back_inserter(merged));
  items_ = std::move(merged);
}

bool AddressSet::contains(Address a) const {
  return std::binary_search(items_.begin(), items_.end(), a);
}

Validator make_validator(ValidatorId id, Address address, double stake, double reputation,
                         BehaviorPolicy policy) {
  Validator v;
  v.id = id;
  v.address = address;
  v.stake = stake;
  v.reputation = reputation;
  v.policy = std::move(policy);
  v.controlled_addresses.insert(address);
  return v;
}

double weight(const Validator& v) {
  if (!v.is_active()) throw std::domain_error("weight of a non-active validator");
  return v.stake * v.reputation;
}

double warmup_weight(const Validator& v) {
  if (!v.is_active()) throw std::domain_error("weight of a non-active validator");
  return v.stake;
}

void validate_schema(const Schema& schema, const AttestorSet& set, const ProtocolParams& params) {
  if (schema.fee < params.fee_min) throw std::invalid_argument("schema fee below fee_min");
  if (schema.threshold_k < 1 || schema.threshold_k > set.members.size()) {
    throw std::invalid_argument("threshold_k outside [1, attestor set size]");
  }
}

}  // namespace poua
