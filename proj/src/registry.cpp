#include "poua/registry.hpp"

#include <algorithm>
#include <stdexcept>

namespace poua {

AttestorSetId Registry::add_attestor_set(std::vector<Address> members) {
  const AttestorSetId id{static_cast<std::uint32_t>(sets_.size())};
  sets_.push_back(AttestorSet{id, std::move(members)});
  return id;
}

SchemaId Registry::add_schema(AttestorSetId set, std::uint32_t threshold_k, double fee,
                              Address fee_recipient) {
  const SchemaId id{static_cast<std::uint32_t>(schemas_.size())};
  schemas_.push_back(Schema{id, set, threshold_k, fee, fee_recipient});
  return id;
}

void Registry::set_cartel(Address a, std::uint32_t cartel) {
  auto it = std::lower_bound(cartel_members_.begin(), cartel_members_.end(), a,
                             [](const auto& e, Address x) { return e.first < x; });
  if (it != cartel_members_.end() && it->first == a) {
    it->second = cartel;
  } else {
    cartel_members_.insert(it, {a, cartel});
  }
}

const Schema& Registry::schema(SchemaId id) const {
  if (id.value >= schemas_.size()) throw std::out_of_range("unknown schema");
  return schemas_[id.value];
}

const AttestorSet& Registry::attestor_set(AttestorSetId id) const {
  if (id.value >= sets_.size()) throw std::out_of_range("unknown attestor set");
  return sets_[id.value];
}

std::optional<std::uint32_t> Registry::cartel_of(Address a) const {
  auto it = std::lower_bound(cartel_members_.begin(), cartel_members_.end(), a,
                             [](const auto& e, Address x) { return e.first < x; });
  if (it != cartel_members_.end() && it->first == a) return it->second;
  return std::nullopt;
}

}  // namespace poua
