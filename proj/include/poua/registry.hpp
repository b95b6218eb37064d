#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "poua/types.hpp"

namespace poua {

// Schemas, attestor sets and cartel address universes known to a run.
class Registry {
 public:
  AttestorSetId add_attestor_set(std::vector<Address> members);
  SchemaId add_schema(AttestorSetId set, std::uint32_t threshold_k, double fee,
                      Address fee_recipient);
  void set_cartel(Address a, std::uint32_t cartel);

  [[nodiscard]] const Schema& schema(SchemaId id) const;
  [[nodiscard]] const AttestorSet& attestor_set(AttestorSetId id) const;
  [[nodiscard]] std::size_t schema_count() const { return schemas_.size(); }
  [[nodiscard]] std::optional<std::uint32_t> cartel_of(Address a) const;

 private:
  std::vector<Schema> schemas_;
  std::vector<AttestorSet> sets_;
  std::vector<std::pair<Address, std::uint32_t>> cartel_members_;  // sorted
};

}  // namespace poua
