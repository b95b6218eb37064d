#pragma once

#include <compare>
#include <cstdint>

namespace poua {

using Slot = std::int64_t;
using Epoch = std::int64_t;

// Opaque fixed-width tokens. Validator ids are dense indices into the roster;
// addresses are hashed from the run seed.
struct ValidatorId {
  std::uint32_t value{};
  friend auto operator<=>(const ValidatorId&, const ValidatorId&) = default;
};

struct Address {
  std::uint64_t value{};
  friend auto operator<=>(const Address&, const Address&) = default;
};

struct SchemaId {
  std::uint32_t value{};
  friend auto operator<=>(const SchemaId&, const SchemaId&) = default;
};

struct AttestorSetId {
  std::uint32_t value{};
  friend auto operator<=>(const AttestorSetId&, const AttestorSetId&) = default;
};

}  // namespace poua
