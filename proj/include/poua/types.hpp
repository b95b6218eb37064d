#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "poua/ids.hpp"
#include "poua/policy.hpp"

namespace poua {

// Sorted, duplicate-free address set with logarithmic membership tests.
class AddressSet {
 public:
  AddressSet() = default;
  AddressSet(std::initializer_list<Address> addresses);

  void insert(Address a);
  void insert_all(const AddressSet& other);
  [[nodiscard]] bool contains(Address a) const;
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] const std::vector<Address>& items() const { return items_; }

 private:
  std::vector<Address> items_;
};

enum class Lifecycle { active, unbonding, exited };

struct Validator {
  ValidatorId id{};
  Address address{};
  double stake = 0.0;
  double reputation = 1.0;
  AddressSet controlled_addresses;
  BehaviorPolicy policy;
  Lifecycle lifecycle = Lifecycle::active;
  std::int64_t unbond_epochs_left = 0;
  Epoch entered_at = 0;

  [[nodiscard]] bool is_active() const { return lifecycle == Lifecycle::active; }
};

// Builds a validator that controls its own address.
Validator make_validator(ValidatorId id, Address address, double stake,
                         double reputation, BehaviorPolicy policy = {});

// stake × reputation; throws std::domain_error for non-active validators.
double weight(const Validator& v);

// Stake-only weight used while warmup is in force.
double warmup_weight(const Validator& v);

struct AttestorSet {
  AttestorSetId id{};
  std::vector<Address> members;
};

struct Schema {
  SchemaId id{};
  AttestorSetId attestor_set{};
  std::uint32_t threshold_k = 1;
  double fee = 0.0;
  Address fee_recipient{};
};

struct ProtocolParams;

// Throws std::invalid_argument when fee < fee_min or threshold_k is outside
// [1, |attestor set|].
void validate_schema(const Schema& schema, const AttestorSet& set,
                     const ProtocolParams& params);

class Attestation {
 public:
  Attestation(SchemaId schema, std::uint64_t payload_hash, Address submitter,
              double fee, bool is_valid)
      : schema_(schema),
        payload_hash_(payload_hash),
        submitter_(submitter),
        fee_(fee),
        is_valid_(is_valid) {}

  [[nodiscard]] SchemaId schema() const { return schema_; }
  [[nodiscard]] std::uint64_t payload_hash() const { return payload_hash_; }
  [[nodiscard]] Address submitter() const { return submitter_; }
  [[nodiscard]] double fee() const { return fee_; }
  [[nodiscard]] bool is_valid() const { return is_valid_; }

 private:
  SchemaId schema_;
  std::uint64_t payload_hash_;
  Address submitter_;
  double fee_;
  bool is_valid_;
};

struct Block {
  Slot slot = 0;
  ValidatorId proposer{};
  std::vector<Attestation> attestations;
  std::vector<ValidatorId> voters;
  std::uint32_t voter_denominator = 0;
};

}  // namespace poua
