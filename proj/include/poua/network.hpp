#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "poua/ids.hpp"

namespace poua {

struct UniformDelay {
  Slot delay = 0;
};

// Cartel members see blocks instantly; everyone else delta_adv slots late.
struct AdversarialLatency {
  Slot delta_adv = 0;
  std::vector<ValidatorId> cartel;
};

// Cross-group deliveries are dropped with probability drop_rate while
// start <= slot < end. Groups hold validator ids; a validator absent from
// every group forms its own singleton group.
struct Partition {
  std::vector<std::vector<ValidatorId>> groups;
  double drop_rate = 1.0;
  Slot start = 0;
  Slot end = 0;
};

// During [start, end) the target receives only cartel-proposed blocks and
// cannot see honest attestation traffic.
struct Eclipse {
  ValidatorId target{};
  Slot start = 0;
  Slot end = 0;
  std::vector<ValidatorId> cartel;
  bool target_outbound = true;
};

using Scheduler = std::variant<UniformDelay, AdversarialLatency, Partition, Eclipse>;

// Throws std::invalid_argument for negative delays or malformed windows.
void validate_scheduler(const Scheduler& s);

// Splits ids (taken in ascending order) into `parts` contiguous groups.
std::vector<std::vector<ValidatorId>> split_by_id(std::vector<ValidatorId> ids, int parts);

// Delivery slot for a block created at `block_slot` by `proposer`, or nullopt
// if the message is dropped.
std::optional<Slot> schedule_delivery(const Scheduler& s, Slot block_slot,
                                      ValidatorId proposer, ValidatorId recipient,
                                      std::uint64_t seed);

// Whether the validator can see honest attestation traffic at `slot`.
bool sees_public_traffic(const Scheduler& s, ValidatorId v, Slot slot);

struct Delivery {
  Slot deliver_at = 0;
  Slot block_slot = 0;
  std::uint64_t block_ref = 0;
};

// Pending deliveries for one validator, released in (deliver_at, block slot)
// order.
class DeliveryQueue {
 public:
  void push(const Delivery& d);
  std::vector<Delivery> drain(Slot current);
  [[nodiscard]] bool empty() const { return items_.empty(); }
  [[nodiscard]] std::size_t size() const { return items_.size(); }

 private:
  std::vector<Delivery> items_;  // kept sorted
};

}  // namespace poua
