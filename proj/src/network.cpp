#include "poua/network.hpp"

#include <algorithm>
#include <stdexcept>

#include "poua/rng.hpp"

namespace poua {

namespace {

bool member(const std::vector<ValidatorId>& set, ValidatorId v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

// Index of v's group, or a unique negative value when v is in none.
long group_of(const Partition& p, ValidatorId v) {
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    if (member(p.groups[g], v)) return static_cast<long>(g);
  }
  return -1 - static_cast<long>(v.value);
}

}  // namespace

void validate_scheduler(const Scheduler& s) {
  std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UniformDelay>) {
          if (x.delay < 0) throw std::invalid_argument("uniform delay must be >= 0");
        } else if constexpr (std::is_same_v<T, AdversarialLatency>) {
          if (x.delta_adv < 0) throw std::invalid_argument("delta_adv must be >= 0");
        } else if constexpr (std::is_same_v<T, Partition>) {
          if (x.drop_rate < 0.0 || x.drop_rate > 1.0) {
            throw std::invalid_argument("drop_rate must lie in [0,1]");
          }
          if (x.end < x.start) throw std::invalid_argument("partition window ends before it starts");
        } else {
          if (x.end < x.start) throw std::invalid_argument("eclipse window ends before it starts");
          if (x.start < 0) throw std::invalid_argument("eclipse window starts before slot 0");
        }
      },
      s);
}

std::vector<std::vector<ValidatorId>> split_by_id(std::vector<ValidatorId> ids, int parts) {
  if (parts < 1) throw std::invalid_argument("partition needs at least one group");
  std::sort(ids.begin(), ids.end());
  std::vector<std::vector<ValidatorId>> groups(static_cast<std::size_t>(parts));
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    groups[i * static_cast<std::size_t>(parts) / std::max<std::size_t>(n, 1)].push_back(ids[i]);
  }
  return groups;
}

std::optional<Slot> schedule_delivery(const Scheduler& s, Slot block_slot, ValidatorId proposer,
                                      ValidatorId recipient, std::uint64_t seed) {
  return std::visit(
      [&](const auto& x) -> std::optional<Slot> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UniformDelay>) {
          return block_slot + x.delay;
        } else if constexpr (std::is_same_v<T, AdversarialLatency>) {
          return member(x.cartel, recipient) ? block_slot : block_slot + x.delta_adv;
        } else if constexpr (std::is_same_v<T, Partition>) {
          const bool active = block_slot >= x.start && block_slot < x.end;
          if (active && group_of(x, proposer) != group_of(x, recipient)) {
            const double u = counter_uniform(seed, StreamTag::drop,
                                              static_cast<std::uint64_t>(block_slot),
                                              recipient.value);
            if (u < x.drop_rate) return std::nullopt;
          }
          return block_slot;
        } else {
          const bool active = block_slot >= x.start && block_slot < x.end;
          if (active && recipient == x.target && !member(x.cartel, proposer)) return std::nullopt;
          if (active && proposer == x.target && !x.target_outbound) return std::nullopt;
          return block_slot;
        }
      },
      s);
}

bool sees_public_traffic(const Scheduler& s, ValidatorId v, Slot slot) {
  if (const auto* e = std::get_if<Eclipse>(&s)) {
    return !(v == e->target && slot >= e->start && slot < e->end);
  }
  return true;
}

void DeliveryQueue::push(const Delivery& d) {
  auto key = [](const Delivery& x) { return std::pair{x.deliver_at, x.block_slot}; };
  auto it = std::upper_bound(items_.begin(), items_.end(), d,
                             [&](const Delivery& a, const Delivery& b) { return key(a) < key(b); });
  items_.insert(it, d);
}

std::vector<Delivery> DeliveryQueue::drain(Slot current) {
  auto it = std::find_if(items_.begin(), items_.end(),
                         [&](const Delivery& d) { return d.deliver_at > current; });
  std::vector<Delivery> ready(items_.begin(), it);
  items_.erase(items_.begin(), it);
  return ready;
}

}  // namespace poua
