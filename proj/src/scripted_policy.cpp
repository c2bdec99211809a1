#include "hrl/scripted_policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace hrl {

namespace {

int find_act(const DomainSpec& spec, const std::vector<int>& available, ActType type,
             const std::string& slot = "", const std::string& target = "") {
  for (int idx : available) {
    const ActionDef& a = spec.actions[idx];
    if (a.type != type) continue;
    if (!slot.empty() && a.slot != slot) continue;
    if (!target.empty() && a.target != target) continue;
    return idx;
  }
  return -1;
}

}  // namespace

int ScriptedPolicy::choose(const DomainSpec& spec, const BeliefState& belief,
                           const Eigen::VectorXd&, const std::vector<int>& available,
                           RandomSource&) {
  // Pending user request -> answer it.
  for (std::size_t r = 0; r < spec.requestable_slots.size(); ++r) {
    if (!belief.request_pending(static_cast<int>(r))) continue;
    int idx = find_act(spec, available, ActType::Inform, spec.requestable_slots[r]);
    if (idx >= 0) return idx;
  }

  const bool is_sub = spec.kind == DomainKind::Sub;
  const std::string wanted_task = belief.task_requested_booking ? "booking"
                                  : belief.task_requested_payment ? "payment"
                                                                  : "";

  if (is_sub) {
    // Ask the unknown slots of this sub-task, then commit.
    for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s) {
      if (spec.constraint_slots[s].name == kEntityNameSlot) continue;
      if (!belief.slot_known(static_cast<int>(s))) {
        int idx = find_act(spec, available, ActType::Request, spec.constraint_slots[s].name);
        if (idx >= 0) return idx;
      }
    }
    int idx = find_act(spec, available, ActType::Commit);
    if (idx >= 0) return idx;
    return available.front();
  }

  // Master / flat level.
  if (belief.sub_done) {
    int idx = find_act(spec, available, ActType::Bye);
    if (idx >= 0) return idx;
  }

  if (!belief.entity_accepted) {
    // Gather the master constraints, then offer.
    for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s) {
      const SlotDef& slot = spec.constraint_slots[s];
      if (slot.origin == "booking" || slot.origin == "payment") continue;
      if (!belief.slot_known(static_cast<int>(s))) {
        int idx = find_act(spec, available, ActType::Request, slot.name);
        if (idx >= 0) return idx;
      }
    }
    int idx = find_act(spec, available, ActType::Offer);
    if (idx >= 0) return idx;
  }

  if (!wanted_task.empty() && !belief.sub_done) {
    if (spec.kind == DomainKind::Flat) {
      // Fill the requested sub-task's slots, then commit it.
      for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s) {
        const SlotDef& slot = spec.constraint_slots[s];
        if (slot.origin != wanted_task || slot.name == kEntityNameSlot) continue;
        if (!belief.slot_known(static_cast<int>(s))) {
          int idx = find_act(spec, available, ActType::Request, slot.name);
          if (idx >= 0) return idx;
        }
      }
      int idx = find_act(spec, available, ActType::Commit, "", wanted_task);
      if (idx >= 0) return idx;
    } else {
      int idx = find_act(spec, available, ActType::Option, "", wanted_task);
      if (idx >= 0) return idx;
    }
  }

  int idx = find_act(spec, available, ActType::Repeat);
  if (idx >= 0) return idx;
  if (available.empty()) throw std::logic_error("ScriptedPolicy: no available actions");
  return available.front();
}

}  // namespace hrl
