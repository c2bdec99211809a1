#pragma once

#include <string>
#include <vector>

namespace hrl {

enum class ActType { Request, Confirm, Inform, Offer, Commit, Repeat, Bye, Option };

// One system action. Request/Confirm/Inform carry a slot; Commit and Option
// carry the sub-task they drive ("booking" or "payment").
struct ActionDef {
  ActType type = ActType::Repeat;
  std::string slot;
  std::string target;  // Commit/Option: sub-domain id
  std::string name;    // canonical unique name, e.g. "request(food)" or "book"
};

struct SlotDef {
  std::string name;
  std::vector<std::string> values;
  std::string origin;  // domain the slot belongs to (matters for flat variants)
};

enum class DomainKind { Master, Sub, Flat };

// Static description of a dialogue domain: its slot ontology, requestable
// slots, database size, and action set. Belief vectors are laid out as
//   [per constraint slot: values..., dontcare, none]
//   [per requestable slot: pending-request flag]
//   [entity_offered, entity_accepted, task_req_booking, task_req_payment,
//    sub_done]
//   [last user act one-hot: silence, hello, inform, request, affirm, negate,
//    task_request]
struct DomainSpec {
  std::string id;
  DomainKind kind = DomainKind::Master;
  std::vector<SlotDef> constraint_slots;  // sub domains: system-askable slots
  std::vector<std::string> requestable_slots;
  int entity_count = 0;  // masters only
  std::vector<ActionDef> actions;

  static constexpr int kContextFlags = 5;
  static constexpr int kLastActDim = 7;

  int belief_dim() const;
  int slot_offset(int slot_idx) const;  // offset of a slot block in the belief
  int requested_offset() const;
  int context_offset() const;

  int constraint_index(const std::string& slot) const;   // -1 if absent
  int value_index(int slot_idx, const std::string& value) const;  // -1 if unknown
  int requestable_index(const std::string& slot) const;  // -1 if absent
  int action_index(const std::string& name) const;       // -1 if absent
  std::vector<std::string> action_names() const;
  bool has_option_actions() const;
};

DomainSpec make_restaurant_spec();
DomainSpec make_hotel_spec();
DomainSpec make_booking_spec();
DomainSpec make_payment_spec();
// Flat variant: the master combined with both sub-domains over a single
// primitive action set (no options).
DomainSpec make_flat_spec(const DomainSpec& master, const DomainSpec& booking,
                          const DomainSpec& payment);
// Master spec with option actions removed; used to pretrain single-domain
// policies before adaptation.
DomainSpec make_pretrain_spec(const DomainSpec& master);

inline constexpr const char* kEntityNameSlot = "entityname";
inline constexpr const char* kBoundValue = "<bound>";

}  // namespace hrl
