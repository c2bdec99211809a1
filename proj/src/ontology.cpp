#include "hrl/ontology.hpp"

#include <algorithm>
#include <stdexcept>

namespace hrl {

namespace {

ActionDef request_act(const std::string& slot) {
  return {ActType::Request, slot, "", "request(" + slot + ")"};
}
ActionDef confirm_act(const std::string& slot) {
  return {ActType::Confirm, slot, "", "confirm(" + slot + ")"};
}
ActionDef inform_act(const std::string& slot) {
  return {ActType::Inform, slot, "", "inform(" + slot + ")"};
}

void append_sub_primitives(std::vector<ActionDef>& acts, const DomainSpec& sub,
                           const std::string& commit_name) {
  for (const SlotDef& s : sub.constraint_slots) acts.push_back(request_act(s.name));
  for (const SlotDef& s : sub.constraint_slots)
    if (s.name != kEntityNameSlot) acts.push_back(confirm_act(s.name));
  acts.push_back({ActType::Commit, "", sub.id, commit_name});
}

}  // namespace

int DomainSpec::belief_dim() const {
  int dim = 0;
  for (const SlotDef& s : constraint_slots) dim += static_cast<int>(s.values.size()) + 2;
  dim += static_cast<int>(requestable_slots.size());
  dim += kContextFlags + kLastActDim;
  return dim;
}

int DomainSpec::slot_offset(int slot_idx) const {
  int off = 0;
  for (int i = 0; i < slot_idx; ++i)
    off += static_cast<int>(constraint_slots[i].values.size()) + 2;
  return off;
}

int DomainSpec::requested_offset() const {
  return slot_offset(static_cast<int>(constraint_slots.size()));
}

int DomainSpec::context_offset() const {
  return requested_offset() + static_cast<int>(requestable_slots.size());
}

int DomainSpec::constraint_index(const std::string& slot) const {
  for (std::size_t i = 0; i < constraint_slots.size(); ++i)
    if (constraint_slots[i].name == slot) return static_cast<int>(i);
  return -1;
}

int DomainSpec::value_index(int slot_idx, const std::string& value) const {
  const std::vector<std::string>& vals = constraint_slots[slot_idx].values;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (vals[i] == value) return static_cast<int>(i);
  return -1;
}

int DomainSpec::requestable_index(const std::string& slot) const {
  for (std::size_t i = 0; i < requestable_slots.size(); ++i)
    if (requestable_slots[i] == slot) return static_cast<int>(i);
  return -1;
}

int DomainSpec::action_index(const std::string& name) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> DomainSpec::action_names() const {
  std::vector<std::string> names;
  names.reserve(actions.size());
  for (const ActionDef& a : actions) names.push_back(a.name);
  return names;
}

bool DomainSpec::has_option_actions() const {
  return std::any_of(actions.begin(), actions.end(),
                     [](const ActionDef& a) { return a.type == ActType::Option; });
}

DomainSpec make_restaurant_spec() {
  DomainSpec spec;
  spec.id = "restaurant";
  spec.kind = DomainKind::Master;
  spec.entity_count = 100;
  spec.constraint_slots = {
      {"pricerange", {"cheap", "moderate", "expensive"}, "restaurant"},
      {"area", {"north", "south", "east", "west", "centre"}, "restaurant"},
      {"food", {"british", "chinese", "french", "indian", "italian", "thai"}, "restaurant"},
  };
  spec.requestable_slots = {"name", "phone", "pricerange", "area", "food"};
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(request_act(s.name));
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(confirm_act(s.name));
  for (const std::string& r : spec.requestable_slots) spec.actions.push_back(inform_act(r));
  spec.actions.push_back({ActType::Offer, "", "", "offer"});
  spec.actions.push_back({ActType::Repeat, "", "", "repeat"});
  spec.actions.push_back({ActType::Option, "", "booking", "book"});
  spec.actions.push_back({ActType::Option, "", "payment", "pay"});
  return spec;
}

DomainSpec make_hotel_spec() {
  DomainSpec spec;
  spec.id = "hotel";
  spec.kind = DomainKind::Master;
  spec.entity_count = 33;
  spec.constraint_slots = {
      {"pricerange", {"cheap", "moderate", "expensive"}, "hotel"},
      {"kind", {"hotel", "guesthouse"}, "hotel"},
      {"stars", {"0", "1", "2", "3", "4"}, "hotel"},
      {"hasparking", {"yes", "no"}, "hotel"},
      {"area", {"north", "south", "east", "west", "centre"}, "hotel"},
  };
  spec.requestable_slots = {"name", "phone", "pricerange", "kind", "stars", "hasparking", "area"};
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(request_act(s.name));
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(confirm_act(s.name));
  for (const std::string& r : spec.requestable_slots) spec.actions.push_back(inform_act(r));
  spec.actions.push_back({ActType::Offer, "", "", "offer"});
  spec.actions.push_back({ActType::Repeat, "", "", "repeat"});
  spec.actions.push_back({ActType::Option, "", "booking", "book"});
  spec.actions.push_back({ActType::Option, "", "payment", "pay"});
  return spec;
}

DomainSpec make_booking_spec() {
  DomainSpec spec;
  spec.id = "booking";
  spec.kind = DomainKind::Sub;
  spec.constraint_slots = {
      {"hour", {"10am", "12pm", "2pm", "4pm", "6pm", "8pm"}, "booking"},
      {"peopleno", {"1", "2", "3", "4", "5", "6", "7", "8"}, "booking"},
      {"durationdays", {"1", "2", "3", "4", "5", "6", "7"}, "booking"},
      {"day",
       {"monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"},
       "booking"},
      {kEntityNameSlot, {kBoundValue}, "booking"},
  };
  spec.requestable_slots = {"refno", "hour", "day"};
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(request_act(s.name));
  for (const SlotDef& s : spec.constraint_slots)
    if (s.name != kEntityNameSlot) spec.actions.push_back(confirm_act(s.name));
  spec.actions.push_back({ActType::Commit, "", "booking", "commit"});
  spec.actions.push_back({ActType::Repeat, "", "", "repeat"});
  return spec;
}

DomainSpec make_payment_spec() {
  DomainSpec spec;
  spec.id = "payment";
  spec.kind = DomainKind::Sub;
  spec.constraint_slots = {
      {"amount", {"under50", "50to100", "over100"}, "payment"},
      {"method", {"cash", "credit", "debit"}, "payment"},
      {"cardnumber", {"c1001", "c1002", "c1003", "c1004", "c1005"}, "payment"},
  };
  spec.requestable_slots = {"receipt", "amount", "method"};
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(request_act(s.name));
  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(confirm_act(s.name));
  spec.actions.push_back({ActType::Commit, "", "payment", "commit"});
  spec.actions.push_back({ActType::Repeat, "", "", "repeat"});
  return spec;
}

DomainSpec make_flat_spec(const DomainSpec& master, const DomainSpec& booking,
                          const DomainSpec& payment) {
  DomainSpec spec;
  spec.id = master.id + "_flat";
  spec.kind = DomainKind::Flat;
  spec.entity_count = master.entity_count;
  spec.constraint_slots = master.constraint_slots;
  for (const SlotDef& s : booking.constraint_slots) spec.constraint_slots.push_back(s);
  for (const SlotDef& s : payment.constraint_slots) spec.constraint_slots.push_back(s);
  spec.requestable_slots = master.requestable_slots;
  for (const std::string& r : booking.requestable_slots) spec.requestable_slots.push_back(r);
  for (const std::string& r : payment.requestable_slots) spec.requestable_slots.push_back(r);

  for (const SlotDef& s : spec.constraint_slots) spec.actions.push_back(request_act(s.name));
  for (const SlotDef& s : master.constraint_slots) spec.actions.push_back(confirm_act(s.name));
  for (const std::string& r : master.requestable_slots) spec.actions.push_back(inform_act(r));
  spec.actions.push_back({ActType::Offer, "", "", "offer"});
  {
    // Requests were added above for every slot; confirms and commits for the
    // sub sections follow the sub specs' own ordering.
    std::vector<ActionDef> tail;
    append_sub_primitives(tail, booking, "commit_booking");
    append_sub_primitives(tail, payment, "commit_payment");
    for (ActionDef& a : tail)
      if (a.type != ActType::Request) spec.actions.push_back(a);
  }
  spec.actions.push_back({ActType::Repeat, "", "", "repeat"});
  return spec;
}

DomainSpec make_pretrain_spec(const DomainSpec& master) {
  DomainSpec spec = master;
  spec.actions.erase(std::remove_if(spec.actions.begin(), spec.actions.end(),
                                    [](const ActionDef& a) { return a.type == ActType::Option; }),
                     spec.actions.end());
  return spec;
}

}  // namespace hrl
