#include "hrl/env.hpp"

#include <stdexcept>

namespace hrl {

World World::create(std::uint64_t db_seed) {
  World w;
  w.restaurant = make_restaurant_spec();
  w.hotel = make_hotel_spec();
  w.booking = make_booking_spec();
  w.payment = make_payment_spec();
  w.flat_restaurant = make_flat_spec(w.restaurant, w.booking, w.payment);
  w.flat_hotel = make_flat_spec(w.hotel, w.booking, w.payment);
  w.pretrain_restaurant = make_pretrain_spec(w.restaurant);
  w.pretrain_hotel = make_pretrain_spec(w.hotel);
  w.restaurant_db = generate_database(w.restaurant, derive_seed(db_seed, 1));
  w.hotel_db = generate_database(w.hotel, derive_seed(db_seed, 2));
  return w;
}

const DomainSpec& World::pretrain(const std::string& master_id) const {
  if (master_id == "restaurant") return pretrain_restaurant;
  if (master_id == "hotel") return pretrain_hotel;
  throw std::invalid_argument("World: unknown master domain '" + master_id + "'");
}

const DomainSpec& World::master(const std::string& id) const {
  if (id == "restaurant") return restaurant;
  if (id == "hotel") return hotel;
  throw std::invalid_argument("World: unknown master domain '" + id + "'");
}

const DomainSpec& World::sub(const std::string& id) const {
  if (id == "booking") return booking;
  if (id == "payment") return payment;
  throw std::invalid_argument("World: unknown sub domain '" + id + "'");
}

const DomainSpec& World::flat(const std::string& master_id) const {
  if (master_id == "restaurant") return flat_restaurant;
  if (master_id == "hotel") return flat_hotel;
  throw std::invalid_argument("World: unknown master domain '" + master_id + "'");
}

const EntityDB& World::db(const std::string& master_id) const {
  if (master_id == "restaurant") return restaurant_db;
  if (master_id == "hotel") return hotel_db;
  throw std::invalid_argument("World: unknown master domain '" + master_id + "'");
}

SuccessResult success_check(const UserGoal& goal, const EnvRecord& record,
                            const World& world) {
  SuccessResult result;
  const DomainSpec& mspec = world.master(goal.master_domain);
  const EntityDB& db = world.db(goal.master_domain);

  bool entity_ok = false;
  if (record.last_offered_entity >= 0 &&
      record.last_offered_entity < static_cast<int>(db.entities.size())) {
    const Entity& ent = db.entities[record.last_offered_entity];
    entity_ok = true;
    for (const auto& [slot, want] : goal.constraints) {
      if (want == "dontcare") continue;
      int si = mspec.constraint_index(slot);
      if (si < 0 || mspec.constraint_slots[si].values[ent.values[si]] != want) {
        entity_ok = false;
        break;
      }
    }
  }
  bool requests_ok = true;
  for (const std::string& r : goal.requestables)
    if (!record.informed_requestables.count(r)) requests_ok = false;
  result.master_part = entity_ok && requests_ok;

  if (goal.sub_task.empty()) {
    result.sub_part = true;
  } else {
    for (const CommitRecord& c : record.commits) {
      if (c.task != goal.sub_task || !c.entity_bound) continue;
      bool ok = true;
      for (const auto& [slot, want] : goal.sub_constraints) {
        if (want == "dontcare") continue;
        auto it = c.values.find(slot);
        if (it == c.values.end() || it->second != want) {
          ok = false;
          break;
        }
      }
      if (ok) {
        result.sub_part = true;
        break;
      }
    }
  }
  result.overall = result.master_part && result.sub_part;
  return result;
}

namespace {
const DomainSpec& base_spec_for(const World& world, const std::string& master_id,
                                EnvVariant variant) {
  switch (variant) {
    case EnvVariant::Flat: return world.flat(master_id);
    case EnvVariant::Pretrain: return world.pretrain(master_id);
    case EnvVariant::Hier: break;
  }
  return world.master(master_id);
}
}  // namespace

DialogueEnv::DialogueEnv(const World& world, const std::string& master_id,
                         EnvVariant variant, RewardSpec reward)
    : world_(&world),
      master_id_(master_id),
      base_spec_(&base_spec_for(world, master_id, variant)),
      master_spec_(&world.master(master_id)),
      db_(&world.db(master_id)),
      reward_(reward),
      base_belief_(BeliefState::initial(*base_spec_)) {
  // Sub-domain trackers exist for the whole dialogue so information the user
  // volunteers before an option starts is not lost.
  if (variant != EnvVariant::Flat) {
    sub_beliefs_.emplace("booking", BeliefState::initial(world.booking));
    sub_beliefs_.emplace("payment", BeliefState::initial(world.payment));
  }
}

const DomainSpec& DialogueEnv::active_spec() const {
  return in_sub() ? world_->sub(current_sub_) : *base_spec_;
}

BeliefState& DialogueEnv::active_belief() {
  return in_sub() ? sub_beliefs_.at(current_sub_) : base_belief_;
}

const BeliefState& DialogueEnv::active_belief() const {
  return in_sub() ? sub_beliefs_.at(current_sub_) : base_belief_;
}

void DialogueEnv::enter_sub(const std::string& sub_id) {
  if (in_sub()) throw std::logic_error("DialogueEnv: already inside a sub-domain");
  const DomainSpec& sspec = world_->sub(sub_id);
  BeliefState& sb = sub_beliefs_.at(sub_id);
  // Information passed down from the master: the accepted entity and the
  // dialogue context flags.
  int ei = sspec.constraint_index(kEntityNameSlot);
  if (ei >= 0 && record_.accepted_entity >= 0) sb.collapse(ei, 0);
  sb.entity_offered = base_belief_.entity_offered;
  sb.entity_accepted = base_belief_.entity_accepted && record_.accepted_entity >= 0;
  sb.task_requested_booking = base_belief_.task_requested_booking;
  sb.task_requested_payment = base_belief_.task_requested_payment;
  sb.last_act = base_belief_.last_act;
  current_sub_ = sub_id;
}

void DialogueEnv::exit_sub() {
  if (!in_sub()) throw std::logic_error("DialogueEnv: not inside a sub-domain");
  const BeliefState& sb = sub_beliefs_.at(current_sub_);
  base_belief_.sub_done = base_belief_.sub_done || sb.sub_done;
  base_belief_.last_act = sb.last_act;
  current_sub_.clear();
}

BeliefState* DialogueEnv::belief_owning_constraint(const std::string& slot) {
  if (in_sub()) {
    BeliefState& sb = sub_beliefs_.at(current_sub_);
    if (sb.spec().constraint_index(slot) >= 0) return &sb;
  }
  if (base_belief_.spec().constraint_index(slot) >= 0) return &base_belief_;
  for (auto& [id, sb] : sub_beliefs_)
    if (sb.spec().constraint_index(slot) >= 0) return &sb;
  return nullptr;
}

SystemObservation DialogueEnv::do_offer() {
  SystemObservation obs;
  obs.type = ActType::Offer;
  std::vector<std::optional<int>> constraints(master_spec_->constraint_slots.size());
  for (std::size_t s = 0; s < master_spec_->constraint_slots.size(); ++s) {
    // Flat beliefs share the master slot ordering in their leading section.
    int v = base_belief_.argmax_value(static_cast<int>(s));
    if (v < static_cast<int>(master_spec_->constraint_slots[s].values.size()))
      constraints[s] = v;
  }
  std::vector<int> matches = db_query(*db_, *master_spec_, constraints);
  if (matches.empty()) {
    obs.offer_none = true;
    return obs;
  }
  const Entity& ent = db_->entities[matches.front()];
  record_.last_offered_entity = matches.front();
  base_belief_.entity_offered = true;
  obs.entity_name = ent.name;
  for (std::size_t s = 0; s < master_spec_->constraint_slots.size(); ++s)
    obs.entity_values[master_spec_->constraint_slots[s].name] =
        master_spec_->constraint_slots[s].values[ent.values[s]];
  // An offer presents the entity together with its attributes, so those
  // requestable slots count as informed.
  for (const std::string& r : base_spec_->requestable_slots) {
    if (r == "name" || obs.entity_values.count(r)) {
      record_.informed_requestables.insert(r);
      base_belief_.set_request_pending(r, false);
    }
  }
  return obs;
}

SystemObservation DialogueEnv::do_inform(const std::string& slot) {
  SystemObservation obs;
  obs.type = ActType::Inform;
  obs.slot = slot;
  if (record_.last_offered_entity >= 0) {
    const Entity& ent = db_->entities[record_.last_offered_entity];
    if (slot == "name") {
      obs.value = ent.name;
    } else if (slot == "phone") {
      obs.value = ent.name + "_phone";
    } else {
      int si = master_spec_->constraint_index(slot);
      if (si >= 0) obs.value = master_spec_->constraint_slots[si].values[ent.values[si]];
    }
  }
  if (!obs.value.empty()) {
    record_.informed_requestables.insert(slot);
    base_belief_.set_request_pending(slot, false);
  }
  return obs;
}

SystemObservation DialogueEnv::do_commit(const std::string& task) {
  SystemObservation obs;
  obs.type = ActType::Commit;
  obs.commit_task = task;
  const DomainSpec& sspec = world_->sub(task);
  const BeliefState& source = active_belief();
  for (const SlotDef& slot : sspec.constraint_slots) {
    if (slot.name == kEntityNameSlot) continue;
    int si = source.spec().constraint_index(slot.name);
    obs.commit_values[slot.name] = si >= 0 ? source.value_string(si) : "none";
  }
  bool bound = false;
  if (in_sub()) {
    bound = source.entity_accepted;
  } else {
    bound = base_belief_.entity_accepted && record_.accepted_entity >= 0;
  }
  obs.commit_entity_bound = bound;
  record_.commits.push_back({task, obs.commit_values, bound, false});
  return obs;
}

DialogueEnv::StepOutcome DialogueEnv::apply_system_act(int action_index) {
  if (terminal_) throw std::logic_error("DialogueEnv: dialogue already terminal");
  const DomainSpec& spec = active_spec();
  if (action_index < 0 || action_index >= static_cast<int>(spec.actions.size()))
    throw std::invalid_argument("DialogueEnv: action index out of range");
  const ActionDef& act = spec.actions[action_index];
  if (act.type == ActType::Option)
    throw std::logic_error("DialogueEnv: options are executed by the episode runner");

  ++turns_;
  StepOutcome out;
  out.reward = reward_.per_turn;

  switch (act.type) {
    case ActType::Request:
      out.obs.type = ActType::Request;
      out.obs.slot = act.slot;
      break;
    case ActType::Confirm: {
      out.obs.type = ActType::Confirm;
      out.obs.slot = act.slot;
      const BeliefState& b = active_belief();
      int si = b.spec().constraint_index(act.slot);
      out.obs.value = si >= 0 ? b.value_string(si) : "none";
      last_confirm_value_ = out.obs.value;
      break;
    }
    case ActType::Inform:
      out.obs = do_inform(act.slot);
      break;
    case ActType::Offer:
      out.obs = do_offer();
      break;
    case ActType::Commit:
      out.obs = do_commit(act.target);
      break;
    case ActType::Repeat:
      out.obs.type = ActType::Repeat;
      break;
    case ActType::Bye:
      out.obs.type = ActType::Bye;
      terminal_ = true;
      break;
    case ActType::Option:
      break;  // unreachable
  }
  last_system_type_ = act.type;
  last_system_slot_ = act.slot;
  if (turns_ >= reward_.max_length) terminal_ = true;
  out.terminal = terminal_;
  return out;
}

void DialogueEnv::observe_user_act(const UserAct& act) {
  BeliefState& active = active_belief();
  switch (act.kind) {
    case UserAct::Kind::Affirm:
      if (last_system_type_ == ActType::Offer && record_.last_offered_entity >= 0) {
        base_belief_.entity_accepted = true;
        record_.accepted_entity = record_.last_offered_entity;
      } else if (last_system_type_ == ActType::Commit && !record_.commits.empty()) {
        record_.commits.back().accepted = true;
        active.sub_done = true;
        base_belief_.sub_done = true;
      } else if (last_system_type_ == ActType::Confirm) {
        BeliefState* owner = belief_owning_constraint(last_system_slot_);
        if (owner != nullptr)
          owner->collapse_value(last_system_slot_, last_confirm_value_ == "none"
                                                       ? "dontcare"
                                                       : last_confirm_value_);
      }
      active.last_act = LastUserAct::Affirm;
      break;

    case UserAct::Kind::Inform:
    case UserAct::Kind::NegateInform: {
      if (!act.slot.empty()) {
        BeliefState* owner = belief_owning_constraint(act.slot);
        if (owner != nullptr) owner->collapse_value(act.slot, act.value);
      }
      active.last_act = act.kind == UserAct::Kind::Inform ? LastUserAct::Inform
                                                          : LastUserAct::Negate;
      break;
    }

    case UserAct::Kind::Request:
      base_belief_.set_request_pending(act.slot, true);
      active.last_act = LastUserAct::Request;
      break;

    case UserAct::Kind::TaskRequest:
      if (act.task == "booking") base_belief_.task_requested_booking = true;
      if (act.task == "payment") base_belief_.task_requested_payment = true;
      active.last_act = LastUserAct::TaskRequest;
      break;

    case UserAct::Kind::Bye:
      terminal_ = true;
      active.last_act = LastUserAct::Silence;
      break;

    case UserAct::Kind::Hello:
      active.last_act = LastUserAct::Hello;
      break;

    case UserAct::Kind::Silence:
      active.last_act = LastUserAct::Silence;
      break;
  }
}

}  // namespace hrl
