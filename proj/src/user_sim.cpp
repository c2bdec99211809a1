#include "hrl/user_sim.hpp"

#include <algorithm>
#include <stdexcept>

#include "hrl/errors.hpp"

namespace hrl {

UserGoal sample_goal(const World& world, const UserConfig& cfg, RandomSource& rng) {
  UserGoal goal;
  goal.master_domain = rng.uniform01() < cfg.restaurant_weight ? "restaurant" : "hotel";
  const DomainSpec& spec = world.master(goal.master_domain);
  const EntityDB& db = world.db(goal.master_domain);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    goal.constraints.clear();
    const Entity& source = db.entities[rng.uniform_int(static_cast<int>(db.entities.size()))];
    for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s) {
      const SlotDef& slot = spec.constraint_slots[s];
      goal.constraints[slot.name] =
          rng.bernoulli(cfg.dontcare_prob) ? "dontcare" : slot.values[source.values[s]];
    }
    if (!db_query(db, spec, goal.constraints).empty()) break;
    if (attempt == 999)
      throw ConfigError("sample_goal: could not realize a goal after 1000 draws; "
                        "database coverage is broken");
  }

  goal.requestables.clear();
  goal.requestables.push_back("name");
  for (const std::string& r : spec.requestable_slots) {
    if (r == "name") continue;
    if (rng.bernoulli(cfg.requestable_prob)) goal.requestables.push_back(r);
  }

  if (cfg.sub_task_enabled) {
    goal.sub_task = rng.uniform01() < 0.5 ? "booking" : "payment";
    const DomainSpec& sub = world.sub(goal.sub_task);
    for (const SlotDef& slot : sub.constraint_slots) {
      if (slot.name == kEntityNameSlot) continue;
      goal.sub_constraints[slot.name] =
          rng.bernoulli(cfg.dontcare_prob)
              ? "dontcare"
              : slot.values[rng.uniform_int(static_cast<int>(slot.values.size()))];
    }
  }
  return goal;
}

bool maybe_change_goal(UserGoal& goal, UserPhase phase, const World& world,
                       const UserConfig& cfg, RandomSource& rng,
                       std::string* changed_slot, std::string* new_value) {
  if (phase == UserPhase::Done) return false;
  if (!rng.bernoulli(cfg.p_change)) return false;

  const DomainSpec& spec = world.master(goal.master_domain);
  const EntityDB& db = world.db(goal.master_domain);

  // Candidate (slot, value) pairs that keep the full constraint set
  // realizable. dontcare is always a candidate since it only widens.
  std::vector<std::pair<std::string, std::string>> candidates;
  for (const SlotDef& slot : spec.constraint_slots) {
    const std::string current = goal.constraints.at(slot.name);
    std::vector<std::string> options = slot.values;
    options.push_back("dontcare");
    for (const std::string& v : options) {
      if (v == current) continue;
      std::map<std::string, std::string> c = goal.constraints;
      c[slot.name] = v;
      if (!db_query(db, spec, c).empty()) candidates.emplace_back(slot.name, v);
    }
  }
  if (candidates.empty()) return false;

  std::vector<std::string> slots_with_candidates;
  for (const auto& [s, v] : candidates)
    if (slots_with_candidates.empty() || slots_with_candidates.back() != s)
      slots_with_candidates.push_back(s);
  const std::string slot =
      slots_with_candidates[rng.uniform_int(static_cast<int>(slots_with_candidates.size()))];
  std::vector<std::string> values;
  for (const auto& [s, v] : candidates)
    if (s == slot) values.push_back(v);
  const std::string value = values[rng.uniform_int(static_cast<int>(values.size()))];

  goal.constraints[slot] = value;
  if (changed_slot) *changed_slot = slot;
  if (new_value) *new_value = value;
  return true;
}

UserSimulator::UserSimulator(const World& world, UserGoal goal, UserConfig cfg,
                             std::uint64_t seed)
    : world_(&world), goal_(std::move(goal)), cfg_(cfg), rng_(seed) {
  // The user opens with a greeting and then volunteers some of its
  // constraints one act at a time whenever the system yields the floor; the
  // rest must be asked for.
  agenda_.push_back(UserAct::hello());
  for (const SlotDef& slot : master_spec().constraint_slots)
    if (rng_.bernoulli(cfg_.volunteer_prob))
      agenda_.push_back(UserAct::inform(slot.name, goal_.constraints.at(slot.name)));
}

const DomainSpec& UserSimulator::master_spec() const {
  return world_->master(goal_.master_domain);
}

const DomainSpec& UserSimulator::sub_spec() const { return world_->sub(goal_.sub_task); }

bool UserSimulator::entity_matches_goal(
    const std::map<std::string, std::string>& values) const {
  for (const auto& [slot, want] : goal_.constraints) {
    if (want == "dontcare") continue;
    auto it = values.find(slot);
    if (it == values.end() || it->second != want) return false;
  }
  return true;
}

void UserSimulator::push_post_acceptance_items() {
  if (acceptance_items_pushed_) return;
  acceptance_items_pushed_ = true;
  // The accepted entity already satisfies the constraints; drop any informs
  // still waiting on the agenda.
  agenda_.erase(std::remove_if(agenda_.begin(), agenda_.end(),
                               [](const UserAct& a) {
                                 return a.kind == UserAct::Kind::Inform;
                               }),
                agenda_.end());
  // Stack order: requests pop first, then the sub-task initiation (or a bye
  // when there is no sub-task).
  if (goal_.sub_task.empty())
    agenda_.push_front(UserAct::bye());
  else
    agenda_.push_front(UserAct::task_request(goal_.sub_task));
  for (auto it = goal_.requestables.rbegin(); it != goal_.requestables.rend(); ++it)
    if (!answered_requestables_.count(*it)) agenda_.push_front(UserAct::request(*it));
}

void UserSimulator::remove_pending_inform(const std::string& slot) {
  agenda_.erase(std::remove_if(agenda_.begin(), agenda_.end(),
                               [&](const UserAct& a) {
                                 return a.kind == UserAct::Kind::Inform && a.slot == slot;
                               }),
                agenda_.end());
}

void UserSimulator::remove_pending_request(const std::string& slot) {
  agenda_.erase(std::remove_if(agenda_.begin(), agenda_.end(),
                               [&](const UserAct& a) {
                                 return a.kind == UserAct::Kind::Request && a.slot == slot;
                               }),
                agenda_.end());
}

UserAct UserSimulator::pop_agenda_or_silence() {
  if (agenda_.empty()) {
    if (phase_ == UserPhase::Done) return UserAct::bye();
    return UserAct::silence();
  }
  UserAct act = agenda_.front();
  agenda_.pop_front();
  if (act.kind == UserAct::Kind::TaskRequest) {
    phase_ = UserPhase::Sub;
    task_initiated_ = true;
  }
  if (act.kind == UserAct::Kind::Bye) phase_ = UserPhase::Done;
  return act;
}

UserAct UserSimulator::respond(const SystemObservation& obs) {
  std::string changed_slot, new_value;
  if (maybe_change_goal(goal_, phase_, *world_, cfg_, rng_, &changed_slot, &new_value)) {
    ++goal_changes_;
    remove_pending_inform(changed_slot);
    agenda_.push_front(UserAct::inform(changed_slot, new_value));
  }

  switch (obs.type) {
    case ActType::Request: {
      const DomainSpec& mspec = master_spec();
      if (mspec.constraint_index(obs.slot) >= 0) {
        remove_pending_inform(obs.slot);
        return UserAct::inform(obs.slot, goal_.constraints.at(obs.slot));
      }
      if (obs.slot == kEntityNameSlot) {
        if (phase_ == UserPhase::Sub && accepted_entity_ >= 0)
          return UserAct::inform(kEntityNameSlot,
                                 world_->db(goal_.master_domain).entities[accepted_entity_].name);
        return pop_agenda_or_silence();
      }
      if (!goal_.sub_task.empty() && phase_ == UserPhase::Sub &&
          sub_spec().constraint_index(obs.slot) >= 0) {
        remove_pending_inform(obs.slot);
        return UserAct::inform(obs.slot, goal_.sub_constraints.at(obs.slot));
      }
      // Sub-task details are not discussed before the master goal is met.
      return pop_agenda_or_silence();
    }

    case ActType::Confirm: {
      const DomainSpec& mspec = master_spec();
      std::string want;
      if (mspec.constraint_index(obs.slot) >= 0) {
        want = goal_.constraints.at(obs.slot);
      } else if (!goal_.sub_task.empty() && phase_ == UserPhase::Sub &&
                 sub_spec().constraint_index(obs.slot) >= 0) {
        want = goal_.sub_constraints.at(obs.slot);
      } else {
        return pop_agenda_or_silence();
      }
      if (want == "dontcare" || obs.value == want) {
        remove_pending_inform(obs.slot);
        return UserAct::affirm();
      }
      remove_pending_inform(obs.slot);
      return UserAct::negate_inform(obs.slot, want);
    }

    case ActType::Offer: {
      if (obs.offer_none) return pop_agenda_or_silence();
      // The offer already conveyed the entity's attributes.
      answered_requestables_.insert("name");
      for (const auto& [slot, value] : obs.entity_values) {
        answered_requestables_.insert(slot);
        remove_pending_request(slot);
      }
      remove_pending_request("name");
      if (entity_matches_goal(obs.entity_values)) {
        for (std::size_t e = 0; e < world_->db(goal_.master_domain).entities.size(); ++e)
          if (world_->db(goal_.master_domain).entities[e].name == obs.entity_name)
            accepted_entity_ = static_cast<int>(e);
        push_post_acceptance_items();
        return UserAct::affirm();
      }
      for (const auto& [slot, want] : goal_.constraints) {
        if (want == "dontcare") continue;
        auto it = obs.entity_values.find(slot);
        if (it == obs.entity_values.end() || it->second != want)
          return UserAct::negate_inform(slot, want);
      }
      return pop_agenda_or_silence();
    }

    case ActType::Commit: {
      if (goal_.sub_task.empty() || phase_ != UserPhase::Sub ||
          obs.commit_task != goal_.sub_task)
        return pop_agenda_or_silence();
      if (!obs.commit_entity_bound) return pop_agenda_or_silence();
      for (const auto& [slot, want] : goal_.sub_constraints) {
        if (want == "dontcare") continue;
        auto it = obs.commit_values.find(slot);
        if (it == obs.commit_values.end() || it->second != want)
          return UserAct::negate_inform(slot, want);
      }
      phase_ = UserPhase::Done;
      agenda_.push_front(UserAct::bye());
      return UserAct::affirm();
    }

    case ActType::Inform: {
      if (!obs.value.empty()) {
        answered_requestables_.insert(obs.slot);
        remove_pending_request(obs.slot);
      }
      return pop_agenda_or_silence();
    }

    case ActType::Repeat:
    case ActType::Bye:
    case ActType::Option:
      return pop_agenda_or_silence();
  }
  return UserAct::silence();
}

}  // namespace hrl
