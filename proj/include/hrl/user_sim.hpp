#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hrl/acts.hpp"
#include "hrl/random.hpp"
#include "hrl/world.hpp"

namespace hrl {

// A sampled user goal: find an entity under the constraints, learn the
// requestable slots, then complete one sub-task. Constraints are sourced from
// a database entity so every goal is realizable.
struct UserGoal {
  std::string master_domain;
  std::map<std::string, std::string> constraints;      // slot -> value | "dontcare"
  std::vector<std::string> requestables;
  std::string sub_task;                                // "booking" | "payment" | "" (disabled)
  std::map<std::string, std::string> sub_constraints;  // askable slot -> value | "dontcare"
};

struct UserConfig {
  double p_change = 0.05;
  double dontcare_prob = 0.3;
  double requestable_prob = 0.3;
  double volunteer_prob = 0.5;  // chance a constraint is offered unprompted
  bool sub_task_enabled = true;
  double restaurant_weight = 0.5;  // master selection weight; 0.5 = uniform
};

UserGoal sample_goal(const World& world, const UserConfig& cfg, RandomSource& rng);

enum class UserPhase { Master, Sub, Done };

// Resamples one master constraint slot to a different realizable value with
// probability cfg.p_change. Returns true when the goal changed and fills
// changed_slot/new_value. Called once per user turn before responding; never
// touches the master domain choice or the sub-task.
bool maybe_change_goal(UserGoal& goal, UserPhase phase, const World& world,
                       const UserConfig& cfg, RandomSource& rng,
                       std::string* changed_slot, std::string* new_value);

// Agenda-based simulated user: a LIFO stack of pending acts derived from the
// goal drives unsolicited behaviour, while system requests, confirms, offers
// and commits get their specific responses. Phases only move forward
// (master -> sub -> done); the sub phase is unreachable before an entity has
// been accepted.
class UserSimulator {
 public:
  UserSimulator(const World& world, UserGoal goal, UserConfig cfg, std::uint64_t seed);

  UserAct respond(const SystemObservation& obs);

  const UserGoal& goal() const { return goal_; }
  UserPhase phase() const { return phase_; }
  bool task_initiated() const { return task_initiated_; }
  int accepted_entity() const { return accepted_entity_; }
  int goal_changes() const { return goal_changes_; }

 private:
  const DomainSpec& master_spec() const;
  const DomainSpec& sub_spec() const;
  bool entity_matches_goal(const std::map<std::string, std::string>& values) const;
  void push_post_acceptance_items();
  void remove_pending_inform(const std::string& slot);
  void remove_pending_request(const std::string& slot);
  UserAct pop_agenda_or_silence();

  const World* world_;
  UserGoal goal_;
  UserConfig cfg_;
  RandomSource rng_;
  UserPhase phase_ = UserPhase::Master;
  std::deque<UserAct> agenda_;  // front = top of stack
  std::set<std::string> answered_requestables_;
  int accepted_entity_ = -1;
  bool acceptance_items_pushed_ = false;
  bool task_initiated_ = false;
  int goal_changes_ = 0;
};

}  // namespace hrl
