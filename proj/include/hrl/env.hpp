#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hrl/belief.hpp"
#include "hrl/user_sim.hpp"
#include "hrl/world.hpp"

namespace hrl {

struct RewardSpec {
  double success_bonus = 20.0;
  double per_turn = -1.0;
  int max_length = 30;
};

struct CommitRecord {
  std::string task;
  std::map<std::string, std::string> values;  // askable slot -> believed value
  bool entity_bound = false;
  bool accepted = false;
};

// The dialogue events success is judged from.
struct EnvRecord {
  int last_offered_entity = -1;  // index into the master DB; -1 = none offered
  int accepted_entity = -1;
  std::set<std::string> informed_requestables;
  std::vector<CommitRecord> commits;
};

struct SuccessResult {
  bool overall = false;
  bool master_part = false;
  bool sub_part = false;
};

// master_part: the last offered entity satisfies every non-dontcare goal
// constraint and every requested slot was informed. sub_part: some commit of
// the goal's sub-task was made with a bound entity and values matching the
// sub-goal (dontcare matches anything). A goal without a sub-task (pretraining)
// has a vacuously true sub_part. overall = master_part && sub_part.
SuccessResult success_check(const UserGoal& goal, const EnvRecord& record,
                            const World& world);

enum class EnvVariant { Hier, Flat, Pretrain };

// The multi-domain environment for one dialogue. Owns the belief state of the
// base domain (a master, its flat combination, or the option-free pretraining
// variant) and of any sub-domain entered through an option; sub beliefs
// persist across repeated option invocations within the dialogue. Rewards are
// -1 per system turn; the success bonus is added by the episode runner when
// the dialogue terminates. Instances are single-threaded and private to one
// episode.
class DialogueEnv {
 public:
  DialogueEnv(const World& world, const std::string& master_id, EnvVariant variant,
              RewardSpec reward);

  struct StepOutcome {
    SystemObservation obs;
    double reward = 0.0;
    bool terminal = false;
  };

  // Executes a primitive action of the active domain. Throws std::logic_error
  // on option actions (the episode runner executes those) or if already
  // terminal.
  StepOutcome apply_system_act(int action_index);
  void observe_user_act(const UserAct& act);

  const DomainSpec& base_spec() const { return *base_spec_; }
  const DomainSpec& active_spec() const;
  BeliefState& base_belief() { return base_belief_; }
  const BeliefState& base_belief() const { return base_belief_; }
  BeliefState& active_belief();
  const BeliefState& active_belief() const;

  bool in_sub() const { return !current_sub_.empty(); }
  const std::string& current_sub() const { return current_sub_; }
  void enter_sub(const std::string& sub_id);
  void exit_sub();

  int turns() const { return turns_; }
  bool terminal() const { return terminal_; }
  const EnvRecord& record() const { return record_; }
  const World& world() const { return *world_; }
  const RewardSpec& reward_spec() const { return reward_; }
  const std::string& master_id() const { return master_id_; }

 private:
  SystemObservation do_offer();
  SystemObservation do_inform(const std::string& slot);
  SystemObservation do_commit(const std::string& task);
  BeliefState* belief_owning_constraint(const std::string& slot);

  const World* world_;
  std::string master_id_;
  const DomainSpec* base_spec_;
  const DomainSpec* master_spec_;
  const EntityDB* db_;
  RewardSpec reward_;
  BeliefState base_belief_;
  std::map<std::string, BeliefState> sub_beliefs_;
  std::string current_sub_;
  EnvRecord record_;
  int turns_ = 0;
  bool terminal_ = false;
  ActType last_system_type_ = ActType::Repeat;
  std::string last_system_slot_;
  std::string last_confirm_value_;
};

}  // namespace hrl
