#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrl/env.hpp"
#include "hrl/gp_model.hpp"
#include "hrl/user_sim.hpp"

namespace hrl {

struct HierarchyConfig {
  double gamma = 0.99;
  double master_exploration_scale = 2.0;
  double sub_exploration_scale = 1.0;
  int max_dialogue_length = 30;
  int max_sub_steps = 15;

  // Masters explore at least as much as sub-domains; throws ConfigError.
  void validate() const;
};

// A temporally-extended action: its input set (availability) requires the
// master goal to have been achieved (an offered entity the user accepted),
// and it terminates deterministically once the sub-goal is reached, the
// sub-step cap is hit, or the dialogue ends.
struct OptionDef {
  std::string id;
  std::string sub_domain;
  int max_sub_steps = 15;

  bool available(const BeliefState& master_belief) const {
    return master_belief.entity_accepted;
  }
  bool terminated(const BeliefState& sub_belief, int elapsed_sub_steps,
                  bool global_terminal) const {
    return global_terminal || sub_belief.sub_done || elapsed_sub_steps >= max_sub_steps;
  }
};

double discounted_return(const std::vector<double>& rewards, double gamma);

// Primitive actions are always available; option actions only when their
// input set holds. Sub-domain specs carry no options.
std::vector<int> available_actions(const DomainSpec& spec, const BeliefState& belief);

struct TurnRecord {
  std::string domain;
  JointPoint point;
  double reward_extrinsic = 0.0;
  std::optional<double> reward_intrinsic;
  bool option_boundary = false;
  std::string system_act;
  std::string user_act;
};

struct EpisodeLog {
  std::vector<TurnRecord> turns;
  double total_return = 0.0;  // equals success*20 - T by construction
  bool success = false;
  bool master_success = false;
  bool sub_success = false;
  std::vector<std::pair<std::string, bool>> option_outcomes;  // per executed option
  int length = 0;
  std::string master_domain;
  bool flat = false;
  bool sub_attempted = false;
};

// One turn per line plus '#' metadata lines; see README for the schema.
void write_trace(std::ostream& out, const EpisodeLog& log);
EpisodeLog parse_trace(std::istream& in);

enum class RunMode { Train, Eval };

// Pluggable per-domain action chooser so scripted baselines and GP policies
// share the episode machinery.
class ActionSelector {
 public:
  virtual ~ActionSelector() = default;
  virtual int choose(const DomainSpec& spec, const BeliefState& belief,
                     const Eigen::VectorXd& flat_belief,
                     const std::vector<int>& available, RandomSource& rng) = 0;
};

class GPActionSelector : public ActionSelector {
 public:
  GPActionSelector(const GPQModel& model, double exploration_scale)
      : model_(&model), scale_(exploration_scale) {}
  int choose(const DomainSpec&, const BeliefState&, const Eigen::VectorXd& flat_belief,
             const std::vector<int>& available, RandomSource& rng) override {
    return model_->sample_action(flat_belief, available, scale_, rng);
  }

 private:
  const GPQModel* model_;
  double scale_;
};

struct OptionResult {
  int tau = 0;
  double cumulative_extrinsic = 0.0;  // sum_k gamma^k r_e(k) inside the option
  EpisodeTransitions sub_transitions;  // intrinsic rewards only
  bool sub_success = false;
  bool global_terminal = false;
  double discount = 1.0;  // gamma^tau
};

struct EpisodeResult {
  EpisodeLog log;
  EpisodeTransitions master_transitions;  // flat runs: the single policy's list
  std::vector<std::pair<std::string, EpisodeTransitions>> sub_episodes;
  SuccessResult success;
};

// Runs one option to termination. The environment must not be terminal.
OptionResult execute_option(const OptionDef& option, ActionSelector& sub_policy,
                            DialogueEnv& env, UserSimulator& user,
                            const HierarchyConfig& config, RandomSource& rng,
                            EpisodeLog* log);
OptionResult execute_option(const OptionDef& option, const GPQModel& sub_policy,
                            DialogueEnv& env, UserSimulator& user,
                            const HierarchyConfig& config, RandomSource& rng,
                            RunMode mode, EpisodeLog* log = nullptr);

EpisodeResult run_episode_hierarchical(const World& world, const std::string& master_id,
                                       ActionSelector& master_policy,
                                       std::map<std::string, ActionSelector*> sub_policies,
                                       UserSimulator& user, const HierarchyConfig& config,
                                       RandomSource& rng, bool pretrain = false);
EpisodeResult run_episode_hierarchical(const World& world, const std::string& master_id,
                                       const std::map<std::string, const GPQModel*>& masters,
                                       const std::map<std::string, const GPQModel*>& subs,
                                       UserSimulator& user, const HierarchyConfig& config,
                                       RandomSource& rng, RunMode mode,
                                       bool pretrain = false);

EpisodeResult run_episode_flat(const World& world, const std::string& master_id,
                               ActionSelector& policy, UserSimulator& user,
                               const HierarchyConfig& config, RandomSource& rng);
EpisodeResult run_episode_flat(const World& world, const std::string& master_id,
                               const GPQModel& policy, UserSimulator& user,
                               const HierarchyConfig& config, RandomSource& rng,
                               RunMode mode);

}  // namespace hrl
