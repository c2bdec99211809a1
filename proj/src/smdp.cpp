#include "hrl/smdp.hpp"

#include <istream>
#include <ostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "hrl/errors.hpp"

namespace hrl {

void HierarchyConfig::validate() const {
  if (gamma <= 0.0 || gamma > 1.0)
    throw ConfigError("HierarchyConfig: gamma must lie in (0, 1]");
  if (master_exploration_scale < sub_exploration_scale)
    throw ConfigError(
        "HierarchyConfig: master_exploration_scale must be >= sub_exploration_scale");
  if (master_exploration_scale < 0.0 || sub_exploration_scale < 0.0)
    throw ConfigError("HierarchyConfig: exploration scales must be >= 0");
  if (max_dialogue_length < 1) throw ConfigError("HierarchyConfig: max_dialogue_length < 1");
  if (max_sub_steps < 1) throw ConfigError("HierarchyConfig: max_sub_steps < 1");
}

double discounted_return(const std::vector<double>& rewards, double gamma) {
  if (gamma <= 0.0 || gamma > 1.0)
    throw std::invalid_argument("discounted_return: gamma must lie in (0, 1]");
  double total = 0.0;
  double disc = 1.0;
  for (double r : rewards) {
    total += disc * r;
    disc *= gamma;
  }
  return total;
}

std::vector<int> available_actions(const DomainSpec& spec, const BeliefState& belief) {
  std::vector<int> out;
  out.reserve(spec.actions.size());
  for (std::size_t i = 0; i < spec.actions.size(); ++i) {
    if (spec.actions[i].type == ActType::Option) {
      OptionDef opt{spec.actions[i].name, spec.actions[i].target, 0};
      if (!opt.available(belief)) continue;
    }
    out.push_back(static_cast<int>(i));
  }
  return out;
}

namespace {

struct TurnContext {
  double reward_extrinsic = 0.0;
  std::string user_act_text;
  bool terminal = false;
};

// Applies one primitive act, lets the user respond, and settles the success
// bonus the moment the dialogue turns terminal.
TurnContext run_primitive_turn(DialogueEnv& env, UserSimulator& user, int action,
                               const RewardSpec& reward, SuccessResult* success_out) {
  TurnContext ctx;
  DialogueEnv::StepOutcome outcome = env.apply_system_act(action);
  ctx.reward_extrinsic = outcome.reward;
  if (!outcome.terminal) {
    UserAct uact = user.respond(outcome.obs);
    env.observe_user_act(uact);
    ctx.user_act_text = render_user_act(uact);
  }
  ctx.terminal = env.terminal();
  if (ctx.terminal) {
    SuccessResult s = success_check(user.goal(), env.record(), env.world());
    if (s.overall) ctx.reward_extrinsic += reward.success_bonus;
    if (success_out) *success_out = s;
  }
  return ctx;
}

void finalize_log(EpisodeLog& log, const SuccessResult& success) {
  log.length = static_cast<int>(log.turns.size());
  double total = 0.0;
  for (const TurnRecord& t : log.turns) total += t.reward_extrinsic;
  log.total_return = total;
  log.success = success.overall;
  log.master_success = success.master_part;
  log.sub_success = success.sub_part;
}

}  // namespace

OptionResult execute_option(const OptionDef& option, ActionSelector& sub_policy,
                            DialogueEnv& env, UserSimulator& user,
                            const HierarchyConfig& config, RandomSource& rng,
                            EpisodeLog* log) {
  if (env.terminal())
    throw std::logic_error("execute_option: environment is already terminal");
  env.enter_sub(option.sub_domain);
  const DomainSpec& sspec = env.active_spec();

  OptionResult result;
  double inner_disc = 1.0;
  bool first = true;
  SuccessResult success;
  while (true) {
    const BeliefState& belief = env.active_belief();
    Eigen::VectorXd flat = belief.flatten();
    std::vector<int> avail = available_actions(sspec, belief);
    int action = sub_policy.choose(sspec, belief, flat, avail, rng);

    TurnContext ctx = run_primitive_turn(env, user, action, env.reward_spec(), &success);
    ++result.tau;
    result.cumulative_extrinsic += inner_disc * ctx.reward_extrinsic;
    inner_disc *= config.gamma;
    result.discount *= config.gamma;

    result.sub_transitions.push_back(
        {{flat, action}, env.reward_spec().per_turn, config.gamma, false});
    if (log) {
      log->turns.push_back({sspec.id,
                            {flat, action},
                            ctx.reward_extrinsic,
                            env.reward_spec().per_turn,
                            first,
                            sspec.actions[action].name,
                            ctx.user_act_text});
    }
    first = false;
    if (option.terminated(env.active_belief(), result.tau, ctx.terminal)) break;
  }
  result.global_terminal = env.terminal();
  result.sub_success = env.active_belief().sub_done;
  result.sub_transitions.back().is_terminal = true;
  if (result.sub_success) {
    result.sub_transitions.back().reward += env.reward_spec().success_bonus;
    if (log) {
      TurnRecord& last = log->turns.back();
      last.reward_intrinsic = *last.reward_intrinsic + env.reward_spec().success_bonus;
    }
  }
  env.exit_sub();
  return result;
}

OptionResult execute_option(const OptionDef& option, const GPQModel& sub_policy,
                            DialogueEnv& env, UserSimulator& user,
                            const HierarchyConfig& config, RandomSource& rng,
                            RunMode mode, EpisodeLog* log) {
  GPActionSelector selector(
      sub_policy, mode == RunMode::Train ? config.sub_exploration_scale : 0.0);
  return execute_option(option, selector, env, user, config, rng, log);
}

EpisodeResult run_episode_hierarchical(const World& world, const std::string& master_id,
                                       ActionSelector& master_policy,
                                       std::map<std::string, ActionSelector*> sub_policies,
                                       UserSimulator& user, const HierarchyConfig& config,
                                       RandomSource& rng, bool pretrain) {
  config.validate();
  RewardSpec reward;
  reward.max_length = config.max_dialogue_length;
  DialogueEnv env(world, master_id, pretrain ? EnvVariant::Pretrain : EnvVariant::Hier,
                  reward);
  const DomainSpec& mspec = env.base_spec();

  EpisodeResult result;
  result.log.master_domain = master_id;

  // Opening exchange: the user pops its greeting off the agenda.
  SystemObservation greeting;
  greeting.type = ActType::Repeat;
  env.observe_user_act(user.respond(greeting));

  SuccessResult success;
  while (!env.terminal()) {
    const BeliefState& belief = env.base_belief();
    Eigen::VectorXd flat = belief.flatten();
    std::vector<int> avail = available_actions(mspec, belief);
    int action = master_policy.choose(mspec, belief, flat, avail, rng);

    if (mspec.actions[action].type == ActType::Option) {
      OptionDef opt{mspec.actions[action].name, mspec.actions[action].target,
                    config.max_sub_steps};
      ActionSelector* sub = sub_policies.at(opt.sub_domain);
      OptionResult opt_result =
          execute_option(opt, *sub, env, user, config, rng, &result.log);
      result.master_transitions.push_back({{flat, action},
                                           opt_result.cumulative_extrinsic,
                                           opt_result.discount,
                                           opt_result.global_terminal});
      result.sub_episodes.emplace_back(opt.sub_domain, opt_result.sub_transitions);
      result.log.option_outcomes.emplace_back(opt.id, opt_result.sub_success);
      if (opt_result.global_terminal)
        success = success_check(user.goal(), env.record(), world);
    } else {
      TurnContext ctx = run_primitive_turn(env, user, action, reward, &success);
      result.master_transitions.push_back(
          {{flat, action}, ctx.reward_extrinsic, config.gamma, ctx.terminal});
      result.log.turns.push_back({master_id,
                                  {flat, action},
                                  ctx.reward_extrinsic,
                                  std::nullopt,
                                  false,
                                  mspec.actions[action].name,
                                  ctx.user_act_text});
    }
  }
  result.success = success;
  result.log.sub_attempted = user.task_initiated();
  finalize_log(result.log, success);
  return result;
}

EpisodeResult run_episode_hierarchical(const World& world, const std::string& master_id,
                                       const std::map<std::string, const GPQModel*>& masters,
                                       const std::map<std::string, const GPQModel*>& subs,
                                       UserSimulator& user, const HierarchyConfig& config,
                                       RandomSource& rng, RunMode mode, bool pretrain) {
  const double mscale = mode == RunMode::Train ? config.master_exploration_scale : 0.0;
  const double sscale = mode == RunMode::Train ? config.sub_exploration_scale : 0.0;
  GPActionSelector master_sel(*masters.at(master_id), mscale);
  std::vector<std::unique_ptr<GPActionSelector>> keep;
  std::map<std::string, ActionSelector*> sub_sels;
  for (const auto& [id, model] : subs) {
    keep.push_back(std::make_unique<GPActionSelector>(*model, sscale));
    sub_sels[id] = keep.back().get();
  }
  return run_episode_hierarchical(world, master_id, master_sel, sub_sels, user, config, rng,
                                  pretrain);
}

EpisodeResult run_episode_flat(const World& world, const std::string& master_id,
                               ActionSelector& policy, UserSimulator& user,
                               const HierarchyConfig& config, RandomSource& rng) {
  config.validate();
  RewardSpec reward;
  reward.max_length = config.max_dialogue_length;
  DialogueEnv env(world, master_id, EnvVariant::Flat, reward);
  const DomainSpec& spec = env.base_spec();

  EpisodeResult result;
  result.log.master_domain = master_id;
  result.log.flat = true;

  SystemObservation greeting;
  greeting.type = ActType::Repeat;
  env.observe_user_act(user.respond(greeting));

  SuccessResult success;
  while (!env.terminal()) {
    const BeliefState& belief = env.base_belief();
    Eigen::VectorXd flat = belief.flatten();
    std::vector<int> avail = available_actions(spec, belief);
    int action = policy.choose(spec, belief, flat, avail, rng);
    TurnContext ctx = run_primitive_turn(env, user, action, reward, &success);
    result.master_transitions.push_back(
        {{flat, action}, ctx.reward_extrinsic, config.gamma, ctx.terminal});
    result.log.turns.push_back({spec.id,
                                {flat, action},
                                ctx.reward_extrinsic,
                                std::nullopt,
                                false,
                                spec.actions[action].name,
                                ctx.user_act_text});
  }
  result.success = success;
  result.log.sub_attempted = user.task_initiated();
  finalize_log(result.log, success);
  return result;
}

EpisodeResult run_episode_flat(const World& world, const std::string& master_id,
                               const GPQModel& policy, UserSimulator& user,
                               const HierarchyConfig& config, RandomSource& rng,
                               RunMode mode) {
  GPActionSelector sel(policy,
                       mode == RunMode::Train ? config.master_exploration_scale : 0.0);
  return run_episode_flat(world, master_id, sel, user, config, rng);
}

void write_trace(std::ostream& out, const EpisodeLog& log) {
  out << "# master_domain=" << log.master_domain << " flat=" << (log.flat ? 1 : 0)
      << " T=" << log.length << " total_return=" << log.total_return
      << " success=" << (log.success ? 1 : 0) << " master=" << (log.master_success ? 1 : 0)
      << " sub=" << (log.sub_success ? 1 : 0) << " sub_attempted=" << (log.sub_attempted ? 1 : 0);
  if (!log.option_outcomes.empty()) {
    out << " options=";
    for (std::size_t i = 0; i < log.option_outcomes.size(); ++i) {
      if (i) out << ",";
      out << log.option_outcomes[i].first << ":" << (log.option_outcomes[i].second ? 1 : 0);
    }
  }
  out << "\n";
  for (std::size_t i = 0; i < log.turns.size(); ++i) {
    const TurnRecord& t = log.turns[i];
    out << (i + 1) << "|" << t.domain << "|" << t.system_act << "|"
        << (t.user_act.empty() ? "-" : t.user_act) << "|" << t.reward_extrinsic << "|";
    if (t.reward_intrinsic)
      out << *t.reward_intrinsic;
    else
      out << ".";
    out << "|" << (t.option_boundary ? 1 : 0) << "\n";
  }
}

EpisodeLog parse_trace(std::istream& in) {
  EpisodeLog log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string field;
      while (meta >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "master_domain") log.master_domain = value;
        if (key == "flat") log.flat = value == "1";
        if (key == "T") log.length = std::stoi(value);
        if (key == "total_return") log.total_return = std::stod(value);
        if (key == "success") log.success = value == "1";
        if (key == "master") log.master_success = value == "1";
        if (key == "sub") log.sub_success = value == "1";
        if (key == "sub_attempted") log.sub_attempted = value == "1";
        if (key == "options") {
          std::istringstream opts(value);
          std::string item;
          while (std::getline(opts, item, ',')) {
            auto colon = item.rfind(':');
            if (colon != std::string::npos)
              log.option_outcomes.emplace_back(item.substr(0, colon),
                                               item.substr(colon + 1) == "1");
          }
        }
      }
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, '|')) fields.push_back(field);
    if (fields.size() != 7) throw ConfigError("parse_trace: malformed turn line: " + line);
    TurnRecord t;
    t.domain = fields[1];
    t.system_act = fields[2];
    t.user_act = fields[3] == "-" ? "" : fields[3];
    t.reward_extrinsic = std::stod(fields[4]);
    if (fields[5] != ".") t.reward_intrinsic = std::stod(fields[5]);
    t.option_boundary = fields[6] == "1";
    log.turns.push_back(std::move(t));
  }
  return log;
}

}  // namespace hrl
