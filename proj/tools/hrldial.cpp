#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "hrl/acts.hpp"
#include "hrl/errors.hpp"
#include "hrl/experiment.hpp"
#include "hrl/model_io.hpp"
#include "hrl/smdp.hpp"
#include "hrl/version.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::string mode;
  bool quiet = false;
};

hrl::ExperimentConfig resolve_config(const CommonFlags& flags) {
  hrl::ExperimentConfig cfg;
  if (!flags.config_path.empty())
    cfg = hrl::ExperimentConfig::from_json_file(flags.config_path);
  if (!flags.seeds.empty()) cfg.seeds = flags.seeds;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.mode.empty()) cfg.mode = flags.mode == "hier" ? "hierarchical" : flags.mode;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--seed", flags.seeds, "seed or seed list");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--mode", flags.mode, "hier|hierarchical|flat|adapt");
  cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

int run_train(const CommonFlags& flags) {
  hrl::ExperimentConfig cfg = resolve_config(flags);
  hrl::TrainResult result = hrl::train(cfg);
  if (!flags.quiet) {
    for (std::size_t i = 0; i < result.curves.size(); ++i) {
      const hrl::LearningCurve& c = result.curves[i];
      const hrl::CurvePoint& last = c.points.back();
      std::cout << "seed " << c.seed << ": final success " << last.success_rate
                << ", mean return " << last.mean_return << " -> " << result.curve_paths[i]
                << "\n";
    }
    std::cout << "manifest: " << result.manifest_path << "\n";
  }
  return 0;
}

int run_evaluate(const CommonFlags& flags, const std::vector<std::string>& models,
                 int n_dialogues, std::uint64_t seed) {
  hrl::ExperimentConfig cfg = resolve_config(flags);
  const std::string mode = cfg.mode == "adapt" ? "hierarchical" : cfg.mode;
  hrl::EvalStats stats = hrl::evaluate(models, mode, cfg, n_dialogues, seed);
  std::cout << "dialogues: " << stats.dialogues << "\n"
            << "success_rate: " << stats.success_rate << "\n"
            << "mean_return: " << stats.mean_return << "\n"
            << "master_success_rate: " << stats.master_success_rate << "\n"
            << "sub_success_rate: " << stats.sub_success_rate << " (over "
            << stats.sub_attempted << " attempted)\n";
  return 0;
}

int run_compare(const CommonFlags& flags) {
  hrl::ExperimentConfig cfg = resolve_config(flags);
  hrl::CompareReport report = hrl::compare(cfg);
  if (!flags.quiet) {
    std::cout << "final success delta (hier - flat): " << report.final_delta << "\n"
              << "success delta at 1000: " << report.at_1000_delta << "\n"
              << "final master delta: " << report.final_master_delta << "\n"
              << "final sub delta: " << report.final_sub_delta << "\n"
              << "report: " << report.csv_path << "\n";
  }
  return 0;
}

int run_adapt(const CommonFlags& flags) {
  hrl::ExperimentConfig cfg = resolve_config(flags);
  hrl::AdaptReport report = hrl::adapt_experiment(cfg);
  if (!flags.quiet) {
    std::cout << "mean success over first 1000 dialogues: adapted "
              << report.early_mean_adapted << " vs scratch " << report.early_mean_scratch
              << "\n"
              << "final success: adapted " << report.final_adapted << " vs scratch "
              << report.final_scratch << "\n";
  }
  return 0;
}

int run_gen_db(const CommonFlags& flags) {
  hrl::ExperimentConfig cfg = resolve_config(flags);
  std::filesystem::create_directories(cfg.out_dir);
  hrl::World world = hrl::World::create(cfg.db_seed);
  const std::string rpath = cfg.out_dir + "/db_restaurant.json";
  const std::string hpath = cfg.out_dir + "/db_hotel.json";
  hrl::save_database(world.restaurant_db, world.restaurant, rpath);
  hrl::save_database(world.hotel_db, world.hotel, hpath);
  if (!flags.quiet) std::cout << "wrote " << rpath << " and " << hpath << "\n";
  return 0;
}

void print_goal(const hrl::UserGoal& goal) {
  std::cout << "Your goal: find a " << goal.master_domain << " with";
  for (const auto& [slot, value] : goal.constraints) std::cout << " " << slot << "=" << value;
  std::cout << "; ask for:";
  for (const std::string& r : goal.requestables) std::cout << " " << r;
  if (!goal.sub_task.empty()) {
    std::cout << "; then complete a " << goal.sub_task << " with";
    for (const auto& [slot, value] : goal.sub_constraints)
      std::cout << " " << slot << "=" << value;
    std::cout << " (say inform(task=" << goal.sub_task << ") when ready)";
  }
  std::cout << "\n";
}

// Interactive dialogue-act chat against trained policies. The human plays the
// user at the semantic act level; a goal is sampled and displayed so success
// can be scored when the dialogue ends.
int run_chat(const CommonFlags& flags, const std::vector<std::string>& model_paths,
             std::uint64_t seed) {
  hrl::ExperimentConfig cfg = resolve_config(flags);
  hrl::World world = hrl::World::create(cfg.db_seed);

  std::map<std::string, hrl::GPQModel> models;
  for (const std::string& path : model_paths) {
    hrl::GPQModel model = hrl::load_model(path);
    std::string key;
    for (const hrl::DomainSpec* spec :
         {&world.restaurant, &world.hotel, &world.booking, &world.payment,
          &world.flat_restaurant, &world.flat_hotel}) {
      if (spec->action_names() == model.action_names() &&
          spec->belief_dim() == model.belief_dim())
        key = spec->id;
    }
    if (key.empty()) throw hrl::ConfigError("chat: model " + path + " matches no domain");
    models.emplace(key, std::move(model));
  }

  hrl::RandomSource goal_rng(seed);
  hrl::UserConfig ucfg = cfg.user();
  hrl::UserGoal goal = hrl::sample_goal(world, ucfg, goal_rng);
  const std::string master_id = goal.master_domain;
  const bool flat = cfg.mode == "flat";
  const std::string base_key = flat ? world.flat(master_id).id : master_id;
  if (!models.count(base_key))
    throw hrl::ConfigError("chat: no model loaded for domain " + base_key);

  print_goal(goal);
  std::cout << "Acts: hello | inform(slot=value) | request(slot) | affirm | negate | bye\n";

  hrl::RewardSpec reward;
  reward.max_length = cfg.max_dialogue_length;
  hrl::DialogueEnv env(world, master_id,
                       flat ? hrl::EnvVariant::Flat : hrl::EnvVariant::Hier, reward);
  hrl::RandomSource rng(seed + 1);
  hrl::HierarchyConfig hcfg = cfg.hierarchy();

  // The greeting is a real turn, so quitting immediately still costs one.
  env.apply_system_act(env.base_spec().action_index("repeat"));
  std::cout << "S: Hello, welcome to the multi-domain dialogue system. How may I help you?\n";

  std::string line;
  while (!env.terminal()) {
    std::cout << "U: " << std::flush;
    if (!std::getline(std::cin, line)) {
      std::cout << "\n(input closed)\n";
      break;
    }
    std::optional<hrl::UserAct> act = hrl::parse_user_act(line);
    if (!act) {
      std::cout << "  (could not parse; acts: hello, affirm, negate, bye, request(slot), "
                   "inform(slot=value), inform(task=booking|payment))\n";
      continue;
    }
    env.observe_user_act(*act);
    if (env.terminal()) break;

    const hrl::DomainSpec& spec = env.base_spec();
    std::vector<int> avail = hrl::available_actions(spec, env.base_belief());
    int action =
        models.at(base_key).sample_action(env.base_belief().flatten(), avail, 0.0, rng);
    if (spec.actions[action].type == hrl::ActType::Option) {
      const std::string sub_id = spec.actions[action].target;
      std::cout << "S: " << spec.actions[action].name << "() [option]\n";
      env.enter_sub(sub_id);
      int elapsed = 0;
      bool input_open = true;
      while (input_open) {
        const hrl::DomainSpec& sspec = env.active_spec();
        std::vector<int> savail = hrl::available_actions(sspec, env.active_belief());
        int sa = models.count(sub_id)
                     ? models.at(sub_id).sample_action(env.active_belief().flatten(), savail,
                                                       0.0, rng)
                     : savail.front();
        hrl::DialogueEnv::StepOutcome out = env.apply_system_act(sa);
        std::cout << "S: " << hrl::verbalize_system(out.obs) << " [" << sub_id << "]\n";
        ++elapsed;
        if (out.terminal || env.active_belief().sub_done || elapsed >= hcfg.max_sub_steps)
          break;
        std::optional<hrl::UserAct> sub_act;
        while (!sub_act) {
          std::cout << "U: " << std::flush;
          if (!std::getline(std::cin, line)) {
            input_open = false;
            break;
          }
          sub_act = hrl::parse_user_act(line);
          if (!sub_act) std::cout << "  (could not parse)\n";
        }
        if (!input_open || !sub_act) break;
        env.observe_user_act(*sub_act);
        if (env.terminal()) break;
      }
      if (env.in_sub()) env.exit_sub();
      if (!input_open) break;
    } else {
      hrl::DialogueEnv::StepOutcome out = env.apply_system_act(action);
      std::cout << "S: " << hrl::verbalize_system(out.obs) << "\n";
    }
  }

  std::cout << "S: Goodbye.\n";
  hrl::SuccessResult success = hrl::success_check(goal, env.record(), world);
  const double total = (success.overall ? reward.success_bonus : 0.0) - env.turns();
  std::cout << "dialogue over: " << (success.overall ? "success" : "failure") << " (master "
            << success.master_part << ", sub " << success.sub_part << "), return " << total
            << " over " << env.turns() << " turns\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical GP dialogue policy toolkit"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, compare_flags, adapt_flags, chat_flags, gendb_flags;
  std::vector<std::string> eval_models, chat_models;
  int eval_n = 200;
  std::uint64_t eval_seed = 1, chat_seed = 1;

  CLI::App* train_cmd = app.add_subcommand("train", "train policies and emit learning curves");
  add_common(train_cmd, train_flags);

  CLI::App* eval_cmd = app.add_subcommand("evaluate", "evaluate saved policies greedily");
  add_common(eval_cmd, eval_flags);
  eval_cmd->add_option("--model", eval_models, "policy file(s)")->required();
  eval_cmd->add_option("--dialogues", eval_n, "number of evaluation dialogues");
  eval_cmd->add_option("--eval-seed", eval_seed, "evaluation seed");

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "paired hierarchical-vs-flat comparison");
  add_common(compare_cmd, compare_flags);

  CLI::App* adapt_cmd =
      app.add_subcommand("adapt", "pretrain, adapt with the restricted kernel, retrain");
  add_common(adapt_cmd, adapt_flags);

  CLI::App* chat_cmd = app.add_subcommand("chat", "interactive dialogue-act chat");
  add_common(chat_cmd, chat_flags);
  chat_cmd->add_option("--model", chat_models, "policy file(s)")->required();
  chat_cmd->add_option("--chat-seed", chat_seed, "goal sampling seed");

  CLI::App* gendb_cmd = app.add_subcommand("gen-db", "write the seeded databases as JSON");
  add_common(gendb_cmd, gendb_flags);

  try {
    app.parse(argc, argv);
    if (train_cmd->parsed()) return run_train(train_flags);
    if (eval_cmd->parsed()) return run_evaluate(eval_flags, eval_models, eval_n, eval_seed);
    if (compare_cmd->parsed()) return run_compare(compare_flags);
    if (adapt_cmd->parsed()) return run_adapt(adapt_flags);
    if (chat_cmd->parsed()) return run_chat(chat_flags, chat_models, chat_seed);
    if (gendb_cmd->parsed()) return run_gen_db(gendb_flags);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const hrl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const hrl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
