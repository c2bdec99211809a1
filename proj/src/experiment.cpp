#include "hrl/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hrl/adaptation.hpp"
#include "hrl/errors.hpp"
#include "hrl/model_io.hpp"
#include "hrl/version.hpp"

namespace hrl {

namespace {

// Seed-stream tags so every component draws from its own generator.
constexpr std::uint64_t kGoalTag = 0xA001;
constexpr std::uint64_t kUserTag = 0xA002;
constexpr std::uint64_t kPolicyTag = 0xA003;
constexpr std::uint64_t kEvalTag = 0xB001;
constexpr std::uint64_t kPretrainTag = 0xC001;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (mode != "hierarchical" && mode != "flat" && mode != "adapt")
    throw ConfigError("config: mode must be hierarchical, flat, or adapt (got '" + mode + "')");
  if (n_train_dialogues < 0) throw ConfigError("config: n_train_dialogues must be >= 0");
  if (eval_every < 1) throw ConfigError("config: eval_every must be >= 1");
  if (n_train_dialogues % eval_every != 0)
    throw ConfigError("config: eval_every must divide n_train_dialogues");
  if (eval_dialogues_per_point < 1)
    throw ConfigError("config: eval_dialogues_per_point must be >= 1");
  if (seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("config: gamma must lie in (0, 1]");
  if (master_exploration_scale < sub_exploration_scale)
    throw ConfigError("config: master_exploration_scale must be >= sub_exploration_scale");
  if (p_change < 0.0 || p_change > 1.0) throw ConfigError("config: p_change must lie in [0, 1]");
  if (dontcare_prob < 0.0 || dontcare_prob > 1.0)
    throw ConfigError("config: dontcare_prob must lie in [0, 1]");
  if (requestable_prob < 0.0 || requestable_prob > 1.0)
    throw ConfigError("config: requestable_prob must lie in [0, 1]");
  if (volunteer_prob < 0.0 || volunteer_prob > 1.0)
    throw ConfigError("config: volunteer_prob must lie in [0, 1]");
  if (belief_kernel != "linear" && belief_kernel != "gaussian")
    throw ConfigError("config: belief_kernel must be linear or gaussian");
  if (gaussian_width <= 0.0) throw ConfigError("config: gaussian_width must be > 0");
  if (noise_variance <= 0.0) throw ConfigError("config: noise_variance must be > 0");
  if (sparsify_threshold < 0.0) throw ConfigError("config: sparsify_threshold must be >= 0");
  if (dictionary_cap < 1) throw ConfigError("config: dictionary_cap must be >= 1");
  if (max_dialogue_length < 1) throw ConfigError("config: max_dialogue_length must be >= 1");
  if (max_sub_steps < 1) throw ConfigError("config: max_sub_steps must be >= 1");
  if (pretrain_dialogues < 0) throw ConfigError("config: pretrain_dialogues must be >= 0");
  if (out_dir.empty()) throw ConfigError("config: out_dir must be non-empty");
}

HierarchyConfig ExperimentConfig::hierarchy() const {
  HierarchyConfig h;
  h.gamma = gamma;
  h.master_exploration_scale = master_exploration_scale;
  h.sub_exploration_scale = sub_exploration_scale;
  h.max_dialogue_length = max_dialogue_length;
  h.max_sub_steps = max_sub_steps;
  return h;
}

UserConfig ExperimentConfig::user() const {
  UserConfig u;
  u.p_change = p_change;
  u.dontcare_prob = dontcare_prob;
  u.requestable_prob = requestable_prob;
  u.volunteer_prob = volunteer_prob;
  u.sub_task_enabled = true;
  return u;
}

KernelSpec ExperimentConfig::kernel() const {
  KernelSpec k;
  k.belief_kernel =
      belief_kernel == "linear" ? BeliefKernelKind::Linear : BeliefKernelKind::Gaussian;
  k.gaussian_width = gaussian_width;
  k.action_kernel = ActionKernelKind::Delta;
  k.noise_variance = noise_variance;
  return k;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "format_version") {
      if (value.get<int>() != kConfigFormatVersion)
        throw ConfigError("config: unsupported format_version");
    } else if (key == "mode") cfg.mode = value.get<std::string>();
    else if (key == "n_train_dialogues") cfg.n_train_dialogues = value.get<int>();
    else if (key == "eval_every") cfg.eval_every = value.get<int>();
    else if (key == "eval_dialogues_per_point") cfg.eval_dialogues_per_point = value.get<int>();
    else if (key == "seeds") cfg.seeds = value.get<std::vector<std::uint64_t>>();
    else if (key == "gamma") cfg.gamma = value.get<double>();
    else if (key == "master_exploration_scale") cfg.master_exploration_scale = value.get<double>();
    else if (key == "sub_exploration_scale") cfg.sub_exploration_scale = value.get<double>();
    else if (key == "p_change") cfg.p_change = value.get<double>();
    else if (key == "dontcare_prob") cfg.dontcare_prob = value.get<double>();
    else if (key == "requestable_prob") cfg.requestable_prob = value.get<double>();
    else if (key == "volunteer_prob") cfg.volunteer_prob = value.get<double>();
    else if (key == "belief_kernel") cfg.belief_kernel = value.get<std::string>();
    else if (key == "gaussian_width") cfg.gaussian_width = value.get<double>();
    else if (key == "noise_variance") cfg.noise_variance = value.get<double>();
    else if (key == "sparsify_threshold") cfg.sparsify_threshold = value.get<double>();
    else if (key == "dictionary_cap") cfg.dictionary_cap = value.get<int>();
    else if (key == "max_dialogue_length") cfg.max_dialogue_length = value.get<int>();
    else if (key == "max_sub_steps") cfg.max_sub_steps = value.get<int>();
    else if (key == "pretrain_dialogues") cfg.pretrain_dialogues = value.get<int>();
    else if (key == "db_seed") cfg.db_seed = value.get<std::uint64_t>();
    else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  nlohmann::ordered_json j;
  j["format_version"] = kConfigFormatVersion;
  j["mode"] = mode;
  j["n_train_dialogues"] = n_train_dialogues;
  j["eval_every"] = eval_every;
  j["eval_dialogues_per_point"] = eval_dialogues_per_point;
  j["seeds"] = seeds;
  j["gamma"] = gamma;
  j["master_exploration_scale"] = master_exploration_scale;
  j["sub_exploration_scale"] = sub_exploration_scale;
  j["p_change"] = p_change;
  j["dontcare_prob"] = dontcare_prob;
  j["requestable_prob"] = requestable_prob;
  j["volunteer_prob"] = volunteer_prob;
  j["belief_kernel"] = belief_kernel;
  j["gaussian_width"] = gaussian_width;
  j["noise_variance"] = noise_variance;
  j["sparsify_threshold"] = sparsify_threshold;
  j["dictionary_cap"] = dictionary_cap;
  j["max_dialogue_length"] = max_dialogue_length;
  j["max_sub_steps"] = max_sub_steps;
  j["pretrain_dialogues"] = pretrain_dialogues;
  j["db_seed"] = db_seed;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

const CurvePoint& LearningCurve::at_dialogues(int dialogues_seen) const {
  for (const CurvePoint& p : points)
    if (p.dialogues_seen == dialogues_seen) return p;
  throw std::invalid_argument("LearningCurve: no point at " + std::to_string(dialogues_seen));
}

void save_curve_csv(const LearningCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_curve_csv: cannot write " + path);
  out << "dialogues_seen,success_rate,mean_return,sub_success_rate,master_success_rate,seed\n";
  for (const CurvePoint& p : curve.points) {
    out << p.dialogues_seen << "," << format_double(p.success_rate) << ","
        << format_double(p.mean_return) << "," << format_double(p.sub_success_rate) << ","
        << format_double(p.master_success_rate) << "," << curve.seed << "\n";
  }
}

LearningCurve load_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_curve_csv: cannot read " + path);
  LearningCurve curve;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw ConfigError("load_curve_csv: malformed row: " + line);
    CurvePoint p;
    p.dialogues_seen = std::stoi(fields[0]);
    p.success_rate = std::stod(fields[1]);
    p.mean_return = std::stod(fields[2]);
    p.sub_success_rate = std::stod(fields[3]);
    p.master_success_rate = std::stod(fields[4]);
    curve.seed = std::stoull(fields[5]);
    curve.points.push_back(p);
  }
  return curve;
}

PolicyBundle make_fresh_bundle(const World& world, const ExperimentConfig& cfg,
                               const std::string& mode) {
  PolicyBundle bundle;
  bundle.mode = mode;
  KernelSpec kernel = cfg.kernel();
  auto add = [&](const DomainSpec& spec) {
    bundle.models.emplace(spec.id,
                          GPQModel(kernel, cfg.gamma, cfg.sparsify_threshold,
                                   cfg.dictionary_cap, spec.belief_dim(), spec.action_names()));
  };
  if (mode == "hierarchical") {
    add(world.restaurant);
    add(world.hotel);
    add(world.booking);
    add(world.payment);
  } else if (mode == "flat") {
    add(world.flat_restaurant);
    add(world.flat_hotel);
  } else if (mode == "pretrain") {
    add(world.pretrain_restaurant);
    add(world.pretrain_hotel);
  } else {
    throw ConfigError("make_fresh_bundle: unknown mode '" + mode + "'");
  }
  return bundle;
}

namespace {

EpisodeResult run_one_dialogue(const World& world, const PolicyBundle& bundle,
                               const HierarchyConfig& hcfg, const UserConfig& ucfg,
                               std::uint64_t goal_seed, std::uint64_t user_seed,
                               std::uint64_t policy_seed, RunMode mode) {
  RandomSource goal_rng(goal_seed);
  UserConfig ucfg_used = ucfg;
  if (bundle.mode == "pretrain") ucfg_used.sub_task_enabled = false;
  UserGoal goal = sample_goal(world, ucfg_used, goal_rng);
  UserSimulator user(world, std::move(goal), ucfg_used, user_seed);
  RandomSource policy_rng(policy_seed);
  const std::string master_id = user.goal().master_domain;

  if (bundle.mode == "flat") {
    const GPQModel& model = bundle.models.at(world.flat(master_id).id);
    return run_episode_flat(world, master_id, model, user, hcfg, policy_rng, mode);
  }
  if (bundle.mode == "pretrain") {
    std::map<std::string, const GPQModel*> masters;
    masters[master_id] = &bundle.models.at(world.pretrain(master_id).id);
    std::map<std::string, const GPQModel*> subs;
    return run_episode_hierarchical(world, master_id, masters, subs, user, hcfg, policy_rng,
                                    mode, /*pretrain=*/true);
  }
  std::map<std::string, const GPQModel*> masters;
  masters[master_id] = &bundle.models.at(master_id);
  std::map<std::string, const GPQModel*> subs;
  subs["booking"] = &bundle.models.at("booking");
  subs["payment"] = &bundle.models.at("payment");
  return run_episode_hierarchical(world, master_id, masters, subs, user, hcfg, policy_rng,
                                  mode);
}

std::string model_key_for_episode(const World& world, const PolicyBundle& bundle,
                                  const std::string& master_id) {
  if (bundle.mode == "flat") return world.flat(master_id).id;
  if (bundle.mode == "pretrain") return world.pretrain(master_id).id;
  return master_id;
}

}  // namespace

EvalStats evaluate_bundle(const World& world, const PolicyBundle& bundle,
                          const ExperimentConfig& cfg, int n_dialogues,
                          std::uint64_t eval_seed) {
  HierarchyConfig hcfg = cfg.hierarchy();
  UserConfig ucfg = cfg.user();
  EvalStats stats;
  stats.dialogues = n_dialogues;
  int successes = 0;
  int master_successes = 0;
  int sub_successes = 0;
  int attempted = 0;
  double total_return = 0.0;
  for (int i = 0; i < n_dialogues; ++i) {
    EpisodeResult result = run_one_dialogue(
        world, bundle, hcfg, ucfg, derive_seed(eval_seed, kGoalTag, i),
        derive_seed(eval_seed, kUserTag, i), derive_seed(eval_seed, kPolicyTag, i),
        RunMode::Eval);
    successes += result.success.overall ? 1 : 0;
    master_successes += result.success.master_part ? 1 : 0;
    if (result.log.sub_attempted) {
      ++attempted;
      sub_successes += result.success.sub_part ? 1 : 0;
    }
    total_return += result.log.total_return;
  }
  stats.success_rate = n_dialogues > 0 ? static_cast<double>(successes) / n_dialogues : 0.0;
  stats.master_success_rate =
      n_dialogues > 0 ? static_cast<double>(master_successes) / n_dialogues : 0.0;
  stats.sub_success_rate = attempted > 0 ? static_cast<double>(sub_successes) / attempted : 0.0;
  stats.mean_return = n_dialogues > 0 ? total_return / n_dialogues : 0.0;
  stats.sub_attempted = attempted;
  return stats;
}

LearningCurve run_training_seed(const World& world, const ExperimentConfig& cfg,
                                std::uint64_t seed, PolicyBundle& bundle) {
  HierarchyConfig hcfg = cfg.hierarchy();
  UserConfig ucfg = cfg.user();
  LearningCurve curve;
  curve.seed = seed;

  auto eval_point = [&](int dialogues_seen) {
    EvalStats stats = evaluate_bundle(world, bundle, cfg, cfg.eval_dialogues_per_point,
                                      derive_seed(seed, kEvalTag, dialogues_seen));
    curve.points.push_back({dialogues_seen, stats.success_rate, stats.mean_return,
                            stats.sub_success_rate, stats.master_success_rate});
  };

  eval_point(0);
  for (int d = 1; d <= cfg.n_train_dialogues; ++d) {
    EpisodeResult result = run_one_dialogue(
        world, bundle, hcfg, ucfg, derive_seed(seed, kGoalTag, d),
        derive_seed(seed, kUserTag, d), derive_seed(seed, kPolicyTag, d), RunMode::Train);
    const std::string key = model_key_for_episode(world, bundle, result.log.master_domain);
    bundle.models.at(key).gptd_update(result.master_transitions);
    for (const auto& [sub_id, episode] : result.sub_episodes)
      bundle.models.at(sub_id).gptd_update(episode);
    if (d % cfg.eval_every == 0) eval_point(d);
  }
  return curve;
}

// Emits a gnuplot script next to the curve files; plotting stays delegated.
std::string write_plot_script(const std::string& out_dir, const std::string& name,
                              const std::vector<std::string>& curve_paths) {
  const std::string path = out_dir + "/plot_" + name + ".gp";
  std::ofstream out(path);
  if (!out) throw ConfigError("write_plot_script: cannot write " + path);
  out << "set datafile separator ','\n";
  out << "set xlabel 'training dialogues'\n";
  out << "set ylabel 'success rate'\n";
  out << "set yrange [0:1]\n";
  out << "set key bottom right\n";
  out << "plot \\\n";
  for (std::size_t i = 0; i < curve_paths.size(); ++i) {
    std::filesystem::path p(curve_paths[i]);
    out << "  '" << p.filename().string() << "' using 1:2 skip 1 with linespoints title '"
        << p.stem().string() << "'";
    out << (i + 1 < curve_paths.size() ? ", \\\n" : "\n");
  }
  return path;
}

void write_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& files,
                    const std::string& note, const std::string& path) {
  nlohmann::ordered_json j;
  j["build_id"] = kBuildId;
  j["config"] = nlohmann::ordered_json::parse(cfg.to_json_text());
  j["files"] = files;
  if (!note.empty()) j["note"] = note;
  std::ofstream out(path);
  if (!out) throw ConfigError("write_manifest: cannot write " + path);
  out << j.dump(2) << "\n";
}

namespace {

std::vector<std::string> save_bundle(const PolicyBundle& bundle, const std::string& out_dir,
                                     const std::string& prefix, std::uint64_t seed) {
  std::vector<std::string> paths;
  for (const auto& [id, model] : bundle.models) {
    std::string path =
        out_dir + "/model_" + prefix + "_" + id + "_seed" + std::to_string(seed) + ".json";
    save_model(model, path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace

TrainResult train(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.mode == "adapt")
    throw ConfigError("train: use the adapt entry point for adaptation experiments");
  std::filesystem::create_directories(cfg.out_dir);
  World world = World::create(cfg.db_seed);
  TrainResult result;
  for (std::uint64_t seed : cfg.seeds) {
    PolicyBundle bundle = make_fresh_bundle(world, cfg, cfg.mode);
    LearningCurve curve = run_training_seed(world, cfg, seed, bundle);
    std::string curve_path =
        cfg.out_dir + "/curve_" + cfg.mode + "_seed" + std::to_string(seed) + ".csv";
    save_curve_csv(curve, curve_path);
    result.curves.push_back(std::move(curve));
    result.curve_paths.push_back(curve_path);
    for (std::string& p : save_bundle(bundle, cfg.out_dir, cfg.mode, seed))
      result.model_paths.push_back(std::move(p));
  }
  std::vector<std::string> files = result.curve_paths;
  files.insert(files.end(), result.model_paths.begin(), result.model_paths.end());
  files.push_back(write_plot_script(cfg.out_dir, cfg.mode, result.curve_paths));
  result.manifest_path = cfg.out_dir + "/manifest_" + cfg.mode + ".json";
  write_manifest(cfg, files, "", result.manifest_path);
  return result;
}

EvalStats evaluate(const std::vector<std::string>& model_paths, const std::string& mode,
                   const ExperimentConfig& cfg, int n_dialogues, std::uint64_t seed) {
  World world = World::create(cfg.db_seed);
  PolicyBundle bundle;
  bundle.mode = mode;
  for (const std::string& path : model_paths) {
    GPQModel model = load_model(path);
    // Key by the domain whose action table matches.
    std::string key;
    for (const DomainSpec* spec :
         {&world.restaurant, &world.hotel, &world.booking, &world.payment,
          &world.flat_restaurant, &world.flat_hotel, &world.pretrain_restaurant,
          &world.pretrain_hotel}) {
      if (spec->action_names() == model.action_names() &&
          spec->belief_dim() == model.belief_dim()) {
        key = spec->id;
        break;
      }
    }
    if (key.empty())
      throw ConfigError("evaluate: model " + path + " does not match any domain spec");
    bundle.models.emplace(key, std::move(model));
  }
  std::vector<std::string> required;
  if (mode == "hierarchical")
    required = {"restaurant", "hotel", "booking", "payment"};
  else if (mode == "flat")
    required = {"restaurant_flat", "hotel_flat"};
  else if (mode == "pretrain")
    required = {"restaurant", "hotel"};
  else
    throw ConfigError("evaluate: unknown mode '" + mode + "'");
  for (const std::string& key : required)
    if (!bundle.models.count(key))
      throw ConfigError("evaluate: mode " + mode + " needs a policy for domain '" + key +
                        "'; got none among the given model files");
  return evaluate_bundle(world, bundle, cfg, n_dialogues, derive_seed(seed, kEvalTag, 0));
}

CompareReport compare(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  World world = World::create(cfg.db_seed);
  CompareReport report;

  for (const char* mode_name : {"hierarchical", "flat"}) {
    const std::string mode = mode_name;
    ExperimentConfig sub_cfg = cfg;
    sub_cfg.mode = mode;
    for (std::uint64_t seed : cfg.seeds) {
      PolicyBundle bundle = make_fresh_bundle(world, sub_cfg, mode);
      LearningCurve curve = run_training_seed(world, sub_cfg, seed, bundle);
      std::string curve_path =
          cfg.out_dir + "/curve_" + mode + "_seed" + std::to_string(seed) + ".csv";
      save_curve_csv(curve, curve_path);
      if (mode == "hierarchical")
        report.hier_curves.push_back(std::move(curve));
      else
        report.flat_curves.push_back(std::move(curve));
    }
  }

  auto mean_at = [](const std::vector<LearningCurve>& curves, int d,
                    auto field) -> double {
    double total = 0.0;
    for (const LearningCurve& c : curves) total += field(c.at_dialogues(d));
    return curves.empty() ? 0.0 : total / static_cast<double>(curves.size());
  };
  const int final_d = cfg.n_train_dialogues;
  auto overall = [](const CurvePoint& p) { return p.success_rate; };
  auto master = [](const CurvePoint& p) { return p.master_success_rate; };
  auto sub = [](const CurvePoint& p) { return p.sub_success_rate; };
  report.final_delta = mean_at(report.hier_curves, final_d, overall) -
                       mean_at(report.flat_curves, final_d, overall);
  const int mid = std::min(1000, final_d);
  report.at_1000_delta =
      mean_at(report.hier_curves, mid, overall) - mean_at(report.flat_curves, mid, overall);
  report.final_master_delta = mean_at(report.hier_curves, final_d, master) -
                              mean_at(report.flat_curves, final_d, master);
  report.final_sub_delta =
      mean_at(report.hier_curves, final_d, sub) - mean_at(report.flat_curves, final_d, sub);

  report.csv_path = cfg.out_dir + "/compare.csv";
  {
    std::ofstream out(report.csv_path);
    out << "metric,hierarchical,flat,delta\n";
    out << "final_success," << format_double(mean_at(report.hier_curves, final_d, overall))
        << "," << format_double(mean_at(report.flat_curves, final_d, overall)) << ","
        << format_double(report.final_delta) << "\n";
    out << "success_at_" << mid << ","
        << format_double(mean_at(report.hier_curves, mid, overall)) << ","
        << format_double(mean_at(report.flat_curves, mid, overall)) << ","
        << format_double(report.at_1000_delta) << "\n";
    out << "final_master_success," << format_double(mean_at(report.hier_curves, final_d, master))
        << "," << format_double(mean_at(report.flat_curves, final_d, master)) << ","
        << format_double(report.final_master_delta) << "\n";
    out << "final_sub_success," << format_double(mean_at(report.hier_curves, final_d, sub))
        << "," << format_double(mean_at(report.flat_curves, final_d, sub)) << ","
        << format_double(report.final_sub_delta) << "\n";
  }
  report.summary_path = cfg.out_dir + "/compare_summary.txt";
  {
    std::ofstream out(report.summary_path);
    out << "paired-seed comparison over " << cfg.seeds.size() << " seeds, "
        << cfg.n_train_dialogues << " training dialogues\n";
    out << "final overall success delta (hier - flat): " << report.final_delta << "\n";
    out << "overall success delta at " << mid << ": " << report.at_1000_delta << "\n";
    out << "final master-entity delta: " << report.final_master_delta << "\n";
    out << "final sub-task delta: " << report.final_sub_delta << "\n";
  }
  std::vector<std::string> curve_files;
  for (const char* mode : {"hierarchical", "flat"})
    for (std::uint64_t seed : cfg.seeds)
      curve_files.push_back(cfg.out_dir + "/curve_" + mode + "_seed" + std::to_string(seed) +
                            ".csv");
  const std::string plot = write_plot_script(cfg.out_dir, "compare", curve_files);
  write_manifest(cfg, {report.csv_path, report.summary_path, plot}, "",
                 cfg.out_dir + "/manifest_compare.json");
  return report;
}

PolicyBundle pretrain_masters(const World& world, const ExperimentConfig& cfg,
                              std::uint64_t seed) {
  ExperimentConfig pre_cfg = cfg;
  pre_cfg.n_train_dialogues = cfg.pretrain_dialogues;
  pre_cfg.eval_every = std::max(1, cfg.pretrain_dialogues);
  PolicyBundle bundle = make_fresh_bundle(world, pre_cfg, "pretrain");
  HierarchyConfig hcfg = pre_cfg.hierarchy();
  UserConfig ucfg = pre_cfg.user();
  ucfg.sub_task_enabled = false;
  std::uint64_t stream = derive_seed(seed, kPretrainTag);
  for (int d = 1; d <= pre_cfg.n_train_dialogues; ++d) {
    EpisodeResult result = run_one_dialogue(
        world, bundle, hcfg, ucfg, derive_seed(stream, kGoalTag, d),
        derive_seed(stream, kUserTag, d), derive_seed(stream, kPolicyTag, d), RunMode::Train);
    const std::string key = model_key_for_episode(world, bundle, result.log.master_domain);
    bundle.models.at(key).gptd_update(result.master_transitions);
  }
  return bundle;
}

PolicyBundle adapt_bundle(const World& world, const ExperimentConfig& cfg,
                          const PolicyBundle& pretrained) {
  PolicyBundle bundle;
  bundle.mode = "hierarchical";
  for (const char* master_name : {"restaurant", "hotel"}) {
    const std::string master_id = master_name;
    const DomainSpec& pre_spec = world.pretrain(master_id);
    const DomainSpec& full_spec = world.master(master_id);
    PolicyTransferSpec transfer;
    transfer.source_actions = pre_spec.action_names();
    transfer.target_actions = full_spec.action_names();
    bundle.models.emplace(master_id,
                          adapt_policy(pretrained.models.at(pre_spec.id), transfer,
                                       full_spec.belief_dim()));
  }
  KernelSpec kernel = cfg.kernel();
  for (const DomainSpec* spec : {&world.booking, &world.payment})
    bundle.models.emplace(spec->id,
                          GPQModel(kernel, cfg.gamma, cfg.sparsify_threshold,
                                   cfg.dictionary_cap, spec->belief_dim(),
                                   spec->action_names()));
  return bundle;
}

AdaptReport adapt_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  World world = World::create(cfg.db_seed);
  AdaptReport report;
  std::vector<std::string> files;

  for (std::uint64_t seed : cfg.seeds) {
    PolicyBundle pretrained = pretrain_masters(world, cfg, seed);
    // The transfer consumes serialized policies; round-trip through disk.
    PolicyBundle reloaded;
    reloaded.mode = "pretrain";
    for (std::string& path : save_bundle(pretrained, cfg.out_dir, "pretrain", seed)) {
      GPQModel model = load_model(path);
      for (const auto& [id, original] : pretrained.models)
        if (original.action_names() == model.action_names()) {
          reloaded.models.emplace(id, std::move(model));
          break;
        }
      files.push_back(std::move(path));
    }
    PolicyBundle adapted = adapt_bundle(world, cfg, reloaded);
    ExperimentConfig run_cfg = cfg;
    run_cfg.mode = "hierarchical";
    LearningCurve adapted_curve = run_training_seed(world, run_cfg, seed, adapted);
    std::string adapted_path =
        cfg.out_dir + "/curve_adapt_adapted_seed" + std::to_string(seed) + ".csv";
    save_curve_csv(adapted_curve, adapted_path);
    files.push_back(adapted_path);

    PolicyBundle scratch = make_fresh_bundle(world, run_cfg, "hierarchical");
    LearningCurve scratch_curve = run_training_seed(world, run_cfg, seed, scratch);
    std::string scratch_path =
        cfg.out_dir + "/curve_adapt_scratch_seed" + std::to_string(seed) + ".csv";
    save_curve_csv(scratch_curve, scratch_path);
    files.push_back(scratch_path);

    report.adapted_curves.push_back(std::move(adapted_curve));
    report.scratch_curves.push_back(std::move(scratch_curve));
  }

  auto early_mean = [&](const std::vector<LearningCurve>& curves) {
    double total = 0.0;
    int count = 0;
    for (const LearningCurve& c : curves)
      for (const CurvePoint& p : c.points)
        if (p.dialogues_seen > 0 && p.dialogues_seen <= 1000) {
          total += p.success_rate;
          ++count;
        }
    return count > 0 ? total / count : 0.0;
  };
  auto final_mean = [&](const std::vector<LearningCurve>& curves) {
    double total = 0.0;
    for (const LearningCurve& c : curves)
      total += c.at_dialogues(cfg.n_train_dialogues).success_rate;
    return curves.empty() ? 0.0 : total / static_cast<double>(curves.size());
  };
  report.early_mean_adapted = early_mean(report.adapted_curves);
  report.early_mean_scratch = early_mean(report.scratch_curves);
  report.final_adapted = final_mean(report.adapted_curves);
  report.final_scratch = final_mean(report.scratch_curves);

  write_manifest(cfg, files, "", cfg.out_dir + "/manifest_adapt.json");
  return report;
}

}  // namespace hrl
