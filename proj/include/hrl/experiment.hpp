#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrl/gp_model.hpp"
#include "hrl/smdp.hpp"
#include "hrl/user_sim.hpp"
#include "hrl/world.hpp"

namespace hrl {

struct ExperimentConfig {
  std::string mode = "hierarchical";  // hierarchical | flat | adapt
  int n_train_dialogues = 4000;
  int eval_every = 200;
  int eval_dialogues_per_point = 200;
  std::vector<std::uint64_t> seeds{1};
  double gamma = 0.99;
  double master_exploration_scale = 2.0;
  double sub_exploration_scale = 1.0;
  double p_change = 0.05;
  double dontcare_prob = 0.3;
  double requestable_prob = 0.3;
  double volunteer_prob = 0.5;
  std::string belief_kernel = "linear";  // linear | gaussian
  double gaussian_width = 1.0;
  double noise_variance = 5.0;
  double sparsify_threshold = 1e-3;
  int dictionary_cap = 1000;
  int max_dialogue_length = 30;
  int max_sub_steps = 15;
  int pretrain_dialogues = 1500;  // adapt mode
  std::uint64_t db_seed = 7;
  std::string out_dir = "out";

  void validate() const;  // throws ConfigError with the offending field named
  HierarchyConfig hierarchy() const;
  UserConfig user() const;
  KernelSpec kernel() const;

  // Strict JSON parsing: unknown keys are ConfigErrors.
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct CurvePoint {
  int dialogues_seen = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double sub_success_rate = 0.0;     // among dialogues whose sub-task was initiated
  double master_success_rate = 0.0;
};

struct LearningCurve {
  std::uint64_t seed = 0;
  std::vector<CurvePoint> points;

  const CurvePoint& at_dialogues(int dialogues_seen) const;  // throws if absent
};

void save_curve_csv(const LearningCurve& curve, const std::string& path);
LearningCurve load_curve_csv(const std::string& path);

// Trained policies for one seed. Hierarchical bundles hold the two masters
// plus the shared booking/payment models; flat bundles hold the two flat
// models. Pretrain bundles hold option-free masters.
struct PolicyBundle {
  std::string mode;  // hierarchical | flat | pretrain
  std::map<std::string, GPQModel> models;  // keyed by domain spec id
};

PolicyBundle make_fresh_bundle(const World& world, const ExperimentConfig& cfg,
                               const std::string& mode);

struct EvalStats {
  double success_rate = 0.0;
  double mean_return = 0.0;
  double master_success_rate = 0.0;
  double sub_success_rate = 0.0;
  int dialogues = 0;
  int sub_attempted = 0;
};

EvalStats evaluate_bundle(const World& world, const PolicyBundle& bundle,
                          const ExperimentConfig& cfg, int n_dialogues,
                          std::uint64_t eval_seed);

// One seeded training run; appends evaluation points every eval_every
// dialogues (plus the initial point at zero dialogues).
LearningCurve run_training_seed(const World& world, const ExperimentConfig& cfg,
                                std::uint64_t seed, PolicyBundle& bundle);

struct TrainResult {
  std::vector<LearningCurve> curves;
  std::vector<std::string> curve_paths;
  std::vector<std::string> model_paths;
  std::string manifest_path;
};

// train / evaluate / compare / adapt experiment entry points; they write
// curves, models, and a manifest under cfg.out_dir and are deterministic in
// (config, seeds).
TrainResult train(const ExperimentConfig& cfg);

EvalStats evaluate(const std::vector<std::string>& model_paths, const std::string& mode,
                   const ExperimentConfig& cfg, int n_dialogues, std::uint64_t seed);

struct CompareReport {
  std::vector<LearningCurve> hier_curves;
  std::vector<LearningCurve> flat_curves;
  double final_delta = 0.0;          // hier - flat overall success at the end
  double at_1000_delta = 0.0;        // hier - flat overall success at 1000
  double final_master_delta = 0.0;
  double final_sub_delta = 0.0;
  std::string csv_path;
  std::string summary_path;
};

CompareReport compare(const ExperimentConfig& cfg);

struct AdaptReport {
  std::vector<LearningCurve> adapted_curves;
  std::vector<LearningCurve> scratch_curves;
  double early_mean_adapted = 0.0;  // mean success over points in (0, 1000]
  double early_mean_scratch = 0.0;
  double final_adapted = 0.0;
  double final_scratch = 0.0;
};

AdaptReport adapt_experiment(const ExperimentConfig& cfg);

// Pretrains option-free masters (no sub-goals; success is the master part
// only) and returns the bundle.
PolicyBundle pretrain_masters(const World& world, const ExperimentConfig& cfg,
                              std::uint64_t seed);
// Applies the action-kernel restriction to every pretrained master and pairs
// them with fresh sub-domain models.
PolicyBundle adapt_bundle(const World& world, const ExperimentConfig& cfg,
                          const PolicyBundle& pretrained);

void write_manifest(const ExperimentConfig& cfg, const std::vector<std::string>& files,
                    const std::string& note, const std::string& path);

}  // namespace hrl
