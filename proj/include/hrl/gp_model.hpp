#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hrl/kernel.hpp"
#include "hrl/random.hpp"

namespace hrl {

// One learning step: the joint point that was visited, the reward observed
// when leaving it, and the discount to the next point. discount_to_next is
// gamma^tau with tau the number of environment steps spanned (tau > 1 only
// for option-level transitions). The terminal entry has no successor.
struct Transition {
  JointPoint point;
  double reward = 0.0;
  double discount_to_next = 1.0;
  bool is_terminal = false;
};

using EpisodeTransitions = std::vector<Transition>;

enum class AdmitDecision { Admit, RepresentByExisting };

struct PosteriorStat {
  double mean = 0.0;
  double variance = 0.0;
};

struct GPQBlockState {
  Eigen::MatrixXd info;      // accumulated information matrix S_a
  Eigen::VectorXd info_vec;  // accumulated information vector t_a
  Eigen::VectorXd alpha;     // posterior mean coefficients
  Eigen::MatrixXd cov;       // posterior covariance factor C_a
};

// Plain serializable snapshot of a GPQModel.
struct GPQModelState {
  KernelSpec kernel;
  double gamma = 0.99;
  double sparsify_threshold = 1e-3;
  int dictionary_cap = 1000;
  int belief_dim = 0;
  std::vector<std::string> action_names;
  int restricted_prefix = 0;  // carried-over dictionary points (adaptation)
  std::vector<JointPoint> dictionary;
  std::vector<GPQBlockState> blocks;  // one per action id
};

// Sparse Gaussian-process model of Q(b, a).
//
// The posterior is maintained in information form over the dictionary:
// repeated episodic batch re-solves of
//     alpha = (I + S K)^-1 t,      C = (I + S K)^-1 S
// where S and t accumulate sigma^-2 * a a^T and sigma^-2 * y * a over all
// observed transitions, a is the projection of a visited point onto the
// dictionary and y its discounted return-to-go. With the TD noise model
// Sigma = sigma^2 H H^T this is algebraically identical to conditioning on
// the bidiagonal TD observation model r = H q + noise; the dense closed form
// is kept as an independent oracle in the test suite.
//
// Because the action kernel is a (possibly restricted) Kronecker delta, the
// dictionary Gram matrix is block-diagonal per action and every solve runs on
// small per-action blocks.
//
// Single-writer contract: gptd_update is the only mutator; posterior queries
// are const and safe on an immutable snapshot.
class GPQModel {
 public:
  GPQModel(KernelSpec spec, double gamma, double sparsify_threshold,
           int dictionary_cap, int belief_dim,
           std::vector<std::string> action_names);

  static GPQModel from_state(GPQModelState state);
  GPQModelState to_state() const;

  const KernelSpec& spec() const { return spec_; }
  double gamma() const { return gamma_; }
  double sparsify_threshold() const { return nu_; }
  int dictionary_cap() const { return cap_; }
  int belief_dim() const { return belief_dim_; }
  int restricted_prefix() const { return restricted_prefix_; }
  const std::vector<std::string>& action_names() const { return action_names_; }
  const std::vector<JointPoint>& dictionary() const { return dict_; }
  int dictionary_size() const { return static_cast<int>(dict_.size()); }

  // Squared residual of x against the span of the current dictionary,
  // delta = k(x,x) - k_xD K_DD^-1 k_Dx. Gram inversions carry a 1e-8 jitter.
  double admit_residual(const JointPoint& x) const;
  AdmitDecision dictionary_admit(const JointPoint& x) const;

  // Batch GPTD update with one episode. Rejects episodes containing
  // non-finite rewards or beliefs (model unchanged).
  void gptd_update(const EpisodeTransitions& episode);

  PosteriorStat q_posterior_one(const Eigen::VectorXd& belief, int action) const;
  std::vector<PosteriorStat> q_posterior(const Eigen::VectorXd& belief,
                                         const std::vector<int>& actions) const;

  // Draws q_a ~ N(mean_a, scale^2 var_a) per action and returns the argmax
  // action id; scale 0 is greedy on means. Ties break to the lowest id.
  int sample_action(const Eigen::VectorXd& belief, const std::vector<int>& actions,
                    double exploration_scale, RandomSource& rng) const;

  // Assembled views in dictionary order (used by tests and serialization).
  Eigen::VectorXd alpha() const;
  Eigen::MatrixXd cov_factor() const;

  static constexpr double kJitter = 1e-8;
  static constexpr double kVarianceClamp = 1e-9;

 private:
  struct Block {
    std::vector<int> global_index;
    Eigen::MatrixXd K;  // effective Gram within the block
    Eigen::MatrixXd L;  // chol(K + jitter I)
    Eigen::MatrixXd S;
    Eigen::VectorXd t;
    Eigen::VectorXd alpha;
    Eigen::MatrixXd C;
    int size() const { return static_cast<int>(global_index.size()); }
  };

  double prior_variance(const Eigen::VectorXd& belief) const;
  // Cross covariance between a query and dictionary entry (gate-aware).
  double cross_kernel(const Eigen::VectorXd& belief, int action, int dict_index) const;
  Eigen::VectorXd block_cross(const Eigen::VectorXd& belief, int action) const;
  void check_action(int action) const;
  void check_belief(const Eigen::VectorXd& belief) const;
  void admit_point(const JointPoint& x);
  void solve_block(Block& blk);
  void rebuild_block_gram(Block& blk);

  KernelSpec spec_;
  double gamma_;
  double nu_;
  int cap_;
  int belief_dim_;
  std::vector<std::string> action_names_;
  int restricted_prefix_ = 0;
  std::vector<JointPoint> dict_;
  std::vector<Block> blocks_;  // indexed by action id
};

}  // namespace hrl
