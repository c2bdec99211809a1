#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace hrl {

// A (belief, action) input of the Q-function. Actions are indices into the
// owning model's action table.
struct JointPoint {
  Eigen::VectorXd belief;
  int action = 0;
};

enum class BeliefKernelKind { Linear, Gaussian };
enum class ActionKernelKind { Delta, RestrictedDelta };

// Factored kernel k((b,a),(b',a')) = k_belief(b,b') * k_action(a,a').
// The belief kernel is linear (dot product) or gaussian; the action kernel is
// the Kronecker delta, optionally restricted to a shared action set for
// policy transfer: the restricted delta is zero whenever either action lies
// outside the shared set.
struct KernelSpec {
  BeliefKernelKind belief_kernel = BeliefKernelKind::Linear;
  double gaussian_width = 1.0;
  ActionKernelKind action_kernel = ActionKernelKind::Delta;
  std::vector<int> shared_actions;  // RestrictedDelta only; sorted indices
  double prior_mean = 0.0;          // fixed at 0
  double noise_variance = 5.0;

  bool action_in_shared_set(int action) const;
};

double belief_kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y);

// Full joint kernel. Throws std::invalid_argument naming both lengths on a
// belief dimension mismatch.
double kernel_eval(const JointPoint& x, const JointPoint& y, const KernelSpec& spec);

}  // namespace hrl
