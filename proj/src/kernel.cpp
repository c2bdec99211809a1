#include "hrl/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hrl {

bool KernelSpec::action_in_shared_set(int action) const {
  return std::binary_search(shared_actions.begin(), shared_actions.end(), action);
}

double belief_kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("kernel_eval: belief dimension mismatch: " +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  switch (spec.belief_kernel) {
    case BeliefKernelKind::Linear:
      return x.dot(y);
    case BeliefKernelKind::Gaussian: {
      const double w2 = spec.gaussian_width * spec.gaussian_width;
      return std::exp(-0.5 * (x - y).squaredNorm() / w2);
    }
  }
  return 0.0;
}

double kernel_eval(const JointPoint& x, const JointPoint& y, const KernelSpec& spec) {
  double action_term = 0.0;
  switch (spec.action_kernel) {
    case ActionKernelKind::Delta:
      action_term = x.action == y.action ? 1.0 : 0.0;
      break;
    case ActionKernelKind::RestrictedDelta:
      action_term = (x.action == y.action && spec.action_in_shared_set(x.action) &&
                     spec.action_in_shared_set(y.action))
                        ? 1.0
                        : 0.0;
      break;
  }
  if (action_term == 0.0) {
    // Still validate dimensions so mismatches never pass silently.
    if (x.belief.size() != y.belief.size()) {
      throw std::invalid_argument("kernel_eval: belief dimension mismatch: " +
                                  std::to_string(x.belief.size()) + " vs " +
                                  std::to_string(y.belief.size()));
    }
    return 0.0;
  }
  return belief_kernel_eval(spec, x.belief, y.belief) * action_term;
}

}  // namespace hrl
