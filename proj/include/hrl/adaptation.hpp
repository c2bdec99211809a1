#pragma once

#include <string>
#include <vector>

#include "hrl/gp_model.hpp"

namespace hrl {

// Transfer of a pretrained policy onto an extended action set. The shared set
// is the intersection of source and target actions; the belief space must be
// unchanged.
struct PolicyTransferSpec {
  std::vector<std::string> source_actions;
  std::vector<std::string> target_actions;

  std::vector<std::string> shared() const;
};

// Builds the restricted action kernel for the transfer: k_action(a, a') = 1
// iff a == a' and a lies in the shared set, 0 otherwise. The belief kernel is
// passed through unchanged. Throws ConfigError when the shared set is empty.
KernelSpec restrict_action_kernel(const KernelSpec& base, const PolicyTransferSpec& transfer);

// Reuses a pretrained model on the target action set. The dictionary and the
// accumulated posterior are carried over; queries at shared actions reproduce
// the pretrained posterior exactly, while new actions start from the prior
// (mean 0, variance k_belief(b, b)). Carried dictionary points whose action
// does not exist in the target set are dropped; they are unreachable through
// the restricted kernel anyway. Throws on a belief-dimension mismatch or if
// the pretrained model uses actions outside the source set.
GPQModel adapt_policy(const GPQModel& pretrained, const PolicyTransferSpec& transfer,
                      int target_belief_dim = -1);

}  // namespace hrl
