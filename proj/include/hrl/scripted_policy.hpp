#pragma once

#include "hrl/smdp.hpp"

namespace hrl {

// Hand-coded near-optimal policy used as the evaluation ceiling and for
// scripted fixtures: answer pending requests, fill unknown slots, offer, run
// the requested sub-task, then leave. Works for master, sub, and flat specs.
class ScriptedPolicy : public ActionSelector {
 public:
  int choose(const DomainSpec& spec, const BeliefState& belief,
             const Eigen::VectorXd& flat_belief, const std::vector<int>& available,
             RandomSource& rng) override;
};

}  // namespace hrl
