#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "hrl/acts.hpp"
#include "hrl/ontology.hpp"

namespace hrl {

enum class LastUserAct : int {
  Silence = 0,
  Hello = 1,
  Inform = 2,
  Request = 3,
  Affirm = 4,
  Negate = 5,
  TaskRequest = 6,
};

// Distributional dialogue state for one domain. Tracking is noise-free: an
// informed slot collapses to probability one on the stated value. Each slot
// block ends with the synthetic values dontcare and none (none = nothing
// known yet). flatten() produces the fixed-length vector fed to the policy.
class BeliefState {
 public:
  static BeliefState initial(const DomainSpec& spec);

  const DomainSpec& spec() const { return *spec_; }

  int dontcare_index(int slot_idx) const;
  int none_index(int slot_idx) const;
  int argmax_value(int slot_idx) const;
  bool slot_known(int slot_idx) const;  // mass not on none
  // Believed value rendered as a string ("dontcare"/"none" for synthetics).
  std::string value_string(int slot_idx) const;
  void collapse(int slot_idx, int value_idx);
  // Collapse by value name; unknown names collapse to none.
  void collapse_value(const std::string& slot, const std::string& value);

  bool request_pending(int requestable_idx) const;
  void set_request_pending(const std::string& slot, bool pending);

  bool entity_offered = false;
  bool entity_accepted = false;
  bool task_requested_booking = false;
  bool task_requested_payment = false;
  bool sub_done = false;
  LastUserAct last_act = LastUserAct::Silence;

  Eigen::VectorXd flatten() const;
  // L1 distance of each slot distribution from summing to one (max over
  // slots); used by the normalization invariant tests.
  double normalization_error() const;

 private:
  const DomainSpec* spec_ = nullptr;
  std::vector<Eigen::VectorXd> slots_;
  Eigen::VectorXd requested_;
};

// Noise-free belief update with one user act. Slots the domain does not know
// are ignored; unknown values collapse to none.
void update_belief(BeliefState& belief, const UserAct& act);

}  // namespace hrl
