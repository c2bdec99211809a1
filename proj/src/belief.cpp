#include "hrl/belief.hpp"

#include <cmath>
#include <stdexcept>

namespace hrl {

BeliefState BeliefState::initial(const DomainSpec& spec) {
  BeliefState b;
  b.spec_ = &spec;
  b.slots_.reserve(spec.constraint_slots.size());
  for (const SlotDef& s : spec.constraint_slots) {
    Eigen::VectorXd dist = Eigen::VectorXd::Zero(static_cast<int>(s.values.size()) + 2);
    dist(dist.size() - 1) = 1.0;  // everything starts at none
    b.slots_.push_back(std::move(dist));
  }
  b.requested_ = Eigen::VectorXd::Zero(static_cast<int>(spec.requestable_slots.size()));
  return b;
}

int BeliefState::dontcare_index(int slot_idx) const {
  return static_cast<int>(spec_->constraint_slots[slot_idx].values.size());
}

int BeliefState::none_index(int slot_idx) const { return dontcare_index(slot_idx) + 1; }

int BeliefState::argmax_value(int slot_idx) const {
  int best = 0;
  slots_[slot_idx].maxCoeff(&best);
  return best;
}

bool BeliefState::slot_known(int slot_idx) const {
  return argmax_value(slot_idx) != none_index(slot_idx);
}

std::string BeliefState::value_string(int slot_idx) const {
  int v = argmax_value(slot_idx);
  if (v == dontcare_index(slot_idx)) return "dontcare";
  if (v == none_index(slot_idx)) return "none";
  return spec_->constraint_slots[slot_idx].values[v];
}

void BeliefState::collapse(int slot_idx, int value_idx) {
  Eigen::VectorXd& dist = slots_[slot_idx];
  dist.setZero();
  dist(value_idx) = 1.0;
}

void BeliefState::collapse_value(const std::string& slot, const std::string& value) {
  int si = spec_->constraint_index(slot);
  if (si < 0) return;
  if (value == "dontcare") {
    collapse(si, dontcare_index(si));
    return;
  }
  int vi = spec_->value_index(si, value);
  collapse(si, vi >= 0 ? vi : none_index(si));
}

bool BeliefState::request_pending(int requestable_idx) const {
  return requested_(requestable_idx) > 0.5;
}

void BeliefState::set_request_pending(const std::string& slot, bool pending) {
  int ri = spec_->requestable_index(slot);
  if (ri >= 0) requested_(ri) = pending ? 1.0 : 0.0;
}

Eigen::VectorXd BeliefState::flatten() const {
  Eigen::VectorXd out(spec_->belief_dim());
  int off = 0;
  for (const Eigen::VectorXd& dist : slots_) {
    out.segment(off, dist.size()) = dist;
    off += static_cast<int>(dist.size());
  }
  out.segment(off, requested_.size()) = requested_;
  off += static_cast<int>(requested_.size());
  out(off++) = entity_offered ? 1.0 : 0.0;
  out(off++) = entity_accepted ? 1.0 : 0.0;
  out(off++) = task_requested_booking ? 1.0 : 0.0;
  out(off++) = task_requested_payment ? 1.0 : 0.0;
  out(off++) = sub_done ? 1.0 : 0.0;
  Eigen::VectorXd last = Eigen::VectorXd::Zero(DomainSpec::kLastActDim);
  last(static_cast<int>(last_act)) = 1.0;
  out.segment(off, DomainSpec::kLastActDim) = last;
  return out;
}

double BeliefState::normalization_error() const {
  double worst = 0.0;
  for (const Eigen::VectorXd& dist : slots_)
    worst = std::max(worst, std::abs(dist.sum() - 1.0));
  return worst;
}

void update_belief(BeliefState& belief, const UserAct& act) {
  switch (act.kind) {
    case UserAct::Kind::Silence:
      belief.last_act = LastUserAct::Silence;
      break;
    case UserAct::Kind::Hello:
      belief.last_act = LastUserAct::Hello;
      break;
    case UserAct::Kind::Inform:
      belief.collapse_value(act.slot, act.value);
      belief.last_act = LastUserAct::Inform;
      break;
    case UserAct::Kind::Request:
      belief.set_request_pending(act.slot, true);
      belief.last_act = LastUserAct::Request;
      break;
    case UserAct::Kind::Affirm:
      belief.last_act = LastUserAct::Affirm;
      break;
    case UserAct::Kind::NegateInform:
      if (!act.slot.empty()) belief.collapse_value(act.slot, act.value);
      belief.last_act = LastUserAct::Negate;
      break;
    case UserAct::Kind::TaskRequest:
      if (act.task == "booking") belief.task_requested_booking = true;
      if (act.task == "payment") belief.task_requested_payment = true;
      belief.last_act = LastUserAct::TaskRequest;
      break;
    case UserAct::Kind::Bye:
      belief.last_act = LastUserAct::Silence;
      break;
  }
}

}  // namespace hrl
