#pragma once

#include <map>
#include <optional>
#include <string>

#include "hrl/ontology.hpp"

namespace hrl {

// Semantic-level user dialogue act. NegateInform carries the corrective value
// for the slot the user disagreed about.
struct UserAct {
  enum class Kind { Silence, Hello, Inform, Request, Affirm, NegateInform, TaskRequest, Bye };
  Kind kind = Kind::Silence;
  std::string slot;
  std::string value;
  std::string task;  // TaskRequest: "booking" | "payment"

  static UserAct silence() { return {}; }
  static UserAct hello() { return {Kind::Hello, "", "", ""}; }
  static UserAct inform(std::string slot, std::string value) {
    return {Kind::Inform, std::move(slot), std::move(value), ""};
  }
  static UserAct request(std::string slot) { return {Kind::Request, std::move(slot), "", ""}; }
  static UserAct affirm() { return {Kind::Affirm, "", "", ""}; }
  static UserAct negate_inform(std::string slot, std::string value) {
    return {Kind::NegateInform, std::move(slot), std::move(value), ""};
  }
  static UserAct task_request(std::string task) { return {Kind::TaskRequest, "", "", std::move(task)}; }
  static UserAct bye() { return {Kind::Bye, "", "", ""}; }
};

// What a system act looks like from the user side.
struct SystemObservation {
  ActType type = ActType::Repeat;
  std::string slot;    // Request / Confirm / Inform
  std::string value;   // Confirm: believed value; Inform: informed value
  std::string entity_name;                            // Offer
  std::map<std::string, std::string> entity_values;   // Offer: constraint values
  std::string commit_task;                            // Commit
  std::map<std::string, std::string> commit_values;   // Commit: believed slot values
  bool commit_entity_bound = false;                   // Commit
  bool offer_none = false;  // Offer that matched no entity
};

std::string render_user_act(const UserAct& act);
std::string render_system_observation(const SystemObservation& obs);

// Templated English line for the chat CLI.
std::string verbalize_system(const SystemObservation& obs);

// Chat mini-grammar: hello | affirm | negate | bye | request(slot) |
// inform(slot=value). inform(task=booking|payment) maps to a task request.
// Returns nullopt on unparseable input.
std::optional<UserAct> parse_user_act(const std::string& line);

}  // namespace hrl
