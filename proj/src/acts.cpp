#include "hrl/acts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hrl {

std::string render_user_act(const UserAct& act) {
  switch (act.kind) {
    case UserAct::Kind::Silence: return "silence";
    case UserAct::Kind::Hello: return "hello";
    case UserAct::Kind::Inform: return "inform(" + act.slot + "=" + act.value + ")";
    case UserAct::Kind::Request: return "request(" + act.slot + ")";
    case UserAct::Kind::Affirm: return "affirm";
    case UserAct::Kind::NegateInform:
      return "negate_inform(" + act.slot + "=" + act.value + ")";
    case UserAct::Kind::TaskRequest: return "task_request(" + act.task + ")";
    case UserAct::Kind::Bye: return "bye";
  }
  return "silence";
}

std::string render_system_observation(const SystemObservation& obs) {
  switch (obs.type) {
    case ActType::Request: return "request(" + obs.slot + ")";
    case ActType::Confirm: return "confirm(" + obs.slot + "=" + obs.value + ")";
    case ActType::Inform:
      return "inform(" + obs.slot + "=" + (obs.value.empty() ? "?" : obs.value) + ")";
    case ActType::Offer:
      return obs.offer_none ? "offer(none)" : "offer(" + obs.entity_name + ")";
    case ActType::Commit: {
      std::ostringstream ss;
      ss << "commit_" << obs.commit_task << "(";
      bool first = true;
      for (const auto& [k, v] : obs.commit_values) {
        if (!first) ss << ",";
        ss << k << "=" << v;
        first = false;
      }
      ss << ")";
      return ss.str();
    }
    case ActType::Repeat: return "repeat";
    case ActType::Bye: return "bye";
    case ActType::Option: return "option";
  }
  return "repeat";
}

std::string verbalize_system(const SystemObservation& obs) {
  switch (obs.type) {
    case ActType::Request:
      return "What " + obs.slot + " would you like?";
    case ActType::Confirm:
      return "You want " + obs.slot + " to be " + (obs.value.empty() ? "anything" : obs.value) +
             ", is that right?";
    case ActType::Inform:
      if (obs.value.empty()) return "I have nothing to describe yet.";
      return "The " + obs.slot + " is " + obs.value + ".";
    case ActType::Offer: {
      if (obs.offer_none) return "I am sorry, no place matches those constraints.";
      std::string line = obs.entity_name + " matches your constraints";
      if (!obs.entity_values.empty()) {
        line += " (";
        bool first = true;
        for (const auto& [k, v] : obs.entity_values) {
          if (!first) line += ", ";
          line += k + ": " + v;
          first = false;
        }
        line += ")";
      }
      return line + ".";
    }
    case ActType::Commit: {
      std::string line = "I confirm the " + obs.commit_task + " with ";
      bool first = true;
      for (const auto& [k, v] : obs.commit_values) {
        if (!first) line += ", ";
        line += k + "=" + v;
        first = false;
      }
      return line + ".";
    }
    case ActType::Repeat: return "Anything else I can help with?";
    case ActType::Bye: return "Goodbye.";
    case ActType::Option: return "(switching task)";
  }
  return "";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<UserAct> parse_user_act(const std::string& line) {
  std::string s = trim(line);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "hello" || s == "hi") return UserAct::hello();
  if (s == "affirm" || s == "yes") return UserAct::affirm();
  if (s == "negate" || s == "no") return UserAct::negate_inform("", "");
  if (s == "bye") return UserAct::bye();
  auto paren = s.find('(');
  if (paren == std::string::npos || s.back() != ')') return std::nullopt;
  std::string head = trim(s.substr(0, paren));
  std::string body = trim(s.substr(paren + 1, s.size() - paren - 2));
  if (head == "request") {
    if (body.empty()) return std::nullopt;
    return UserAct::request(body);
  }
  if (head == "inform") {
    auto eq = body.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string slot = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (slot.empty() || value.empty()) return std::nullopt;
    if (slot == "task") {
      if (value != "booking" && value != "payment") return std::nullopt;
      return UserAct::task_request(value);
    }
    return UserAct::inform(slot, value);
  }
  return std::nullopt;
}

}  // namespace hrl
