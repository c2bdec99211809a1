#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrl/ontology.hpp"

namespace hrl {

struct Entity {
  std::string name;
  std::vector<int> values;  // value index per master constraint slot
};

struct EntityDB {
  std::string domain_id;
  std::uint64_t seed = 0;
  std::vector<Entity> entities;  // sorted by name; query order is stable
};

// Synthetic venue database. Deterministic per seed; every constraint
// combination the goal sampler can produce has at least one matching entity
// because goals are sourced from entities. Throws ConfigError when the domain
// cannot be populated (empty value set or non-positive entity count).
EntityDB generate_database(const DomainSpec& spec, std::uint64_t seed);

// All entities matching every non-dontcare constraint. Index-based variant
// used on hot paths; the string-map variant validates slot/value names and
// throws std::invalid_argument on an unknown slot. "dontcare" (or an absent
// slot) leaves the slot unconstrained.
std::vector<int> db_query(const EntityDB& db, const DomainSpec& spec,
                          const std::vector<std::optional<int>>& constraints);
std::vector<int> db_query(const EntityDB& db, const DomainSpec& spec,
                          const std::map<std::string, std::string>& constraints);

// Structured-text (JSON) persistence of the ontology plus entity list.
void save_database(const EntityDB& db, const DomainSpec& spec, const std::string& path);
EntityDB load_database(const DomainSpec& spec, const std::string& path);

}  // namespace hrl
