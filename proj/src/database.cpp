#include "hrl/database.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "hrl/errors.hpp"
#include "hrl/random.hpp"
#include "hrl/version.hpp"

namespace hrl {

namespace {

std::string entity_name(const std::string& domain, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", index);
  return domain + "_" + buf;
}

}  // namespace

EntityDB generate_database(const DomainSpec& spec, std::uint64_t seed) {
  if (spec.entity_count <= 0)
    throw ConfigError("generate_database: " + spec.id + " declares no entities");
  std::size_t combos = 1;
  for (const SlotDef& s : spec.constraint_slots) {
    if (s.values.empty())
      throw ConfigError("generate_database: value set for slot '" + s.name +
                        "' is too small to satisfy goal coverage");
    combos *= s.values.size();
  }

  EntityDB db;
  db.domain_id = spec.id;
  db.seed = seed;
  RandomSource rng(derive_seed(seed, 0xDB));
  const int n_slots = static_cast<int>(spec.constraint_slots.size());

  // When the value product fits, enumerate every combination so the ontology
  // is covered exhaustively and fill the remainder randomly; otherwise draw
  // all combinations at random (goals are sourced from entities either way).
  const bool enumerate = combos <= static_cast<std::size_t>(spec.entity_count);
  std::vector<int> combo(n_slots, 0);
  for (int e = 0; e < spec.entity_count; ++e) {
    Entity ent;
    ent.name = entity_name(spec.id, e);
    if (enumerate && static_cast<std::size_t>(e) < combos) {
      ent.values = combo;
      for (int s = n_slots - 1; s >= 0; --s) {
        if (++combo[s] < static_cast<int>(spec.constraint_slots[s].values.size())) break;
        combo[s] = 0;
      }
    } else {
      ent.values.resize(n_slots);
      for (int s = 0; s < n_slots; ++s)
        ent.values[s] = rng.uniform_int(static_cast<int>(spec.constraint_slots[s].values.size()));
    }
    db.entities.push_back(std::move(ent));
  }
  return db;
}

std::vector<int> db_query(const EntityDB& db, const DomainSpec& spec,
                          const std::vector<std::optional<int>>& constraints) {
  if (constraints.size() != spec.constraint_slots.size() &&
      !(spec.kind == DomainKind::Flat && constraints.size() <= spec.constraint_slots.size()))
    throw std::invalid_argument("db_query: constraint vector size mismatch");
  std::vector<int> out;
  for (std::size_t e = 0; e < db.entities.size(); ++e) {
    const Entity& ent = db.entities[e];
    bool ok = true;
    for (std::size_t s = 0; s < ent.values.size() && s < constraints.size(); ++s) {
      if (constraints[s].has_value() && ent.values[s] != *constraints[s]) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(static_cast<int>(e));
  }
  return out;
}

std::vector<int> db_query(const EntityDB& db, const DomainSpec& spec,
                          const std::map<std::string, std::string>& constraints) {
  std::vector<std::optional<int>> by_index(spec.constraint_slots.size());
  for (const auto& [slot, value] : constraints) {
    int si = spec.constraint_index(slot);
    if (si < 0) throw std::invalid_argument("db_query: unknown slot '" + slot + "'");
    if (value == "dontcare") continue;
    int vi = spec.value_index(si, value);
    if (vi < 0) {
      // Unknown value matches nothing; keep the contract total.
      return {};
    }
    by_index[si] = vi;
  }
  return db_query(db, spec, by_index);
}

void save_database(const EntityDB& db, const DomainSpec& spec, const std::string& path) {
  nlohmann::ordered_json j;
  j["format_version"] = kDbFormatVersion;
  j["domain"] = db.domain_id;
  j["seed"] = db.seed;
  nlohmann::ordered_json slots = nlohmann::ordered_json::array();
  for (const SlotDef& s : spec.constraint_slots)
    slots.push_back({{"name", s.name}, {"values", s.values}});
  j["constraint_slots"] = slots;
  j["requestable_slots"] = spec.requestable_slots;
  nlohmann::ordered_json ents = nlohmann::ordered_json::array();
  for (const Entity& e : db.entities) {
    nlohmann::ordered_json je;
    je["name"] = e.name;
    for (std::size_t s = 0; s < e.values.size(); ++s)
      je[spec.constraint_slots[s].name] = spec.constraint_slots[s].values[e.values[s]];
    ents.push_back(je);
  }
  j["entities"] = ents;
  std::ofstream out(path);
  if (!out) throw ConfigError("save_database: cannot write " + path);
  out << j.dump(2) << "\n";
}

EntityDB load_database(const DomainSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_database: cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.at("format_version").get<int>() != kDbFormatVersion)
    throw ConfigError("load_database: unsupported format version in " + path);
  EntityDB db;
  db.domain_id = j.at("domain").get<std::string>();
  db.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& je : j.at("entities")) {
    Entity e;
    e.name = je.at("name").get<std::string>();
    e.values.resize(spec.constraint_slots.size());
    for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s) {
      const std::string v = je.at(spec.constraint_slots[s].name).get<std::string>();
      int vi = spec.value_index(static_cast<int>(s), v);
      if (vi < 0)
        throw ConfigError("load_database: unknown value '" + v + "' for slot " +
                          spec.constraint_slots[s].name);
      e.values[s] = vi;
    }
    db.entities.push_back(std::move(e));
  }
  return db;
}

}  // namespace hrl
