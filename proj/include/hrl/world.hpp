#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hrl/database.hpp"
#include "hrl/ontology.hpp"

namespace hrl {

// The two master domains, the shared sub-domains, their flat combinations,
// and the seeded databases. Immutable once created; shared across episodes.
struct World {
  DomainSpec restaurant;
  DomainSpec hotel;
  DomainSpec booking;
  DomainSpec payment;
  DomainSpec flat_restaurant;
  DomainSpec flat_hotel;
  DomainSpec pretrain_restaurant;  // masters without option actions
  DomainSpec pretrain_hotel;
  EntityDB restaurant_db;
  EntityDB hotel_db;

  static World create(std::uint64_t db_seed);

  const DomainSpec& master(const std::string& id) const;
  const DomainSpec& sub(const std::string& id) const;
  const DomainSpec& flat(const std::string& master_id) const;
  const DomainSpec& pretrain(const std::string& master_id) const;
  const EntityDB& db(const std::string& master_id) const;
};

}  // namespace hrl
