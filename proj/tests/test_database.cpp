#include <doctest.h>

#include <cstdio>
#include <set>

#include "hrl/belief.hpp"
#include "hrl/database.hpp"
#include "hrl/errors.hpp"
#include "hrl/world.hpp"

using namespace hrl;

TEST_CASE("restaurant database: 100 entities with 3 constraint slots") {
  DomainSpec spec = make_restaurant_spec();
  EntityDB db = generate_database(spec, 7);
  CHECK(db.entities.size() == 100);
  for (const Entity& e : db.entities) CHECK(e.values.size() == 3);
  // The value product (90 combinations) fits inside 100 entities, so every
  // combination is present.
  std::set<std::vector<int>> combos;
  for (const Entity& e : db.entities) combos.insert(e.values);
  CHECK(combos.size() == 90);
}

TEST_CASE("hotel database: 33 entities with 5 properties including the slot names kind/stars/hasparking") {
  DomainSpec spec = make_hotel_spec();
  CHECK(spec.constraint_index("kind") >= 0);
  CHECK(spec.constraint_index("stars") >= 0);
  CHECK(spec.constraint_index("hasparking") >= 0);
  CHECK(spec.constraint_slots.size() == 5);
  EntityDB db = generate_database(spec, 7);
  CHECK(db.entities.size() == 33);
  for (const Entity& e : db.entities) CHECK(e.values.size() == 5);
}

TEST_CASE("database generation is deterministic per seed") {
  DomainSpec spec = make_hotel_spec();
  EntityDB a = generate_database(spec, 42);
  EntityDB b = generate_database(spec, 42);
  REQUIRE(a.entities.size() == b.entities.size());
  for (std::size_t i = 0; i < a.entities.size(); ++i) {
    CHECK(a.entities[i].name == b.entities[i].name);
    CHECK(a.entities[i].values == b.entities[i].values);
  }
  EntityDB c = generate_database(spec, 43);
  bool all_equal = true;
  for (std::size_t i = 0; i < a.entities.size(); ++i)
    if (a.entities[i].values != c.entities[i].values) all_equal = false;
  CHECK_FALSE(all_equal);
}

TEST_CASE("generation rejects unpopulatable specs") {
  DomainSpec spec = make_restaurant_spec();
  spec.constraint_slots[1].values.clear();
  CHECK_THROWS_AS(generate_database(spec, 7), ConfigError);
  DomainSpec spec2 = make_restaurant_spec();
  spec2.entity_count = 0;
  CHECK_THROWS_AS(generate_database(spec2, 7), ConfigError);
}

TEST_CASE("db_query") {
  DomainSpec spec = make_hotel_spec();
  EntityDB db = generate_database(spec, 7);

  SUBCASE("all-dontcare returns the whole database") {
    std::map<std::string, std::string> constraints;
    for (const SlotDef& s : spec.constraint_slots) constraints[s.name] = "dontcare";
    CHECK(db_query(db, spec, constraints).size() == db.entities.size());
  }
  SUBCASE("results equal the brute-force filter") {
    std::map<std::string, std::string> constraints{{"pricerange", "moderate"},
                                                   {"kind", "guesthouse"}};
    std::vector<int> got = db_query(db, spec, constraints);
    std::vector<int> expected;
    const int pi = spec.constraint_index("pricerange");
    const int ki = spec.constraint_index("kind");
    for (std::size_t e = 0; e < db.entities.size(); ++e) {
      if (spec.constraint_slots[pi].values[db.entities[e].values[pi]] == "moderate" &&
          spec.constraint_slots[ki].values[db.entities[e].values[ki]] == "guesthouse")
        expected.push_back(static_cast<int>(e));
    }
    CHECK(got == expected);
  }
  SUBCASE("unknown slot is an error") {
    std::map<std::string, std::string> constraints{{"swimmingpool", "yes"}};
    CHECK_THROWS_AS(db_query(db, spec, constraints), std::invalid_argument);
  }
}

TEST_CASE("database save/load round trip") {
  DomainSpec spec = make_restaurant_spec();
  EntityDB db = generate_database(spec, 7);
  const std::string path = "test_db_roundtrip.json";
  save_database(db, spec, path);
  EntityDB loaded = load_database(spec, path);
  REQUIRE(loaded.entities.size() == db.entities.size());
  for (std::size_t i = 0; i < db.entities.size(); ++i) {
    CHECK(loaded.entities[i].name == db.entities[i].name);
    CHECK(loaded.entities[i].values == db.entities[i].values);
  }
  std::remove(path.c_str());
}

TEST_CASE("flat variants expose 11 and 13 requestable slots") {
  World world = World::create(7);
  CHECK(world.flat_restaurant.requestable_slots.size() == 11);
  CHECK(world.flat_hotel.requestable_slots.size() == 13);
  CHECK(world.booking.constraint_slots.size() == 5);  // system-askable slots
  CHECK(world.payment.constraint_slots.size() == 3);
  CHECK_FALSE(world.flat_restaurant.has_option_actions());
  CHECK(world.restaurant.has_option_actions());
  CHECK_FALSE(world.booking.has_option_actions());
}

TEST_CASE("belief dimensions are stable per domain") {
  World world = World::create(7);
  for (const DomainSpec* spec : {&world.restaurant, &world.hotel, &world.booking,
                                 &world.payment, &world.flat_restaurant, &world.flat_hotel}) {
    BeliefState b = BeliefState::initial(*spec);
    CHECK(b.flatten().size() == spec->belief_dim());
  }
  CHECK(world.pretrain_restaurant.belief_dim() == world.restaurant.belief_dim());
  CHECK(world.pretrain_hotel.belief_dim() == world.hotel.belief_dim());
}
