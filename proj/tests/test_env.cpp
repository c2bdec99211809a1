#include <doctest.h>

#include "hrl/env.hpp"
#include "hrl/world.hpp"

using namespace hrl;

namespace {

const World& shared_world() {
  static World world = World::create(7);
  return world;
}

}  // namespace

TEST_CASE("noise-free belief updates") {
  const World& world = shared_world();
  BeliefState b = BeliefState::initial(world.restaurant);

  SUBCASE("inform collapses the slot distribution to the stated value") {
    update_belief(b, UserAct::inform("pricerange", "moderate"));
    const int si = world.restaurant.constraint_index("pricerange");
    CHECK(b.value_string(si) == "moderate");
    CHECK(b.normalization_error() < 1e-12);
    CHECK(b.last_act == LastUserAct::Inform);
    // Later reads keep returning the value until the user re-informs.
    CHECK(b.value_string(si) == "moderate");
    update_belief(b, UserAct::inform("pricerange", "cheap"));
    CHECK(b.value_string(si) == "cheap");
  }
  SUBCASE("request flags the requestable slot") {
    update_belief(b, UserAct::request("name"));
    CHECK(b.request_pending(world.restaurant.requestable_index("name")));
  }
  SUBCASE("dontcare informs collapse onto the dontcare value") {
    update_belief(b, UserAct::inform("food", "dontcare"));
    const int si = world.restaurant.constraint_index("food");
    CHECK(b.value_string(si) == "dontcare");
  }
  SUBCASE("unknown values map to none") {
    update_belief(b, UserAct::inform("food", "klingon"));
    const int si = world.restaurant.constraint_index("food");
    CHECK(b.value_string(si) == "none");
    CHECK(b.normalization_error() < 1e-12);
  }
}

TEST_CASE("apply_system_act basics") {
  const World& world = shared_world();
  DialogueEnv env(world, "restaurant", EnvVariant::Hier, RewardSpec{});

  SUBCASE("a non-terminal inform costs one turn") {
    int idx = world.restaurant.action_index("inform(name)");
    DialogueEnv::StepOutcome out = env.apply_system_act(idx);
    CHECK(out.reward == -1.0);
    CHECK_FALSE(out.terminal);
    CHECK(out.obs.value.empty());  // nothing offered yet
    CHECK(env.turns() == 1);
  }
  SUBCASE("offer proposes the first matching entity by name order") {
    env.observe_user_act(UserAct::inform("pricerange", "cheap"));
    DialogueEnv::StepOutcome out = env.apply_system_act(world.restaurant.action_index("offer"));
    CHECK_FALSE(out.obs.offer_none);
    CHECK(out.obs.entity_values.at("pricerange") == "cheap");
    CHECK(env.base_belief().entity_offered);
    // First matching entity in stable name order.
    std::map<std::string, std::string> c{{"pricerange", "cheap"}};
    std::vector<int> matches = db_query(world.restaurant_db, world.restaurant, c);
    CHECK(out.obs.entity_name == world.restaurant_db.entities[matches.front()].name);
  }
  SUBCASE("system bye terminates (fixture domain carrying a bye act)") {
    World bye_world = World::create(7);
    bye_world.restaurant.actions.push_back({ActType::Bye, "", "", "bye"});
    DialogueEnv bye_env(bye_world, "restaurant", EnvVariant::Hier, RewardSpec{});
    DialogueEnv::StepOutcome out =
        bye_env.apply_system_act(bye_world.restaurant.action_index("bye"));
    CHECK(out.terminal);
    CHECK(bye_env.terminal());
  }
  SUBCASE("system bye on turn 30 of a fully successful dialogue nets -10") {
    World bye_world = World::create(7);
    bye_world.restaurant.actions.push_back({ActType::Bye, "", "", "bye"});
    DialogueEnv bye_env(bye_world, "restaurant", EnvVariant::Hier, RewardSpec{});
    const int repeat_idx = bye_world.restaurant.action_index("repeat");
    double cumulative = 0.0;
    for (int i = 0; i < 29; ++i) cumulative += bye_env.apply_system_act(repeat_idx).reward;
    DialogueEnv::StepOutcome last =
        bye_env.apply_system_act(bye_world.restaurant.action_index("bye"));
    CHECK(last.terminal);
    // A success verdict at this point adds the bonus on the final turn.
    cumulative += last.reward + 20.0;
    CHECK(cumulative == -10.0);
  }
  SUBCASE("turn 30 terminates") {
    int idx = world.restaurant.action_index("repeat");
    for (int i = 0; i < 29; ++i) CHECK_FALSE(env.apply_system_act(idx).terminal);
    CHECK(env.apply_system_act(idx).terminal);
  }
  SUBCASE("options cannot be applied as primitive acts") {
    CHECK_THROWS_AS(env.apply_system_act(world.restaurant.action_index("book")),
                    std::logic_error);
  }
}

TEST_CASE("offer with zero matching entities informs none-available") {
  const World& world = shared_world();
  DialogueEnv env(world, "hotel", EnvVariant::Hier, RewardSpec{});
  // Find a combination absent from the 33-entity hotel database.
  const DomainSpec& spec = world.hotel;
  bool found = false;
  for (int p = 0; p < 3 && !found; ++p)
    for (int k = 0; k < 2 && !found; ++k)
      for (int s = 0; s < 5 && !found; ++s) {
        std::map<std::string, std::string> c{
            {"pricerange", spec.constraint_slots[0].values[p]},
            {"kind", spec.constraint_slots[1].values[k]},
            {"stars", spec.constraint_slots[2].values[s]}};
        if (db_query(world.hotel_db, spec, c).empty()) {
          env.observe_user_act(UserAct::inform("pricerange", c["pricerange"]));
          env.observe_user_act(UserAct::inform("kind", c["kind"]));
          env.observe_user_act(UserAct::inform("stars", c["stars"]));
          found = true;
        }
      }
  REQUIRE(found);
  DialogueEnv::StepOutcome out = env.apply_system_act(spec.action_index("offer"));
  CHECK(out.obs.offer_none);
  CHECK(out.reward == -1.0);
  CHECK_FALSE(out.terminal);
  CHECK(env.record().last_offered_entity == -1);
}

TEST_CASE("success_check fixtures") {
  const World& world = shared_world();
  UserGoal goal;
  goal.master_domain = "restaurant";
  const Entity& ent = world.restaurant_db.entities[5];
  const DomainSpec& spec = world.restaurant;
  for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s)
    goal.constraints[spec.constraint_slots[s].name] =
        spec.constraint_slots[s].values[ent.values[s]];
  goal.requestables = {"name"};
  goal.sub_task = "booking";
  goal.sub_constraints = {{"hour", "4pm"}, {"peopleno", "4"}, {"durationdays", "4"},
                          {"day", "dontcare"}};

  SUBCASE("perfect dialogue: all three parts true") {
    EnvRecord record;
    record.last_offered_entity = 5;
    record.accepted_entity = 5;
    record.informed_requestables = {"name"};
    record.commits.push_back({"booking",
                              {{"hour", "4pm"}, {"peopleno", "4"}, {"durationdays", "4"},
                               {"day", "none"}},
                              true,
                              true});
    SuccessResult r = success_check(goal, record, world);
    CHECK(r.overall);
    CHECK(r.master_part);
    CHECK(r.sub_part);
  }
  SUBCASE("entity offered but booking never completed: (false, true, false)") {
    EnvRecord record;
    record.last_offered_entity = 5;
    record.informed_requestables = {"name"};
    SuccessResult r = success_check(goal, record, world);
    CHECK_FALSE(r.overall);
    CHECK(r.master_part);
    CHECK_FALSE(r.sub_part);
  }
  SUBCASE("wrong entity offered but booked correctly: (false, false, true)") {
    // Pick an entity violating at least one constraint.
    int wrong = -1;
    for (std::size_t e = 0; e < world.restaurant_db.entities.size(); ++e)
      if (world.restaurant_db.entities[e].values != ent.values) {
        wrong = static_cast<int>(e);
        break;
      }
    REQUIRE(wrong >= 0);
    EnvRecord record;
    record.last_offered_entity = wrong;
    record.informed_requestables = {"name"};
    record.commits.push_back({"booking",
                              {{"hour", "4pm"}, {"peopleno", "4"}, {"durationdays", "4"},
                               {"day", "monday"}},
                              true,
                              true});
    SuccessResult r = success_check(goal, record, world);
    CHECK_FALSE(r.overall);
    CHECK_FALSE(r.master_part);
    CHECK(r.sub_part);
  }
  SUBCASE("missing requested slot fails the master part") {
    EnvRecord record;
    record.last_offered_entity = 5;
    record.commits.push_back({"booking",
                              {{"hour", "4pm"}, {"peopleno", "4"}, {"durationdays", "4"},
                               {"day", "none"}},
                              true,
                              true});
    SuccessResult r = success_check(goal, record, world);
    CHECK_FALSE(r.master_part);
    CHECK(r.sub_part);
    CHECK_FALSE(r.overall);
  }
  SUBCASE("a goal without a sub-task has a vacuous sub part") {
    goal.sub_task.clear();
    goal.sub_constraints.clear();
    EnvRecord record;
    record.last_offered_entity = 5;
    record.informed_requestables = {"name"};
    SuccessResult r = success_check(goal, record, world);
    CHECK(r.overall);
    CHECK(r.sub_part);
  }
}

TEST_CASE("sub-domain handoff binds the accepted entity") {
  const World& world = shared_world();
  DialogueEnv env(world, "restaurant", EnvVariant::Hier, RewardSpec{});
  env.observe_user_act(UserAct::inform("pricerange", "cheap"));
  env.apply_system_act(world.restaurant.action_index("offer"));
  env.observe_user_act(UserAct::affirm());
  CHECK(env.base_belief().entity_accepted);
  env.enter_sub("booking");
  const BeliefState& sb = env.active_belief();
  const int ei = world.booking.constraint_index(kEntityNameSlot);
  CHECK(sb.value_string(ei) == kBoundValue);
  CHECK(sb.entity_accepted);
  env.exit_sub();
  CHECK_FALSE(env.in_sub());
}
