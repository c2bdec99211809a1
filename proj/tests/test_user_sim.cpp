#include <doctest.h>

#include "hrl/env.hpp"
#include "hrl/scripted_policy.hpp"
#include "hrl/smdp.hpp"
#include "hrl/user_sim.hpp"

using namespace hrl;

namespace {

const World& shared_world() {
  static World world = World::create(7);
  return world;
}

UserGoal fixed_goal(const World& world) {
  UserGoal goal;
  goal.master_domain = "restaurant";
  const DomainSpec& spec = world.restaurant;
  const Entity& ent = world.restaurant_db.entities[10];
  for (std::size_t s = 0; s < spec.constraint_slots.size(); ++s)
    goal.constraints[spec.constraint_slots[s].name] =
        spec.constraint_slots[s].values[ent.values[s]];
  goal.requestables = {"name", "phone"};
  goal.sub_task = "booking";
  goal.sub_constraints = {{"hour", "4pm"}, {"peopleno", "4"}, {"durationdays", "2"},
                          {"day", "dontcare"}};
  return goal;
}

}  // namespace

TEST_CASE("goal sampling") {
  const World& world = shared_world();
  UserConfig cfg;

  SUBCASE("fixed seed gives an identical goal") {
    RandomSource rng1(99), rng2(99);
    UserGoal a = sample_goal(world, cfg, rng1);
    UserGoal b = sample_goal(world, cfg, rng2);
    CHECK(a.master_domain == b.master_domain);
    CHECK(a.constraints == b.constraints);
    CHECK(a.requestables == b.requestables);
    CHECK(a.sub_task == b.sub_task);
    CHECK(a.sub_constraints == b.sub_constraints);
  }
  SUBCASE("master selection splits about evenly over many samples") {
    RandomSource rng(123);
    int restaurants = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
      if (sample_goal(world, cfg, rng).master_domain == "restaurant") ++restaurants;
    CHECK(static_cast<double>(restaurants) / n == doctest::Approx(0.5).epsilon(0.04));
  }
  SUBCASE("every sampled goal is realizable") {
    RandomSource rng(321);
    for (int i = 0; i < 500; ++i) {
      UserGoal goal = sample_goal(world, cfg, rng);
      const DomainSpec& spec = world.master(goal.master_domain);
      CHECK_FALSE(db_query(world.db(goal.master_domain), spec, goal.constraints).empty());
      CHECK_FALSE(goal.requestables.empty());
      for (const auto& [slot, value] : goal.sub_constraints) CHECK_FALSE(value.empty());
    }
  }
}

TEST_CASE("user responses") {
  const World& world = shared_world();
  UserConfig cfg;
  cfg.p_change = 0.0;

  SUBCASE("a requested constraint slot is answered with the goal value") {
    UserSimulator user(world, fixed_goal(world), cfg, 1);
    SystemObservation obs;
    obs.type = ActType::Request;
    obs.slot = "pricerange";
    UserAct act = user.respond(obs);
    CHECK(act.kind == UserAct::Kind::Inform);
    CHECK(act.slot == "pricerange");
    CHECK(act.value == fixed_goal(world).constraints.at("pricerange"));
  }
  SUBCASE("confirming any value of a dontcare slot is affirmed") {
    UserGoal goal = fixed_goal(world);
    goal.constraints["area"] = "dontcare";
    UserSimulator user(world, goal, cfg, 1);
    SystemObservation obs;
    obs.type = ActType::Confirm;
    obs.slot = "area";
    obs.value = "north";
    CHECK(user.respond(obs).kind == UserAct::Kind::Affirm);
  }
  SUBCASE("confirming a wrong value is negated with the correction") {
    UserGoal goal = fixed_goal(world);
    goal.constraints["pricerange"] = "cheap";
    UserSimulator user(world, goal, cfg, 1);
    SystemObservation obs;
    obs.type = ActType::Confirm;
    obs.slot = "pricerange";
    obs.value = "expensive";
    UserAct act = user.respond(obs);
    CHECK(act.kind == UserAct::Kind::NegateInform);
    CHECK(act.slot == "pricerange");
    CHECK(act.value == "cheap");
  }
  SUBCASE("a non-matching offer is rejected with one violated constraint") {
    UserGoal goal = fixed_goal(world);
    goal.constraints["pricerange"] = "cheap";
    UserSimulator user(world, goal, cfg, 1);
    SystemObservation obs;
    obs.type = ActType::Offer;
    obs.entity_name = "restaurant_000";
    obs.entity_values = goal.constraints;
    obs.entity_values["pricerange"] = "expensive";
    UserAct act = user.respond(obs);
    CHECK(act.kind == UserAct::Kind::NegateInform);
    // The corrective inform carries the goal value of a violated slot.
    CHECK(act.value == goal.constraints.at(act.slot));
    CHECK(user.accepted_entity() < 0);
  }
  SUBCASE("a matching offer is accepted and queues requests then the sub-task") {
    UserGoal goal = fixed_goal(world);
    UserSimulator user(world, goal, cfg, 1);
    SystemObservation obs;
    obs.type = ActType::Offer;
    obs.entity_name = world.restaurant_db.entities[10].name;
    obs.entity_values = goal.constraints;
    CHECK(user.respond(obs).kind == UserAct::Kind::Affirm);
    CHECK(user.accepted_entity() == 10);
    // The offer already conveyed name and attributes; the remaining
    // requestable is the phone number, then the sub-task starts.
    SystemObservation repeat;
    repeat.type = ActType::Repeat;
    UserAct next = user.respond(repeat);
    CHECK(next.kind == UserAct::Kind::Request);
    CHECK(next.slot == "phone");
    SystemObservation inform;
    inform.type = ActType::Inform;
    inform.slot = "phone";
    inform.value = obs.entity_name + "_phone";
    UserAct after = user.respond(inform);
    CHECK(after.kind == UserAct::Kind::TaskRequest);
    CHECK(after.task == "booking");
    CHECK(user.phase() == UserPhase::Sub);
  }
  SUBCASE("sub-task questions are not answered before the master goal is met") {
    UserSimulator user(world, fixed_goal(world), cfg, 1);
    SystemObservation obs;
    obs.type = ActType::Request;
    obs.slot = "hour";
    // The user does not engage with the booking; it may fall back to its own
    // agenda (greeting, volunteered master constraints) instead.
    for (int i = 0; i < 6; ++i) {
      UserAct act = user.respond(obs);
      CHECK(act.slot != "hour");
    }
  }
}

TEST_CASE("goal changes") {
  const World& world = shared_world();

  SUBCASE("p_change = 0 never changes the goal") {
    UserConfig cfg;
    cfg.p_change = 0.0;
    UserGoal goal = fixed_goal(world);
    const auto before = goal.constraints;
    RandomSource rng(5);
    for (int i = 0; i < 2000; ++i)
      CHECK_FALSE(maybe_change_goal(goal, UserPhase::Master, world, cfg, rng, nullptr, nullptr));
    CHECK(goal.constraints == before);
  }
  SUBCASE("p_change = 1 with a single slot changes every turn") {
    World toy = World::create(7);
    toy.restaurant.constraint_slots = {{"pricerange", {"cheap", "moderate"}, "restaurant"}};
    toy.restaurant.entity_count = 4;
    toy.restaurant_db = generate_database(toy.restaurant, 3);
    UserConfig cfg;
    cfg.p_change = 1.0;
    UserGoal goal;
    goal.master_domain = "restaurant";
    goal.constraints = {{"pricerange", "cheap"}};
    RandomSource rng(6);
    for (int i = 0; i < 50; ++i) {
      std::string slot, value;
      CHECK(maybe_change_goal(goal, UserPhase::Master, toy, cfg, rng, &slot, &value));
      CHECK(slot == "pricerange");
      CHECK(goal.constraints.at("pricerange") == value);
    }
  }
  SUBCASE("the empirical change rate matches p_change") {
    UserConfig cfg;
    cfg.p_change = 0.05;
    RandomSource rng(7);
    UserGoal goal = fixed_goal(world);
    int changes = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
      if (maybe_change_goal(goal, UserPhase::Master, world, cfg, rng, nullptr, nullptr))
        ++changes;
    CHECK(static_cast<double>(changes) / n == doctest::Approx(0.05).epsilon(0.2));
    CHECK(std::abs(static_cast<double>(changes) / n - 0.05) < 0.01);
  }
  SUBCASE("changes never touch the master domain or sub-task") {
    UserConfig cfg;
    cfg.p_change = 1.0;
    RandomSource rng(8);
    UserGoal goal = fixed_goal(world);
    for (int i = 0; i < 100; ++i) {
      maybe_change_goal(goal, UserPhase::Sub, world, cfg, rng, nullptr, nullptr);
      CHECK(goal.master_domain == "restaurant");
      CHECK(goal.sub_task == "booking");
    }
  }
}

TEST_CASE("phase ordering holds on random traces") {
  const World& world = shared_world();
  HierarchyConfig hcfg;
  UserConfig ucfg;
  for (int trial = 0; trial < 30; ++trial) {
    RandomSource grng(derive_seed(1000, trial));
    UserGoal goal = sample_goal(world, ucfg, grng);
    const std::string master = goal.master_domain;
    UserSimulator user(world, std::move(goal), ucfg, derive_seed(2000, trial));
    DialogueEnv env(world, master, EnvVariant::Flat, RewardSpec{});
    RandomSource arng(derive_seed(3000, trial));
    SystemObservation greeting;
    greeting.type = ActType::Repeat;
    env.observe_user_act(user.respond(greeting));
    int phase_rank = 0;
    while (!env.terminal()) {
      std::vector<int> avail = available_actions(env.base_spec(), env.base_belief());
      int a = avail[arng.uniform_int(static_cast<int>(avail.size()))];
      DialogueEnv::StepOutcome out = env.apply_system_act(a);
      if (!out.terminal) {
        UserAct act = user.respond(out.obs);
        env.observe_user_act(act);
        const int rank = static_cast<int>(user.phase());
        CHECK(rank >= phase_rank);
        phase_rank = std::max(phase_rank, rank);
        if (user.phase() == UserPhase::Sub) CHECK(user.accepted_entity() >= 0);
      }
    }
  }
}

TEST_CASE("scripted optimal policy reaches success 1.0 with a stable user") {
  const World& world = shared_world();
  HierarchyConfig hcfg;
  UserConfig ucfg;
  ucfg.p_change = 0.0;
  ScriptedPolicy master_policy, sub_policy;
  std::map<std::string, ActionSelector*> subs{{"booking", &sub_policy},
                                              {"payment", &sub_policy}};
  int successes = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    RandomSource grng(derive_seed(4000, i));
    UserGoal goal = sample_goal(world, ucfg, grng);
    const std::string master = goal.master_domain;
    UserSimulator user(world, std::move(goal), ucfg, derive_seed(5000, i));
    RandomSource prng(derive_seed(6000, i));
    EpisodeResult result =
        run_episode_hierarchical(world, master, master_policy, subs, user, hcfg, prng);
    successes += result.success.overall ? 1 : 0;
    CHECK(result.log.length <= 30);
  }
  CHECK(successes == n);
}

TEST_CASE("scripted flat policy also reaches success 1.0") {
  const World& world = shared_world();
  HierarchyConfig hcfg;
  UserConfig ucfg;
  ucfg.p_change = 0.0;
  ScriptedPolicy policy;
  int successes = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    RandomSource grng(derive_seed(7000, i));
    UserGoal goal = sample_goal(world, ucfg, grng);
    const std::string master = goal.master_domain;
    UserSimulator user(world, std::move(goal), ucfg, derive_seed(8000, i));
    RandomSource prng(derive_seed(9000, i));
    EpisodeResult result = run_episode_flat(world, master, policy, user, hcfg, prng);
    successes += result.success.overall ? 1 : 0;
  }
  CHECK(successes == n);
}
