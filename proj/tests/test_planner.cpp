#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "hiprl/domain_text.hpp"
#include "hiprl/pddl/ground.hpp"
#include "hiprl/pddl/parser.hpp"
#include "hiprl/planner/planner.hpp"
#include "hiprl/rng.hpp"
#include "support/problem_gen.hpp"
#include "support/search_oracle.hpp"

using namespace hiprl;
using namespace hiprl::planner;
using pddl::GroundFormula;
using pddl::GroundTask;
using testsupport::HouseholdSpec;

namespace {

GroundTask ground_household(const HouseholdSpec& spec) {
  pddl::Domain d = pddl::parse_domain(kDomainText, "domain.pddl");
  pddl::Problem p = pddl::parse_problem(testsupport::render_problem(spec), d, "house");
  return pddl::ground(d, p);
}

// One location, one openable cabinet, nothing else.
HouseholdSpec single_cabinet(const std::string& goal) {
  HouseholdSpec s;
  s.locations = 1;
  s.receptacles = {{0, true}};
  s.distance = {{0}};
  s.goal = goal;
  return s;
}

// Three locations, one openable cabinet each; the mug-search goal with no mug
// forces a full sweep that ends with everything closed.
HouseholdSpec three_cabinet_sweep() {
  HouseholdSpec s;
  s.locations = 3;
  s.receptacles = {{0, true}, {1, true}, {2, true}};
  s.distance = {{0, 4, 7}, {4, 0, 5}, {7, 5, 0}};
  s.goal =
      "(or (exists (?o - object) (objectType ?o MugType))\n"
      "     (and (forall (?t - rtype) (forall (?r - receptacle)\n"
      "            (or (not (and (canContain ?t MugType) (receptacleType ?r ?t)))\n"
      "                (checked ?r))))\n"
      "          (forall (?re - receptacle) (not (opened ?re)))))";
  return s;
}

int action_index(const GroundTask& t, const std::string& display) {
  for (std::size_t i = 0; i < t.actions.size(); ++i)
    if (t.actions[i].display() == display) return static_cast<int>(i);
  return -1;
}

// Hand-built task where helpful-action pruning paints EHC into a corner:
// the only helpful first move burns the fact the goal chain still needs.
GroundTask chain_trap_task() {
  GroundTask t;
  auto fluent = [&](const std::string& n) {
    int id = static_cast<int>(t.fluent_names.size());
    t.fluent_ids[n] = id;
    t.fluent_names.push_back(n);
    t.complement_of.push_back(-1);
    return id;
  };
  int fs = fluent("(start)");
  int fk = fluent("(key)");
  int fm = fluent("(mid)");
  int fu = fluent("(detour)");
  int fg = fluent("(goal)");

  auto act = [&](const std::string& name, std::vector<int> pre,
                 std::vector<int> add, std::vector<int> del) {
    pddl::GroundAction a;
    a.schema = name;
    a.precondition = std::move(pre);
    a.add = std::move(add);
    a.del = std::move(del);
    a.cost = 1.0;
    t.actions.push_back(std::move(a));
  };
  act("Burn", {fk}, {fm}, {fk});          // looks helpful, destroys the key
  act("Finish", {fk, fm}, {fg}, {});
  act("Detour", {fs}, {fu}, {});
  act("Relay", {fu}, {fm}, {});           // reaches mid without burning

  t.init.fluents = pddl::FluentSet(static_cast<int>(t.fluent_names.size()));
  t.init.fluents.set(fs);
  t.init.fluents.set(fk);
  t.goal = GroundFormula::lit(fg);
  return t;
}

bool same_stats(const PlanStats& a, const PlanStats& b) {
  return a.heuristic_evals == b.heuristic_evals && a.expanded == b.expanded &&
         a.generated == b.generated && a.plateaus_escaped == b.plateaus_escaped &&
         a.used_gbfs == b.used_gbfs &&
         a.impossible_by_relaxation == b.impossible_by_relaxation &&
         a.impossible_by_exhaustion == b.impossible_by_exhaustion &&
         a.hit_time_budget == b.hit_time_budget;
}

}  // namespace

TEST_CASE("satisfied goal means h = 0 and an empty plan") {
  HouseholdSpec spec = single_cabinet("(atLocation agent1 l1)");
  GroundTask t = ground_household(spec);
  Evaluator ev(t);
  CHECK(ev.evaluate(t.init).h == 0);

  PlanResult r = plan(t);
  CHECK(r.outcome == Outcome::Found);
  CHECK(r.plan.steps.empty());
  CHECK(r.plan.cost == 0.0);
  CHECK(validate(t, r.plan.steps).valid);
}

TEST_CASE("relaxed graph levels on a two-location walk") {
  // An unopenable table one move away; walking there checks it in passing.
  HouseholdSpec spec;
  spec.locations = 2;
  spec.receptacles = {{1, false}};  // table1 at l2
  spec.distance = {{0, 4}, {4, 0}};
  spec.goal = "(checked table1)";
  GroundTask t = ground_household(spec);

  Evaluator ev(t);
  Rpg g = ev.build_rpg(t.init);
  CHECK(g.fact_level[t.fluent("(atLocation agent1 l1)")] == 0);
  CHECK(g.fact_level[t.fluent("(atLocation agent1 l2)")] == 1);
  CHECK(g.fact_level[t.fluent("(checked table1)")] == 1);
  CHECK(g.goal_level == 1);
  CHECK(g.levels == 2);

  HeuristicResult hr = ev.evaluate(t.init);
  int goto12 = action_index(t, "(GotoLocation agent1 l1 l2)");
  REQUIRE(goto12 >= 0);
  CHECK(hr.h == 1);
  REQUIRE(hr.relaxed_plan.size() == 1);
  CHECK(hr.relaxed_plan[0] == std::vector<int>{goto12});
  CHECK(hr.helpful == std::vector<int>{goto12});

  PlanResult r = plan(t);
  REQUIRE(r.outcome == Outcome::Found);
  CHECK(r.plan.steps == std::vector<int>{goto12});
  CHECK(r.plan.cost == 4.0);
  CHECK_FALSE(r.stats.used_gbfs);
}

TEST_CASE("opening the cabinet at hand is the whole relaxed plan") {
  GroundTask t = ground_household(single_cabinet("(checked cab1)"));
  Evaluator ev(t);
  HeuristicResult hr = ev.evaluate(t.init);
  int open1 = action_index(t, "(OpenObject agent1 l1 cab1)");
  REQUIRE(open1 >= 0);
  CHECK(hr.h == 1);
  CHECK(hr.helpful == std::vector<int>{open1});

  PlanResult r = plan(t);
  REQUIRE(r.outcome == Outcome::Found);
  CHECK(r.plan.steps == std::vector<int>{open1});
  CHECK(r.plan.cost == 1.0);
  CHECK(r.stats.plateaus_escaped == 1);

  Validation v = validate(t, r.plan.steps);
  CHECK(v.valid);
  CHECK(v.cost == 1.0);
}

TEST_CASE("three-cabinet sweep: heuristic layering and a valid plan") {
  GroundTask t = ground_household(three_cabinet_sweep());
  Evaluator ev(t);
  HeuristicResult hr = ev.evaluate(t.init);
  // layer 0: open the local cabinet plus both walks; layer 1: the far opens
  CHECK(hr.h == 5);
  REQUIRE(hr.relaxed_plan.size() == 2);
  CHECK(hr.relaxed_plan[0].size() == 3);
  CHECK(hr.relaxed_plan[1].size() == 2);
  std::vector<int> expected_helpful = {
      action_index(t, "(GotoLocation agent1 l1 l2)"),
      action_index(t, "(GotoLocation agent1 l1 l3)"),
      action_index(t, "(OpenObject agent1 l1 cab1)")};
  std::sort(expected_helpful.begin(), expected_helpful.end());
  CHECK(hr.helpful == expected_helpful);

  testsupport::OracleOutcome oracle = testsupport::dijkstra_oracle(t);
  REQUIRE_FALSE(oracle.capped);
  REQUIRE(oracle.reachable);
  // open+close everywhere (6) plus the short tour (4 + 5)
  CHECK(oracle.cost == 15.0);
  CHECK(oracle.length == 8);

  PlanResult r = plan(t);
  REQUIRE(r.outcome == Outcome::Found);
  Validation v = validate(t, r.plan.steps);
  CHECK(v.valid);
  CHECK(v.cost == r.plan.cost);
  CHECK(r.plan.cost <= 2.0 * oracle.cost);
}

TEST_CASE("a mug in sight makes the search goal vacuous") {
  HouseholdSpec s = three_cabinet_sweep();
  s.objects = {{0, true}};  // mug in cab1
  GroundTask t = ground_household(s);
  // the exists-branch folds to true at grounding time
  CHECK(t.goal.kind == GroundFormula::Kind::True);
  PlanResult r = plan(t);
  CHECK(r.outcome == Outcome::Found);
  CHECK(r.plan.steps.empty());
}

TEST_CASE("goal outside the relaxed fixpoint is rejected up front") {
  // tables never open, so (opened table1) has no achiever anywhere
  HouseholdSpec s;
  s.locations = 2;
  s.receptacles = {{0, false}, {1, true}};
  s.distance = {{0, 3}, {3, 0}};
  s.goal = "(opened table1)";
  GroundTask t = ground_household(s);

  Evaluator ev(t);
  CHECK(ev.evaluate(t.init).h == kHInfinity);

  PlanResult r = plan(t);
  CHECK(r.outcome == Outcome::ProvedImpossible);
  CHECK(r.stats.impossible_by_relaxation);
  CHECK_FALSE(r.stats.impossible_by_exhaustion);
  CHECK(r.stats.expanded == 0);
}

TEST_CASE("two cabinets open at once: fine when relaxed, impossible for real") {
  HouseholdSpec s;
  s.locations = 1;
  s.receptacles = {{0, true}, {0, true}};
  s.distance = {{0}};
  s.goal = "(and (opened cab1) (opened cab2))";
  GroundTask t = ground_household(s);

  Evaluator ev(t);
  int h0 = ev.evaluate(t.init).h;
  CHECK(h0 != kHInfinity);  // delete relaxation misses the one-open rule
  CHECK(h0 >= 2);

  testsupport::OracleOutcome oracle = testsupport::dijkstra_oracle(t);
  REQUIRE_FALSE(oracle.capped);
  CHECK_FALSE(oracle.reachable);

  PlanResult r = plan(t);
  CHECK(r.outcome == Outcome::ProvedImpossible);
  CHECK(r.stats.impossible_by_exhaustion);
  CHECK_FALSE(r.stats.impossible_by_relaxation);
  CHECK(r.stats.used_gbfs);
}

TEST_CASE("helpful pruning can trap hill-climbing; best-first recovers") {
  GroundTask t = chain_trap_task();
  Evaluator ev(t);
  HeuristicResult hr = ev.evaluate(t.init);
  CHECK(hr.h == 2);
  CHECK(hr.helpful == std::vector<int>{0});  // Burn looks like the only move

  PlanResult ehc = enforced_hill_climb(t);
  CHECK(ehc.outcome == Outcome::ResourceExhausted);

  PlanResult r = plan(t);
  REQUIRE(r.outcome == Outcome::Found);
  CHECK(r.stats.used_gbfs);
  // Detour, Relay, Finish
  CHECK(r.plan.steps == std::vector<int>{2, 3, 1});
  CHECK(validate(t, r.plan.steps).valid);
}

TEST_CASE("validate pinpoints the violated step") {
  GroundTask t = ground_household(single_cabinet("(checked cab1)"));
  int open1 = action_index(t, "(OpenObject agent1 l1 cab1)");
  REQUIRE(open1 >= 0);

  CHECK(validate(t, {open1}).valid);

  Validation twice = validate(t, {open1, open1});
  CHECK_FALSE(twice.valid);
  CHECK(twice.violation.find("step 1") != std::string::npos);
  CHECK(twice.violation.find("not-opened cab1") != std::string::npos);

  Validation none = validate(t, {});
  CHECK_FALSE(none.valid);
  CHECK(none.violation.find("goal not satisfied") != std::string::npos);
}

TEST_CASE("tight budgets surface as ResourceExhausted") {
  GroundTask t = ground_household(three_cabinet_sweep());

  PlannerConfig cfg;
  cfg.ehc_enabled = false;
  cfg.node_budget = 1;
  PlanResult r = greedy_best_first(t, cfg);
  CHECK(r.outcome == Outcome::ResourceExhausted);

  PlannerConfig timed;
  timed.time_budget = 1e-12;
  PlanResult rt = plan(t, timed);
  CHECK(rt.outcome == Outcome::ResourceExhausted);
  CHECK(rt.stats.hit_time_budget);
}

TEST_CASE("best-first alone solves the sweep too") {
  GroundTask t = ground_household(three_cabinet_sweep());
  PlannerConfig cfg;
  cfg.ehc_enabled = false;
  PlanResult r = plan(t, cfg);
  REQUIRE(r.outcome == Outcome::Found);
  CHECK(r.stats.used_gbfs);
  CHECK(validate(t, r.plan.steps).valid);
}

TEST_CASE("random household instances agree with the exhaustive oracle") {
  int reachable = 0, impossible = 0;
  std::vector<double> ratios;
  for (int i = 0; i < 40; ++i) {
    Rng rng(derive_seed(20240917, "planner-oracle", i));
    HouseholdSpec spec = testsupport::random_household(rng);
    GroundTask t = ground_household(spec);
    CAPTURE(i);

    testsupport::OracleOutcome oracle = testsupport::dijkstra_oracle(t);
    REQUIRE_FALSE(oracle.capped);

    PlanResult r = plan(t);
    REQUIRE(r.outcome != Outcome::ResourceExhausted);
    if (oracle.reachable) {
      ++reachable;
      REQUIRE(r.outcome == Outcome::Found);
      Validation v = validate(t, r.plan.steps);
      CHECK(v.valid);
      CHECK(v.cost == r.plan.cost);
      CHECK(r.plan.cost >= oracle.cost - 1e-9);
      if (oracle.cost > 0) ratios.push_back(r.plan.cost / oracle.cost);
    } else {
      ++impossible;
      CHECK(r.outcome == Outcome::ProvedImpossible);
    }
  }
  // the draw covers both regimes
  CHECK(reachable >= 10);
  CHECK(impossible >= 3);

  REQUIRE_FALSE(ratios.empty());
  std::sort(ratios.begin(), ratios.end());
  CHECK(ratios[ratios.size() / 2] <= 1.5);
  CHECK(ratios.back() <= 5.0);
}

TEST_CASE("h = 0 exactly when the goal already holds") {
  for (int i = 0; i < 15; ++i) {
    Rng rng(derive_seed(77, "h-zero", i));
    HouseholdSpec spec = testsupport::random_household(rng);
    GroundTask t = ground_household(spec);
    Evaluator ev(t);

    pddl::State s = t.init;
    for (int step = 0; step < 12; ++step) {
      CHECK((ev.evaluate(s).h == 0) == pddl::holds(s, t.goal));
      std::vector<int> usable;
      for (std::size_t a = 0; a < t.actions.size(); ++a)
        if (pddl::applicable(s, t.actions[a])) usable.push_back(static_cast<int>(a));
      if (usable.empty()) break;
      s = pddl::apply(t, s, t.actions[usable[rng.uniform_int(usable.size())]]);
    }
  }
}

TEST_CASE("planning twice gives byte-identical results") {
  for (int i = 0; i < 6; ++i) {
    Rng rng(derive_seed(4242, "determinism", i));
    HouseholdSpec spec = testsupport::random_household(rng);
    GroundTask t1 = ground_household(spec);
    GroundTask t2 = ground_household(spec);

    PlanResult a = plan(t1);
    PlanResult b = plan(t2);
    CHECK(a.outcome == b.outcome);
    CHECK(a.plan.steps == b.plan.steps);
    CHECK(a.plan.cost == b.plan.cost);
    CHECK(same_stats(a.stats, b.stats));
    CHECK(format_plan(t1, a) == format_plan(t2, b));
  }
}

TEST_CASE("format_plan names every step and the totals") {
  GroundTask t = ground_household(single_cabinet("(checked cab1)"));
  PlanResult r = plan(t);
  REQUIRE(r.outcome == Outcome::Found);
  std::string text = format_plan(t, r);
  CHECK(text.find("(OpenObject agent1 l1 cab1)") != std::string::npos);
  CHECK(text.find("; cost 1") != std::string::npos);
  CHECK(text.find("via ehc") != std::string::npos);

  GroundTask trap = chain_trap_task();
  std::string trapped = format_plan(trap, plan(trap));
  CHECK(trapped.find("via gbfs") != std::string::npos);
}
