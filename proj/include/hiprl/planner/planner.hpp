#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hiprl/pddl/ground.hpp"

namespace hiprl::planner {

using pddl::GroundTask;
using pddl::State;

// FF-style satisficing planner: relaxed-planning-graph heuristic with helpful
// actions, enforced hill-climbing, greedy best-first fallback. All search is
// deterministic: actions are expanded in the grounder's canonical order
// (schema, args, variant), achiever ties break by (level, cost, that order),
// and the GBFS open list orders by (h, insertion sequence).

struct PlannerConfig {
  bool ehc_enabled = true;
  std::int64_t node_budget = 200000;  // GBFS expansions before giving up
  int plateau_budget = 10000;         // EHC states per plateau burst
  // Wall-clock cutoff in seconds; <= 0 disables it. Off by default: a time
  // limit makes outcomes machine-dependent, which byte-identical reruns
  // cannot tolerate. The node budget is the deterministic backstop.
  double time_budget = 0.0;
};

struct Plan {
  std::vector<int> steps;  // indices into task.actions
  double cost = 0.0;       // summed true action costs
};

enum class Outcome { Found, ProvedImpossible, ResourceExhausted };

struct PlanStats {
  std::int64_t heuristic_evals = 0;
  std::int64_t expanded = 0;   // nodes taken off a frontier
  std::int64_t generated = 0;  // successor states created
  int plateaus_escaped = 0;
  bool used_gbfs = false;
  // which proof backs a ProvedImpossible outcome
  bool impossible_by_relaxation = false;
  bool impossible_by_exhaustion = false;
  bool hit_time_budget = false;
  double wall_seconds = 0.0;  // informational; excluded from comparisons
};

struct PlanResult {
  Outcome outcome = Outcome::ResourceExhausted;
  Plan plan;
  PlanStats stats;
};

inline constexpr int kHInfinity = std::numeric_limits<int>::max();

// Relaxed planning graph for one state: first level at which each fluent and
// each effect rule appears under delete relaxation. Rules decompose actions:
// rule 0 carries the unconditional adds, one further rule per conditional
// effect with the condition folded into its precondition.
struct Rpg {
  std::vector<int> fact_level;  // -1 while unreached
  std::vector<int> rule_level;  // -1 while never fired
  int goal_level = -1;          // -1 when the fixpoint excludes the goal
  int levels = 0;
};

struct HeuristicResult {
  int h = kHInfinity;  // actions in the relaxed plan; kHInfinity = unreachable
  // distinct (action, layer) pairs of the extracted relaxed plan
  std::vector<std::vector<int>> relaxed_plan;  // [layer] -> action indices
  std::vector<int> helpful;  // applicable now, add a layer-1 subgoal; sorted
};

// Reusable evaluator: owns the rule decomposition and scratch arrays so
// thousands of states can be scored against one task cheaply.
class Evaluator {
 public:
  explicit Evaluator(const GroundTask& task);

  Rpg build_rpg(const State& s) const;
  HeuristicResult evaluate(const State& s) const;

  const GroundTask& task() const { return *task_; }

 private:
  struct Rule {
    int action;
    std::vector<int> pre;  // precondition plus condition, sorted
    std::vector<int> add;
  };

  int formula_level(const pddl::GroundFormula& f, const std::vector<int>& fact_level) const;
  void select_goal_facts(const pddl::GroundFormula& f, const std::vector<int>& fact_level,
                         std::vector<int>& out) const;
  static bool holds_at(const pddl::GroundFormula& f, const std::vector<int>& fact_level);

  const GroundTask* task_;
  std::vector<Rule> rules_;
  std::vector<std::vector<int>> rules_by_pre_;  // fluent -> rules waiting on it
  std::vector<int> rules_with_empty_pre_;
  std::vector<std::vector<int>> adders_by_fluent_;
};

struct Validation {
  bool valid = false;
  double cost = 0.0;
  std::string violation;  // empty when valid
};

/// Simulate a plan step by step; reports the first violated precondition or
/// an unsatisfied goal at the end.
Validation validate(const GroundTask& task, const std::vector<int>& steps);

PlanResult enforced_hill_climb(const GroundTask& task, const PlannerConfig& cfg = {});
PlanResult greedy_best_first(const GroundTask& task, const PlannerConfig& cfg = {});

/// EHC first, GBFS from scratch when EHC fails — the classical FF switch.
PlanResult plan(const GroundTask& task, const PlannerConfig& cfg = {});

/// One line per action plus cost/stats, for logs and the CLI.
std::string format_plan(const GroundTask& task, const PlanResult& r);

}  // namespace hiprl::planner
