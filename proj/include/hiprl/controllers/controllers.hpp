#pragma once

#include <string>
#include <vector>

#include "hiprl/knowledge/knowledge.hpp"
#include "hiprl/pddl/ast.hpp"
#include "hiprl/planner/planner.hpp"
#include "hiprl/rng.hpp"
#include "hiprl/world/sim.hpp"
#include "hiprl/world/task.hpp"

namespace hiprl::controllers {

/// The shipped planning domain, parsed once.
const pddl::Domain& shipped_domain();

enum class Termination { Success, Failure, BudgetExhausted };

struct ControllerResult {
  std::string controller;
  int primitives = 0;  // simulator step delta during the invocation
  Termination termination = Termination::Success;
  std::string reason;            // failure detail
  std::string answer;            // stopper only
  int replans = 0;               // planner controller
  bool goal_believed = false;    // planner controller: believed-goal success
  int detector_runs = 0;         // scanner
};

/// One primitive as it went through the simulator, for traces and replay.
struct PrimRecord {
  world::PrimitiveAction action;
  bool success = false;
  std::string obs_digest;
};

/// The environment side of a controller invocation. `log`, when set, receives
/// every primitive in execution order.
struct Env {
  world::WorldState* s = nullptr;
  const world::NoiseModel* noise = nullptr;
  Rng* rng = nullptr;
  std::vector<PrimRecord>* log = nullptr;
};

struct ControllerConfig {
  int navigate_budget = 100;
  int planner_budget = 200;  // primitives across all replan cycles
  double explore_lambda = 0.5;
  planner::PlannerConfig planner;
};

/// Walk to a believed-free cell. Replans on collision (the blocked cell is
/// learned), runs the detector once on arrival, never per step.
ControllerResult navigate(Env& env, knowledge::KnowledgeState& k, int tx,
                          int ty, const ControllerConfig& cfg = {});

/// Pick the (known-free cell, heading) maximizing unseen-frustum-cell count
/// minus lambda times route cost, go there, face that way. Fails when the map
/// has nothing left to reveal.
ControllerResult explore(Env& env, knowledge::KnowledgeState& k,
                         const ControllerConfig& cfg = {});

/// Three sweeps of four 90 degree stops, detector at every stop, one sweep
/// per detection range band. Ends on the entry heading. Twelve detector runs,
/// twelve rotations.
ControllerResult scan(Env& env, knowledge::KnowledgeState& k,
                      const ControllerConfig& cfg = {});

/// Plan, take the first action, observe, replan, until the goal is believed
/// reached (empty plan), proved impossible, or the budget runs out.
ControllerResult run_planner_controller(Env& env, knowledge::KnowledgeState& k,
                                        const knowledge::GoalSpec& g,
                                        const ControllerConfig& cfg = {});

/// Rule-based terminal answer from tracked knowledge; consumes no primitives.
ControllerResult stop_and_answer(const knowledge::KnowledgeState& k,
                                 const world::TaskSpec& task);

}  // namespace hiprl::controllers
