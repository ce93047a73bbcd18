#pragma once

#include <string>

#include "hiprl/world/sim.hpp"

namespace hiprl::world {

enum class TaskKind { IqaExistence, IqaCounting, IqaContainment, VspPutIn };

std::string task_kind_name(TaskKind k);
TaskKind task_kind_from_name(const std::string& name);

struct TaskSpec {
  TaskKind kind = TaskKind::IqaExistence;
  std::string subject;        // small object class
  std::string target_class;   // large class (containment / put-in)
  int count_lo = 0, count_hi = 3;  // answer domain for counting
  std::string answer;         // "yes"/"no" or a number; empty for VSP
  int start_x = 0, start_y = 0;
  Heading start_heading = Heading::N;
};

/// Ground-truth answer recomputed from a world state (IQA kinds only).
std::string true_answer(const WorldState& s, const TaskSpec& t);

/// VSP goal test: some subject-class object sits in some target-class
/// receptacle.
bool vsp_satisfied(const WorldState& s, const TaskSpec& t);

/// Deterministic in (scene, seed). IQA answers are balanced by alternating
/// the wanted answer with the seed. VSP tasks are possible but never
/// satisfied at start. Throws std::runtime_error when the scene admits no
/// valid task of the kind.
TaskSpec generate_task(const Scene& scene, std::uint64_t seed, TaskKind kind);

std::string save_task(const TaskSpec& t);
TaskSpec load_task(const std::string& text);

/// A question or instruction in words, for logs.
std::string describe_task(const TaskSpec& t);

}  // namespace hiprl::world
