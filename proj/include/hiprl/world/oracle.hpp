#pragma once

#include "hiprl/world/scene.hpp"
#include "hiprl/world/task.hpp"

namespace hiprl::world {

/// Reference trajectory length for normalizing episode scores: primitive steps
/// taken by the planner controller when it starts with the full floor plan and
/// every receptacle already on record. Small objects still have to be seen, so
/// question tasks pay for the evidence they need, not just the walk. Clamped
/// to at least 1. Deterministic per (scene, task).
long shortest_path_estimate(const Scene& scene, const TaskSpec& task);

}  // namespace hiprl::world
