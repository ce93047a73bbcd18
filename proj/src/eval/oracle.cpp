#include "hiprl/world/oracle.hpp"

#include <algorithm>

#include "hiprl/controllers/controllers.hpp"
#include "hiprl/knowledge/knowledge.hpp"
#include "hiprl/rng.hpp"
#include "hiprl/world/sim.hpp"

namespace hiprl::world {

namespace {

// Knowledge state a fully briefed agent would start with: the complete map and
// one record per receptacle, nothing checked, no objects.
knowledge::KnowledgeState briefed_knowledge(const Scene& scene,
                                            const WorldState& s) {
  knowledge::KnowledgeState k =
      knowledge::make_knowledge(scene.width, scene.height);
  for (int y = 0; y < scene.height; ++y)
    for (int x = 0; x < scene.width; ++x)
      k.map[y * scene.width + x] = scene.blocked(x, y)
                                       ? knowledge::Cell::Blocked
                                       : knowledge::Cell::Free;
  for (const auto& r : scene.receptacles) {
    knowledge::TrackedReceptacle tr;
    tr.id = k.next_receptacle_id++;
    tr.cls = r.cls;
    tr.x0 = tr.x1 = r.x;
    tr.y0 = tr.y1 = r.y;
    tr.openable = r.openable;
    tr.open_believed = r.open;
    tr.world_id = r.id;
    k.receptacles.push_back(tr);
  }
  k.ax = s.ax;
  k.ay = s.ay;
  k.heading = s.heading;
  return k;
}

}  // namespace

long shortest_path_estimate(const Scene& scene, const TaskSpec& task) {
  WorldState s =
      init_state(scene, task.start_x, task.start_y, task.start_heading);
  NoiseModel gt = NoiseModel::ground_truth();
  Rng rng(derive_seed(scene.seed, "oracle"));
  controllers::Env env{&s, &gt, &rng, nullptr};
  knowledge::KnowledgeState k = briefed_knowledge(scene, s);

  controllers::ControllerConfig cfg;
  // Put-in runs two planner phases (find the subject, then move it); question
  // tasks finish in one. The lap cap only matters if a controller bug loops.
  for (int lap = 0; lap < 8; ++lap) {
    knowledge::GoalSpec g = knowledge::planning_goal(k, task);
    long before = k.prim_steps;
    controllers::ControllerResult r =
        controllers::run_planner_controller(env, k, g, cfg);
    if (r.termination != controllers::Termination::Success) break;
    bool final_phase =
        task.kind != TaskKind::VspPutIn || g.kind == TaskKind::VspPutIn;
    if (final_phase) break;
    // A free success on the search phase means the sweep is already complete
    // and the subject never showed: the put-in is hopeless, stop counting.
    if (k.prim_steps == before) break;
  }
  return std::max<long>(1, s.steps);
}

}  // namespace hiprl::world
