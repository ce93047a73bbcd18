#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hiprl/world/sim.hpp"
#include "hiprl/world/task.hpp"

namespace hiprl::knowledge {

enum class Cell : char { Unknown = 0, Free = 1, Blocked = 2 };

/// A small object the detector has reported at least once. Boxes are inclusive
/// cell rectangles in grid coordinates. Ids are stable for the episode even
/// when other entries are dropped.
struct TrackedObject {
  int id = 0;
  std::string cls;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int support = 1;        // observations merged into this entry
  int container = -1;     // tracked receptacle id, -1 = loose on the floor
  int world_id = -1;      // actuation handle from the latest detection
  long last_seen = 0;     // detector run index
  int miss_streak = 0;    // consecutive fully-visible runs without support
};

struct TrackedReceptacle {
  int id = 0;
  std::string cls;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int support = 1;
  bool openable = false;  // from the class, fixed at first sighting
  bool open_believed = false;
  bool checked = false;
  int world_id = -1;
  long last_seen = 0;
};

/// Everything the agent has learned this episode. The known-cell set, checked
/// flags, and per-entry support only ever grow; false-positive object entries
/// are the one thing that can disappear (see merge_detections).
struct KnowledgeState {
  int width = 0, height = 0;
  std::vector<Cell> map;  // row-major
  std::vector<TrackedObject> objects;
  std::vector<TrackedReceptacle> receptacles;
  int next_object_id = 0;
  int next_receptacle_id = 0;

  // pose is exact: the simulator reports it with every observation
  int ax = 0, ay = 0;
  world::Heading heading = world::Heading::N;
  int held = -1;  // tracked object id, -1 = empty hand

  long detector_runs = 0;
  long hier_steps = 0;
  long prim_steps = 0;

  Cell at(int x, int y) const { return map[y * width + x]; }
  const TrackedObject* object_by_id(int id) const;
  TrackedObject* object_by_id(int id);
  const TrackedReceptacle* receptacle_by_id(int id) const;
  TrackedReceptacle* receptacle_by_id(int id);
  const TrackedObject* object_by_world_id(int wid) const;
  TrackedObject* object_by_world_id(int wid);
  const TrackedReceptacle* receptacle_by_world_id(int wid) const;
  TrackedReceptacle* receptacle_by_world_id(int wid);
  int count_class(const std::string& cls) const;  // tracked objects only
};

KnowledgeState make_knowledge(int width, int height);

/// Pose from the observation; visible cells enter the map as Free/Blocked and
/// never leave or flip afterwards.
void update_map(KnowledgeState& k, const world::Observation& obs);

/// Fold one detector run into the tracked entities. Same-class pairs with box
/// IoU above 0.3 merge (union box, support+1); detections are taken in list
/// order against entries in id order. An unsupported object entry whose whole
/// box was visible this run gains a miss; three in a row delete it. Runs that
/// cannot see the whole box leave the streak untouched, and the held object is
/// exempt (the detector never reports the hand).
void merge_detections(KnowledgeState& k, const world::Observation& obs);

/// update_map + merge_detections + pose, the normal per-observation path.
void integrate(KnowledgeState& k, const world::Observation& obs);

/// Belief updates for an attempted primitive. Open success marks the target
/// opened and checked; Close clears opened; Pickup/Put move the containment
/// belief through the hand; a failed MoveAhead marks the faced cell blocked.
void mark_interaction(KnowledgeState& k, const world::PrimitiveAction& a,
                      bool success);

/// Navigation-leg epilogue: receptacles whose access cell is the agent's cell
/// count as checked when nothing hides their contents (unopenable or open).
void mark_arrival(KnowledgeState& k);

/// Cell a planner route to this box should end on: known-free, orthogonally
/// adjacent to the box, smallest (y, x) first. Nothing adjacent known-free
/// yet means the box is not plannable-to.
std::optional<std::pair<int, int>> access_cell(const KnowledgeState& k, int x0,
                                               int y0, int x1, int y1);
std::optional<std::pair<int, int>> access_cell(const KnowledgeState& k,
                                               const TrackedReceptacle& r);

inline constexpr double kUnknownCellCost = 3.0;  // vs 1.0 for known-free

/// A* route on the believed map, 4-connected; unknown cells are traversable
/// at kUnknownCellCost. Returns the cells after the start, ending on the
/// target, or nothing when every route crosses a believed-blocked cell.
std::optional<std::vector<std::pair<int, int>>> find_path(
    const KnowledgeState& k, int sx, int sy, int tx, int ty);
std::optional<double> path_cost(const KnowledgeState& k, int sx, int sy, int tx,
                                int ty);

struct GoalSpec {
  world::TaskKind kind = world::TaskKind::IqaExistence;
  std::string subject;  // object class
  std::string target;   // receptacle class, containment/put-in only
  std::string render() const;
};

/// Question goals. Existence: found-or-everything-plausible-checked.
/// Counting: the checked branch alone, one sighting settles no count.
/// Containment: restricted to the asked receptacle class.
GoalSpec goal_for_question(const world::TaskSpec& t);
GoalSpec goal_for_vsp(const world::TaskSpec& t);

/// What the planner should chase right now. Questions keep their goal. Put-in
/// runs in two phases: until a subject-class object is tracked the goal is the
/// existence pattern (find one or rule every plausible receptacle out), after
/// that the put-in goal proper.
GoalSpec planning_goal(const KnowledgeState& k, const world::TaskSpec& t);

/// PDDL names for tracked entries and cells.
std::string location_name(int x, int y);
std::string receptacle_name(const TrackedReceptacle& r);
std::string object_name(const TrackedObject& o);
std::optional<std::pair<int, int>> parse_location_name(const std::string& name);
const TrackedReceptacle* receptacle_for_name(const KnowledgeState& k,
                                             const std::string& name);
const TrackedObject* object_for_name(const KnowledgeState& k,
                                     const std::string& name);

/// Compile beliefs + goal into a problem for the shipped domain. One location
/// per plannable-to receptacle plus the agent's cell (loose objects add
/// theirs); distances are believed-map route costs.
std::string to_pddl_problem(const KnowledgeState& k, const GoalSpec& g,
                            const std::string& name = "episode");

}  // namespace hiprl::knowledge
