#include "hiprl/eval/cosim.hpp"

#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "hiprl/controllers/controllers.hpp"
#include "hiprl/pddl/ground.hpp"
#include "hiprl/pddl/parser.hpp"
#include "hiprl/rng.hpp"
#include "hiprl/world/scene.hpp"
#include "hiprl/world/sim.hpp"

namespace hiprl::eval {
namespace {

std::string lower(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string loc_name(int x, int y) {
  return "loc_" + std::to_string(x) + "_" + std::to_string(y);
}

std::string rec_name(const world::Receptacle& r) {
  return lower(r.cls) + std::to_string(r.id);
}

std::string obj_name(const world::WorldObject& o) {
  return lower(o.cls) + std::to_string(o.id);
}

std::vector<std::pair<int, int>> adjacent_free(const world::Scene& sc, int x,
                                               int y) {
  std::vector<std::pair<int, int>> out;
  constexpr int dx4[] = {0, 1, 0, -1}, dy4[] = {-1, 0, 1, 0};
  for (int i = 0; i < 4; ++i) {
    int nx = x + dx4[i], ny = y + dy4[i];
    if (!sc.blocked(nx, ny)) out.push_back({nx, ny});
  }
  return out;
}

/// The full world state as a problem for the shipped domain. Receptacles and
/// objects are addressable from every adjacent free cell, so any stand-and-
/// face interaction the simulator accepts has a ground counterpart.
std::string snapshot_problem(const world::Scene& sc, const world::WorldState& s) {
  if (s.held >= 0) throw std::logic_error("snapshot with a held object");

  std::vector<std::pair<int, int>> cells;
  for (int y = 0; y < sc.height; ++y)
    for (int x = 0; x < sc.width; ++x)
      if (!sc.blocked(x, y)) cells.push_back({x, y});

  std::set<std::string> rtypes, otypes{"MugType"};
  for (const auto& r : sc.receptacles) rtypes.insert(r.cls + "Type");
  for (const auto& o : sc.objects) otypes.insert(o.cls + "Type");

  std::ostringstream out;
  out << "(define (problem cosim)\n  (:domain qa_vsp_task)\n  (:objects\n"
      << "    agent1 - agent\n   ";
  for (auto [x, y] : cells) out << " " << loc_name(x, y);
  out << " - location\n";
  if (!sc.receptacles.empty()) {
    out << "   ";
    for (const auto& r : sc.receptacles) out << " " << rec_name(r);
    out << " - receptacle\n";
  }
  if (!sc.objects.empty()) {
    out << "   ";
    for (const auto& o : sc.objects) out << " " << obj_name(o);
    out << " - object\n";
  }
  if (!rtypes.empty()) {
    out << "   ";
    for (const auto& t : rtypes) out << " " << t;
    out << " - rtype\n";
  }
  out << "   ";
  for (const auto& t : otypes) out << " " << t;
  out << " - otype)\n  (:init\n"
      << "    (atLocation agent1 " << loc_name(s.ax, s.ay) << ")\n";
  for (const auto& r : sc.receptacles) {
    for (auto [x, y] : adjacent_free(sc, r.x, r.y))
      out << "    (receptacleAtLocation " << rec_name(r) << " " << loc_name(x, y)
          << ")\n";
    out << "    (receptacleType " << rec_name(r) << " " << r.cls << "Type)\n";
    if (r.openable) out << "    (openable " << rec_name(r) << ")\n";
    if (s.open[r.id]) out << "    (opened " << rec_name(r) << ")\n";
    if (s.occupancy(r.id) >= r.capacity) out << "    (full " << rec_name(r) << ")\n";
  }
  for (const auto& o : sc.objects) {
    out << "    (objectType " << obj_name(o) << " " << o.cls << "Type)\n";
    int c = s.container[o.id];
    if (c >= 0)
      out << "    (inReceptacle " << obj_name(o) << " "
          << rec_name(sc.receptacles[c]) << ")\n";
    auto [ox, oy] = s.object_cell(o.id);
    for (auto [x, y] : adjacent_free(sc, ox, oy))
      out << "    (objectAtLocation " << obj_name(o) << " " << loc_name(x, y)
          << ")\n";
  }
  for (const auto& rt : rtypes)
    for (const auto& ot : otypes)
      if (world::can_contain(rt.substr(0, rt.size() - 4),
                             ot.substr(0, ot.size() - 4)))
        out << "    (canContain " << rt << " " << ot << ")\n";

  // route lengths between every ordered pair of locations
  const int W = sc.width;
  for (auto [sx, sy] : cells) {
    std::vector<int> dist(static_cast<std::size_t>(W) * sc.height, -1);
    std::deque<std::pair<int, int>> q{{sx, sy}};
    dist[sy * W + sx] = 0;
    while (!q.empty()) {
      auto [x, y] = q.front();
      q.pop_front();
      constexpr int dx4[] = {0, 1, 0, -1}, dy4[] = {-1, 0, 1, 0};
      for (int i = 0; i < 4; ++i) {
        int nx = x + dx4[i], ny = y + dy4[i];
        if (sc.blocked(nx, ny) || dist[ny * W + nx] >= 0) continue;
        dist[ny * W + nx] = dist[y * W + x] + 1;
        q.push_back({nx, ny});
      }
    }
    for (auto [tx, ty] : cells) {
      int d = dist[ty * W + tx];
      out << "    (= (distance " << loc_name(sx, sy) << " " << loc_name(tx, ty)
          << ") " << (d < 0 ? 9999 : d) << ")\n";
    }
  }
  out << "    (= (totalCost) 0)\n  )\n"
      << "  (:goal (exists (?o - object) (objectType ?o MugType)))\n"
      << "  (:metric minimize (totalCost))\n)\n";
  return out.str();
}

// The abstract face of a state: the predicates both sides maintain. `checked`
// stays out (plan bookkeeping with no physical counterpart) and `full` is
// compared with the formalism's one-way semantics folded in by the caller.
struct Projection {
  std::string at;
  std::set<std::string> opened, full;
  std::map<std::string, std::string> inside;  // object -> receptacle
  std::set<std::string> held;

  bool operator==(const Projection&) const = default;
};

Projection world_projection(const world::Scene& sc, const world::WorldState& s,
                            const std::set<std::string>& sticky_full) {
  Projection p;
  p.at = loc_name(s.ax, s.ay);
  for (const auto& r : sc.receptacles) {
    if (s.open[r.id]) p.opened.insert(rec_name(r));
    if (s.occupancy(r.id) >= r.capacity) p.full.insert(rec_name(r));
  }
  for (const auto& n : sticky_full) p.full.insert(n);
  for (const auto& o : sc.objects) {
    if (s.container[o.id] >= 0)
      p.inside[obj_name(o)] = rec_name(sc.receptacles[s.container[o.id]]);
    if (s.held == o.id) p.held.insert(obj_name(o));
  }
  return p;
}

Projection pddl_projection(const pddl::GroundTask& t, const pddl::State& st) {
  Projection p;
  for (int f = 0; f < t.num_fluents(); ++f) {
    if (!st.fluents.test(f)) continue;
    const std::string& name = t.fluent_names[f];
    if (name.size() < 2 || name.front() != '(') continue;
    std::istringstream in(name.substr(1, name.size() - 2));
    std::string pred, a, b;
    in >> pred >> a >> b;
    if (pred == "atLocation") p.at = b;
    else if (pred == "opened") p.opened.insert(a);
    else if (pred == "full") p.full.insert(a);
    else if (pred == "inReceptacle") p.inside[a] = b;
    else if (pred == "holds") p.held.insert(b);
  }
  return p;
}

std::string describe_diff(const Projection& w, const Projection& p) {
  std::ostringstream out;
  if (w.at != p.at) out << " at " << w.at << " vs " << p.at;
  auto set_diff = [&](const char* tag, const std::set<std::string>& a,
                      const std::set<std::string>& b) {
    if (a == b) return;
    out << " " << tag << " {";
    for (const auto& x : a) out << " " << x;
    out << " } vs {";
    for (const auto& x : b) out << " " << x;
    out << " }";
  };
  set_diff("opened", w.opened, p.opened);
  set_diff("full", w.full, p.full);
  set_diff("held", w.held, p.held);
  if (w.inside != p.inside) out << " containment differs";
  return out.str();
}

struct Tracker {
  pddl::GroundTask task;
  pddl::State state;
  std::map<std::string, std::vector<int>> index;

  void seed(const world::Scene& sc, const world::WorldState& s) {
    std::string text = snapshot_problem(sc, s);
    pddl::Problem prob =
        pddl::parse_problem(text, controllers::shipped_domain(), "cosim");
    task = pddl::ground(controllers::shipped_domain(), prob);
    state = task.init;
    index.clear();
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
      const pddl::GroundAction& a = task.actions[i];
      std::string key = "(" + a.schema;
      for (const auto& arg : a.args) key += " " + arg;
      key += ")";
      index[key].push_back(static_cast<int>(i));
    }
  }

  /// Apply the ground counterpart of a successful primitive, trying precondition
  /// variants in order. Empty result means one applied cleanly.
  std::string take(const std::string& key) {
    auto it = index.find(key);
    if (it == index.end()) return "no ground action " + key;
    for (int idx : it->second) {
      if (!pddl::applicable(state, task.actions[idx])) continue;
      state = pddl::apply(task, state, task.actions[idx]);
      return "";
    }
    try {
      state = pddl::apply(task, state, task.actions[it->second.front()]);
      return "";
    } catch (const std::exception& e) {
      return key + " inapplicable: " + e.what();
    }
  }
};

world::PrimitiveAction choose_primitive(const world::Scene& sc,
                                        const world::WorldState& s, Rng& rng) {
  using world::Verb;
  auto [fx, fy] = s.faced_cell();
  int fr = sc.receptacle_at(fx, fy);
  double r = rng.uniform();
  if (fr >= 0 && r < 0.55) {
    if (s.held >= 0 && rng.uniform() < 0.65) return {Verb::Put, fr};
    double u = rng.uniform();
    if (u < 0.35) return {Verb::Open, fr};
    if (u < 0.55) return {Verb::Close, fr};
    for (const auto& o : sc.objects)
      if (s.container[o.id] == fr) return {Verb::Pickup, o.id};
    return {Verb::Open, fr};
  }
  if (r < 0.08 && !sc.objects.empty())  // mostly soft failures, on purpose
    return {Verb::Pickup, static_cast<int>(rng.uniform_int(sc.objects.size()))};
  if (r < 0.14 && !sc.receptacles.empty())
    return {rng.uniform() < 0.5 ? Verb::Open : Verb::Close,
            static_cast<int>(rng.uniform_int(sc.receptacles.size()))};
  if (r < 0.60) return {Verb::MoveAhead, -1};
  if (r < 0.80) return {Verb::RotateLeft, -1};
  return {Verb::RotateRight, -1};
}

}  // namespace

CosimReport cosim_random_walks(std::uint64_t master_seed, int sequences,
                               int steps_per_sequence) {
  CosimReport rep;
  rep.sequences = sequences;

  world::SceneConfig cfg;
  cfg.width = 9;
  cfg.height = 9;
  cfg.receptacle_counts = {
      {"Fridge", 1}, {"Cabinet", 1}, {"Drawer", 1}, {"Sink", 1}};
  cfg.min_objects = 3;
  cfg.max_objects = 4;
  cfg.wall_stubs = 1;

  for (int seq = 0; seq < sequences; ++seq) {
    world::Scene sc =
        world::generate_scene(derive_seed(master_seed, "cosim-scene", seq), cfg);
    Rng rng(derive_seed(master_seed, "cosim-walk", seq));
    std::vector<std::pair<int, int>> cells;
    for (int y = 0; y < sc.height; ++y)
      for (int x = 0; x < sc.width; ++x)
        if (!sc.blocked(x, y)) cells.push_back({x, y});
    auto [sx, sy] = cells[rng.uniform_int(cells.size())];
    world::WorldState s = world::init_state(
        sc, sx, sy, static_cast<world::Heading>(rng.uniform_int(4)));
    world::NoiseModel gt = world::NoiseModel::ground_truth();

    Tracker trk;
    trk.seed(sc, s);
    std::set<std::string> sticky;  // formally full, physically emptied

    bool broken = false;
    auto violate = [&](int step, const world::PrimitiveAction& a,
                       const std::string& msg) {
      if (rep.violations.size() < 50)
        rep.violations.push_back("seq " + std::to_string(seq) + " step " +
                                 std::to_string(step) + " " +
                                 world::primitive_name(a) + ": " + msg);
      broken = true;
    };

    for (int t = 0; t < steps_per_sequence && !broken; ++t) {
      world::PrimitiveAction a = choose_primitive(sc, s, rng);
      const int old_x = s.ax, old_y = s.ay;
      const int held_before = s.held;
      const int pre_container =
          a.verb == world::Verb::Pickup && a.target >= 0 &&
                  a.target < static_cast<int>(sc.objects.size())
              ? s.container[a.target]
              : -1;
      Projection before = world_projection(sc, s, sticky);

      world::Observation obs = world::step(s, a, gt, rng);
      ++rep.primitives;

      const bool inert = a.verb == world::Verb::RotateLeft ||
                         a.verb == world::Verb::RotateRight || !obs.success;
      if (inert) {
        // rotations have no formal counterpart; refused primitives must leave
        // the abstract state exactly where it was
        if (!(world_projection(sc, s, sticky) == before))
          violate(t, a, "inert primitive changed the abstract state");
        continue;
      }

      std::string key;
      switch (a.verb) {
        case world::Verb::MoveAhead:
          key = "(GotoLocation agent1 " + loc_name(old_x, old_y) + " " +
                loc_name(s.ax, s.ay) + ")";
          ++rep.ok_moves;
          break;
        case world::Verb::Open:
          key = "(OpenObject agent1 " + loc_name(s.ax, s.ay) + " " +
                rec_name(sc.receptacles[a.target]) + ")";
          ++rep.ok_opens;
          break;
        case world::Verb::Close:
          key = "(CloseObject agent1 " + loc_name(s.ax, s.ay) + " " +
                rec_name(sc.receptacles[a.target]) + ")";
          ++rep.ok_closes;
          break;
        case world::Verb::Pickup:
          if (pre_container < 0) {
            violate(t, a, "floor pickup outside the modeled fragment");
            continue;
          }
          key = "(PickupObject agent1 " + loc_name(s.ax, s.ay) + " " +
                obj_name(sc.objects[a.target]) + " " +
                rec_name(sc.receptacles[pre_container]) + ")";
          ++rep.ok_pickups;
          break;
        case world::Verb::Put:
          key = "(PutObject agent1 " + loc_name(s.ax, s.ay) + " " +
                sc.objects[held_before].cls + "Type " +
                obj_name(sc.objects[held_before]) + " " +
                rec_name(sc.receptacles[a.target]) + ")";
          ++rep.ok_puts;
          break;
        default:
          continue;
      }

      // PickupObject never deletes full, so refilling a receptacle emptied
      // earlier in the trajectory has no formal counterpart at all: the
      // grounded action is correctly inapplicable. Resynchronise instead.
      if (a.verb == world::Verb::Put &&
          sticky.count(rec_name(sc.receptacles[a.target]))) {
        trk.seed(sc, s);
        sticky.clear();
        if (!(pddl_projection(trk.task, trk.state) ==
              world_projection(sc, s, sticky)))
          violate(t, a, "fresh snapshot disagrees with the world");
        continue;
      }

      std::string err = trk.take(key);
      if (!err.empty()) {
        violate(t, a, err);
        continue;
      }

      // One-way exception: PickupObject does not delete full, so a receptacle
      // emptied by hand stays formally full until the next snapshot.
      if (a.verb == world::Verb::Pickup && s.occupancy(pre_container) == 0)
        sticky.insert(rec_name(sc.receptacles[pre_container]));

      Projection w = world_projection(sc, s, sticky);
      Projection p = pddl_projection(trk.task, trk.state);
      if (!(w == p)) {
        violate(t, a, "state mismatch:" + describe_diff(w, p));
        continue;
      }
      int ha = trk.task.fluent("(holdsAny agent1)");
      if (ha >= 0 && trk.state.fluents.test(ha) != !p.held.empty())
        violate(t, a, "holdsAny out of step with holds");

      // A put moves an object between grab locations, which are static in the
      // formalism: refresh the snapshot and check it lands on the same state.
      if (a.verb == world::Verb::Put && !broken) {
        trk.seed(sc, s);
        sticky.clear();
        if (!(pddl_projection(trk.task, trk.state) ==
              world_projection(sc, s, sticky)))
          violate(t, a, "fresh snapshot disagrees with the world");
      }
    }
  }
  return rep;
}

}  // namespace hiprl::eval
