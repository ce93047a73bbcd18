#include "hiprl/knowledge/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "hiprl/world/scene.hpp"

namespace hiprl::knowledge {

namespace {

double box_iou(int ax0, int ay0, int ax1, int ay1, int bx0, int by0, int bx1,
               int by1) {
  int ix0 = std::max(ax0, bx0), iy0 = std::max(ay0, by0);
  int ix1 = std::min(ax1, bx1), iy1 = std::min(ay1, by1);
  if (ix0 > ix1 || iy0 > iy1) return 0.0;
  double inter = double(ix1 - ix0 + 1) * double(iy1 - iy0 + 1);
  double a = double(ax1 - ax0 + 1) * double(ay1 - ay0 + 1);
  double b = double(bx1 - bx0 + 1) * double(by1 - by0 + 1);
  return inter / (a + b - inter);
}

std::string lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

const TrackedObject* KnowledgeState::object_by_id(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

TrackedObject* KnowledgeState::object_by_id(int id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const TrackedReceptacle* KnowledgeState::receptacle_by_id(int id) const {
  for (const auto& r : receptacles)
    if (r.id == id) return &r;
  return nullptr;
}

TrackedReceptacle* KnowledgeState::receptacle_by_id(int id) {
  for (auto& r : receptacles)
    if (r.id == id) return &r;
  return nullptr;
}

const TrackedObject* KnowledgeState::object_by_world_id(int wid) const {
  for (const auto& o : objects)
    if (o.world_id == wid) return &o;
  return nullptr;
}

TrackedObject* KnowledgeState::object_by_world_id(int wid) {
  for (auto& o : objects)
    if (o.world_id == wid) return &o;
  return nullptr;
}

const TrackedReceptacle* KnowledgeState::receptacle_by_world_id(int wid) const {
  for (const auto& r : receptacles)
    if (r.world_id == wid) return &r;
  return nullptr;
}

TrackedReceptacle* KnowledgeState::receptacle_by_world_id(int wid) {
  for (auto& r : receptacles)
    if (r.world_id == wid) return &r;
  return nullptr;
}

int KnowledgeState::count_class(const std::string& cls) const {
  int n = 0;
  for (const auto& o : objects) n += o.cls == cls;
  return n;
}

KnowledgeState make_knowledge(int width, int height) {
  KnowledgeState k;
  k.width = width;
  k.height = height;
  k.map.assign(static_cast<std::size_t>(width) * height, Cell::Unknown);
  return k;
}

void update_map(KnowledgeState& k, const world::Observation& obs) {
  for (std::size_t i = 0; i < obs.visible.size() && i < k.map.size(); ++i) {
    if (!obs.visible[i]) continue;
    if (k.map[i] != Cell::Unknown) continue;  // known cells are frozen
    k.map[i] = obs.visible[i] == world::kSeenBlocked ? Cell::Blocked : Cell::Free;
  }
  // the agent stands on its own cell, which the frustum never covers
  k.map[obs.ay * k.width + obs.ax] = Cell::Free;
}

void merge_detections(KnowledgeState& k, const world::Observation& obs) {
  ++k.detector_runs;
  std::set<int> supported;

  for (const auto& d : obs.detections) {
    if (d.receptacle) {
      TrackedReceptacle* best = nullptr;
      double best_iou = 0.3;  // strictly above merges
      for (auto& r : k.receptacles) {
        if (r.cls != d.cls) continue;
        double iou = box_iou(r.x0, r.y0, r.x1, r.y1, d.x0, d.y0, d.x1, d.y1);
        if (iou > best_iou) {
          best_iou = iou;
          best = &r;
        }
      }
      if (best) {
        best->x0 = std::min(best->x0, d.x0);
        best->y0 = std::min(best->y0, d.y0);
        best->x1 = std::max(best->x1, d.x1);
        best->y1 = std::max(best->y1, d.y1);
        ++best->support;
        best->last_seen = k.detector_runs;
        if (d.id >= 0) best->world_id = d.id;
      } else {
        TrackedReceptacle r;
        r.id = k.next_receptacle_id++;
        r.cls = d.cls;
        r.x0 = d.x0;
        r.y0 = d.y0;
        r.x1 = d.x1;
        r.y1 = d.y1;
        r.openable = world::receptacle_class_openable(d.cls);
        r.world_id = d.id;
        r.last_seen = k.detector_runs;
        k.receptacles.push_back(r);
      }
      continue;
    }

    TrackedObject* best = nullptr;
    double best_iou = 0.3;
    for (auto& o : k.objects) {
      if (o.cls != d.cls || o.id == k.held) continue;  // the hand is not in view
      double iou = box_iou(o.x0, o.y0, o.x1, o.y1, d.x0, d.y0, d.x1, d.y1);
      if (iou > best_iou) {
        best_iou = iou;
        best = &o;
      }
    }
    if (best) {
      best->x0 = std::min(best->x0, d.x0);
      best->y0 = std::min(best->y0, d.y0);
      best->x1 = std::max(best->x1, d.x1);
      best->y1 = std::max(best->y1, d.y1);
      ++best->support;
      best->last_seen = k.detector_runs;
      best->miss_streak = 0;
      if (d.id >= 0) best->world_id = d.id;
    } else {
      TrackedObject o;
      o.id = k.next_object_id++;
      o.cls = d.cls;
      o.x0 = d.x0;
      o.y0 = d.y0;
      o.x1 = d.x1;
      o.y1 = d.y1;
      o.world_id = d.id;
      o.last_seen = k.detector_runs;
      k.objects.push_back(o);
      best = &k.objects.back();
    }
    // containment belief follows where this sighting landed
    int cx = (d.x0 + d.x1) / 2, cy = (d.y0 + d.y1) / 2;
    best->container = -1;
    for (const auto& r : k.receptacles) {
      if (cx >= r.x0 && cx <= r.x1 && cy >= r.y0 && cy <= r.y1) {
        best->container = r.id;
        break;
      }
    }
    supported.insert(best->id);
  }

  // false positives fade: a whole-box-visible run without support is a miss,
  // three misses in a row delete the entry. Runs that could not see the whole
  // box keep the streak; the held object never decays.
  auto fully_visible = [&](const TrackedObject& o) {
    for (int y = o.y0; y <= o.y1; ++y)
      for (int x = o.x0; x <= o.x1; ++x) {
        if (x < 0 || y < 0 || x >= k.width || y >= k.height) return false;
        if (!obs.visible[y * k.width + x]) return false;
      }
    return true;
  };
  for (auto it = k.objects.begin(); it != k.objects.end();) {
    if (supported.count(it->id) || it->id == k.held || !fully_visible(*it)) {
      ++it;
      continue;
    }
    if (++it->miss_streak >= 3)
      it = k.objects.erase(it);
    else
      ++it;
  }
}

void integrate(KnowledgeState& k, const world::Observation& obs) {
  k.ax = obs.ax;
  k.ay = obs.ay;
  k.heading = obs.heading;
  update_map(k, obs);
  merge_detections(k, obs);
}

void mark_interaction(KnowledgeState& k, const world::PrimitiveAction& a,
                      bool success) {
  ++k.prim_steps;
  switch (a.verb) {
    case world::Verb::MoveAhead: {
      if (!success) {
        auto [dx, dy] = world::heading_delta(k.heading);
        int x = k.ax + dx, y = k.ay + dy;
        if (x >= 0 && y >= 0 && x < k.width && y < k.height &&
            k.at(x, y) == Cell::Unknown)
          k.map[y * k.width + x] = Cell::Blocked;
      }
      break;
    }
    case world::Verb::Open:
      if (success)
        if (auto* r = k.receptacle_by_world_id(a.target)) {
          r->open_believed = true;
          r->checked = true;
        }
      break;
    case world::Verb::Close:
      if (success)
        if (auto* r = k.receptacle_by_world_id(a.target))
          r->open_believed = false;
      break;
    case world::Verb::Pickup:
      if (success)
        if (auto* o = k.object_by_world_id(a.target)) {
          k.held = o->id;
          o->container = -1;
          o->miss_streak = 0;
        }
      break;
    case world::Verb::Put:
      if (success && k.held >= 0) {
        if (auto* o = k.object_by_id(k.held)) {
          if (const auto* r = k.receptacle_by_world_id(a.target)) {
            o->container = r->id;
            o->x0 = r->x0;
            o->y0 = r->y0;
            o->x1 = r->x1;
            o->y1 = r->y1;
          }
          o->miss_streak = 0;
        }
        k.held = -1;
      }
      break;
    default:
      break;
  }
}

void mark_arrival(KnowledgeState& k) {
  for (auto& r : k.receptacles) {
    auto cell = access_cell(k, r);
    if (!cell || cell->first != k.ax || cell->second != k.ay) continue;
    if (!r.openable || r.open_believed) r.checked = true;
  }
}

std::optional<std::pair<int, int>> access_cell(const KnowledgeState& k, int x0,
                                               int y0, int x1, int y1) {
  std::optional<std::pair<int, int>> best;  // compared as (y, x)
  auto consider = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= k.width || y >= k.height) return;
    if (x >= x0 && x <= x1 && y >= y0 && y <= y1) return;  // inside the box
    if (k.at(x, y) != Cell::Free) return;
    std::pair<int, int> c{y, x};
    if (!best || c < *best) best = c;
  };
  for (int x = x0; x <= x1; ++x) {
    consider(x, y0 - 1);
    consider(x, y1 + 1);
  }
  for (int y = y0; y <= y1; ++y) {
    consider(x0 - 1, y);
    consider(x1 + 1, y);
  }
  if (!best) return std::nullopt;
  return std::pair<int, int>{best->second, best->first};
}

std::optional<std::pair<int, int>> access_cell(const KnowledgeState& k,
                                               const TrackedReceptacle& r) {
  return access_cell(k, r.x0, r.y0, r.x1, r.y1);
}

std::optional<std::vector<std::pair<int, int>>> find_path(
    const KnowledgeState& k, int sx, int sy, int tx, int ty) {
  if (tx < 0 || ty < 0 || tx >= k.width || ty >= k.height) return std::nullopt;
  if (sx == tx && sy == ty) return std::vector<std::pair<int, int>>{};
  if (k.at(tx, ty) == Cell::Blocked) return std::nullopt;

  const int n = k.width * k.height;
  std::vector<double> g(n, -1.0);
  std::vector<int> parent(n, -1);
  auto idx = [&](int x, int y) { return y * k.width + x; };
  auto enter_cost = [&](int x, int y) {
    return k.at(x, y) == Cell::Unknown ? kUnknownCellCost : 1.0;
  };
  auto h = [&](int x, int y) {
    return static_cast<double>(std::abs(x - tx) + std::abs(y - ty));
  };

  using Entry = std::tuple<double, int>;  // (f, cell) — cell index breaks ties
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  g[idx(sx, sy)] = 0.0;
  open.push({h(sx, sy), idx(sx, sy)});
  const int step_dx[4] = {0, 1, 0, -1}, step_dy[4] = {-1, 0, 1, 0};

  while (!open.empty()) {
    auto [f, ci] = open.top();
    open.pop();
    int cx = ci % k.width, cy = ci / k.width;
    if (f > g[ci] + h(cx, cy) + 1e-9) continue;  // stale entry
    if (cx == tx && cy == ty) break;
    for (int dir = 0; dir < 4; ++dir) {
      int nx = cx + step_dx[dir], ny = cy + step_dy[dir];
      if (nx < 0 || ny < 0 || nx >= k.width || ny >= k.height) continue;
      if (k.at(nx, ny) == Cell::Blocked) continue;
      double ng = g[ci] + enter_cost(nx, ny);
      int ni = idx(nx, ny);
      if (g[ni] < 0 || ng < g[ni] - 1e-9) {
        g[ni] = ng;
        parent[ni] = ci;
        open.push({ng + h(nx, ny), ni});
      }
    }
  }

  if (g[idx(tx, ty)] < 0) return std::nullopt;
  std::vector<std::pair<int, int>> path;
  for (int ci = idx(tx, ty); ci != idx(sx, sy); ci = parent[ci])
    path.push_back({ci % k.width, ci / k.width});
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<double> path_cost(const KnowledgeState& k, int sx, int sy, int tx,
                                int ty) {
  auto path = find_path(k, sx, sy, tx, ty);
  if (!path) return std::nullopt;
  double cost = 0.0;
  for (const auto& [x, y] : *path)
    cost += k.at(x, y) == Cell::Unknown ? kUnknownCellCost : 1.0;
  return cost;
}

std::string GoalSpec::render() const {
  std::ostringstream out;
  std::string subj = subject + "Type";
  std::string targ = target.empty() ? "" : target + "Type";
  auto all_closed = [](const char* indent) {
    return std::string(indent) + "(forall (?re - receptacle)\n" + indent +
           "  (not (opened ?re)))";
  };
  switch (kind) {
    case world::TaskKind::IqaExistence:
      out << "(or\n"
          << "  (exists (?o - object)\n"
          << "    (objectType ?o " << subj << "))\n"
          << "  (and\n"
          << "    (forall (?t - rtype)\n"
          << "      (forall (?r - receptacle)\n"
          << "        (or\n"
          << "          (not (and (canContain ?t " << subj << ")\n"
          << "                    (receptacleType ?r ?t)))\n"
          << "          (checked ?r))))\n"
          << all_closed("    ") << "))";
      break;
    case world::TaskKind::IqaCounting:
      // one sighting settles no count, so only the checked branch remains
      out << "(and\n"
          << "  (forall (?t - rtype)\n"
          << "    (forall (?r - receptacle)\n"
          << "      (or\n"
          << "        (not (and (canContain ?t " << subj << ")\n"
          << "                  (receptacleType ?r ?t)))\n"
          << "        (checked ?r))))\n"
          << all_closed("  ") << ")";
      break;
    case world::TaskKind::IqaContainment:
      out << "(or\n"
          << "  (exists (?o - object)\n"
          << "    (exists (?r - receptacle)\n"
          << "      (and (objectType ?o " << subj << ")\n"
          << "           (receptacleType ?r " << targ << ")\n"
          << "           (inReceptacle ?o ?r))))\n"
          << "  (and\n"
          << "    (forall (?r - receptacle)\n"
          << "      (or\n"
          << "        (not (receptacleType ?r " << targ << "))\n"
          << "        (checked ?r)))\n"
          << all_closed("    ") << "))";
      break;
    case world::TaskKind::VspPutIn:
      out << "(exists (?o - object)\n"
          << "  (exists (?r - receptacle)\n"
          << "    (and (objectType ?o " << subj << ")\n"
          << "         (receptacleType ?r " << targ << ")\n"
          << "         (inReceptacle ?o ?r))))";
      break;
  }
  return out.str();
}

GoalSpec goal_for_question(const world::TaskSpec& t) {
  if (t.kind == world::TaskKind::VspPutIn)
    throw std::invalid_argument("put-in tasks have no question goal");
  GoalSpec g;
  g.kind = t.kind;
  g.subject = t.subject;
  if (t.kind == world::TaskKind::IqaContainment) g.target = t.target_class;
  return g;
}

GoalSpec goal_for_vsp(const world::TaskSpec& t) {
  if (t.kind != world::TaskKind::VspPutIn)
    throw std::invalid_argument("questions have no put-in goal");
  GoalSpec g;
  g.kind = t.kind;
  g.subject = t.subject;
  g.target = t.target_class;
  return g;
}

GoalSpec planning_goal(const KnowledgeState& k, const world::TaskSpec& t) {
  if (t.kind != world::TaskKind::VspPutIn) return goal_for_question(t);
  if (k.count_class(t.subject) > 0) return goal_for_vsp(t);
  // No candidate in hand or in sight yet: search first. Same formula as the
  // existence question, so a sighting anywhere ends the phase.
  GoalSpec g;
  g.kind = world::TaskKind::IqaExistence;
  g.subject = t.subject;
  return g;
}

std::string location_name(int x, int y) {
  return "loc_" + std::to_string(x) + "_" + std::to_string(y);
}

std::string receptacle_name(const TrackedReceptacle& r) {
  return lower(r.cls) + std::to_string(r.id);
}

std::string object_name(const TrackedObject& o) {
  return lower(o.cls) + std::to_string(o.id);
}

std::optional<std::pair<int, int>> parse_location_name(const std::string& name) {
  if (name.rfind("loc_", 0) != 0) return std::nullopt;
  auto second = name.find('_', 4);
  if (second == std::string::npos) return std::nullopt;
  try {
    int x = std::stoi(name.substr(4, second - 4));
    int y = std::stoi(name.substr(second + 1));
    return std::pair<int, int>{x, y};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

const TrackedReceptacle* receptacle_for_name(const KnowledgeState& k,
                                             const std::string& name) {
  for (const auto& r : k.receptacles)
    if (receptacle_name(r) == name) return &r;
  return nullptr;
}

const TrackedObject* object_for_name(const KnowledgeState& k,
                                     const std::string& name) {
  for (const auto& o : k.objects)
    if (object_name(o) == name) return &o;
  return nullptr;
}

std::string to_pddl_problem(const KnowledgeState& k, const GoalSpec& g,
                            const std::string& name) {
  // locations, keyed (y, x) so the emitted order is reading order
  std::map<std::pair<int, int>, std::string> locs;
  auto add_loc = [&](int x, int y) {
    locs.insert({{y, x}, location_name(x, y)});
  };
  add_loc(k.ax, k.ay);

  std::map<int, std::pair<int, int>> receptacle_loc;  // record id -> cell
  for (const auto& r : k.receptacles) {
    if (auto c = access_cell(k, r)) {
      receptacle_loc[r.id] = *c;
      add_loc(c->first, c->second);
    }
  }
  std::map<int, std::pair<int, int>> object_loc;  // loose objects only
  for (const auto& o : k.objects) {
    if (o.id == k.held) continue;
    if (o.container >= 0) {
      auto it = receptacle_loc.find(o.container);
      if (it != receptacle_loc.end()) object_loc[o.id] = it->second;
    } else if (auto c = access_cell(k, o.x0, o.y0, o.x1, o.y1)) {
      object_loc[o.id] = *c;
      add_loc(c->first, c->second);
    }
  }

  std::set<std::string> rtypes, otypes;
  for (const auto& r : k.receptacles) rtypes.insert(r.cls + "Type");
  for (const auto& o : k.objects) otypes.insert(o.cls + "Type");
  otypes.insert(g.subject + "Type");
  if (!g.target.empty()) rtypes.insert(g.target + "Type");

  std::ostringstream out;
  out << "(define (problem " << name << ")\n";
  out << "  (:domain qa_vsp_task)\n";
  out << "  (:objects\n";
  out << "    agent1 - agent\n";
  out << "   ";
  for (const auto& [cell, lname] : locs) out << " " << lname;
  out << " - location\n";
  if (!k.receptacles.empty()) {
    out << "   ";
    for (const auto& r : k.receptacles) out << " " << receptacle_name(r);
    out << " - receptacle\n";
  }
  if (!k.objects.empty()) {
    out << "   ";
    for (const auto& o : k.objects) out << " " << object_name(o);
    out << " - object\n";
  }
  if (!rtypes.empty()) {
    out << "   ";
    for (const auto& t : rtypes) out << " " << t;
    out << " - rtype\n";
  }
  out << "   ";
  for (const auto& t : otypes) out << " " << t;
  out << " - otype\n";
  out << "  )\n";

  out << "  (:init\n";
  out << "    (atLocation agent1 " << location_name(k.ax, k.ay) << ")\n";
  for (const auto& r : k.receptacles) {
    auto it = receptacle_loc.find(r.id);
    if (it != receptacle_loc.end())
      out << "    (receptacleAtLocation " << receptacle_name(r) << " "
          << location_name(it->second.first, it->second.second) << ")\n";
    out << "    (receptacleType " << receptacle_name(r) << " " << r.cls
        << "Type)\n";
    if (r.openable) out << "    (openable " << receptacle_name(r) << ")\n";
    if (r.open_believed) out << "    (opened " << receptacle_name(r) << ")\n";
    if (r.checked) out << "    (checked " << receptacle_name(r) << ")\n";
  }
  for (const auto& o : k.objects) {
    out << "    (objectType " << object_name(o) << " " << o.cls << "Type)\n";
    auto it = object_loc.find(o.id);
    if (it != object_loc.end())
      out << "    (objectAtLocation " << object_name(o) << " "
          << location_name(it->second.first, it->second.second) << ")\n";
    if (o.container >= 0)
      if (const auto* r = k.receptacle_by_id(o.container))
        out << "    (inReceptacle " << object_name(o) << " "
            << receptacle_name(*r) << ")\n";
  }
  // believed capacity is one slot everywhere
  for (const auto& r : k.receptacles) {
    bool full = false;
    for (const auto& o : k.objects)
      full |= o.container == r.id && o.id != k.held;
    if (full) out << "    (full " << receptacle_name(r) << ")\n";
  }
  if (k.held >= 0)
    if (const auto* o = k.object_by_id(k.held)) {
      out << "    (holds agent1 " << object_name(*o) << ")\n";
      out << "    (holdsAny agent1)\n";
    }
  for (const auto& rt : rtypes)
    for (const auto& ot : otypes) {
      std::string rcls = rt.substr(0, rt.size() - 4);
      std::string ocls = ot.substr(0, ot.size() - 4);
      if (world::can_contain(rcls, ocls))
        out << "    (canContain " << rt << " " << ot << ")\n";
    }
  for (const auto& [ca, na] : locs)
    for (const auto& [cb, nb] : locs) {
      double d = 0.0;
      if (ca != cb) {
        auto cost = path_cost(k, ca.second, ca.first, cb.second, cb.first);
        d = cost ? *cost : 9999.0;  // unreachable pairs priced out, not omitted
      }
      out << "    (= (distance " << na << " " << nb << ") "
          << static_cast<long>(d + 0.5) << ")\n";
    }
  out << "    (= (totalCost) 0)\n";
  out << "  )\n";

  std::string goal = g.render();
  out << "  (:goal\n    ";
  for (char c : goal) {
    out << c;
    if (c == '\n') out << "    ";
  }
  out << "\n  )\n";
  out << "  (:metric minimize (totalCost))\n";
  out << ")\n";
  return out.str();
}

}  // namespace hiprl::knowledge
