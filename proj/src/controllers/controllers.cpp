#include "hiprl/controllers/controllers.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "hiprl/domain_text.hpp"
#include "hiprl/pddl/ground.hpp"
#include "hiprl/pddl/parser.hpp"

namespace hiprl::controllers {

const pddl::Domain& shipped_domain() {
  static const pddl::Domain d = pddl::parse_domain(kDomainText, "domain.pddl");
  return d;
}

namespace {

using world::Heading;
using world::Verb;

Heading heading_for(int dx, int dy) {
  for (Heading h : {Heading::N, Heading::E, Heading::S, Heading::W})
    if (world::heading_delta(h) == std::pair{dx, dy}) return h;
  throw std::logic_error("non-unit step");
}

/// Run one primitive through the simulator, log it, apply the belief updates
/// every action shares (step count, collision learning, open/held bookkeeping).
/// Detection merging is the caller's choice.
world::Observation do_prim(Env& env, knowledge::KnowledgeState& k,
                           const world::PrimitiveAction& a) {
  world::Observation obs = world::step(*env.s, a, *env.noise, *env.rng);
  if (env.log) env.log->push_back({a, obs.success, world::observation_digest(obs)});
  knowledge::mark_interaction(k, a, obs.success);
  return obs;
}

/// Pose + map from an observation, detections dropped. The walking-and-turning
/// integration: the detector officially runs only at leg ends.
void pose_and_map(knowledge::KnowledgeState& k, const world::Observation& obs) {
  k.ax = obs.ax;
  k.ay = obs.ay;
  k.heading = obs.heading;
  knowledge::update_map(k, obs);
}

/// Turn until the agent faces `want`. Returns false when the budget check
/// `can_spend` refuses a rotation.
template <typename CanSpend>
bool rotate_to(Env& env, knowledge::KnowledgeState& k, Heading want,
               CanSpend can_spend) {
  while (k.heading != want) {
    if (!can_spend()) return false;
    int diff = (static_cast<int>(want) - static_cast<int>(k.heading)) & 3;
    world::PrimitiveAction a{diff == 3 ? Verb::RotateLeft : Verb::RotateRight};
    pose_and_map(k, do_prim(env, k, a));
  }
  return true;
}

int frustum_novelty(const knowledge::KnowledgeState& k, int x, int y, Heading h,
                    int range) {
  auto [fx, fy] = world::heading_delta(h);
  int novel = 0;
  for (int cy = y - range; cy <= y + range; ++cy) {
    for (int cx = x - range; cx <= x + range; ++cx) {
      if (cx < 0 || cy < 0 || cx >= k.width || cy >= k.height) continue;
      int dx = cx - x, dy = cy - y;
      int ahead = dx * fx + dy * fy;
      if (ahead < 1 || ahead > range) continue;
      if (std::abs(dx * fy - dy * fx) > ahead) continue;
      if (k.at(cx, cy) == knowledge::Cell::Unknown) ++novel;
    }
  }
  return novel;
}

}  // namespace

ControllerResult navigate(Env& env, knowledge::KnowledgeState& k, int tx,
                          int ty, const ControllerConfig& cfg) {
  ControllerResult r;
  r.controller = "navigate";
  const long start = env.s->steps;
  auto used = [&] { return static_cast<int>(env.s->steps - start); };
  auto finish = [&](Termination t, std::string why = "") {
    r.primitives = used();
    r.termination = t;
    r.reason = std::move(why);
    return r;
  };

  while (true) {
    if (k.ax == tx && k.ay == ty) {
      // leg over: the one detector run of the walk
      world::Observation obs = world::observe(*env.s, *env.noise, *env.rng);
      knowledge::integrate(k, obs);
      knowledge::mark_arrival(k);
      return finish(Termination::Success);
    }
    if (used() >= cfg.navigate_budget)
      return finish(Termination::BudgetExhausted, "step budget");
    auto path = knowledge::find_path(k, k.ax, k.ay, tx, ty);
    if (!path) return finish(Termination::Failure, "unreachable");
    auto [nx, ny] = path->front();
    Heading want = heading_for(nx - k.ax, ny - k.ay);
    if (k.heading != want) {
      int diff = (static_cast<int>(want) - static_cast<int>(k.heading)) & 3;
      world::PrimitiveAction a{diff == 3 ? Verb::RotateLeft : Verb::RotateRight};
      pose_and_map(k, do_prim(env, k, a));
      continue;  // re-check the budget before the next primitive
    }
    pose_and_map(k, do_prim(env, k, {Verb::MoveAhead}));
    // A failed move marked the faced cell blocked; the next lap replans.
  }
}

ControllerResult explore(Env& env, knowledge::KnowledgeState& k,
                         const ControllerConfig& cfg) {
  ControllerResult r;
  r.controller = "explore";
  const long start = env.s->steps;

  // One Dijkstra gives route costs to every stand-on candidate. Costs match
  // find_path so the chosen cell is reachable exactly when its cost is finite.
  const int W = k.width, H = k.height;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(W) * H, inf);
  using Qe = std::pair<double, int>;
  std::priority_queue<Qe, std::vector<Qe>, std::greater<>> q;
  dist[k.ay * W + k.ax] = 0.0;
  q.push({0.0, k.ay * W + k.ax});
  while (!q.empty()) {
    auto [d, idx] = q.top();
    q.pop();
    if (d > dist[idx] + 1e-9) continue;
    int x = idx % W, y = idx / W;
    constexpr int dx4[] = {0, 1, 0, -1}, dy4[] = {-1, 0, 1, 0};
    for (int i = 0; i < 4; ++i) {
      int nx2 = x + dx4[i], ny2 = y + dy4[i];
      if (nx2 < 0 || ny2 < 0 || nx2 >= W || ny2 >= H) continue;
      knowledge::Cell c = k.at(nx2, ny2);
      if (c == knowledge::Cell::Blocked) continue;
      double step = c == knowledge::Cell::Unknown ? knowledge::kUnknownCellCost : 1.0;
      if (d + step < dist[ny2 * W + nx2] - 1e-9) {
        dist[ny2 * W + nx2] = d + step;
        q.push({d + step, ny2 * W + nx2});
      }
    }
  }

  // Best (cell, heading) by unseen-frustum-count minus lambda * route cost.
  // Zero-novelty stops are never worth walking to, so they are not candidates.
  double best_score = -inf;
  int bx = -1, by = -1;
  Heading bh = Heading::N;
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (k.at(x, y) != knowledge::Cell::Free) continue;
      double d = dist[y * W + x];
      if (d == inf) continue;
      for (Heading h : {Heading::N, Heading::E, Heading::S, Heading::W}) {
        int novel = frustum_novelty(k, x, y, h, world::kDefaultRange);
        if (novel == 0) continue;
        double score = novel - cfg.explore_lambda * d;
        if (score > best_score + 1e-9) {
          best_score = score;
          bx = x;
          by = y;
          bh = h;
        }
      }
    }
  }
  if (bx < 0) {
    r.termination = Termination::Failure;
    r.reason = "exhausted";
    return r;
  }

  ControllerResult nav = navigate(env, k, bx, by, cfg);
  if (nav.termination != Termination::Success) {
    r.primitives = static_cast<int>(env.s->steps - start);
    r.termination = nav.termination;
    r.reason = nav.reason;
    return r;
  }
  rotate_to(env, k, bh, [] { return true; });  // at most two turns
  r.primitives = static_cast<int>(env.s->steps - start);
  r.termination = Termination::Success;
  return r;
}

ControllerResult scan(Env& env, knowledge::KnowledgeState& k,
                      const ControllerConfig&) {
  ControllerResult r;
  r.controller = "scan";
  const long start = env.s->steps;
  for (int range : world::kPitchRanges) {
    for (int i = 0; i < 4; ++i) {
      world::Observation obs = world::observe(*env.s, *env.noise, *env.rng, range);
      knowledge::integrate(k, obs);
      ++r.detector_runs;
      pose_and_map(k, do_prim(env, k, {Verb::RotateRight}));
    }
  }
  // 12 quarter turns: the entry heading is back
  r.primitives = static_cast<int>(env.s->steps - start);
  r.termination = Termination::Success;
  return r;
}

ControllerResult run_planner_controller(Env& env, knowledge::KnowledgeState& k,
                                        const knowledge::GoalSpec& g,
                                        const ControllerConfig& cfg) {
  ControllerResult r;
  r.controller = "planner";
  const long start = env.s->steps;
  auto used = [&] { return static_cast<int>(env.s->steps - start); };
  auto finish = [&](Termination t, std::string why = "") {
    r.primitives = used();
    r.termination = t;
    r.reason = std::move(why);
    return r;
  };

  int stalled = 0;
  std::string last_failed;  // ground action that failed in the previous lap

  while (true) {
    if (used() >= cfg.planner_budget)
      return finish(Termination::BudgetExhausted, "step budget");
    const int before = used();

    std::string text = knowledge::to_pddl_problem(k, g);
    pddl::Problem prob = pddl::parse_problem(text, shipped_domain(), "episode");
    pddl::GroundTask task = pddl::ground(shipped_domain(), prob);
    planner::PlanResult res = planner::plan(task, cfg.planner);
    ++r.replans;
    if (res.outcome == planner::Outcome::ProvedImpossible)
      return finish(Termination::Failure, "impossible");
    if (res.outcome == planner::Outcome::ResourceExhausted)
      return finish(Termination::Failure, "planner budget");
    if (res.plan.steps.empty()) {
      r.goal_believed = true;
      return finish(Termination::Success);
    }

    // Execute the first step only, then fold in what it revealed and replan.
    const pddl::GroundAction& a = task.actions[res.plan.steps[0]];
    if (a.schema == "GotoLocation") {
      auto cell = knowledge::parse_location_name(a.args[2]);
      if (!cell) return finish(Termination::Failure, "bad location " + a.args[2]);
      ControllerConfig sub = cfg;
      sub.navigate_budget =
          std::min(cfg.navigate_budget, cfg.planner_budget - used());
      navigate(env, k, cell->first, cell->second, sub);
      // Unreachable just means the map changed under the plan; replanning
      // with the learned cells either routes around or proves it impossible.
    } else {
      Verb verb;
      std::string entity, face_rec;
      if (a.schema == "OpenObject" || a.schema == "CloseObject") {
        verb = a.schema == "OpenObject" ? Verb::Open : Verb::Close;
        entity = face_rec = a.args[2];
      } else if (a.schema == "PickupObject") {
        verb = Verb::Pickup;
        entity = a.args[2];   // the object leaves by its own handle
        face_rec = a.args[3];  // but sits on its holder's cell
      } else if (a.schema == "PutObject") {
        verb = Verb::Put;
        entity = face_rec = a.args[4];
      } else {
        return finish(Termination::Failure, "unknown action " + a.schema);
      }

      const knowledge::TrackedReceptacle* rec =
          knowledge::receptacle_for_name(k, face_rec);
      if (!rec) return finish(Termination::Failure, "stale knowledge: " + face_rec);
      int wid;
      if (verb == Verb::Pickup) {
        const knowledge::TrackedObject* obj = knowledge::object_for_name(k, entity);
        wid = obj ? obj->world_id : -1;
      } else {
        wid = rec->world_id;
      }
      if (wid < 0) return finish(Termination::Failure, "stale knowledge: " + entity);

      // Interactions act on the faced cell: turn toward the believed box.
      Heading want = k.heading;
      bool adjacent = false;
      for (Heading h : {Heading::N, Heading::E, Heading::S, Heading::W}) {
        auto [dx, dy] = world::heading_delta(h);
        int fx = k.ax + dx, fy = k.ay + dy;
        if (fx >= rec->x0 && fx <= rec->x1 && fy >= rec->y0 && fy <= rec->y1) {
          want = h;
          adjacent = true;
          break;
        }
      }
      if (!adjacent) return finish(Termination::Failure, "not adjacent: " + face_rec);
      if (!rotate_to(env, k, want,
                     [&] { return used() < cfg.planner_budget; }))
        return finish(Termination::BudgetExhausted, "step budget");

      world::Observation obs = do_prim(env, k, {verb, wid});
      knowledge::integrate(k, obs);

      // The same interaction failing twice in a row will not fix itself by
      // replanning: the beliefs behind it are wrong. Hand control back.
      std::string signature = a.display();
      if (!obs.success) {
        if (signature == last_failed)
          return finish(Termination::Failure, "actuation stuck: " + signature);
        last_failed = signature;
      } else {
        last_failed.clear();
      }
    }

    if (used() == before) {
      if (++stalled >= 3) return finish(Termination::Failure, "stalled");
    } else {
      stalled = 0;
    }
  }
}

ControllerResult stop_and_answer(const knowledge::KnowledgeState& k,
                                 const world::TaskSpec& task) {
  ControllerResult r;
  r.controller = "stopper";
  switch (task.kind) {
    case world::TaskKind::IqaExistence:
      r.answer = k.count_class(task.subject) > 0 ? "yes" : "no";
      break;
    case world::TaskKind::IqaCounting:
      r.answer = std::to_string(k.count_class(task.subject));
      break;
    case world::TaskKind::IqaContainment: {
      bool yes = false;
      for (const auto& o : k.objects) {
        if (o.cls != task.subject || o.container < 0) continue;
        const knowledge::TrackedReceptacle* rec = k.receptacle_by_id(o.container);
        if (rec && rec->cls == task.target_class) {
          yes = true;
          break;
        }
      }
      r.answer = yes ? "yes" : "no";
      break;
    }
    case world::TaskKind::VspPutIn:
      break;  // instruction episodes end silently; the world grades them
  }
  return r;
}

}  // namespace hiprl::controllers
