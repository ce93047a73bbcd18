#include "hiprl/planner/planner.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_set>

namespace hiprl::planner {

using pddl::FluentSet;
using pddl::FluentSetHash;
using pddl::GroundFormula;

namespace {

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct StopWatch {
  double start = now_seconds();
  double limit;  // <= 0: disabled
  explicit StopWatch(double l) : limit(l) {}
  bool expired() const { return limit > 0 && now_seconds() - start > limit; }
  double elapsed() const { return now_seconds() - start; }
};

}  // namespace

Evaluator::Evaluator(const GroundTask& task) : task_(&task) {
  for (std::size_t ai = 0; ai < task.actions.size(); ++ai) {
    const auto& a = task.actions[ai];
    if (!a.add.empty()) {
      rules_.push_back({static_cast<int>(ai), a.precondition, a.add});
    }
    for (const auto& ce : a.cond_effects) {
      if (ce.add.empty()) continue;  // pure deletes are invisible when relaxed
      std::vector<int> pre = a.precondition;
      pre.insert(pre.end(), ce.condition.begin(), ce.condition.end());
      std::sort(pre.begin(), pre.end());
      pre.erase(std::unique(pre.begin(), pre.end()), pre.end());
      rules_.push_back({static_cast<int>(ai), std::move(pre), ce.add});
    }
  }
  rules_by_pre_.resize(task.num_fluents());
  adders_by_fluent_.resize(task.num_fluents());
  for (std::size_t ri = 0; ri < rules_.size(); ++ri) {
    if (rules_[ri].pre.empty()) {
      rules_with_empty_pre_.push_back(static_cast<int>(ri));
    } else {
      for (int f : rules_[ri].pre) rules_by_pre_[f].push_back(static_cast<int>(ri));
    }
    for (int f : rules_[ri].add) adders_by_fluent_[f].push_back(static_cast<int>(ri));
  }
}

int Evaluator::formula_level(const GroundFormula& f,
                             const std::vector<int>& fact_level) const {
  switch (f.kind) {
    case GroundFormula::Kind::True:
      return 0;
    case GroundFormula::Kind::False:
      return kHInfinity;
    case GroundFormula::Kind::Lit:
      return fact_level[f.fluent] < 0 ? kHInfinity : fact_level[f.fluent];
    case GroundFormula::Kind::Not:
      throw pddl::PddlError("internal: Not in grounded goal");
    case GroundFormula::Kind::And: {
      int m = 0;
      for (const auto& c : f.children) {
        int l = formula_level(c, fact_level);
        if (l == kHInfinity) return kHInfinity;
        m = std::max(m, l);
      }
      return m;
    }
    case GroundFormula::Kind::Or: {
      int m = kHInfinity;
      for (const auto& c : f.children)
        m = std::min(m, formula_level(c, fact_level));
      return m;
    }
  }
  return kHInfinity;
}

void Evaluator::select_goal_facts(const GroundFormula& f,
                                  const std::vector<int>& fact_level,
                                  std::vector<int>& out) const {
  switch (f.kind) {
    case GroundFormula::Kind::True:
      return;
    case GroundFormula::Kind::Lit:
      out.push_back(f.fluent);
      return;
    case GroundFormula::Kind::And:
      for (const auto& c : f.children) select_goal_facts(c, fact_level, out);
      return;
    case GroundFormula::Kind::Or: {
      // commit to the earliest-reachable disjunct; first one wins ties
      const GroundFormula* best = nullptr;
      int best_level = kHInfinity;
      for (const auto& c : f.children) {
        int l = formula_level(c, fact_level);
        if (l < best_level) {
          best_level = l;
          best = &c;
        }
      }
      if (best) select_goal_facts(*best, fact_level, out);
      return;
    }
    default:
      throw pddl::PddlError("internal: bad node in grounded goal");
  }
}

Rpg Evaluator::build_rpg(const State& s) const {
  const GroundTask& t = *task_;
  Rpg g;
  g.fact_level.assign(t.num_fluents(), -1);
  g.rule_level.assign(rules_.size(), -1);

  std::vector<int> unsat(rules_.size());
  for (std::size_t r = 0; r < rules_.size(); ++r)
    unsat[r] = static_cast<int>(rules_[r].pre.size());

  std::vector<int> current;
  for (int f = 0; f < t.num_fluents(); ++f) {
    if (s.fluents.test(f)) {
      g.fact_level[f] = 0;
      current.push_back(f);
    }
  }

  int level = 0;
  std::vector<int> fired = rules_with_empty_pre_;
  while (true) {
    if (holds_at(t.goal, g.fact_level)) {
      g.goal_level = level;
      g.levels = level + 1;
      return g;
    }
    for (int f : current) {
      for (int r : rules_by_pre_[f]) {
        if (--unsat[r] == 0) fired.push_back(r);
      }
    }
    std::vector<int> next;
    for (int r : fired) {
      g.rule_level[r] = level;
      for (int f : rules_[r].add) {
        if (g.fact_level[f] < 0) {
          g.fact_level[f] = level + 1;
          next.push_back(f);
        }
      }
    }
    fired.clear();
    if (next.empty()) {
      g.goal_level = -1;
      g.levels = level + 1;
      return g;
    }
    current = std::move(next);
    ++level;
  }
}

bool Evaluator::holds_at(const GroundFormula& f, const std::vector<int>& fact_level) {
  switch (f.kind) {
    case GroundFormula::Kind::True:
      return true;
    case GroundFormula::Kind::False:
      return false;
    case GroundFormula::Kind::Lit:
      return fact_level[f.fluent] >= 0;
    case GroundFormula::Kind::Not:
      return !holds_at(f.children.front(), fact_level);
    case GroundFormula::Kind::And:
      for (const auto& c : f.children)
        if (!holds_at(c, fact_level)) return false;
      return true;
    case GroundFormula::Kind::Or:
      for (const auto& c : f.children)
        if (holds_at(c, fact_level)) return true;
      return false;
  }
  return false;
}

HeuristicResult Evaluator::evaluate(const State& s) const {
  const GroundTask& t = *task_;
  Rpg g = build_rpg(s);
  HeuristicResult out;
  if (g.goal_level < 0) return out;  // h stays infinite
  out.h = 0;
  if (g.goal_level == 0) return out;

  // per-level required facts, seeded by goal selection
  std::vector<std::set<int>> need(g.goal_level + 1);
  std::vector<int> goal_facts;
  select_goal_facts(t.goal, g.fact_level, goal_facts);
  for (int f : goal_facts) {
    int l = g.fact_level[f];
    if (l >= 1) need[l].insert(f);
  }

  out.relaxed_plan.assign(g.goal_level, {});
  std::vector<std::set<int>> chosen(g.goal_level);  // per layer, action set
  for (int level = g.goal_level; level >= 1; --level) {
    for (int f : need[level]) {
      // achievers of f necessarily fired exactly at level-1
      int best_rule = -1;
      for (int r : adders_by_fluent_[f]) {
        if (g.rule_level[r] != level - 1) continue;
        if (best_rule < 0) {
          best_rule = r;
          continue;
        }
        const auto& cand = t.actions[rules_[r].action];
        const auto& cur = t.actions[rules_[best_rule].action];
        if (cand.cost < cur.cost ||
            (cand.cost == cur.cost && rules_[r].action < rules_[best_rule].action))
          best_rule = r;
      }
      if (best_rule < 0) continue;  // unreachable under selection; defensive
      if (chosen[level - 1].insert(rules_[best_rule].action).second)
        out.relaxed_plan[level - 1].push_back(rules_[best_rule].action);
      for (int p : rules_[best_rule].pre) {
        int pl = g.fact_level[p];
        if (pl >= 1) need[pl].insert(p);
      }
    }
  }
  for (auto& layer : out.relaxed_plan) {
    std::sort(layer.begin(), layer.end());
    out.h += static_cast<int>(layer.size());
  }

  // helpful: rules fully satisfied now whose adds intersect the layer-1 needs
  std::set<int> helpful;
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    if (g.rule_level[r] != 0) continue;
    for (int f : rules_[r].add) {
      if (need[1].count(f)) {
        helpful.insert(rules_[r].action);
        break;
      }
    }
  }
  out.helpful.assign(helpful.begin(), helpful.end());
  return out;
}

Validation validate(const GroundTask& task, const std::vector<int>& steps) {
  Validation v;
  State s = task.init;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& a = task.actions.at(steps[i]);
    try {
      s = pddl::apply(task, s, a);
    } catch (const pddl::PddlError& e) {
      v.cost = s.total_cost - task.init.total_cost;
      v.violation = "step " + std::to_string(i) + ": " + e.what();
      return v;
    }
  }
  v.cost = s.total_cost - task.init.total_cost;
  if (!pddl::holds(s, task.goal)) {
    v.violation = "goal not satisfied after final step";
    return v;
  }
  v.valid = true;
  return v;
}

namespace {

struct Node {
  State s;
  int parent;
  int via;  // action index taken to reach this node
};

std::vector<int> chain(const std::vector<Node>& arena, int i) {
  std::vector<int> steps;
  for (; i >= 0 && arena[i].via >= 0; i = arena[i].parent) steps.push_back(arena[i].via);
  std::reverse(steps.begin(), steps.end());
  return steps;
}

double plan_cost(const GroundTask& task, const std::vector<int>& steps) {
  double c = 0.0;
  for (int i : steps) c += task.actions[i].cost;
  return c;
}

}  // namespace

PlanResult enforced_hill_climb(const GroundTask& task, const PlannerConfig& cfg) {
  PlanResult res;
  StopWatch watch(cfg.time_budget);
  Evaluator ev(task);

  State cur = task.init;
  ++res.stats.heuristic_evals;
  HeuristicResult cur_hr = ev.evaluate(cur);
  if (cur_hr.h == kHInfinity) {
    res.outcome = Outcome::ProvedImpossible;
    res.stats.impossible_by_relaxation = true;
    res.stats.wall_seconds = watch.elapsed();
    return res;
  }
  std::vector<int> steps;
  int h = cur_hr.h;

  while (h > 0) {
    // breadth-first burst over helpful actions until h strictly improves
    std::vector<Node> arena{{cur, -1, -1}};
    std::vector<HeuristicResult> hr{cur_hr};
    std::unordered_set<FluentSet, FluentSetHash> visited{cur.fluents};
    std::deque<int> queue{0};
    bool improved = false;

    while (!queue.empty() && !improved) {
      int ni = queue.front();
      queue.pop_front();
      ++res.stats.expanded;
      if (watch.expired()) {
        res.outcome = Outcome::ResourceExhausted;
        res.stats.hit_time_budget = true;
        res.stats.wall_seconds = watch.elapsed();
        return res;
      }
      for (int act : hr[ni].helpful) {
        State child = pddl::apply(task, arena[ni].s, task.actions[act]);
        if (!visited.insert(child.fluents).second) continue;
        ++res.stats.generated;
        ++res.stats.heuristic_evals;
        HeuristicResult child_hr = ev.evaluate(child);
        if (child_hr.h == kHInfinity) continue;  // relaxed-provable dead end
        if (child_hr.h < h) {
          for (int s2 : chain(arena, ni)) steps.push_back(s2);
          steps.push_back(act);
          cur = std::move(child);
          cur_hr = std::move(child_hr);
          h = cur_hr.h;
          ++res.stats.plateaus_escaped;
          improved = true;
          break;
        }
        if (static_cast<int>(arena.size()) >= cfg.plateau_budget) {
          res.outcome = Outcome::ResourceExhausted;
          res.stats.wall_seconds = watch.elapsed();
          return res;
        }
        arena.push_back({std::move(child), ni, act});
        hr.push_back(std::move(child_hr));
        queue.push_back(static_cast<int>(arena.size()) - 1);
      }
    }
    if (!improved) {
      res.outcome = Outcome::ResourceExhausted;  // plateau with no way down
      res.stats.wall_seconds = watch.elapsed();
      return res;
    }
  }

  res.outcome = Outcome::Found;
  res.plan.steps = std::move(steps);
  res.plan.cost = plan_cost(task, res.plan.steps);
  res.stats.wall_seconds = watch.elapsed();
  return res;
}

PlanResult greedy_best_first(const GroundTask& task, const PlannerConfig& cfg) {
  PlanResult res;
  StopWatch watch(cfg.time_budget);
  Evaluator ev(task);

  ++res.stats.heuristic_evals;
  HeuristicResult init_hr = ev.evaluate(task.init);
  if (init_hr.h == kHInfinity) {
    res.outcome = Outcome::ProvedImpossible;
    res.stats.impossible_by_relaxation = true;
    res.stats.wall_seconds = watch.elapsed();
    return res;
  }
  if (init_hr.h == 0) {
    res.outcome = Outcome::Found;
    res.stats.wall_seconds = watch.elapsed();
    return res;
  }

  std::vector<Node> arena{{task.init, -1, -1}};
  // (h, insertion sequence, node): FIFO among equal heuristic values
  using Entry = std::tuple<int, std::int64_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::unordered_set<FluentSet, FluentSetHash> seen{task.init.fluents};
  std::int64_t seq = 0;
  open.emplace(init_hr.h, seq++, 0);

  while (!open.empty()) {
    auto [h, tie, ni] = open.top();
    (void)h;
    (void)tie;
    open.pop();
    ++res.stats.expanded;
    if (res.stats.expanded > cfg.node_budget) {
      res.outcome = Outcome::ResourceExhausted;
      res.stats.wall_seconds = watch.elapsed();
      return res;
    }
    if (watch.expired()) {
      res.outcome = Outcome::ResourceExhausted;
      res.stats.hit_time_budget = true;
      res.stats.wall_seconds = watch.elapsed();
      return res;
    }
    for (std::size_t act = 0; act < task.actions.size(); ++act) {
      if (!pddl::applicable(arena[ni].s, task.actions[act])) continue;
      State child = pddl::apply(task, arena[ni].s, task.actions[act]);
      if (!seen.insert(child.fluents).second) continue;
      ++res.stats.generated;
      ++res.stats.heuristic_evals;
      HeuristicResult child_hr = ev.evaluate(child);
      if (child_hr.h == 0) {
        res.outcome = Outcome::Found;
        res.plan.steps = chain(arena, ni);
        res.plan.steps.push_back(static_cast<int>(act));
        res.plan.cost = plan_cost(task, res.plan.steps);
        res.stats.wall_seconds = watch.elapsed();
        return res;
      }
      if (child_hr.h == kHInfinity) continue;  // sound prune: relaxed-unreachable
      arena.push_back({std::move(child), ni, static_cast<int>(act)});
      open.emplace(child_hr.h, seq++, static_cast<int>(arena.size()) - 1);
    }
  }
  // the open list ran dry with every reachable state enumerated: the goal is
  // genuinely unreachable, not merely hard
  res.outcome = Outcome::ProvedImpossible;
  res.stats.impossible_by_exhaustion = true;
  res.stats.wall_seconds = watch.elapsed();
  return res;
}

PlanResult plan(const GroundTask& task, const PlannerConfig& cfg) {
  if (cfg.ehc_enabled) {
    PlanResult ehc = enforced_hill_climb(task, cfg);
    if (ehc.outcome != Outcome::ResourceExhausted) return ehc;
    PlanResult gb = greedy_best_first(task, cfg);
    gb.stats.used_gbfs = true;
    gb.stats.heuristic_evals += ehc.stats.heuristic_evals;
    gb.stats.expanded += ehc.stats.expanded;
    gb.stats.generated += ehc.stats.generated;
    gb.stats.plateaus_escaped = ehc.stats.plateaus_escaped;
    gb.stats.wall_seconds += ehc.stats.wall_seconds;
    return gb;
  }
  PlanResult gb = greedy_best_first(task, cfg);
  gb.stats.used_gbfs = true;
  return gb;
}

std::string format_plan(const GroundTask& task, const PlanResult& r) {
  std::ostringstream os;
  switch (r.outcome) {
    case Outcome::Found: {
      for (int i : r.plan.steps) os << task.actions[i].display() << "\n";
      os << "; cost " << r.plan.cost << "\n";
      break;
    }
    case Outcome::ProvedImpossible:
      os << "; impossible ("
         << (r.stats.impossible_by_relaxation ? "relaxed fixpoint excludes goal"
                                              : "search space exhausted")
         << ")\n";
      break;
    case Outcome::ResourceExhausted:
      os << "; no plan found within budget\n";
      break;
  }
  os << "; expanded " << r.stats.expanded << " generated " << r.stats.generated
     << " evals " << r.stats.heuristic_evals
     << (r.stats.used_gbfs ? " via gbfs" : " via ehc") << "\n";
  return os.str();
}

}  // namespace hiprl::planner
