#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "hiprl/grid.hpp"

namespace hiprl {

// Route planning over a partially known occupancy grid. Search states are
// (cell, heading) pairs and moves are the agent's primitives, so path costs
// line up with primitive step counts. Moving into an unknown cell is allowed
// but charged a multiplier, which makes routes prefer known-free space without
// forbidding optimistic shortcuts.

enum class Passability : std::uint8_t { Free, Unknown, Blocked };

enum class NavMove : std::uint8_t { Forward, TurnLeft, TurnRight };

constexpr double kUnknownCellCost = 3.0;
constexpr double kNavInfinity = std::numeric_limits<double>::infinity();

struct NavResult {
  bool reached = false;
  std::vector<NavMove> moves;
  double cost = 0.0;
  Cell end{};
  Heading end_heading = Heading::North;
};

namespace detail {
inline int nav_id(int w, Cell c, Heading h) {
  return (c.y * w + c.x) * 4 + static_cast<int>(h);
}
}  // namespace detail

/// A* from (start, heading) to the first state whose cell satisfies `goal`.
/// `pass` classifies cells; Blocked cells are impassable. `hint` is an
/// admissible cost lower bound per cell (pass {} for Dijkstra behaviour).
/// Deterministic: ties broken by insertion order.
inline NavResult plan_route(int width, int height,
                            const std::function<Passability(Cell)>& pass,
                            Cell start, Heading start_heading,
                            const std::function<bool(Cell)>& goal,
                            const std::function<double(Cell)>& hint = {},
                            double unknown_cost = kUnknownCellCost) {
  struct Entry {
    double f;
    std::uint64_t seq;
    int state;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      return seq > o.seq;
    }
  };

  const int n = width * height * 4;
  std::vector<double> dist(n, kNavInfinity);
  std::vector<int> parent(n, -1);
  std::vector<std::int8_t> parent_move(n, -1);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::uint64_t seq = 0;

  auto in_bounds = [&](Cell c) {
    return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
  };

  NavResult res;
  if (!in_bounds(start)) return res;

  int s0 = detail::nav_id(width, start, start_heading);
  dist[s0] = 0.0;
  open.push({hint ? hint(start) : 0.0, seq++, s0});

  while (!open.empty()) {
    Entry e = open.top();
    open.pop();
    int id = e.state;
    Cell c{(id / 4) % width, id / 4 / width};
    Heading h = static_cast<Heading>(id % 4);
    double g = dist[id];
    if (e.f > g + (hint ? hint(c) : 0.0) + 1e-12) continue;

    if (goal(c)) {
      res.reached = true;
      res.cost = g;
      res.end = c;
      res.end_heading = h;
      std::vector<NavMove> rev;
      int cur = id;
      while (parent[cur] >= 0) {
        rev.push_back(static_cast<NavMove>(parent_move[cur]));
        cur = parent[cur];
      }
      res.moves.assign(rev.rbegin(), rev.rend());
      return res;
    }

    auto relax = [&](int to, double cost, NavMove m) {
      if (g + cost < dist[to] - 1e-12) {
        dist[to] = g + cost;
        parent[to] = id;
        parent_move[to] = static_cast<std::int8_t>(m);
        Cell tc{(to / 4) % width, to / 4 / width};
        open.push({dist[to] + (hint ? hint(tc) : 0.0), seq++, to});
      }
    };

    Cell ahead = cell_ahead(c, h);
    if (in_bounds(ahead)) {
      Passability p = pass(ahead);
      if (p != Passability::Blocked) {
        double move_cost = (p == Passability::Unknown) ? unknown_cost : 1.0;
        relax(detail::nav_id(width, ahead, h), move_cost, NavMove::Forward);
      }
    }
    relax(detail::nav_id(width, c, turn_left(h)), 1.0, NavMove::TurnLeft);
    relax(detail::nav_id(width, c, turn_right(h)), 1.0, NavMove::TurnRight);
  }
  return res;
}

/// Minimal primitive cost from (start, heading) to every (cell, heading).
/// Indexed as (y * width + x) * 4 + heading; unreachable entries are infinite.
inline std::vector<double> route_costs(int width, int height,
                                       const std::function<Passability(Cell)>& pass,
                                       Cell start, Heading start_heading,
                                       double unknown_cost = kUnknownCellCost) {
  struct Entry {
    double d;
    std::uint64_t seq;
    int state;
    bool operator>(const Entry& o) const {
      if (d != o.d) return d > o.d;
      return seq > o.seq;
    }
  };
  const int n = width * height * 4;
  std::vector<double> dist(n, kNavInfinity);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::uint64_t seq = 0;
  auto in_bounds = [&](Cell c) {
    return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
  };
  if (!in_bounds(start)) return dist;
  int s0 = detail::nav_id(width, start, start_heading);
  dist[s0] = 0.0;
  open.push({0.0, seq++, s0});
  while (!open.empty()) {
    Entry e = open.top();
    open.pop();
    int id = e.state;
    if (e.d > dist[id] + 1e-12) continue;
    Cell c{(id / 4) % width, id / 4 / width};
    Heading h = static_cast<Heading>(id % 4);
    auto relax = [&](int to, double cost) {
      if (e.d + cost < dist[to] - 1e-12) {
        dist[to] = e.d + cost;
        open.push({dist[to], seq++, to});
      }
    };
    Cell ahead = cell_ahead(c, h);
    if (in_bounds(ahead)) {
      Passability p = pass(ahead);
      if (p != Passability::Blocked) {
        double move_cost = (p == Passability::Unknown) ? unknown_cost : 1.0;
        relax(detail::nav_id(width, ahead, h), move_cost);
      }
    }
    relax(detail::nav_id(width, c, turn_left(h)), 1.0);
    relax(detail::nav_id(width, c, turn_right(h)), 1.0);
  }
  return dist;
}

/// Cheapest traversal cost between two cells ignoring headings: moving into a
/// free cell costs 1, into an unknown cell `unknown_cost`. Used for the
/// distance estimates written into planning problems.
inline std::vector<double> cell_costs_from(int width, int height,
                                           const std::function<Passability(Cell)>& pass,
                                           Cell source,
                                           double unknown_cost = kUnknownCellCost) {
  struct Entry {
    double d;
    std::uint64_t seq;
    int cell;
    bool operator>(const Entry& o) const {
      if (d != o.d) return d > o.d;
      return seq > o.seq;
    }
  };
  const int n = width * height;
  std::vector<double> dist(n, kNavInfinity);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::uint64_t seq = 0;
  auto idx = [&](Cell c) { return c.y * width + c.x; };
  auto in_bounds = [&](Cell c) {
    return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height;
  };
  if (!in_bounds(source)) return dist;
  dist[idx(source)] = 0.0;
  open.push({0.0, seq++, idx(source)});
  while (!open.empty()) {
    Entry e = open.top();
    open.pop();
    Cell c{e.cell % width, e.cell / width};
    if (e.d > dist[e.cell] + 1e-12) continue;
    for (Heading h : {Heading::North, Heading::East, Heading::South, Heading::West}) {
      Cell nxt = cell_ahead(c, h);
      if (!in_bounds(nxt)) continue;
      Passability p = pass(nxt);
      if (p == Passability::Blocked) continue;
      double step = (p == Passability::Unknown) ? unknown_cost : 1.0;
      if (e.d + step < dist[idx(nxt)] - 1e-12) {
        dist[idx(nxt)] = e.d + step;
        open.push({dist[idx(nxt)], seq++, idx(nxt)});
      }
    }
  }
  return dist;
}

}  // namespace hiprl
