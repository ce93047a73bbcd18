#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

namespace hiprl {

// y grows downward; (0,0) is the top-left corner when a grid is rendered.
struct Cell {
  int x = 0;
  int y = 0;

  bool operator==(const Cell&) const = default;
  // Row-major order: used wherever a deterministic tie-break over cells is
  // needed.
  auto operator<=>(const Cell& o) const {
    if (auto c = y <=> o.y; c != 0) return c;
    return x <=> o.x;
  }
};

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    return static_cast<std::size_t>(c.x) * 0x9e3779b97f4a7c15ull + c.y;
  }
};

enum class Heading : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline const char* heading_name(Heading h) {
  switch (h) {
    case Heading::North: return "north";
    case Heading::East: return "east";
    case Heading::South: return "south";
    case Heading::West: return "west";
  }
  return "?";
}

inline Cell heading_delta(Heading h) {
  switch (h) {
    case Heading::North: return {0, -1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, 1};
    case Heading::West: return {-1, 0};
  }
  return {0, 0};
}

inline Heading turn_left(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}

inline Heading turn_right(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}

inline Cell cell_ahead(Cell c, Heading h) {
  Cell d = heading_delta(h);
  return {c.x + d.x, c.y + d.y};
}

inline int manhattan(Cell a, Cell b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

inline bool adjacent4(Cell a, Cell b) { return manhattan(a, b) == 1; }

// Inclusive cell-aligned box.
struct Box {
  Cell lo;
  Cell hi;

  bool operator==(const Box&) const = default;

  static Box single(Cell c) { return {c, c}; }
  long long area() const {
    return static_cast<long long>(hi.x - lo.x + 1) * (hi.y - lo.y + 1);
  }
  bool contains(Cell c) const {
    return c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y;
  }
};

inline long long intersection_area(const Box& a, const Box& b) {
  long long w = std::min(a.hi.x, b.hi.x) - std::max(a.lo.x, b.lo.x) + 1;
  long long h = std::min(a.hi.y, b.hi.y) - std::max(a.lo.y, b.lo.y) + 1;
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

inline double iou(const Box& a, const Box& b) {
  long long inter = intersection_area(a, b);
  long long uni = a.area() + b.area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline Box union_box(const Box& a, const Box& b) {
  return {{std::min(a.lo.x, b.lo.x), std::min(a.lo.y, b.lo.y)},
          {std::max(a.hi.x, b.hi.x), std::max(a.hi.y, b.hi.y)}};
}

// Integer division rounded to nearest, halves away from zero. Keeps the line
// walk below free of floating point.
inline int div_round_nearest(long long num, long long den) {
  long long q = (num >= 0) ? (2 * num + den) / (2 * den) : -((2 * -num + den) / (2 * den));
  return static_cast<int>(q);
}

/// Cells strictly between a and b on the discretized segment, in order of
/// increasing distance from a.
inline std::vector<Cell> line_between(Cell a, Cell b) {
  std::vector<Cell> out;
  int dx = b.x - a.x, dy = b.y - a.y;
  int n = std::max(std::abs(dx), std::abs(dy));
  for (int i = 1; i < n; ++i) {
    Cell c{a.x + div_round_nearest(static_cast<long long>(i) * dx, n),
           a.y + div_round_nearest(static_cast<long long>(i) * dy, n)};
    if (c == a || c == b) continue;
    if (out.empty() || !(out.back() == c)) out.push_back(c);
  }
  return out;
}

// Field of view: a 90 degree wedge in front of the agent. At forward distance
// f the wedge spans lateral offsets -f..f. A cell is visible when every cell
// strictly between the agent and it is transparent; opaque cells are visible
// themselves but hide what is behind them.
//
// `opaque(cell)` must return true for sight blockers (walls, receptacles).
// Out-of-bounds handling is the caller's: `in_bounds` filters candidates.
struct FieldOfView {
  int range = 5;

  template <class InBounds, class Opaque>
  std::vector<Cell> visible(Cell origin, Heading h, InBounds&& in_bounds,
                            Opaque&& opaque) const {
    std::vector<Cell> out;
    out.push_back(origin);
    Cell fwd = heading_delta(h);
    Cell right{-fwd.y, fwd.x};
    for (int f = 1; f <= range; ++f) {
      for (int l = -f; l <= f; ++l) {
        Cell c{origin.x + f * fwd.x + l * right.x,
               origin.y + f * fwd.y + l * right.y};
        if (!in_bounds(c)) continue;
        bool blocked = false;
        for (const Cell& mid : line_between(origin, c)) {
          if (opaque(mid)) {
            blocked = true;
            break;
          }
        }
        if (!blocked) out.push_back(c);
      }
    }
    return out;
  }
};

}  // namespace hiprl
