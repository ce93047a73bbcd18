#include "hiprl/world/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace hiprl::world {

Heading turn_left(Heading h) {
  switch (h) {
    case Heading::N: return Heading::W;
    case Heading::W: return Heading::S;
    case Heading::S: return Heading::E;
    case Heading::E: return Heading::N;
  }
  return Heading::N;
}

Heading turn_right(Heading h) { return turn_left(turn_left(turn_left(h))); }

std::pair<int, int> heading_delta(Heading h) {
  switch (h) {
    case Heading::N: return {0, -1};
    case Heading::E: return {1, 0};
    case Heading::S: return {0, 1};
    case Heading::W: return {-1, 0};
  }
  return {0, 0};
}

char heading_char(Heading h) {
  switch (h) {
    case Heading::N: return 'N';
    case Heading::E: return 'E';
    case Heading::S: return 'S';
    case Heading::W: return 'W';
  }
  return '?';
}

Heading heading_from_char(char c) {
  switch (c) {
    case 'N': return Heading::N;
    case 'E': return Heading::E;
    case 'S': return Heading::S;
    case 'W': return Heading::W;
  }
  throw std::runtime_error(std::string("bad heading '") + c + "'");
}

std::string primitive_name(const PrimitiveAction& a) {
  switch (a.verb) {
    case Verb::MoveAhead: return "MoveAhead";
    case Verb::RotateLeft: return "RotateLeft";
    case Verb::RotateRight: return "RotateRight";
    case Verb::Open: return "Open(" + std::to_string(a.target) + ")";
    case Verb::Close: return "Close(" + std::to_string(a.target) + ")";
    case Verb::Pickup: return "Pickup(" + std::to_string(a.target) + ")";
    case Verb::Put: return "Put(" + std::to_string(a.target) + ")";
  }
  return "?";
}

int WorldState::occupancy(int receptacle_id) const {
  int n = 0;
  for (int c : container) n += c == receptacle_id;
  return n;
}

std::pair<int, int> WorldState::object_cell(int object_id) const {
  if (held == object_id) return {-1, -1};
  int c = container[object_id];
  if (c >= 0) {
    const auto& r = scene->receptacles[c];
    return {r.x, r.y};
  }
  return floor_cell[object_id];
}

bool WorldState::any_open() const {
  for (char o : open)
    if (o) return true;
  return false;
}

std::pair<int, int> WorldState::faced_cell() const {
  auto [dx, dy] = heading_delta(heading);
  return {ax + dx, ay + dy};
}

WorldState init_state(const Scene& scene, int x, int y, Heading h) {
  if (scene.blocked(x, y))
    throw std::runtime_error("agent start cell is blocked");
  WorldState s;
  s.scene = &scene;
  s.open.reserve(scene.receptacles.size());
  for (const auto& r : scene.receptacles) s.open.push_back(r.open ? 1 : 0);
  s.container.reserve(scene.objects.size());
  s.floor_cell.reserve(scene.objects.size());
  for (const auto& o : scene.objects) {
    s.container.push_back(o.in_receptacle);
    s.floor_cell.push_back({o.x, o.y});
  }
  s.ax = x;
  s.ay = y;
  s.heading = h;
  return s;
}

namespace {

// Integer line of sight: walk the segment midpoint-to-midpoint; every strictly
// intermediate cell must be transparent (floor without a receptacle).
bool line_of_sight(const Scene& sc, int x0, int y0, int x1, int y1) {
  int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
  int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx - dy, x = x0, y = y0;
  while (true) {
    if (!(x == x0 && y == y0) && !(x == x1 && y == y1)) {
      if (sc.wall(x, y) || sc.receptacle_at(x, y) >= 0) return false;
    }
    if (x == x1 && y == y1) return true;
    int e2 = 2 * err;
    if (e2 > -dy) {
      err -= dy;
      x += sx;
    }
    if (e2 < dx) {
      err += dx;
      y += sy;
    }
  }
}

}  // namespace

std::vector<char> visible_cells(const WorldState& s, int range) {
  const Scene& sc = *s.scene;
  std::vector<char> mask(sc.width * sc.height, 0);
  auto [fx, fy] = heading_delta(s.heading);
  for (int y = 0; y < sc.height; ++y) {
    for (int x = 0; x < sc.width; ++x) {
      int dx = x - s.ax, dy = y - s.ay;
      // project on the heading: ahead in [1, range], spread at most as wide
      int ahead = dx * fx + dy * fy;
      int side = std::abs(dx * fy - dy * fx);
      if (ahead < 1 || ahead > range || side > ahead) continue;
      if (line_of_sight(sc, s.ax, s.ay, x, y))
        mask[y * sc.width + x] = sc.blocked(x, y) ? kSeenBlocked : kSeenFree;
    }
  }
  return mask;
}

std::vector<Detection> detect(const WorldState& s, const std::vector<char>& visible,
                              const NoiseModel& noise, Rng& rng, int* draws) {
  const Scene& sc = *s.scene;
  std::vector<Detection> out;
  int used = 0;
  auto vis = [&](int x, int y) { return visible[y * sc.width + x] != 0; };

  auto emit = [&](std::string cls, int x, int y, int id, bool receptacle) {
    if (!noise.is_ground_truth()) {
      ++used;
      if (rng.bernoulli(noise.miss)) return;
      ++used;
      if (rng.bernoulli(noise.confusion)) {
        const auto& pool = receptacle ? receptacle_classes() : object_classes();
        ++used;
        cls = pool[rng.uniform_int(pool.size())];
      }
      if (noise.jitter > 0) {
        used += 2;
        x += rng.uniform_range(-noise.jitter, noise.jitter);
        y += rng.uniform_range(-noise.jitter, noise.jitter);
        x = std::max(0, std::min(sc.width - 1, x));
        y = std::max(0, std::min(sc.height - 1, y));
      }
    }
    out.push_back({std::move(cls), x, y, x, y, id, receptacle});
  };

  for (const auto& r : sc.receptacles)
    if (vis(r.x, r.y)) emit(r.cls, r.x, r.y, r.id, true);
  for (std::size_t oid = 0; oid < sc.objects.size(); ++oid) {
    if (static_cast<int>(oid) == s.held) continue;  // in hand, not in view
    auto [x, y] = s.object_cell(static_cast<int>(oid));
    if (!vis(x, y)) continue;
    int c = s.container[oid];
    if (c >= 0 && sc.receptacles[c].openable && !s.open[c]) continue;  // enclosed
    emit(sc.objects[oid].cls, x, y, static_cast<int>(oid), false);
  }

  if (!noise.is_ground_truth()) {
    ++used;
    if (rng.bernoulli(noise.false_positive)) {
      std::vector<std::pair<int, int>> floor;
      for (int y = 0; y < sc.height; ++y)
        for (int x = 0; x < sc.width; ++x)
          if (vis(x, y) && !sc.blocked(x, y)) floor.push_back({x, y});
      if (!floor.empty()) {
        used += 2;
        auto [x, y] = floor[rng.uniform_int(floor.size())];
        const auto& pool = object_classes();
        out.push_back({pool[rng.uniform_int(pool.size())], x, y, x, y, -1, false});
      }
    }
  }
  if (draws) *draws = used;
  return out;
}

Observation observe(const WorldState& s, const NoiseModel& noise, Rng& rng,
                    int range) {
  Observation obs;
  obs.ax = s.ax;
  obs.ay = s.ay;
  obs.heading = s.heading;
  obs.range = range;
  obs.visible = visible_cells(s, range);
  obs.detections = detect(s, obs.visible, noise, rng, &obs.noise_draws);
  return obs;
}

Observation step(WorldState& s, const PrimitiveAction& a, const NoiseModel& noise,
                 Rng& rng, int range) {
  const Scene& sc = *s.scene;
  auto check_receptacle = [&](int id) {
    if (id < 0 || id >= static_cast<int>(sc.receptacles.size()))
      throw std::runtime_error("no receptacle with id " + std::to_string(id));
  };
  auto check_object = [&](int id) {
    if (id < 0 || id >= static_cast<int>(sc.objects.size()))
      throw std::runtime_error("no object with id " + std::to_string(id));
  };

  bool ok = false;
  switch (a.verb) {
    case Verb::MoveAhead: {
      auto [x, y] = s.faced_cell();
      if (!sc.blocked(x, y)) {
        s.ax = x;
        s.ay = y;
        ok = true;
      }
      break;
    }
    case Verb::RotateLeft:
      s.heading = turn_left(s.heading);
      ok = true;
      break;
    case Verb::RotateRight:
      s.heading = turn_right(s.heading);
      ok = true;
      break;
    case Verb::Open: {
      check_receptacle(a.target);
      const auto& r = sc.receptacles[a.target];
      auto [fx, fy] = s.faced_cell();
      // one receptacle open at a time, matching the planning domain
      if (r.x == fx && r.y == fy && r.openable && !s.open[a.target] &&
          !s.any_open()) {
        s.open[a.target] = 1;
        ok = true;
      }
      break;
    }
    case Verb::Close: {
      check_receptacle(a.target);
      const auto& r = sc.receptacles[a.target];
      auto [fx, fy] = s.faced_cell();
      if (r.x == fx && r.y == fy && s.open[a.target]) {
        s.open[a.target] = 0;
        ok = true;
      }
      break;
    }
    case Verb::Pickup: {
      check_object(a.target);
      if (s.held < 0) {
        auto [fx, fy] = s.faced_cell();
        auto [x, y] = s.object_cell(a.target);
        int c = s.container[a.target];
        bool reachable = c < 0 || s.open[c] || !sc.receptacles[c].openable;
        if (x == fx && y == fy && reachable) {
          s.container[a.target] = -1;
          s.held = a.target;
          ok = true;
        }
      }
      break;
    }
    case Verb::Put: {
      check_receptacle(a.target);
      const auto& r = sc.receptacles[a.target];
      auto [fx, fy] = s.faced_cell();
      if (s.held >= 0 && r.x == fx && r.y == fy &&
          (s.open[a.target] || !r.openable) &&
          s.occupancy(a.target) < r.capacity) {
        s.container[s.held] = a.target;
        s.held = -1;
        ok = true;
      }
      break;
    }
  }
  ++s.steps;

  Observation obs = observe(s, noise, rng, range);
  obs.success = ok;
  return obs;
}

std::string observation_digest(const Observation& o) {
  // FNV-1a, 64 bit. Cheap, stable across platforms, good enough to catch any
  // replay divergence.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  auto mix_str = [&](const std::string& s) {
    mix(s.size());
    for (char c : s) mix(static_cast<unsigned char>(c));
  };
  mix(static_cast<std::uint64_t>(o.ax));
  mix(static_cast<std::uint64_t>(o.ay));
  mix(static_cast<std::uint64_t>(o.heading));
  mix(o.success ? 1 : 0);
  mix(static_cast<std::uint64_t>(o.range));
  mix(o.visible.size());
  for (char c : o.visible) mix(static_cast<unsigned char>(c));
  mix(o.detections.size());
  for (const auto& d : o.detections) {
    mix_str(d.cls);
    mix(static_cast<std::uint64_t>(d.x0));
    mix(static_cast<std::uint64_t>(d.y0));
    mix(static_cast<std::uint64_t>(d.x1));
    mix(static_cast<std::uint64_t>(d.y1));
    mix(static_cast<std::uint64_t>(d.id + 1));
    mix(d.receptacle ? 1 : 0);
  }
  mix(static_cast<std::uint64_t>(o.noise_draws));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace hiprl::world
