#include "hiprl/world/scene.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hiprl::world {

const std::vector<std::string>& object_classes() {
  static const std::vector<std::string> k = {
      "Mug",  "Bowl",   "Apple", "Bread", "Fork",  "Knife", "Spoon",
      "Potato", "Tomato", "Egg",   "Plate", "Cup",   "Lettuce"};
  return k;
}

const std::vector<std::string>& receptacle_classes() {
  static const std::vector<std::string> k = {"Fridge",  "Microwave", "Cabinet",
                                             "Drawer",  "Sink",      "GarbageCan"};
  return k;
}

bool is_object_class(const std::string& cls) {
  const auto& v = object_classes();
  return std::find(v.begin(), v.end(), cls) != v.end();
}

bool is_receptacle_class(const std::string& cls) {
  const auto& v = receptacle_classes();
  return std::find(v.begin(), v.end(), cls) != v.end();
}

bool receptacle_class_openable(const std::string& cls) {
  return cls == "Fridge" || cls == "Microwave" || cls == "Cabinet" || cls == "Drawer";
}

bool can_contain(const std::string& rclass, const std::string& oclass) {
  // GarbageCan takes anything, so every small class has at least one home.
  if (rclass == "GarbageCan") return true;
  static const std::map<std::string, std::set<std::string>> table = {
      {"Fridge",
       {"Apple", "Bread", "Potato", "Tomato", "Egg", "Lettuce", "Bowl", "Plate",
        "Cup", "Mug"}},
      {"Microwave",
       {"Mug", "Bowl", "Plate", "Cup", "Apple", "Bread", "Potato", "Tomato", "Egg"}},
      {"Cabinet", {"Mug", "Bowl", "Plate", "Cup", "Fork", "Knife", "Spoon", "Bread"}},
      {"Drawer", {"Fork", "Knife", "Spoon", "Mug", "Cup", "Bowl"}},
      {"Sink",
       {"Mug", "Bowl", "Plate", "Cup", "Fork", "Knife", "Spoon", "Apple", "Tomato",
        "Lettuce"}},
  };
  auto it = table.find(rclass);
  return it != table.end() && it->second.count(oclass) > 0;
}

int Scene::receptacle_at(int x, int y) const {
  for (const auto& r : receptacles)
    if (r.x == x && r.y == y) return r.id;
  return -1;
}

int Scene::occupancy(int receptacle_id) const {
  int n = 0;
  for (const auto& o : objects) n += o.in_receptacle == receptacle_id;
  return n;
}

std::pair<int, int> Scene::object_cell(const WorldObject& o) const {
  if (o.in_receptacle < 0) return {o.x, o.y};
  const auto& r = receptacles.at(o.in_receptacle);
  return {r.x, r.y};
}

namespace {

// Free floor cells (no receptacle) must stay one connected region.
bool floor_connected(const Scene& s) {
  int start_x = -1, start_y = -1, total = 0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (!s.blocked(x, y)) {
        ++total;
        if (start_x < 0) {
          start_x = x;
          start_y = y;
        }
      }
    }
  }
  if (total == 0) return false;
  std::vector<char> seen(s.width * s.height, 0);
  std::vector<std::pair<int, int>> stack{{start_x, start_y}};
  seen[start_y * s.width + start_x] = 1;
  int reached = 0;
  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    ++reached;
    const int dx[] = {0, 1, 0, -1}, dy[] = {-1, 0, 1, 0};
    for (int d = 0; d < 4; ++d) {
      int nx = x + dx[d], ny = y + dy[d];
      if (s.blocked(nx, ny) || seen[ny * s.width + nx]) continue;
      seen[ny * s.width + nx] = 1;
      stack.push_back({nx, ny});
    }
  }
  return reached == total;
}

bool has_free_neighbour(const Scene& s, int x, int y) {
  const int dx[] = {0, 1, 0, -1}, dy[] = {-1, 0, 1, 0};
  for (int d = 0; d < 4; ++d)
    if (!s.blocked(x + dx[d], y + dy[d])) return true;
  return false;
}

}  // namespace

Scene generate_scene(std::uint64_t seed, const SceneConfig& config) {
  if (config.width < 5 || config.height < 5)
    throw std::runtime_error("scene grid must be at least 5x5");
  Rng rng(derive_seed(seed, "scene"));

  Scene s;
  s.seed = seed;
  s.width = config.width;
  s.height = config.height;
  s.rows.assign(s.height, std::string(s.width, '.'));
  for (int x = 0; x < s.width; ++x) {
    s.rows[0][x] = '#';
    s.rows[s.height - 1][x] = '#';
  }
  for (int y = 0; y < s.height; ++y) {
    s.rows[y][0] = '#';
    s.rows[y][s.width - 1] = '#';
  }

  // interior wall stubs, kept only when the floor stays connected
  for (int i = 0; i < config.wall_stubs; ++i) {
    int len = rng.uniform_range(2, 3);
    int x = rng.uniform_range(1, s.width - 2);
    int y = rng.uniform_range(1, s.height - 2);
    bool horizontal = rng.bernoulli(0.5);
    std::vector<std::pair<int, int>> cells;
    for (int k = 0; k < len; ++k) {
      int cx = horizontal ? x + k : x;
      int cy = horizontal ? y : y + k;
      if (cx >= s.width - 1 || cy >= s.height - 1) break;
      cells.push_back({cx, cy});
    }
    for (auto [cx, cy] : cells) s.rows[cy][cx] = '#';
    if (!floor_connected(s))
      for (auto [cx, cy] : cells) s.rows[cy][cx] = '.';
  }

  // receptacles: one cell each, placement must keep the floor connected and
  // leave the receptacle a free neighbour
  for (const auto& [cls, count] : config.receptacle_counts) {
    if (!is_receptacle_class(cls))
      throw std::runtime_error("unknown receptacle class '" + cls + "'");
    for (int k = 0; k < count; ++k) {
      bool placed = false;
      for (int attempt = 0; attempt < config.max_retries && !placed; ++attempt) {
        int x = rng.uniform_range(1, s.width - 2);
        int y = rng.uniform_range(1, s.height - 2);
        if (s.blocked(x, y)) continue;
        Receptacle r;
        r.id = static_cast<int>(s.receptacles.size());
        r.cls = cls;
        r.x = x;
        r.y = y;
        r.openable = receptacle_class_openable(cls);
        s.receptacles.push_back(r);
        // the new cell may also steal the last free neighbour of an earlier
        // receptacle, so re-check every one
        bool all_reachable = true;
        for (const auto& prev : s.receptacles)
          if (!has_free_neighbour(s, prev.x, prev.y)) all_reachable = false;
        if (all_reachable && floor_connected(s)) {
          placed = true;
        } else {
          s.receptacles.pop_back();
        }
      }
      if (!placed)
        throw std::runtime_error("infeasible scene config: no room for " + cls);
    }
  }

  // objects go inside receptacles that accept their class; capacity 1 keeps
  // one object per receptacle
  int want = rng.uniform_range(config.min_objects, config.max_objects);
  want = std::min(want, static_cast<int>(s.receptacles.size()));
  for (int k = 0; k < want; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < config.max_retries && !placed; ++attempt) {
      const auto& cls =
          object_classes()[rng.uniform_int(object_classes().size())];
      int rid = static_cast<int>(rng.uniform_int(s.receptacles.size()));
      if (s.occupancy(rid) >= s.receptacles[rid].capacity) continue;
      if (!can_contain(s.receptacles[rid].cls, cls)) continue;
      WorldObject o;
      o.id = static_cast<int>(s.objects.size());
      o.cls = cls;
      o.in_receptacle = rid;
      s.objects.push_back(o);
      placed = true;
    }
    if (!placed) break;  // crowded scene; fewer objects is fine
  }

  auto problems = validate_scene(s);
  if (!problems.empty())
    throw std::runtime_error("generated scene invalid: " + problems.front());
  return s;
}

std::vector<std::string> validate_scene(const Scene& s) {
  std::vector<std::string> out;
  if (s.height != static_cast<int>(s.rows.size()))
    return {"row count does not match height"};
  for (const auto& row : s.rows)
    if (static_cast<int>(row.size()) != s.width)
      return {"row width mismatch"};
  for (int x = 0; x < s.width; ++x)
    if (s.rows[0][x] != '#' || s.rows[s.height - 1][x] != '#') {
      out.push_back("border must be wall");
      break;
    }
  for (int y = 0; y < s.height; ++y)
    if (s.rows[y][0] != '#' || s.rows[y][s.width - 1] != '#') {
      out.push_back("border must be wall");
      break;
    }

  std::set<std::pair<int, int>> rcells;
  for (const auto& r : s.receptacles) {
    if (r.id != static_cast<int>(&r - s.receptacles.data()))
      out.push_back("receptacle ids must be dense and ordered");
    if (!is_receptacle_class(r.cls))
      out.push_back("unknown receptacle class '" + r.cls + "'");
    if (s.wall(r.x, r.y))
      out.push_back("receptacle " + std::to_string(r.id) + " on a wall cell");
    if (!rcells.insert({r.x, r.y}).second)
      out.push_back("two receptacles share a cell");
    if (!has_free_neighbour(s, r.x, r.y))
      out.push_back("receptacle " + std::to_string(r.id) + " has no free neighbour");
    if (r.open && !r.openable)
      out.push_back("receptacle " + std::to_string(r.id) + " open but not openable");
  }
  for (const auto& o : s.objects) {
    if (o.id != static_cast<int>(&o - s.objects.data()))
      out.push_back("object ids must be dense and ordered");
    if (!is_object_class(o.cls)) out.push_back("unknown object class '" + o.cls + "'");
    if (o.in_receptacle >= static_cast<int>(s.receptacles.size()))
      out.push_back("object " + std::to_string(o.id) + " in missing receptacle");
    if (o.in_receptacle < 0 && s.blocked(o.x, o.y))
      out.push_back("object " + std::to_string(o.id) + " on a blocked cell");
  }
  for (const auto& r : s.receptacles)
    if (s.occupancy(r.id) > r.capacity)
      out.push_back("receptacle " + std::to_string(r.id) + " over capacity");
  if (!floor_connected(s)) out.push_back("free floor is not connected");
  return out;
}

std::string save_scene(const Scene& s) {
  std::ostringstream os;
  os << "hiprl-scene v1\n";
  os << "seed " << s.seed << "\n";
  os << "grid " << s.width << " " << s.height << "\n";
  for (const auto& row : s.rows) os << "row " << row << "\n";
  for (const auto& r : s.receptacles)
    os << "receptacle " << r.id << " " << r.cls << " " << r.x << " " << r.y << " "
       << (r.openable ? 1 : 0) << " " << (r.open ? 1 : 0) << " " << r.capacity
       << "\n";
  for (const auto& o : s.objects) {
    os << "object " << o.id << " " << o.cls << " ";
    if (o.in_receptacle >= 0)
      os << "in " << o.in_receptacle << "\n";
    else
      os << "floor " << o.x << " " << o.y << "\n";
  }
  return os.str();
}

Scene load_scene(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "hiprl-scene v1")
    throw std::runtime_error("unrecognized scene header: '" + line + "'");

  Scene s;
  auto fail = [](const std::string& l) {
    throw std::runtime_error("bad scene line: '" + l + "'");
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "seed") {
      if (!(ls >> s.seed)) fail(line);
    } else if (key == "grid") {
      if (!(ls >> s.width >> s.height)) fail(line);
    } else if (key == "row") {
      std::string row;
      if (!(ls >> row)) fail(line);
      s.rows.push_back(row);
    } else if (key == "receptacle") {
      Receptacle r;
      int openable = 0, open = 0;
      if (!(ls >> r.id >> r.cls >> r.x >> r.y >> openable >> open >> r.capacity))
        fail(line);
      r.openable = openable != 0;
      r.open = open != 0;
      s.receptacles.push_back(r);
    } else if (key == "object") {
      WorldObject o;
      std::string where;
      if (!(ls >> o.id >> o.cls >> where)) fail(line);
      if (where == "in") {
        if (!(ls >> o.in_receptacle)) fail(line);
      } else if (where == "floor") {
        if (!(ls >> o.x >> o.y)) fail(line);
        o.in_receptacle = -1;
      } else {
        fail(line);
      }
      s.objects.push_back(o);
    } else {
      fail(line);
    }
  }
  auto problems = validate_scene(s);
  if (!problems.empty())
    throw std::runtime_error("loaded scene invalid: " + problems.front());
  return s;
}

}  // namespace hiprl::world
