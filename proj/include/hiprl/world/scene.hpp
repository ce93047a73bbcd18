#pragma once

#include <string>
#include <vector>

#include "hiprl/rng.hpp"

namespace hiprl::world {

// Fixed class vocabularies. The sizes are contract (13 small / 6 large), the
// actual names are configuration.
const std::vector<std::string>& object_classes();      // Mug, Bowl, ...
const std::vector<std::string>& receptacle_classes();  // Fridge, Microwave, ...

bool is_object_class(const std::string& cls);
bool is_receptacle_class(const std::string& cls);
bool receptacle_class_openable(const std::string& cls);

/// Which small classes sensibly go inside which large class. Shapes goals
/// (what needs checking), never physics: Put works regardless.
bool can_contain(const std::string& rclass, const std::string& oclass);

struct Receptacle {
  int id = -1;
  std::string cls;
  int x = 0, y = 0;
  bool openable = false;
  bool open = false;  // initial state; episodes mutate their own copy
  int capacity = 1;
};

struct WorldObject {
  int id = -1;
  std::string cls;
  int in_receptacle = -1;  // -1: loose on the floor at (x, y)
  int x = 0, y = 0;        // meaningful only when on the floor
};

// A kitchen. The grid stores walls only; receptacles sit on floor cells and
// block movement and sight by presence. Immutable once generated.
struct Scene {
  int width = 0, height = 0;
  std::vector<std::string> rows;  // rows[y][x] ∈ {'.', '#'}
  std::vector<Receptacle> receptacles;
  std::vector<WorldObject> objects;
  std::uint64_t seed = 0;

  bool wall(int x, int y) const {
    return x < 0 || y < 0 || x >= width || y >= height || rows[y][x] == '#';
  }
  /// Receptacle id occupying the cell, or -1.
  int receptacle_at(int x, int y) const;
  /// Wall or receptacle: the agent can never stand here.
  bool blocked(int x, int y) const { return wall(x, y) || receptacle_at(x, y) >= 0; }
  int occupancy(int receptacle_id) const;
  /// Cell an object currently sits on (its receptacle's cell when contained).
  std::pair<int, int> object_cell(const WorldObject& o) const;
};

struct SceneConfig {
  int width = 11;
  int height = 11;
  // (class, count) pairs in placement order; defaults cover every class
  std::vector<std::pair<std::string, int>> receptacle_counts = {
      {"Fridge", 1},  {"Microwave", 1}, {"Cabinet", 2},
      {"Drawer", 2},  {"Sink", 1},      {"GarbageCan", 1}};
  int min_objects = 4;
  int max_objects = 6;
  int wall_stubs = 3;   // interior wall segments to attempt
  int max_retries = 60; // per placement before declaring the config infeasible
};

/// Deterministic in (seed, config). Throws std::runtime_error when the config
/// cannot be realized (too many receptacles for the floor area).
Scene generate_scene(std::uint64_t seed, const SceneConfig& config = {});

/// Empty vector = scene satisfies every structural invariant; otherwise one
/// message per violation.
std::vector<std::string> validate_scene(const Scene& scene);

/// Versioned line format, stable key order. load rejects unknown versions and
/// malformed lines with std::runtime_error.
std::string save_scene(const Scene& scene);
Scene load_scene(const std::string& text);

}  // namespace hiprl::world
