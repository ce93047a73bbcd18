#pragma once

#include <string>
#include <vector>

#include "hiprl/rng.hpp"
#include "hiprl/world/scene.hpp"

namespace hiprl::world {

enum class Heading { N, E, S, W };

Heading turn_left(Heading h);
Heading turn_right(Heading h);
std::pair<int, int> heading_delta(Heading h);
char heading_char(Heading h);
Heading heading_from_char(char c);

enum class Verb { MoveAhead, RotateLeft, RotateRight, Open, Close, Pickup, Put };

struct PrimitiveAction {
  Verb verb;
  int target = -1;  // receptacle id (Open/Close/Put) or object id (Pickup)
};

std::string primitive_name(const PrimitiveAction& a);

// Mutable episode state layered over an immutable Scene. Copies are cheap;
// the scene itself is shared.
struct WorldState {
  const Scene* scene = nullptr;
  std::vector<char> open;      // per receptacle
  std::vector<int> container;  // per object: receptacle id, -1 = floor/held
  std::vector<std::pair<int, int>> floor_cell;  // per object, when on floor
  int ax = 0, ay = 0;
  Heading heading = Heading::N;
  int held = -1;  // object id in hand
  long steps = 0;

  int occupancy(int receptacle_id) const;
  /// Cell the object currently sits on; {-1,-1} while held.
  std::pair<int, int> object_cell(int object_id) const;
  bool any_open() const;
  /// Cell directly ahead of the agent.
  std::pair<int, int> faced_cell() const;
};

WorldState init_state(const Scene& scene, int x, int y, Heading h);

// Detection ranges per camera pitch band: looking down sees close, level sees
// the middle distance, up sees far.
inline constexpr int kPitchRanges[3] = {2, 5, 8};
inline constexpr int kDefaultRange = 5;

struct NoiseModel {
  double miss = 0.2;        // per visible entity per frame
  double false_positive = 0.05;  // per frame
  double confusion = 0.05;  // class swap within the same category
  int jitter = 1;           // box offset radius, cells
  static NoiseModel ground_truth() { return {0.0, 0.0, 0.0, 0}; }
  bool is_ground_truth() const {
    return miss == 0.0 && false_positive == 0.0 && confusion == 0.0 && jitter == 0;
  }
};

struct Detection {
  std::string cls;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive cell box
  int id = -1;  // world entity id; -1 for false positives
  bool receptacle = false;
};

struct Observation {
  int ax = 0, ay = 0;
  Heading heading = Heading::N;
  bool success = true;
  int range = kDefaultRange;
  // W*H row-major; 0 = not seen, kSeenFree = seen floor, kSeenBlocked = seen
  // wall or receptacle cell. Nonzero means visible.
  std::vector<char> visible;
  std::vector<Detection> detections;
  int noise_draws = 0;  // rng consumption, recorded for replay checks
};

inline constexpr char kSeenFree = 1;
inline constexpr char kSeenBlocked = 2;

/// Cells inside the 90 degree forward frustum with line of sight, out to
/// `range`. Walls and receptacles block sight behind themselves but are
/// visible where the ray lands on them.
std::vector<char> visible_cells(const WorldState& s, int range);

/// Detections over the visible set. Objects inside closed receptacles never
/// appear. Draw order is fixed (receptacles by id, objects by id, then the
/// false-positive draw) so replays consume identical randomness.
std::vector<Detection> detect(const WorldState& s, const std::vector<char>& visible,
                              const NoiseModel& noise, Rng& rng, int* draws = nullptr);

/// Execute one primitive. Illegal moves fail softly: success=false, state
/// unchanged apart from the step counter, which always advances by exactly 1.
/// Throws std::runtime_error only for out-of-range target ids.
Observation step(WorldState& s, const PrimitiveAction& a, const NoiseModel& noise,
                 Rng& rng, int range = kDefaultRange);

/// Observation without acting (the scanner's detector runs). Advances no step.
Observation observe(const WorldState& s, const NoiseModel& noise, Rng& rng,
                    int range = kDefaultRange);

/// Stable hex digest of an observation (pose, visibility, detections, rng
/// draws). Trace records carry it so replays can verify bit-equality without
/// storing whole frames.
std::string observation_digest(const Observation& o);

}  // namespace hiprl::world
