#include "hiprl/world/task.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hiprl::world {

std::string task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::IqaExistence: return "iqa-existence";
    case TaskKind::IqaCounting: return "iqa-counting";
    case TaskKind::IqaContainment: return "iqa-containment";
    case TaskKind::VspPutIn: return "vsp-putin";
  }
  return "?";
}

TaskKind task_kind_from_name(const std::string& name) {
  if (name == "iqa-existence") return TaskKind::IqaExistence;
  if (name == "iqa-counting") return TaskKind::IqaCounting;
  if (name == "iqa-containment") return TaskKind::IqaContainment;
  if (name == "vsp-putin") return TaskKind::VspPutIn;
  throw std::runtime_error("unknown task kind '" + name + "'");
}

namespace {

int count_class(const Scene& sc, const std::string& cls) {
  int n = 0;
  for (const auto& o : sc.objects) n += o.cls == cls;
  return n;
}

bool contained_pair(const WorldState& s, const std::string& oclass,
                    const std::string& rclass) {
  for (std::size_t i = 0; i < s.scene->objects.size(); ++i) {
    if (s.scene->objects[i].cls != oclass) continue;
    int c = s.container[i];
    if (c >= 0 && s.scene->receptacles[c].cls == rclass) return true;
  }
  return false;
}

}  // namespace

std::string true_answer(const WorldState& s, const TaskSpec& t) {
  switch (t.kind) {
    case TaskKind::IqaExistence:
      return count_class(*s.scene, t.subject) > 0 ? "yes" : "no";
    case TaskKind::IqaCounting:
      return std::to_string(count_class(*s.scene, t.subject));
    case TaskKind::IqaContainment:
      return contained_pair(s, t.subject, t.target_class) ? "yes" : "no";
    case TaskKind::VspPutIn:
      return "";
  }
  return "";
}

bool vsp_satisfied(const WorldState& s, const TaskSpec& t) {
  return contained_pair(s, t.subject, t.target_class);
}

TaskSpec generate_task(const Scene& scene, std::uint64_t seed, TaskKind kind) {
  Rng rng(derive_seed(seed, "task"));
  TaskSpec t;
  t.kind = kind;

  // start pose on a free floor cell
  std::vector<std::pair<int, int>> floor;
  for (int y = 0; y < scene.height; ++y)
    for (int x = 0; x < scene.width; ++x)
      if (!scene.blocked(x, y)) floor.push_back({x, y});
  if (floor.empty()) throw std::runtime_error("scene has no floor");
  auto [sx, sy] = floor[rng.uniform_int(floor.size())];
  t.start_x = sx;
  t.start_y = sy;
  t.start_heading = static_cast<Heading>(rng.uniform_int(4));

  WorldState init = init_state(scene, sx, sy, t.start_heading);
  bool want_yes = seed % 2 == 0;  // answer balancing across a seed run

  switch (kind) {
    case TaskKind::IqaExistence: {
      std::vector<std::string> present, absent;
      for (const auto& cls : object_classes())
        (count_class(scene, cls) > 0 ? present : absent).push_back(cls);
      auto& pool = want_yes ? present : absent;
      auto& other = want_yes ? absent : present;
      auto& use = pool.empty() ? other : pool;
      if (use.empty()) throw std::runtime_error("no existence question possible");
      t.subject = use[rng.uniform_int(use.size())];
      break;
    }
    case TaskKind::IqaCounting: {
      std::vector<std::string> zero, some;
      for (const auto& cls : object_classes()) {
        int n = count_class(scene, cls);
        if (n > t.count_hi) continue;  // outside the answer domain
        (n == 0 ? zero : some).push_back(cls);
      }
      auto& pool = want_yes ? some : zero;
      auto& other = want_yes ? zero : some;
      auto& use = pool.empty() ? other : pool;
      if (use.empty()) throw std::runtime_error("no counting question possible");
      t.subject = use[rng.uniform_int(use.size())];
      break;
    }
    case TaskKind::IqaContainment: {
      std::vector<std::pair<std::string, std::string>> yes, no;
      for (const auto& r : receptacle_classes()) {
        bool have_r = false;
        for (const auto& rec : scene.receptacles) have_r |= rec.cls == r;
        if (!have_r) continue;
        for (const auto& o : object_classes()) {
          if (!can_contain(r, o)) continue;  // only sensible questions
          (contained_pair(init, o, r) ? yes : no).push_back({o, r});
        }
      }
      auto& pool = want_yes ? yes : no;
      auto& other = want_yes ? no : yes;
      auto& use = pool.empty() ? other : pool;
      if (use.empty()) throw std::runtime_error("no containment question possible");
      auto [o, r] = use[rng.uniform_int(use.size())];
      t.subject = o;
      t.target_class = r;
      break;
    }
    case TaskKind::VspPutIn: {
      // possible (an empty target instance exists) yet not already done
      std::vector<std::pair<std::string, std::string>> cand;
      for (const auto& r : receptacle_classes()) {
        bool room = false;
        for (const auto& rec : scene.receptacles)
          room |= rec.cls == r && scene.occupancy(rec.id) < rec.capacity;
        if (!room) continue;
        for (const auto& o : object_classes()) {
          if (count_class(scene, o) == 0) continue;
          if (contained_pair(init, o, r)) continue;
          cand.push_back({o, r});
        }
      }
      if (cand.empty()) throw std::runtime_error("no put-in task possible");
      auto [o, r] = cand[rng.uniform_int(cand.size())];
      t.subject = o;
      t.target_class = r;
      break;
    }
  }
  t.answer = true_answer(init, t);
  return t;
}

std::string save_task(const TaskSpec& t) {
  std::ostringstream os;
  os << "hiprl-task v1\n";
  os << "kind " << task_kind_name(t.kind) << "\n";
  os << "subject " << t.subject << "\n";
  os << "target " << (t.target_class.empty() ? "-" : t.target_class) << "\n";
  os << "count " << t.count_lo << " " << t.count_hi << "\n";
  os << "answer " << (t.answer.empty() ? "-" : t.answer) << "\n";
  os << "start " << t.start_x << " " << t.start_y << " "
     << heading_char(t.start_heading) << "\n";
  return os.str();
}

TaskSpec load_task(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "hiprl-task v1")
    throw std::runtime_error("unrecognized task header: '" + line + "'");
  TaskSpec t;
  auto fail = [](const std::string& l) {
    throw std::runtime_error("bad task line: '" + l + "'");
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "kind") {
      std::string k;
      if (!(ls >> k)) fail(line);
      t.kind = task_kind_from_name(k);
    } else if (key == "subject") {
      if (!(ls >> t.subject)) fail(line);
    } else if (key == "target") {
      if (!(ls >> t.target_class)) fail(line);
      if (t.target_class == "-") t.target_class.clear();
    } else if (key == "count") {
      if (!(ls >> t.count_lo >> t.count_hi)) fail(line);
    } else if (key == "answer") {
      if (!(ls >> t.answer)) fail(line);
      if (t.answer == "-") t.answer.clear();
    } else if (key == "start") {
      char h;
      if (!(ls >> t.start_x >> t.start_y >> h)) fail(line);
      t.start_heading = heading_from_char(h);
    } else {
      fail(line);
    }
  }
  return t;
}

std::string describe_task(const TaskSpec& t) {
  switch (t.kind) {
    case TaskKind::IqaExistence:
      return "Is there a " + t.subject + " in the room?";
    case TaskKind::IqaCounting:
      return "How many " + t.subject + "s are in the room?";
    case TaskKind::IqaContainment:
      return "Is there a " + t.subject + " in the " + t.target_class + "?";
    case TaskKind::VspPutIn:
      return "Put a " + t.subject + " in a " + t.target_class + ".";
  }
  return "?";
}

}  // namespace hiprl::world
