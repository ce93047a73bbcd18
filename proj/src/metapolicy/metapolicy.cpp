#include "hiprl/metapolicy/metapolicy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hiprl/pddl/ground.hpp"
#include "hiprl/pddl/parser.hpp"
#include "hiprl/planner/planner.hpp"

namespace hiprl::metapolicy {

namespace {

std::uint64_t fnv1a(const void* data, size_t n, std::uint64_t h = 1469598103934665603ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string digest_features(const std::vector<double>& f) {
  return hex16(fnv1a(f.data(), f.size() * sizeof(double)));
}

}  // namespace

std::string meta_action_name(MetaAction a) {
  switch (a) {
    case MetaAction::Planner: return "planner";
    case MetaAction::Explorer: return "explorer";
    case MetaAction::Scanner: return "scanner";
    case MetaAction::Stopper: return "stopper";
  }
  return "?";
}

std::string policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Learned: return "learned";
    case PolicyKind::PlannerOnly: return "planner-only";
    case PolicyKind::LearnerOnly: return "learner-only";
    case PolicyKind::Random: return "random";
    case PolicyKind::AnswerImmediately: return "answer-immediately";
  }
  return "?";
}

PolicyKind policy_kind_from_name(const std::string& name) {
  for (auto k : {PolicyKind::Learned, PolicyKind::PlannerOnly,
                 PolicyKind::LearnerOnly, PolicyKind::Random,
                 PolicyKind::AnswerImmediately})
    if (policy_kind_name(k) == name) return k;
  throw std::runtime_error("unknown policy kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// features

std::string feature_schema() {
  std::string s = "bias\n";
  for (auto kind : {world::TaskKind::IqaExistence, world::TaskKind::IqaCounting,
                    world::TaskKind::IqaContainment, world::TaskKind::VspPutIn})
    s += "kind:" + world::task_kind_name(kind) + "\n";
  for (const auto& cls : world::object_classes()) s += "subject:" + cls + "\n";
  s += "candidates-checked\n";
  s += "subject-found\n";
  s += "target-known\n";
  s += "holding-subject\n";
  s += "map-known\n";
  s += "prim-steps\n";
  s += "hier-steps\n";
  for (int a = 0; a < kNumMetaActions; ++a)
    s += "last:" + meta_action_name(static_cast<MetaAction>(a)) + "\n";
  s += "last-success\n";
  return s;
}

int feature_dim() {
  static const int dim = 1 + 4 + static_cast<int>(world::object_classes().size()) +
                         7 + kNumMetaActions + 1;
  return dim;
}

std::uint64_t feature_schema_hash() {
  static const std::uint64_t h = [] {
    std::string s = feature_schema();
    return fnv1a(s.data(), s.size());
  }();
  return h;
}

std::vector<double> featurize(const knowledge::KnowledgeState& k,
                              const world::TaskSpec& t, int last_action,
                              bool last_success, long hier_steps,
                              const EpisodeConfig& cfg) {
  std::vector<double> f;
  f.reserve(feature_dim());
  f.push_back(1.0);
  for (int i = 0; i < 4; ++i) f.push_back(static_cast<int>(t.kind) == i);
  for (const auto& cls : world::object_classes()) f.push_back(cls == t.subject);

  // candidate receptacles: the ones this task could still need opened. The
  // containment question only cares about its asked class.
  int cand = 0, checked = 0;
  for (const auto& r : k.receptacles) {
    bool relevant = t.kind == world::TaskKind::IqaContainment
                        ? r.cls == t.target_class
                        : world::can_contain(r.cls, t.subject);
    if (!relevant) continue;
    ++cand;
    checked += r.checked;
  }
  f.push_back(cand ? static_cast<double>(checked) / cand : 0.0);
  f.push_back(k.count_class(t.subject) > 0);
  bool target_known = false;
  if (!t.target_class.empty())
    for (const auto& r : k.receptacles) target_known |= r.cls == t.target_class;
  f.push_back(target_known);
  const knowledge::TrackedObject* held =
      k.held >= 0 ? k.object_by_id(k.held) : nullptr;
  f.push_back(held && held->cls == t.subject);

  long known = 0;
  for (auto c : k.map) known += c != knowledge::Cell::Unknown;
  f.push_back(k.map.empty() ? 0.0 : static_cast<double>(known) / k.map.size());
  f.push_back(std::min(1.0, static_cast<double>(k.prim_steps) /
                                static_cast<double>(cfg.primitive_budget)));
  f.push_back(std::min(1.0, static_cast<double>(hier_steps) /
                                static_cast<double>(cfg.hier_cap)));
  for (int a = 0; a < kNumMetaActions; ++a) f.push_back(last_action == a);
  f.push_back(last_action >= 0 && last_success);
  return f;
}

// ---------------------------------------------------------------------------
// policy arithmetic

double MetaPolicy::logit(int a, const std::vector<double>& f) const {
  double z = 0.0;
  const double* row = actor.data() + static_cast<size_t>(a) * dim;
  for (int i = 0; i < dim; ++i) z += row[i] * f[i];
  return z / temperature;
}

double MetaPolicy::value(const std::vector<double>& f) const {
  double v = 0.0;
  for (int i = 0; i < dim; ++i) v += critic[i] * f[i];
  return v;
}

std::array<double, kNumMetaActions> MetaPolicy::probs(
    const std::vector<double>& f, const ActionMask& mask) const {
  std::array<double, kNumMetaActions> z{};
  double zmax = -1e300;
  for (int a = 0; a < kNumMetaActions; ++a) {
    if (!mask[a]) continue;
    z[a] = logit(a, f);
    zmax = std::max(zmax, z[a]);
  }
  double sum = 0.0;
  std::array<double, kNumMetaActions> p{};
  for (int a = 0; a < kNumMetaActions; ++a) {
    if (!mask[a]) continue;
    p[a] = std::exp(z[a] - zmax);
    sum += p[a];
  }
  for (int a = 0; a < kNumMetaActions; ++a) p[a] /= sum;
  return p;
}

MetaPolicy make_policy(int dim, double temperature) {
  MetaPolicy p;
  p.dim = dim;
  p.temperature = temperature;
  p.actor.assign(static_cast<size_t>(kNumMetaActions) * dim, 0.0);
  p.critic.assign(dim, 0.0);
  return p;
}

MetaAction select_action(const MetaPolicy& p, const std::vector<double>& f,
                         const ActionMask& mask, Rng& rng, bool greedy) {
  if (greedy) {
    int best = -1;
    double bz = 0.0;
    for (int a = 0; a < kNumMetaActions; ++a) {
      if (!mask[a]) continue;
      double z = p.logit(a, f);
      if (best < 0 || z > bz) {
        best = a;
        bz = z;
      }
    }
    return static_cast<MetaAction>(best);
  }
  auto pr = p.probs(f, mask);
  double u = rng.uniform();
  double acc = 0.0;
  int last_allowed = 0;
  for (int a = 0; a < kNumMetaActions; ++a) {
    if (!mask[a]) continue;
    last_allowed = a;
    acc += pr[a];
    if (u < acc) return static_cast<MetaAction>(a);
  }
  return static_cast<MetaAction>(last_allowed);  // u landed on rounding dust
}

Policy scripted_policy(PolicyKind kind) {
  Policy p;
  p.kind = kind;
  return p;
}

Policy learned_policy(MetaPolicy weights, bool greedy) {
  Policy p;
  p.kind = PolicyKind::Learned;
  p.weights = std::move(weights);
  p.greedy = greedy;
  return p;
}

Policy learner_only_policy(MetaPolicy weights, bool greedy) {
  Policy p;
  p.kind = PolicyKind::LearnerOnly;
  p.weights = std::move(weights);
  p.mask = {false, true, true, true};
  p.greedy = greedy;
  p.shaped = true;
  return p;
}

// ---------------------------------------------------------------------------
// episodes

namespace {

// Is the belief-side plan for the current goal empty right now? Mirrors the
// planner controller's pipeline without touching the world.
bool belief_plan_empty(const knowledge::KnowledgeState& k,
                       const world::TaskSpec& task,
                       const controllers::ControllerConfig& cc) {
  try {
    knowledge::GoalSpec g = knowledge::planning_goal(k, task);
    std::string text = knowledge::to_pddl_problem(k, g);
    pddl::Problem prob =
        pddl::parse_problem(text, controllers::shipped_domain(), "peek");
    pddl::GroundTask gt = pddl::ground(controllers::shipped_domain(), prob);
    planner::PlanResult res = planner::plan(gt, cc.planner);
    return res.outcome == planner::Outcome::Found && res.plan.steps.empty();
  } catch (const std::exception&) {
    return true;  // nothing plannable yet amounts to an empty plan
  }
}

// The planner-only script: bootstrap scan when the opening plan is empty,
// then planner until it settles, then stop. Never the explorer.
MetaAction decide_planner_only(const EpisodeTrace& trace,
                               const knowledge::KnowledgeState& k,
                               const world::TaskSpec& task,
                               const controllers::ControllerConfig& cc) {
  if (trace.hier.empty())
    return belief_plan_empty(k, task, cc) ? MetaAction::Scanner
                                          : MetaAction::Planner;
  const HierRecord& last = trace.hier.back();
  if (last.action == MetaAction::Scanner) return MetaAction::Planner;
  // last was Planner
  if (last.result.termination != controllers::Termination::Success)
    return MetaAction::Stopper;
  bool final_phase =
      task.kind != world::TaskKind::VspPutIn ||
      last.planner_goal_kind == static_cast<int>(world::TaskKind::VspPutIn);
  if (final_phase) return MetaAction::Stopper;
  // search phase ended without moving: swept everything, subject never showed
  if (last.result.primitives == 0) return MetaAction::Stopper;
  return MetaAction::Planner;
}

}  // namespace

std::vector<DecisionStep> decision_steps(const EpisodeTrace& trace) {
  std::vector<DecisionStep> out;
  out.reserve(trace.hier.size());
  for (const auto& h : trace.hier)
    out.push_back({h.features, static_cast<int>(h.action), h.reward});
  return out;
}

EpisodeTrace run_episode(const world::Scene& scene, const world::TaskSpec& task,
                         const Policy& policy, const world::NoiseModel& noise,
                         std::uint64_t episode_seed, const EpisodeConfig& cfg) {
  EpisodeTrace trace;
  trace.task_id = world::task_kind_name(task.kind) + ":" + task.subject +
                  (task.target_class.empty() ? "" : ">" + task.target_class);
  trace.scene_seed = scene.seed;
  trace.episode_seed = episode_seed;

  world::WorldState s =
      world::init_state(scene, task.start_x, task.start_y, task.start_heading);
  knowledge::KnowledgeState k =
      knowledge::make_knowledge(scene.width, scene.height);
  Rng env_rng(derive_seed(episode_seed, "env"));
  Rng dec_rng(derive_seed(episode_seed, "decide"));
  controllers::Env env{&s, &noise, &env_rng, &trace.prims};

  // the opening frame is free: no policy starts truly blind
  knowledge::integrate(k, world::observe(s, noise, env_rng));

  bool seen_subject = k.count_class(task.subject) > 0;
  bool picked_subject = false;
  int last_action = -1;
  bool last_success = false;

  for (int h = 0;; ++h) {
    std::vector<double> f = featurize(k, task, last_action, last_success, h, cfg);
    bool forced = s.steps >= cfg.primitive_budget || h >= cfg.hier_cap - 1;
    MetaAction a;
    if (forced) {
      a = MetaAction::Stopper;
    } else {
      switch (policy.kind) {
        case PolicyKind::Learned:
        case PolicyKind::LearnerOnly:
          a = select_action(policy.weights, f, policy.mask, dec_rng,
                            policy.greedy);
          break;
        case PolicyKind::Random:
          a = static_cast<MetaAction>(dec_rng.uniform_int(kNumMetaActions));
          break;
        case PolicyKind::AnswerImmediately:
          a = MetaAction::Stopper;
          break;
        case PolicyKind::PlannerOnly:
          a = decide_planner_only(trace, k, task, cfg.controllers);
          break;
      }
    }

    HierRecord rec;
    rec.features = std::move(f);
    rec.features_digest = digest_features(rec.features);
    rec.action = a;
    rec.forced = forced;

    if (a == MetaAction::Stopper) {
      rec.result = controllers::stop_and_answer(k, task);
      trace.answer = rec.result.answer;
      trace.success = task.kind == world::TaskKind::VspPutIn
                          ? world::vsp_satisfied(s, task)
                          : trace.answer == task.answer;
      rec.reward = cfg.reward.step_penalty +
                   (trace.success ? cfg.reward.success : cfg.reward.failure);
      trace.hier.push_back(std::move(rec));
      break;
    }

    long left = cfg.primitive_budget - s.steps;
    controllers::ControllerConfig cc = cfg.controllers;
    cc.planner_budget = static_cast<int>(
        std::min<long>(cc.planner_budget, std::max<long>(1, left)));
    cc.navigate_budget = static_cast<int>(
        std::min<long>(cc.navigate_budget, std::max<long>(1, left)));
    switch (a) {
      case MetaAction::Planner: {
        knowledge::GoalSpec g = knowledge::planning_goal(k, task);
        rec.planner_goal_kind = static_cast<int>(g.kind);
        rec.result = controllers::run_planner_controller(env, k, g, cc);
        break;
      }
      case MetaAction::Explorer:
        rec.result = controllers::explore(env, k, cc);
        break;
      case MetaAction::Scanner:
        rec.result = controllers::scan(env, k, cc);
        break;
      default: break;
    }

    rec.reward = cfg.reward.step_penalty;
    if (!seen_subject && k.count_class(task.subject) > 0) {
      seen_subject = true;
      if (policy.shaped) rec.reward += cfg.reward.first_sight_bonus;
    }
    const knowledge::TrackedObject* held =
        k.held >= 0 ? k.object_by_id(k.held) : nullptr;
    if (!picked_subject && held && held->cls == task.subject) {
      picked_subject = true;
      if (policy.shaped) rec.reward += cfg.reward.first_pickup_bonus;
    }

    last_action = static_cast<int>(a);
    last_success = rec.result.termination == controllers::Termination::Success;
    trace.hier.push_back(std::move(rec));
  }

  trace.p = s.steps;
  for (const auto& h : trace.hier) trace.total_reward += h.reward;
  return trace;
}

// ---------------------------------------------------------------------------
// learning

void accumulate_gradients(const MetaPolicy& p,
                          const std::vector<DecisionStep>& steps,
                          const ActionMask& mask, double discount,
                          double entropy_weight, std::vector<double>& actor_grad,
                          std::vector<double>& critic_grad) {
  const int dim = p.dim;
  // Monte-Carlo returns, back to front
  std::vector<double> G(steps.size());
  double g = 0.0;
  for (size_t t = steps.size(); t-- > 0;) {
    g = steps[t].reward + discount * g;
    G[t] = g;
  }
  for (size_t t = 0; t < steps.size(); ++t) {
    const std::vector<double>& f = steps[t].features;
    const int at = steps[t].action;
    const double v = p.value(f);
    const double adv = G[t] - v;  // constant for the actor
    auto pr = p.probs(f, mask);
    double entropy = 0.0;
    for (int a = 0; a < kNumMetaActions; ++a)
      if (mask[a] && pr[a] > 0) entropy -= pr[a] * std::log(pr[a]);
    for (int a = 0; a < kNumMetaActions; ++a) {
      if (!mask[a]) continue;
      // d(-adv*log pi(at) - w_H*H) / d z_a, then z_a = row_a . f / tau
      double dz = -adv * ((a == at) - pr[a]);
      dz += entropy_weight * pr[a] * (std::log(pr[a]) + entropy);
      double scale = dz / p.temperature;
      double* row = actor_grad.data() + static_cast<size_t>(a) * dim;
      for (int i = 0; i < dim; ++i) row[i] += scale * f[i];
    }
    // d (G - v.f)^2 / d v
    for (int i = 0; i < dim; ++i) critic_grad[i] += -2.0 * adv * f[i];
  }
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct ProbeResult {
  double success = 0.0;
  double mean_length = 0.0;
};

ProbeResult run_probe(const MetaPolicy& weights, bool learner_only,
                      const std::vector<Instance>& probe_set, int limit,
                      const world::NoiseModel& noise, std::uint64_t master_seed,
                      const EpisodeConfig& ecfg) {
  Policy pol = learner_only ? learner_only_policy(weights, true)
                            : learned_policy(weights, true);
  int n = limit > 0 ? std::min<int>(limit, probe_set.size())
                    : static_cast<int>(probe_set.size());
  ProbeResult out;
  if (n == 0) return out;
  for (int i = 0; i < n; ++i) {
    EpisodeTrace t =
        run_episode(probe_set[i].scene, probe_set[i].task, pol, noise,
                    derive_seed(master_seed, "probe", i), ecfg);
    out.success += t.success;
    out.mean_length += static_cast<double>(t.p);
  }
  out.success /= n;
  out.mean_length /= n;
  return out;
}

}  // namespace

TrainResult train(MetaPolicy start, const std::vector<Instance>& train_set,
                  const std::vector<Instance>& probe_set,
                  const world::NoiseModel& noise, std::uint64_t master_seed,
                  const TrainConfig& cfg) {
  if (train_set.empty()) throw std::runtime_error("empty training set");
  TrainResult out;
  out.policy = std::move(start);
  const ActionMask mask =
      cfg.learner_only ? ActionMask{false, true, true, true} : kAllActions;
  const int dim = out.policy.dim;

  auto probe_point = [&](long at_steps, int batch_no) {
    ProbeResult pr = run_probe(out.policy, cfg.learner_only, probe_set,
                               cfg.probe_episodes, noise,
                               derive_seed(master_seed, "probe-round", batch_no),
                               cfg.episode);
    out.curve.push_back({at_steps, pr.success, pr.mean_length});
  };
  if (!probe_set.empty()) probe_point(0, 0);

  long ep_index = 0;
  int batch_no = 0;
  while (out.hier_steps < cfg.total_hier_steps && !out.diverged) {
    // one synchronous batch: frozen weights, parallel episodes
    Policy pol = cfg.learner_only ? learner_only_policy(out.policy, false)
                                  : learned_policy(out.policy, false);
    pol.greedy = false;
    std::vector<EpisodeTrace> traces(cfg.batch_episodes);
    int workers = std::max(1, cfg.workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < cfg.batch_episodes; i += workers) {
          long e = ep_index + i;
          const Instance& inst = train_set[static_cast<size_t>(
              derive_seed(master_seed, "pick", e) % train_set.size())];
          traces[i] = run_episode(inst.scene, inst.task, pol, noise,
                                  derive_seed(master_seed, "episode", e),
                                  cfg.episode);
        }
      });
    }
    for (auto& th : pool) th.join();

    std::vector<double> actor_grad(
        static_cast<size_t>(kNumMetaActions) * dim, 0.0);
    std::vector<double> critic_grad(dim, 0.0);
    for (const auto& t : traces) {
      accumulate_gradients(out.policy, decision_steps(t), mask,
                           cfg.episode.reward.discount, cfg.entropy_weight,
                           actor_grad, critic_grad);
      out.hier_steps += static_cast<long>(t.hier.size());
    }
    const double inv = 1.0 / cfg.batch_episodes;
    for (size_t i = 0; i < actor_grad.size(); ++i)
      out.policy.actor[i] -= cfg.actor_lr * inv * actor_grad[i];
    for (int i = 0; i < dim; ++i)
      out.policy.critic[i] -= cfg.critic_lr * inv * critic_grad[i];
    out.episodes += cfg.batch_episodes;
    ep_index += cfg.batch_episodes;
    ++batch_no;

    if (max_abs(out.policy.actor) > cfg.weight_bound ||
        max_abs(out.policy.critic) > cfg.weight_bound) {
      out.diverged = true;
      break;
    }
    if (!probe_set.empty() && batch_no % cfg.probe_every_batches == 0)
      probe_point(out.hier_steps, batch_no);
  }
  if (!probe_set.empty() &&
      (out.curve.empty() || out.curve.back().hier_steps != out.hier_steps))
    probe_point(out.hier_steps, batch_no + 1);
  return out;
}

// ---------------------------------------------------------------------------
// gradient check

namespace {

double actor_loss(const MetaPolicy& p, const std::vector<double>& f, int at,
                  double adv, const ActionMask& mask, double entropy_weight) {
  auto pr = p.probs(f, mask);
  double entropy = 0.0;
  for (int a = 0; a < kNumMetaActions; ++a)
    if (mask[a] && pr[a] > 0) entropy -= pr[a] * std::log(pr[a]);
  return -adv * std::log(pr[at]) - entropy_weight * entropy;
}

}  // namespace

double gradient_check(std::uint64_t seed, int instances) {
  double worst = 0.0;
  const double eps = 1e-5;
  const double entropy_weight = 0.01;
  for (int n = 0; n < instances; ++n) {
    Rng rng(derive_seed(seed, "gradcheck", n));
    const int dim = 3 + static_cast<int>(rng.uniform_int(6));
    MetaPolicy p = make_policy(dim, rng.bernoulli(0.5) ? 1.0 : 0.7);
    for (auto& w : p.actor) w = rng.uniform_range(-1.0, 1.0);
    for (auto& w : p.critic) w = rng.uniform_range(-1.0, 1.0);
    ActionMask mask = kAllActions;
    if (rng.bernoulli(0.3)) mask = {false, true, true, true};
    std::vector<double> f(dim);
    for (auto& x : f) x = rng.uniform_range(-1.0, 1.0);
    int at;
    do {
      at = static_cast<int>(rng.uniform_int(kNumMetaActions));
    } while (!mask[at]);
    const double G = rng.uniform_range(-2.0, 2.0);
    const double adv = G - p.value(f);

    std::vector<double> actor_grad(
        static_cast<size_t>(kNumMetaActions) * dim, 0.0);
    std::vector<double> critic_grad(dim, 0.0);
    accumulate_gradients(p, {{f, at, G}}, mask, 1.0, entropy_weight,
                         actor_grad, critic_grad);

    auto rel = [&](double analytic, double numeric) {
      double denom = std::max(1e-6, std::abs(analytic) + std::abs(numeric));
      return std::abs(analytic - numeric) / denom;
    };
    for (int a = 0; a < kNumMetaActions; ++a) {
      if (!mask[a]) continue;
      for (int i = 0; i < dim; ++i) {
        size_t idx = static_cast<size_t>(a) * dim + i;
        MetaPolicy q = p;
        q.actor[idx] = p.actor[idx] + eps;
        double up = actor_loss(q, f, at, adv, mask, entropy_weight);
        q.actor[idx] = p.actor[idx] - eps;
        double dn = actor_loss(q, f, at, adv, mask, entropy_weight);
        worst = std::max(worst, rel(actor_grad[idx], (up - dn) / (2 * eps)));
      }
    }
    for (int i = 0; i < dim; ++i) {
      MetaPolicy q = p;
      q.critic[i] = p.critic[i] + eps;
      double dup = G - q.value(f);
      double up = dup * dup;
      q.critic[i] = p.critic[i] - eps;
      double ddn = G - q.value(f);
      double dn = ddn * ddn;
      worst = std::max(worst, rel(critic_grad[i], (up - dn) / (2 * eps)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// persistence

std::string save_policy(const MetaPolicy& p) {
  std::ostringstream os;
  os.precision(17);
  os << "hiprl-policy 1\n";
  os << "schema " << hex16(feature_schema_hash()) << "\n";
  os << "dim " << p.dim << "\n";
  os << "temperature " << p.temperature << "\n";
  os << "actor";
  for (double w : p.actor) os << " " << w;
  os << "\ncritic";
  for (double w : p.critic) os << " " << w;
  os << "\n";
  return os.str();
}

MetaPolicy load_policy(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  int version = 0;
  is >> word >> version;
  if (word != "hiprl-policy" || version != 1)
    throw std::runtime_error("not a policy checkpoint this build can read");
  std::string schema;
  is >> word >> schema;
  if (word != "schema" || schema != hex16(feature_schema_hash()))
    throw std::runtime_error(
        "policy checkpoint was written against a different feature schema");
  MetaPolicy p;
  is >> word >> p.dim;
  if (word != "dim" || p.dim <= 0)
    throw std::runtime_error("bad checkpoint dimension");
  is >> word >> p.temperature;
  if (word != "temperature") throw std::runtime_error("bad checkpoint field");
  is >> word;
  if (word != "actor") throw std::runtime_error("bad checkpoint field");
  p.actor.resize(static_cast<size_t>(kNumMetaActions) * p.dim);
  for (auto& w : p.actor)
    if (!(is >> w)) throw std::runtime_error("truncated checkpoint");
  is >> word;
  if (word != "critic") throw std::runtime_error("bad checkpoint field");
  p.critic.resize(p.dim);
  for (auto& w : p.critic)
    if (!(is >> w)) throw std::runtime_error("truncated checkpoint");
  return p;
}

std::string curve_tsv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "hierarchical_steps\tprobe_success\tmean_episode_length\n";
  os.precision(10);
  for (const auto& c : curve)
    os << c.hier_steps << "\t" << c.probe_success << "\t"
       << c.mean_episode_length << "\n";
  return os.str();
}

}  // namespace hiprl::metapolicy
