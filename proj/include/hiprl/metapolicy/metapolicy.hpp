#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hiprl/controllers/controllers.hpp"
#include "hiprl/knowledge/knowledge.hpp"
#include "hiprl/rng.hpp"
#include "hiprl/world/scene.hpp"
#include "hiprl/world/sim.hpp"
#include "hiprl/world/task.hpp"

namespace hiprl::metapolicy {

/// The meta-level action set. The navigator is not here on purpose: it only
/// ever runs as a subroutine of the planner and explorer controllers.
enum class MetaAction { Planner = 0, Explorer = 1, Scanner = 2, Stopper = 3 };
inline constexpr int kNumMetaActions = 4;
std::string meta_action_name(MetaAction a);

using ActionMask = std::array<bool, kNumMetaActions>;
inline constexpr ActionMask kAllActions{true, true, true, true};

struct RewardConfig {
  double success = 1.0;
  double failure = -1.0;
  double step_penalty = -0.02;  // every hierarchical decision, terminal too
  double discount = 1.0;
  // shaped policies only (see Policy::shaped)
  double first_sight_bonus = 0.1;
  double first_pickup_bonus = 0.2;
};

struct EpisodeConfig {
  long primitive_budget = 1000;  // forced stop once the simulator hits this
  int hier_cap = 64;             // decisions per episode, also the normalizer
  controllers::ControllerConfig controllers;
  RewardConfig reward;
};

/// Fixed-layout summary of the episode so far: bias, task kind one-hot,
/// subject class one-hot, fraction of candidate receptacles checked, subject
/// found / target known / holding flags, fraction of map known, normalized
/// primitive and hierarchical step counts, last controller one-hot plus its
/// success flag. Every entry stays in [-1, 1].
std::vector<double> featurize(const knowledge::KnowledgeState& k,
                              const world::TaskSpec& t, int last_action,
                              bool last_success, long hier_steps,
                              const EpisodeConfig& cfg = {});
int feature_dim();
std::string feature_schema();  // one component name per line, hash input
std::uint64_t feature_schema_hash();

/// Linear actor-critic. Actor rows are per-action weight vectors; the critic
/// is a single value head over the same features.
struct MetaPolicy {
  int dim = 0;
  double temperature = 1.0;
  std::vector<double> actor;   // kNumMetaActions rows, row-major
  std::vector<double> critic;  // dim

  double logit(int a, const std::vector<double>& f) const;
  double value(const std::vector<double>& f) const;
  /// Softmax over the allowed actions; masked-out entries are exactly 0.
  std::array<double, kNumMetaActions> probs(const std::vector<double>& f,
                                            const ActionMask& mask) const;
};

MetaPolicy make_policy(int dim, double temperature = 1.0);

/// Sample from the masked softmax, or take the best logit. Greedy ties break
/// toward the lowest action index.
MetaAction select_action(const MetaPolicy& p, const std::vector<double>& f,
                         const ActionMask& mask, Rng& rng, bool greedy);

enum class PolicyKind {
  Learned,
  PlannerOnly,
  LearnerOnly,
  Random,
  AnswerImmediately
};
std::string policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from_name(const std::string& name);

/// A runnable episode policy: learned weights, or one of the scripted
/// baselines. `shaped` turns on the first-sight / first-pickup bonuses.
struct Policy {
  PolicyKind kind = PolicyKind::Learned;
  MetaPolicy weights;  // Learned / LearnerOnly
  ActionMask mask = kAllActions;
  bool greedy = false;
  bool shaped = false;
};

Policy scripted_policy(PolicyKind kind);
Policy learned_policy(MetaPolicy weights, bool greedy = true);
Policy learner_only_policy(MetaPolicy weights, bool greedy = true);

struct HierRecord {
  std::vector<double> features;
  std::string features_digest;
  MetaAction action = MetaAction::Stopper;
  bool forced = false;         // budget ran out, stop was not chosen
  int planner_goal_kind = -1;  // TaskKind the planner step chased, else -1
  controllers::ControllerResult result;
  double reward = 0.0;
};

struct EpisodeTrace {
  std::string task_id;
  std::uint64_t scene_seed = 0;
  std::uint64_t episode_seed = 0;
  std::vector<HierRecord> hier;
  std::vector<controllers::PrimRecord> prims;
  std::string answer;
  bool success = false;
  long p = 0;         // primitive episode length
  long oracle_l = 0;  // reference length, 0 until the harness fills it
  double total_reward = 0.0;
};

/// Drive one full episode: featurize, pick a meta action, run the controller,
/// accrue reward, until the stopper fires or the budget forces it. The agent
/// gets one free observation before the first decision so the belief is never
/// completely blank. Success is answer match for questions and the actual
/// world goal test for put-in. Deterministic in (scene, task, episode_seed).
EpisodeTrace run_episode(const world::Scene& scene, const world::TaskSpec& task,
                         const Policy& policy, const world::NoiseModel& noise,
                         std::uint64_t episode_seed,
                         const EpisodeConfig& cfg = {});

/// One decision as the optimizer consumes it.
struct DecisionStep {
  std::vector<double> features;
  int action = 0;
  double reward = 0.0;
};
std::vector<DecisionStep> decision_steps(const EpisodeTrace& trace);

/// Add one episode's loss gradients (summed over its steps) into the
/// buffers. Advantage is the Monte-Carlo return minus the critic value,
/// treated as a constant for the actor; the entropy bonus is subtracted from
/// the actor loss. Masked-out actor rows receive no gradient.
void accumulate_gradients(const MetaPolicy& p,
                          const std::vector<DecisionStep>& steps,
                          const ActionMask& mask, double discount,
                          double entropy_weight, std::vector<double>& actor_grad,
                          std::vector<double>& critic_grad);

struct Instance {
  world::Scene scene;
  world::TaskSpec task;
};

struct TrainConfig {
  int workers = 8;
  int batch_episodes = 16;
  double actor_lr = 0.01;
  double critic_lr = 0.05;
  double entropy_weight = 0.01;
  long total_hier_steps = 20000;
  double weight_bound = 100.0;  // divergence guard on |w|_inf
  int probe_every_batches = 8;
  int probe_episodes = 0;  // 0 = the whole probe set
  bool learner_only = false;  // drop Planner from the mask, shape rewards
  EpisodeConfig episode;
};

struct CurvePoint {
  long hier_steps = 0;
  double probe_success = 0.0;
  double mean_episode_length = 0.0;
};

struct TrainResult {
  MetaPolicy policy;
  std::vector<CurvePoint> curve;
  long episodes = 0;
  long hier_steps = 0;
  bool diverged = false;
};

/// Synchronous batched advantage actor-critic. Weights are frozen for each
/// batch; workers run the batch's episodes in parallel, gradients are then
/// folded in episode order, so results do not depend on scheduling. The probe
/// set is evaluated greedily at a fixed cadence for the learning curve.
TrainResult train(MetaPolicy start, const std::vector<Instance>& train_set,
                  const std::vector<Instance>& probe_set,
                  const world::NoiseModel& noise, std::uint64_t master_seed,
                  const TrainConfig& cfg);

/// Compare analytic gradients against central finite differences (step 1e-5)
/// on random instances; returns the worst relative error seen.
double gradient_check(std::uint64_t seed, int instances);

/// Versioned text checkpoint carrying the feature schema hash; the loader
/// rejects a file whose version or schema does not match this build.
std::string save_policy(const MetaPolicy& p);
MetaPolicy load_policy(const std::string& text);

/// Tab-separated learning curve: hierarchical_steps, probe_success,
/// mean_episode_length.
std::string curve_tsv(const std::vector<CurvePoint>& curve);

}  // namespace hiprl::metapolicy
