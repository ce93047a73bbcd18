#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hiprl/pddl/ast.hpp"

namespace hiprl::pddl {

// Grounding compiles a (Domain, Problem) pair into propositional form:
//  - quantifiers are expanded over the typed object universe;
//  - predicates never touched by any effect are evaluated against the initial
//    state and folded to constants;
//  - remaining negative literals are rewritten to complement fluents
//    (`not-p ...`) whose add/delete lists mirror p's;
//  - disjunctive preconditions are split into one ground action per DNF
//    disjunct, so every ground action has a conjunctive precondition;
//  - action costs are resolved to numbers (cost functions are static here).
//
// The result is what the planner consumes directly.

class FluentSet {
 public:
  FluentSet() = default;
  explicit FluentSet(int n) : n_(n), words_((n + 63) / 64, 0) {}

  int size() const { return n_; }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  bool operator==(const FluentSet&) const = default;

  std::size_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint64_t w : words_) {
      h ^= w;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct FluentSetHash {
  std::size_t operator()(const FluentSet& s) const { return s.hash(); }
};

struct State {
  FluentSet fluents;
  double total_cost = 0.0;
};

// Formula over fluent indices. After grounding, preconditions, effect
// conditions and the goal contain only True/False/Lit/And/Or nodes; Not is
// kept in the grammar so hand-built formulas can still be evaluated.
struct GroundFormula {
  enum class Kind { True, False, Lit, And, Or, Not };

  Kind kind = Kind::True;
  int fluent = -1;
  std::vector<GroundFormula> children;

  static GroundFormula constant(bool v) {
    GroundFormula g;
    g.kind = v ? Kind::True : Kind::False;
    return g;
  }
  static GroundFormula lit(int f) {
    GroundFormula g;
    g.kind = Kind::Lit;
    g.fluent = f;
    return g;
  }
};

struct GroundCondEffect {
  std::vector<int> condition;  // conjunction, evaluated on the pre-state
  std::vector<int> add;
  std::vector<int> del;
};

struct GroundAction {
  std::string schema;             // schema name, e.g. "GotoLocation"
  std::vector<std::string> args;  // bound objects in parameter order
  int variant = 0;                // >0 when a disjunctive precondition split
  std::vector<int> precondition;  // conjunction of fluent indices
  std::vector<int> add;
  std::vector<int> del;
  std::vector<GroundCondEffect> cond_effects;
  double cost = 0.0;

  std::string display() const;
};

struct GroundTask {
  std::vector<std::string> fluent_names;
  std::unordered_map<std::string, int> fluent_ids;
  std::vector<int> complement_of;  // complement fluent index or -1
  std::vector<GroundAction> actions;
  State init;
  GroundFormula goal;
  std::vector<std::string> notes;  // degenerate quantifiers etc.

  int num_fluents() const { return static_cast<int>(fluent_names.size()); }
  int fluent(const std::string& name) const;  // -1 when absent

  /// Human-readable dump of fluents, actions and the goal.
  std::string dump() const;
};

/// Ground `problem` against `domain`. Throws PddlError on inconsistencies
/// (undefined required distances, an action both adding and deleting the same
/// fluent, unsupported constructs).
GroundTask ground(const Domain& domain, const Problem& problem);

/// Evaluate a formula against a state.
bool holds(const State& s, const GroundFormula& f);

/// Precondition check plus effect application; conditional effects read the
/// pre-state, deletes land before adds. Throws PddlError naming the first
/// unsatisfied precondition literal.
State apply(const GroundTask& task, const State& s, const GroundAction& a);

/// True when all precondition literals hold.
bool applicable(const State& s, const GroundAction& a);

}  // namespace hiprl::pddl
