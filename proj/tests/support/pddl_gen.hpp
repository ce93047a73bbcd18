#pragma once


// Random well-formed domain/problem generator plus a direct lifted-formula
// evaluator. The generator drives print/parse round-trip tests; the evaluator
// is the independent oracle the grounder is checked against: it interprets
// quantifiers and negation over the typed universe directly, with no
// compilation step in between.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hiprl/pddl/ast.hpp"
#include "hiprl/rng.hpp"

namespace testsupport {

using hiprl::pddl::ActionSchema;
using hiprl::pddl::Atom;
using hiprl::pddl::Domain;
using hiprl::pddl::Effect;
using hiprl::pddl::Formula;
using hiprl::pddl::FunctionDecl;
using hiprl::pddl::NumericInit;
using hiprl::pddl::PredicateDecl;
using hiprl::pddl::Problem;
using hiprl::pddl::TypedName;

inline std::map<std::string, std::vector<std::string>> type_members(
    const Domain& d, const Problem& p) {
  std::map<std::string, std::string> super;
  for (const auto& t : d.types) super[t.name] = t.type;
  std::map<std::string, std::vector<std::string>> m;
  for (const auto& t : d.types) m[t.name];
  for (const auto& o : p.objects) {
    std::string cur = o.type;
    while (!cur.empty()) {
      m[cur].push_back(o.name);
      auto it = super.find(cur);
      cur = it == super.end() ? std::string() : it->second;
    }
  }
  return m;
}

inline std::string ground_key(const Atom& a,
                              const std::map<std::string, std::string>& bind) {
  std::string k = "(" + a.predicate;
  for (const auto& t : a.terms) {
    k += ' ';
    k += (!t.empty() && t[0] == '?') ? bind.at(t) : t;
  }
  return k + ")";
}

// Direct semantics: truths is the set of ground atoms (canonical "(p a b)"
// strings) that hold.
inline bool lifted_holds(const Formula& f, const std::set<std::string>& truths,
                         const std::map<std::string, std::vector<std::string>>& members,
                         std::map<std::string, std::string>& bind) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Atom:
      return truths.count(ground_key(f.atom, bind)) > 0;
    case K::Not:
      return !lifted_holds(f.children.front(), truths, members, bind);
    case K::And:
      for (const auto& c : f.children)
        if (!lifted_holds(c, truths, members, bind)) return false;
      return true;
    case K::Or:
      for (const auto& c : f.children)
        if (lifted_holds(c, truths, members, bind)) return true;
      return false;
    case K::Forall:
    case K::Exists: {
      bool conj = f.kind == K::Forall;
      auto it = members.find(f.var_type);
      if (it != members.end()) {
        for (const auto& o : it->second) {
          bind[f.var] = o;
          bool v = lifted_holds(f.children.front(), truths, members, bind);
          if (v != conj) {
            bind.erase(f.var);
            return !conj;
          }
        }
      }
      bind.erase(f.var);
      return conj;
    }
  }
  return false;
}

// ---- random generation ----

struct GenCase {
  Domain domain;
  Problem problem;
};

struct GenConfig {
  // printable mode exercises every construct for round-trips; semantic mode
  // keeps effects to plain add/delete so the grounding oracle stays simple
  bool printable = true;
};

class CaseGen {
 public:
  CaseGen(hiprl::Rng& rng, GenConfig cfg) : rng_(rng), cfg_(cfg) {}

  GenCase run() {
    gen_types();
    gen_predicates();
    if (cfg_.printable) {
      d_.functions.push_back({"cost0", {}});
      d_.functions.push_back({"w", {{"?a", types_[0]}, {"?b", types_[0]}}});
    }
    int na = 1 + static_cast<int>(rng_.uniform_int(3));
    for (int i = 0; i < na; ++i) gen_action(i);
    gen_problem();
    return {d_, p_};
  }

 private:
  std::string t(std::size_t i) const { return types_[i % types_.size()]; }

  void gen_types() {
    int n = 1 + static_cast<int>(rng_.uniform_int(3));
    for (int i = 0; i < n; ++i) {
      std::string name = "t" + std::to_string(i);
      std::string super = (i > 0 && rng_.bernoulli(0.4)) ? types_[rng_.uniform_int(i)] : "";
      d_.types.push_back({name, super});
      types_.push_back(name);
    }
    // untyped entries must trail typed ones or the printed list is ambiguous
    std::stable_partition(d_.types.begin(), d_.types.end(),
                          [](const TypedName& t) { return !t.type.empty(); });
  }

  void gen_predicates() {
    int n = 2 + static_cast<int>(rng_.uniform_int(3));
    for (int i = 0; i < n; ++i) {
      PredicateDecl pd;
      pd.name = "p" + std::to_string(i);
      int arity = static_cast<int>(rng_.uniform_int(3));
      for (int k = 0; k < arity; ++k)
        pd.params.push_back({"?x" + std::to_string(k), t(rng_.uniform_int(types_.size()))});
      d_.predicates.push_back(std::move(pd));
    }
  }

  // any in-scope variable works as a term: the validator does not type-check
  // atom arguments and the evaluator oracle does not either
  std::string rand_var(const std::vector<std::string>& scope) {
    return scope[rng_.uniform_int(scope.size())];
  }

  Formula rand_atom(const std::vector<std::string>& scope, bool allow_constants) {
    const PredicateDecl& pd = d_.predicates[rng_.uniform_int(d_.predicates.size())];
    Atom a;
    a.predicate = pd.name;
    for (std::size_t k = 0; k < pd.params.size(); ++k) {
      bool use_const = allow_constants && !objects_.empty() &&
                       (scope.empty() || rng_.bernoulli(0.4));
      if (use_const) {
        a.terms.push_back(objects_[rng_.uniform_int(objects_.size())]);
      } else if (!scope.empty()) {
        a.terms.push_back(rand_var(scope));
      } else {
        return Formula::make(Formula::Kind::And, {});  // nothing to refer to
      }
    }
    return Formula::make_atom(std::move(a));
  }

  Formula rand_formula(int depth, std::vector<std::string> scope, int& fresh,
                       bool allow_constants) {
    double roll = rng_.uniform();
    if (depth == 0 || roll < 0.45) return rand_atom(scope, allow_constants);
    if (roll < 0.60)
      return Formula::make_not(rand_formula(depth - 1, scope, fresh, allow_constants));
    if (roll < 0.85) {
      auto kind = roll < 0.75 ? Formula::Kind::And : Formula::Kind::Or;
      std::vector<Formula> kids;
      int n = 2 + static_cast<int>(rng_.uniform_int(2));
      for (int i = 0; i < n; ++i)
        kids.push_back(rand_formula(depth - 1, scope, fresh, allow_constants));
      return Formula::make(kind, std::move(kids));
    }
    auto kind = roll < 0.925 ? Formula::Kind::Forall : Formula::Kind::Exists;
    std::string var = "?q" + std::to_string(fresh++);
    std::string vt = t(rng_.uniform_int(types_.size()));
    scope.push_back(var);
    Formula body = rand_formula(depth - 1, scope, fresh, allow_constants);
    return Formula::quantified(kind, var, vt, std::move(body));
  }

  void gen_action(int idx) {
    ActionSchema a;
    a.name = "a" + std::to_string(idx);
    int np = static_cast<int>(rng_.uniform_int(3));
    std::vector<std::string> scope;
    for (int i = 0; i < np; ++i) {
      std::string v = "?v" + std::to_string(i);
      a.params.push_back({v, t(rng_.uniform_int(types_.size()))});
      scope.push_back(v);
    }
    int fresh = 0;
    a.precondition = rand_formula(2, scope, fresh, false);

    std::vector<Effect> parts;
    int ne = 1 + static_cast<int>(rng_.uniform_int(3));
    for (int i = 0; i < ne; ++i) {
      Formula fa = rand_atom(scope, false);
      if (fa.kind != Formula::Kind::Atom) continue;
      if (rng_.bernoulli(0.3))
        parts.push_back(Effect::del(fa.atom));
      else
        parts.push_back(Effect::add(fa.atom));
    }
    if (cfg_.printable && rng_.bernoulli(0.5)) {
      // conditional effect, possibly under a quantifier
      std::string var = "?q" + std::to_string(fresh++);
      std::string vt = t(rng_.uniform_int(types_.size()));
      std::vector<std::string> inner = scope;
      inner.push_back(var);
      Formula cond = rand_formula(1, inner, fresh, false);
      Formula fa = rand_atom(inner, false);
      if (fa.kind == Formula::Kind::Atom) {
        Effect when;
        when.kind = Effect::Kind::When;
        when.condition = std::move(cond);
        when.children.push_back(Effect::add(fa.atom));
        Effect fl;
        fl.kind = Effect::Kind::Forall;
        fl.var = var;
        fl.var_type = vt;
        fl.children.push_back(std::move(when));
        parts.push_back(std::move(fl));
      }
    }
    if (cfg_.printable && rng_.bernoulli(0.6)) {
      Effect inc;
      inc.kind = Effect::Kind::Increase;
      inc.function = Atom{"cost0", {}};
      inc.amount.is_function = false;
      inc.amount.constant = 0.5 + rng_.uniform_int(5);
      parts.push_back(std::move(inc));
    }
    if (parts.empty()) {
      Formula fa = rand_atom(scope, false);
      if (fa.kind == Formula::Kind::Atom) parts.push_back(Effect::add(fa.atom));
    }
    if (parts.empty()) {
      Atom ground0{d_.predicates[0].name, {}};
      if (d_.predicates[0].params.empty()) parts.push_back(Effect::add(ground0));
    }
    if (parts.empty()) return;  // no expressible effect; drop the action
    Effect e;
    e.kind = Effect::Kind::And;
    e.children = std::move(parts);
    a.effect = std::move(e);
    d_.actions.push_back(std::move(a));
  }

  void gen_problem() {
    p_.name = "gen";
    p_.domain_name = d_.name;
    for (std::size_t ti = 0; ti < types_.size(); ++ti) {
      int n = static_cast<int>(rng_.uniform_int(3));
      if (ti == 0 && n == 0) n = 1;  // keep the universe inhabited
      for (int i = 0; i < n; ++i) {
        std::string name = "o" + std::to_string(objects_.size());
        p_.objects.push_back({name, types_[ti]});
        objects_.push_back(name);
      }
    }
    auto members = type_members(d_, p_);
    std::set<std::string> seen;
    for (const auto& pd : d_.predicates) {
      int tries = static_cast<int>(rng_.uniform_int(4));
      for (int i = 0; i < tries; ++i) {
        Atom a;
        a.predicate = pd.name;
        bool ok = true;
        for (const auto& param : pd.params) {
          const auto it = members.find(param.type);
          if (it == members.end() || it->second.empty()) {
            ok = false;
            break;
          }
          a.terms.push_back(it->second[rng_.uniform_int(it->second.size())]);
        }
        if (!ok) continue;
        std::string k = ground_key(a, {});
        if (seen.insert(k).second) p_.init.push_back(std::move(a));
      }
    }
    if (cfg_.printable) {
      p_.numeric_init.push_back({Atom{"cost0", {}}, 0.0});
      const auto& t0 = members[types_[0]];
      for (const auto& x : t0)
        for (const auto& y : t0)
          p_.numeric_init.push_back({Atom{"w", {x, y}}, 1.0 + rng_.uniform_int(9)});
      if (rng_.bernoulli(0.5)) {
        p_.minimize_metric = true;
        p_.metric_function = "cost0";
      }
    }
    int fresh = 100;
    std::vector<std::string> empty_scope;
    p_.goal = rand_formula(2, empty_scope, fresh, true);
  }

  hiprl::Rng& rng_;
  GenConfig cfg_;
  Domain d_{.name = "dom", .requirements = {":adl"}};
  Problem p_;
  std::vector<std::string> types_;
  std::vector<std::string> objects_;
};

inline GenCase random_case(hiprl::Rng& rng, bool printable) {
  return CaseGen(rng, {printable}).run();
}

}  // namespace testsupport
