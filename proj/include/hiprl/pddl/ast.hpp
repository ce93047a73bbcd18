#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hiprl::pddl {

// Abstract syntax for the PDDL fragment the project speaks: typed STRIPS plus
// negative preconditions, quantifiers, disjunctions, conditional effects and
// additive action costs (the :adl requirement). Identifiers are
// case-sensitive throughout.

struct PddlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A name with an optional type. Used for parameters, objects and type
// declarations (where `type` is the supertype, empty for none).
struct TypedName {
  std::string name;
  std::string type;

  bool operator==(const TypedName&) const = default;
};

// Predicate or function application. Terms are variables (leading '?') or
// constant names.
struct Atom {
  std::string predicate;
  std::vector<std::string> terms;

  bool operator==(const Atom&) const = default;
};

struct Formula {
  enum class Kind { Atom, And, Or, Not, Forall, Exists };

  Kind kind = Kind::And;
  Atom atom;                      // Kind::Atom
  std::string var;                // Forall / Exists
  std::string var_type;           // Forall / Exists
  std::vector<Formula> children;  // And/Or: any; Not/Forall/Exists: one

  bool operator==(const Formula&) const = default;

  static Formula make_atom(Atom a) {
    Formula f;
    f.kind = Kind::Atom;
    f.atom = std::move(a);
    return f;
  }
  static Formula make(Kind k, std::vector<Formula> kids) {
    Formula f;
    f.kind = k;
    f.children = std::move(kids);
    return f;
  }
  static Formula make_not(Formula inner) {
    return make(Kind::Not, {std::move(inner)});
  }
  static Formula quantified(Kind k, std::string var, std::string type,
                            Formula body) {
    Formula f;
    f.kind = k;
    f.var = std::move(var);
    f.var_type = std::move(type);
    f.children.push_back(std::move(body));
    return f;
  }
};

// Right-hand side of an `increase`: a literal number or a function term.
struct NumericExpr {
  bool is_function = false;
  double constant = 0.0;
  Atom function;

  bool operator==(const NumericExpr&) const = default;
};

struct Effect {
  enum class Kind { And, Add, Del, Forall, When, Increase };

  Kind kind = Kind::And;
  Atom atom;                     // Add / Del
  std::string var;               // Forall
  std::string var_type;          // Forall
  Formula condition;             // When
  Atom function;                 // Increase target
  NumericExpr amount;            // Increase amount
  std::vector<Effect> children;  // And: any; Forall/When: one

  bool operator==(const Effect&) const = default;

  static Effect add(Atom a) {
    Effect e;
    e.kind = Kind::Add;
    e.atom = std::move(a);
    return e;
  }
  static Effect del(Atom a) {
    Effect e;
    e.kind = Kind::Del;
    e.atom = std::move(a);
    return e;
  }
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  Formula precondition;
  Effect effect;

  bool operator==(const ActionSchema&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;

  bool operator==(const PredicateDecl&) const = default;
};

struct FunctionDecl {
  std::string name;
  std::vector<TypedName> params;  // may be untyped, e.g. (distance ?from ?to)

  bool operator==(const FunctionDecl&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypedName> types;
  std::vector<PredicateDecl> predicates;
  std::vector<FunctionDecl> functions;
  std::vector<ActionSchema> actions;

  bool operator==(const Domain&) const = default;

  const PredicateDecl* find_predicate(const std::string& n) const;
  const FunctionDecl* find_function(const std::string& n) const;
  const ActionSchema* find_action(const std::string& n) const;
  bool has_type(const std::string& n) const;
};

struct NumericInit {
  Atom function;
  double value = 0.0;

  bool operator==(const NumericInit&) const = default;
};

struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<NumericInit> numeric_init;
  Formula goal;
  bool minimize_metric = false;
  std::string metric_function;

  bool operator==(const Problem&) const = default;
};

/// Canonical pretty-printers. Output re-parses to an identical AST.
std::string print_domain(const Domain& d);
std::string print_problem(const Problem& p);
std::string print_formula(const Formula& f, int indent = 0);
std::string print_effect(const Effect& e, int indent = 0);
std::string print_atom(const Atom& a);

/// Structural equality modulo consistent renaming of bound variables.
bool alpha_equal(const Formula& a, const Formula& b);

/// Semantic checks beyond what the grammar enforces: declared types, known
/// predicates with matching arity, bound variables, acyclic type hierarchy.
/// Throw PddlError on the first violation.
void validate_domain(const Domain& d);
void validate_problem(const Domain& d, const Problem& p);

}  // namespace hiprl::pddl
