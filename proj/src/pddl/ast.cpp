#include "hiprl/pddl/ast.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hiprl::pddl {

namespace {

std::string num_str(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// In `a b - t c` syntax a type marker binds to every name since the previous
// marker, so untyped entries are only expressible as a suffix. Emit typed
// entries first; lists that came out of the parser already have that shape.
std::string typed_list(const std::vector<TypedName>& list) {
  std::string out;
  auto emit = [&](const TypedName& tn) {
    if (!out.empty()) out += ' ';
    out += tn.name;
    if (!tn.type.empty()) {
      out += " - ";
      out += tn.type;
    }
  };
  for (const auto& tn : list)
    if (!tn.type.empty()) emit(tn);
  for (const auto& tn : list)
    if (tn.type.empty()) emit(tn);
  return out;
}

std::string indent_str(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

bool formula_fits_inline(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return true;
    case Formula::Kind::Not:
      return formula_fits_inline(f.children.front());
    default:
      return false;
  }
}

}  // namespace

std::string print_atom(const Atom& a) {
  std::string out = "(" + a.predicate;
  for (const auto& t : a.terms) {
    out += ' ';
    out += t;
  }
  out += ')';
  return out;
}

std::string print_formula(const Formula& f, int indent) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return print_atom(f.atom);
    case Formula::Kind::Not:
      if (formula_fits_inline(f)) {
        return "(not " + print_formula(f.children.front(), indent) + ")";
      }
      return "(not " + print_formula(f.children.front(), indent + 5) + ")";
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const char* head = f.kind == Formula::Kind::And ? "(and" : "(or";
      if (f.children.empty()) return std::string(head) + ")";
      std::string out = head;
      for (const auto& c : f.children) {
        out += '\n';
        out += indent_str(indent + 2);
        out += print_formula(c, indent + 2);
      }
      out += ')';
      return out;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      const char* head = f.kind == Formula::Kind::Forall ? "(forall" : "(exists";
      std::string out = std::string(head) + " (" + f.var;
      if (!f.var_type.empty()) out += " - " + f.var_type;
      out += ")";
      const Formula& body = f.children.front();
      if (formula_fits_inline(body)) {
        out += ' ';
        out += print_formula(body, indent);
      } else {
        out += '\n';
        out += indent_str(indent + 2);
        out += print_formula(body, indent + 2);
      }
      out += ')';
      return out;
    }
  }
  return "()";
}

std::string print_effect(const Effect& e, int indent) {
  switch (e.kind) {
    case Effect::Kind::Add:
      return print_atom(e.atom);
    case Effect::Kind::Del:
      return "(not " + print_atom(e.atom) + ")";
    case Effect::Kind::And: {
      if (e.children.empty()) return "(and)";
      std::string out = "(and";
      for (const auto& c : e.children) {
        out += '\n';
        out += indent_str(indent + 2);
        out += print_effect(c, indent + 2);
      }
      out += ')';
      return out;
    }
    case Effect::Kind::Forall: {
      std::string out = "(forall (" + e.var;
      if (!e.var_type.empty()) out += " - " + e.var_type;
      out += ")\n" + indent_str(indent + 2) +
             print_effect(e.children.front(), indent + 2) + ")";
      return out;
    }
    case Effect::Kind::When: {
      std::string out = "(when ";
      out += print_formula(e.condition, indent + 6);
      out += '\n';
      out += indent_str(indent + 2);
      out += print_effect(e.children.front(), indent + 2);
      out += ')';
      return out;
    }
    case Effect::Kind::Increase: {
      std::string out = "(increase " + print_atom(e.function) + " ";
      out += e.amount.is_function ? print_atom(e.amount.function)
                                  : num_str(e.amount.constant);
      out += ')';
      return out;
    }
  }
  return "()";
}

std::string print_domain(const Domain& d) {
  std::ostringstream out;
  out << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& r : d.requirements) out << ' ' << r;
    out << ")\n";
  }
  if (!d.types.empty()) {
    out << "  (:types " << typed_list(d.types) << ")\n";
  }
  if (!d.predicates.empty()) {
    out << "  (:predicates\n";
    for (const auto& p : d.predicates) {
      out << "    (" << p.name;
      if (!p.params.empty()) out << ' ' << typed_list(p.params);
      out << ")\n";
    }
    out << "  )\n";
  }
  if (!d.functions.empty()) {
    out << "  (:functions\n";
    for (const auto& f : d.functions) {
      out << "    (" << f.name;
      if (!f.params.empty()) out << ' ' << typed_list(f.params);
      out << ")\n";
    }
    out << "  )\n";
  }
  for (const auto& a : d.actions) {
    out << "\n  (:action " << a.name << "\n";
    out << "    :parameters (" << typed_list(a.params) << ")\n";
    out << "    :precondition " << print_formula(a.precondition, 18) << "\n";
    out << "    :effect " << print_effect(a.effect, 12) << "\n";
    out << "  )\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const Problem& p) {
  std::ostringstream out;
  out << "(define (problem " << p.name << ")\n";
  out << "  (:domain " << p.domain_name << ")\n";
  if (!p.objects.empty()) {
    out << "  (:objects\n";
    for (const auto& o : p.objects) {
      out << "    " << o.name;
      if (!o.type.empty()) out << " - " << o.type;
      out << "\n";
    }
    out << "  )\n";
  }
  out << "  (:init\n";
  for (const auto& a : p.init) out << "    " << print_atom(a) << "\n";
  for (const auto& n : p.numeric_init) {
    out << "    (= " << print_atom(n.function) << " " << num_str(n.value) << ")\n";
  }
  out << "  )\n";
  out << "  (:goal " << print_formula(p.goal, 9) << ")\n";
  if (p.minimize_metric) {
    out << "  (:metric minimize (" << p.metric_function << "))\n";
  }
  out << ")\n";
  return out.str();
}

const PredicateDecl* Domain::find_predicate(const std::string& n) const {
  for (const auto& p : predicates)
    if (p.name == n) return &p;
  return nullptr;
}

const FunctionDecl* Domain::find_function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

const ActionSchema* Domain::find_action(const std::string& n) const {
  for (const auto& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

bool Domain::has_type(const std::string& n) const {
  for (const auto& t : types)
    if (t.name == n) return true;
  return false;
}

namespace {

bool alpha_equal_rec(const Formula& a, const Formula& b,
                     std::unordered_map<std::string, int>& map_a,
                     std::unordered_map<std::string, int>& map_b,
                     int& counter) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Formula::Kind::Atom: {
      if (a.atom.predicate != b.atom.predicate) return false;
      if (a.atom.terms.size() != b.atom.terms.size()) return false;
      for (std::size_t i = 0; i < a.atom.terms.size(); ++i) {
        const auto& ta = a.atom.terms[i];
        const auto& tb = b.atom.terms[i];
        auto ia = map_a.find(ta);
        auto ib = map_b.find(tb);
        if ((ia == map_a.end()) != (ib == map_b.end())) return false;
        if (ia != map_a.end()) {
          if (ia->second != ib->second) return false;
        } else if (ta != tb) {
          return false;
        }
      }
      return true;
    }
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (a.var_type != b.var_type) return false;
      auto saved_a = map_a.find(a.var) != map_a.end()
                         ? std::optional<int>(map_a[a.var])
                         : std::nullopt;
      auto saved_b = map_b.find(b.var) != map_b.end()
                         ? std::optional<int>(map_b[b.var])
                         : std::nullopt;
      int id = counter++;
      map_a[a.var] = id;
      map_b[b.var] = id;
      bool ok = alpha_equal_rec(a.children.front(), b.children.front(), map_a,
                                map_b, counter);
      if (saved_a) map_a[a.var] = *saved_a; else map_a.erase(a.var);
      if (saved_b) map_b[b.var] = *saved_b; else map_b.erase(b.var);
      return ok;
    }
    default: {
      if (a.children.size() != b.children.size()) return false;
      for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!alpha_equal_rec(a.children[i], b.children[i], map_a, map_b, counter))
          return false;
      }
      return true;
    }
  }
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
  std::unordered_map<std::string, int> map_a, map_b;
  int counter = 0;
  return alpha_equal_rec(a, b, map_a, map_b, counter);
}

namespace {

struct Scope {
  const Domain* domain;
  // variable -> type for everything currently bound
  std::unordered_map<std::string, std::string> vars;
  // nullptr when checking a domain formula; otherwise object -> type
  const std::unordered_map<std::string, std::string>* objects = nullptr;
  std::string context;

  [[noreturn]] void fail(const std::string& msg) const {
    throw PddlError(context + ": " + msg);
  }
};

void check_atom(const Atom& a, Scope& sc) {
  const PredicateDecl* decl = sc.domain->find_predicate(a.predicate);
  if (!decl) sc.fail("undeclared predicate '" + a.predicate + "'");
  if (decl->params.size() != a.terms.size()) {
    sc.fail("predicate '" + a.predicate + "' expects " +
            std::to_string(decl->params.size()) + " arguments, got " +
            std::to_string(a.terms.size()));
  }
  for (const auto& t : a.terms) {
    if (!t.empty() && t[0] == '?') {
      if (!sc.vars.count(t)) sc.fail("unbound variable '" + t + "'");
    } else if (sc.objects) {
      if (!sc.objects->count(t)) sc.fail("unknown object '" + t + "'");
    } else {
      sc.fail("unknown constant '" + t + "' (constants are not supported)");
    }
  }
}

void check_formula(const Formula& f, Scope& sc) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      check_atom(f.atom, sc);
      return;
    case Formula::Kind::Not:
      if (f.children.size() != 1) sc.fail("'not' takes exactly one formula");
      check_formula(f.children.front(), sc);
      return;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      for (const auto& c : f.children) check_formula(c, sc);
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists: {
      if (f.children.size() != 1) sc.fail("quantifier takes exactly one body");
      if (f.var.empty() || f.var[0] != '?') sc.fail("quantified name must start with '?'");
      if (!sc.domain->has_type(f.var_type))
        sc.fail("undeclared type '" + f.var_type + "' in quantifier");
      if (sc.vars.count(f.var))
        sc.fail("variable '" + f.var + "' shadows an enclosing binding");
      sc.vars[f.var] = f.var_type;
      check_formula(f.children.front(), sc);
      sc.vars.erase(f.var);
      return;
    }
  }
}

void check_effect(const Effect& e, Scope& sc, bool inside_when) {
  switch (e.kind) {
    case Effect::Kind::Add:
    case Effect::Kind::Del:
      check_atom(e.atom, sc);
      return;
    case Effect::Kind::And:
      for (const auto& c : e.children) check_effect(c, sc, inside_when);
      return;
    case Effect::Kind::Forall: {
      if (e.children.size() != 1) sc.fail("'forall' effect takes exactly one body");
      if (!sc.domain->has_type(e.var_type))
        sc.fail("undeclared type '" + e.var_type + "' in effect forall");
      if (sc.vars.count(e.var))
        sc.fail("variable '" + e.var + "' shadows an enclosing binding");
      sc.vars[e.var] = e.var_type;
      check_effect(e.children.front(), sc, inside_when);
      sc.vars.erase(e.var);
      return;
    }
    case Effect::Kind::When: {
      if (inside_when) sc.fail("nested 'when' effects are not supported");
      if (e.children.size() != 1) sc.fail("'when' takes condition and one effect");
      check_formula(e.condition, sc);
      check_effect(e.children.front(), sc, true);
      return;
    }
    case Effect::Kind::Increase: {
      if (inside_when) sc.fail("'increase' under 'when' is not supported");
      const FunctionDecl* fn = sc.domain->find_function(e.function.predicate);
      if (!fn) sc.fail("undeclared function '" + e.function.predicate + "'");
      if (fn->params.size() != e.function.terms.size())
        sc.fail("function '" + e.function.predicate + "' arity mismatch");
      for (const auto& t : e.function.terms) {
        if (t.empty() || t[0] != '?' || !sc.vars.count(t))
          sc.fail("function argument '" + t + "' must be a bound variable");
      }
      if (e.amount.is_function) {
        const FunctionDecl* afn = sc.domain->find_function(e.amount.function.predicate);
        if (!afn) sc.fail("undeclared function '" + e.amount.function.predicate + "'");
        if (afn->params.size() != e.amount.function.terms.size())
          sc.fail("function '" + e.amount.function.predicate + "' arity mismatch");
        for (const auto& t : e.amount.function.terms) {
          if (t.empty() || t[0] != '?' || !sc.vars.count(t))
            sc.fail("function argument '" + t + "' must be a bound variable");
        }
      }
      return;
    }
  }
}

}  // namespace

void validate_domain(const Domain& d) {
  if (d.name.empty()) throw PddlError("domain has no name");
  for (const auto& r : d.requirements) {
    if (r != ":adl")
      throw PddlError("unsupported requirement '" + r + "' (only :adl is accepted)");
  }
  std::unordered_set<std::string> type_names;
  for (const auto& t : d.types) {
    if (!type_names.insert(t.name).second)
      throw PddlError("type '" + t.name + "' declared twice");
  }
  for (const auto& t : d.types) {
    if (!t.type.empty() && !type_names.count(t.type))
      throw PddlError("type '" + t.name + "' has undeclared supertype '" + t.type + "'");
  }
  // supertype chains must terminate
  for (const auto& t : d.types) {
    std::unordered_set<std::string> seen{t.name};
    std::string cur = t.type;
    while (!cur.empty()) {
      if (!seen.insert(cur).second)
        throw PddlError("type hierarchy cycle through '" + cur + "'");
      const TypedName* next = nullptr;
      for (const auto& u : d.types)
        if (u.name == cur) next = &u;
      cur = next ? next->type : "";
    }
  }

  std::unordered_set<std::string> pred_names;
  for (const auto& p : d.predicates) {
    if (!pred_names.insert(p.name).second)
      throw PddlError("predicate '" + p.name + "' declared twice");
    std::unordered_set<std::string> params;
    for (const auto& v : p.params) {
      if (v.name.empty() || v.name[0] != '?')
        throw PddlError("predicate '" + p.name + "' parameter must start with '?'");
      if (!params.insert(v.name).second)
        throw PddlError("predicate '" + p.name + "' repeats parameter " + v.name);
      if (!v.type.empty() && !type_names.count(v.type))
        throw PddlError("predicate '" + p.name + "' uses undeclared type '" + v.type + "'");
    }
  }

  std::unordered_set<std::string> fn_names;
  for (const auto& f : d.functions) {
    if (pred_names.count(f.name))
      throw PddlError("'" + f.name + "' declared as both predicate and function");
    if (!fn_names.insert(f.name).second)
      throw PddlError("function '" + f.name + "' declared twice");
    for (const auto& v : f.params) {
      if (v.name.empty() || v.name[0] != '?')
        throw PddlError("function '" + f.name + "' parameter must start with '?'");
      if (!v.type.empty() && !type_names.count(v.type))
        throw PddlError("function '" + f.name + "' uses undeclared type '" + v.type + "'");
    }
  }

  std::unordered_set<std::string> action_names;
  for (const auto& a : d.actions) {
    if (!action_names.insert(a.name).second)
      throw PddlError("action '" + a.name + "' declared twice");
    Scope sc;
    sc.domain = &d;
    sc.context = "action '" + a.name + "'";
    std::unordered_set<std::string> params;
    for (const auto& v : a.params) {
      if (v.name.empty() || v.name[0] != '?')
        sc.fail("parameter '" + v.name + "' must start with '?'");
      if (!params.insert(v.name).second)
        sc.fail("repeated parameter " + v.name);
      if (v.type.empty() || !type_names.count(v.type))
        sc.fail("parameter " + v.name + " has undeclared type '" + v.type + "'");
      sc.vars[v.name] = v.type;
    }
    check_formula(a.precondition, sc);
    check_effect(a.effect, sc, false);
  }
}

void validate_problem(const Domain& d, const Problem& p) {
  if (p.domain_name != d.name)
    throw PddlError("problem '" + p.name + "' targets domain '" + p.domain_name +
                    "', expected '" + d.name + "'");
  std::unordered_map<std::string, std::string> objects;
  for (const auto& o : p.objects) {
    if (o.name.empty() || o.name[0] == '?')
      throw PddlError("object name '" + o.name + "' is invalid");
    if (objects.count(o.name))
      throw PddlError("object '" + o.name + "' declared twice");
    if (o.type.empty() || !d.has_type(o.type))
      throw PddlError("object '" + o.name + "' has undeclared type '" + o.type + "'");
    objects[o.name] = o.type;
  }

  Scope sc;
  sc.domain = &d;
  sc.objects = &objects;
  sc.context = "problem '" + p.name + "' init";
  for (const auto& a : p.init) {
    check_atom(a, sc);
    for (const auto& t : a.terms)
      if (!t.empty() && t[0] == '?')
        sc.fail("init atom " + print_atom(a) + " is not ground");
  }
  for (const auto& n : p.numeric_init) {
    const FunctionDecl* fn = d.find_function(n.function.predicate);
    if (!fn) sc.fail("undeclared function '" + n.function.predicate + "'");
    if (fn->params.size() != n.function.terms.size())
      sc.fail("function '" + n.function.predicate + "' arity mismatch");
    for (const auto& t : n.function.terms) {
      if (!objects.count(t)) sc.fail("unknown object '" + t + "' in function init");
    }
    if (!std::isfinite(n.value)) sc.fail("non-finite function value");
  }

  sc.context = "problem '" + p.name + "' goal";
  check_formula(p.goal, sc);

  if (p.minimize_metric && !d.find_function(p.metric_function))
    throw PddlError("metric references undeclared function '" + p.metric_function + "'");
}

}  // namespace hiprl::pddl
