#include "hiprl/pddl/ground.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace hiprl::pddl {

namespace {

std::string atom_key(const std::string& pred, const std::vector<std::string>& terms) {
  std::string k = "(" + pred;
  for (const auto& t : terms) {
    k += ' ';
    k += t;
  }
  k += ')';
  return k;
}

std::string atom_key(const Atom& a) { return atom_key(a.predicate, a.terms); }

using Binding = std::map<std::string, std::string>;

std::vector<std::string> substitute(const std::vector<std::string>& terms,
                                    const Binding& b) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    if (!t.empty() && t[0] == '?') {
      auto it = b.find(t);
      if (it == b.end()) throw PddlError("unbound variable " + t + " at grounding");
      out.push_back(it->second);
    } else {
      out.push_back(t);
    }
  }
  return out;
}

// Everything the grounding of one (domain, problem) pair needs to share.
class Grounder {
 public:
  Grounder(const Domain& d, const Problem& p) : domain_(d), problem_(p) {
    build_types();
    find_dynamic_predicates();
    find_negative_predicates();
    collect_init();
    register_complement_universes();
    task_.init.total_cost = 0.0;
    for (const auto& ni : p.numeric_init) {
      if (p.minimize_metric && ni.function.predicate == p.metric_function &&
          ni.function.terms.empty()) {
        task_.init.total_cost = ni.value;
      }
    }
  }

  GroundTask run() {
    for (const auto& schema : domain_.actions) ground_schema(schema);
    std::stable_sort(task_.actions.begin(), task_.actions.end(),
                     [](const GroundAction& a, const GroundAction& b) {
                       if (a.schema != b.schema) return a.schema < b.schema;
                       if (a.args != b.args) return a.args < b.args;
                       return a.variant < b.variant;
                     });
    Binding empty;
    task_.goal = ground_formula(problem_.goal, empty, false, "goal");
    finalize_init();
    return std::move(task_);
  }

 private:
  void build_types() {
    for (const auto& t : domain_.types) {
      supertype_[t.name] = t.type;
      members_[t.name];  // ensure the key exists even when empty
    }
    for (const auto& o : problem_.objects) {
      std::string cur = o.type;
      while (!cur.empty()) {
        members_[cur].push_back(o.name);
        auto it = supertype_.find(cur);
        cur = it == supertype_.end() ? std::string() : it->second;
      }
    }
  }

  void scan_effect_predicates(const Effect& e) {
    switch (e.kind) {
      case Effect::Kind::Add:
      case Effect::Kind::Del:
        dynamic_.insert(e.atom.predicate);
        return;
      case Effect::Kind::And:
      case Effect::Kind::Forall:
      case Effect::Kind::When:
        for (const auto& c : e.children) scan_effect_predicates(c);
        return;
      case Effect::Kind::Increase:
        return;
    }
  }

  void find_dynamic_predicates() {
    for (const auto& a : domain_.actions) scan_effect_predicates(a.effect);
  }

  void scan_polarity(const Formula& f, bool negated) {
    switch (f.kind) {
      case Formula::Kind::Atom:
        if (negated && dynamic_.count(f.atom.predicate))
          negative_.insert(f.atom.predicate);
        return;
      case Formula::Kind::Not:
        scan_polarity(f.children.front(), !negated);
        return;
      default:
        for (const auto& c : f.children) scan_polarity(c, negated);
        return;
    }
  }

  void scan_effect_conditions(const Effect& e) {
    switch (e.kind) {
      case Effect::Kind::When:
        scan_polarity(e.condition, false);
        scan_effect_conditions(e.children.front());
        return;
      case Effect::Kind::And:
      case Effect::Kind::Forall:
        for (const auto& c : e.children) scan_effect_conditions(c);
        return;
      default:
        return;
    }
  }

  // Predicates that appear under a negation in some precondition, effect
  // condition or the goal get complement fluents; everything else does not.
  void find_negative_predicates() {
    for (const auto& a : domain_.actions) {
      scan_polarity(a.precondition, false);
      scan_effect_conditions(a.effect);
    }
    scan_polarity(problem_.goal, false);
  }

  void collect_init() {
    for (const auto& a : problem_.init) init_atoms_.insert(atom_key(a));
    for (const auto& ni : problem_.numeric_init)
      numeric_[atom_key(ni.function)] = ni.value;
    // Dynamic init atoms are fluents even when no action or goal mentions
    // them; register them first so layer 0 of any reachability analysis is
    // complete.
    for (const auto& a : problem_.init) {
      if (dynamic_.count(a.predicate)) fluent_id(atom_key(a));
    }
  }

  // For a predicate with complements, every typed instantiation gets both
  // fluents up front so that inits and effect mirrors are total.
  void register_complement_universes() {
    for (const auto& p : domain_.predicates) {
      if (!negative_.count(p.name)) continue;
      if (domain_.find_predicate("not-" + p.name)) {
        throw PddlError("predicate 'not-" + p.name +
                        "' collides with the complement synthesized for '" +
                        p.name + "'");
      }
      std::vector<std::vector<std::string>> columns;
      for (const auto& param : p.params) columns.push_back(objects_of(param.type));
      std::vector<std::string> pick(columns.size());
      enumerate(columns, 0, pick, [&](const std::vector<std::string>& terms) {
        int f = fluent_id(atom_key(p.name, terms));
        int c = fluent_id(complement_key(p.name, terms));
        link_complement(f, c);
      });
    }
  }

  static std::string complement_key(const std::string& pred,
                                    const std::vector<std::string>& terms) {
    return atom_key("not-" + pred, terms);
  }

  void link_complement(int f, int c) {
    task_.complement_of.resize(task_.fluent_names.size(), -1);
    task_.complement_of[f] = c;
    task_.complement_of[c] = f;
  }

  std::vector<std::string> objects_of(const std::string& type) const {
    if (type.empty()) {
      // untyped parameter: ranges over every object
      std::vector<std::string> all;
      for (const auto& o : problem_.objects) all.push_back(o.name);
      return all;
    }
    auto it = members_.find(type);
    return it == members_.end() ? std::vector<std::string>{} : it->second;
  }

  template <class Fn>
  void enumerate(const std::vector<std::vector<std::string>>& columns,
                 std::size_t level, std::vector<std::string>& pick, Fn&& fn) {
    if (level == columns.size()) {
      fn(pick);
      return;
    }
    for (const auto& v : columns[level]) {
      pick[level] = v;
      enumerate(columns, level + 1, pick, fn);
    }
  }

  int fluent_id(const std::string& key) {
    auto it = task_.fluent_ids.find(key);
    if (it != task_.fluent_ids.end()) return it->second;
    int id = static_cast<int>(task_.fluent_names.size());
    task_.fluent_names.push_back(key);
    task_.fluent_ids.emplace(key, id);
    task_.complement_of.push_back(-1);
    return id;
  }

  void note(const std::string& n) {
    if (noted_.insert(n).second) task_.notes.push_back(n);
  }

  // ---- formula grounding ----

  GroundFormula ground_formula(const Formula& f, Binding& b, bool negated,
                               const std::string& ctx) {
    switch (f.kind) {
      case Formula::Kind::Atom: {
        Atom ga{f.atom.predicate, substitute(f.atom.terms, b)};
        if (!dynamic_.count(ga.predicate)) {
          bool v = init_atoms_.count(atom_key(ga)) > 0;
          return GroundFormula::constant(negated ? !v : v);
        }
        if (!negated) return GroundFormula::lit(fluent_id(atom_key(ga)));
        if (!negative_.count(ga.predicate)) {
          throw PddlError("internal: negative occurrence of '" + ga.predicate +
                          "' was not anticipated");
        }
        return GroundFormula::lit(fluent_id(complement_key(ga.predicate, ga.terms)));
      }
      case Formula::Kind::Not:
        return ground_formula(f.children.front(), b, !negated, ctx);
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        bool conj = (f.kind == Formula::Kind::And) != negated;
        return combine(conj, [&](std::vector<GroundFormula>& kids) {
          for (const auto& c : f.children)
            kids.push_back(ground_formula(c, b, negated, ctx));
        });
      }
      case Formula::Kind::Forall:
      case Formula::Kind::Exists: {
        bool conj = (f.kind == Formula::Kind::Forall) != negated;
        std::vector<std::string> objs = objects_of(f.var_type);
        if (objs.empty()) {
          note("degenerate quantifier over empty type '" + f.var_type + "' in " +
               ctx + " grounds to " + (conj ? "true" : "false"));
        }
        return combine(conj, [&](std::vector<GroundFormula>& kids) {
          for (const auto& o : objs) {
            b[f.var] = o;
            kids.push_back(ground_formula(f.children.front(), b, negated, ctx));
          }
          b.erase(f.var);
        });
      }
    }
    return GroundFormula::constant(true);
  }

  template <class Fill>
  GroundFormula combine(bool conjunction, Fill&& fill) {
    std::vector<GroundFormula> kids;
    fill(kids);
    GroundFormula out;
    out.kind = conjunction ? GroundFormula::Kind::And : GroundFormula::Kind::Or;
    for (auto& k : kids) {
      if (k.kind == GroundFormula::Kind::True) {
        if (!conjunction) return GroundFormula::constant(true);
        continue;
      }
      if (k.kind == GroundFormula::Kind::False) {
        if (conjunction) return GroundFormula::constant(false);
        continue;
      }
      out.children.push_back(std::move(k));
    }
    if (out.children.empty()) return GroundFormula::constant(conjunction);
    if (out.children.size() == 1) return std::move(out.children.front());
    return out;
  }

  // DNF with a size cap; each disjunct is a sorted, deduplicated conjunction.
  // Disjuncts demanding a fluent and its complement are unsatisfiable and are
  // dropped.
  std::vector<std::vector<int>> to_dnf(const GroundFormula& g) {
    switch (g.kind) {
      case GroundFormula::Kind::True:
        return {{}};
      case GroundFormula::Kind::False:
        return {};
      case GroundFormula::Kind::Lit:
        return {{g.fluent}};
      case GroundFormula::Kind::Not:
        throw PddlError("internal: Not survived grounding");
      case GroundFormula::Kind::Or: {
        std::vector<std::vector<int>> out;
        for (const auto& c : g.children) {
          for (auto& d : to_dnf(c)) out.push_back(std::move(d));
          if (out.size() > kDnfCap) throw PddlError("precondition DNF too large");
        }
        return out;
      }
      case GroundFormula::Kind::And: {
        std::vector<std::vector<int>> acc{{}};
        for (const auto& c : g.children) {
          std::vector<std::vector<int>> rhs = to_dnf(c);
          std::vector<std::vector<int>> next;
          for (const auto& a : acc) {
            for (const auto& b : rhs) {
              std::vector<int> merged = a;
              merged.insert(merged.end(), b.begin(), b.end());
              std::sort(merged.begin(), merged.end());
              merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
              if (!contradictory(merged)) next.push_back(std::move(merged));
              if (next.size() > kDnfCap) throw PddlError("precondition DNF too large");
            }
          }
          acc = std::move(next);
        }
        // drop exact duplicates, keep first occurrence order
        std::vector<std::vector<int>> out;
        for (auto& d : acc) {
          if (std::find(out.begin(), out.end(), d) == out.end())
            out.push_back(std::move(d));
        }
        return out;
      }
    }
    return {};
  }

  bool contradictory(const std::vector<int>& conj) const {
    for (int f : conj) {
      int c = task_.complement_of[f];
      if (c >= 0 && std::binary_search(conj.begin(), conj.end(), c) && c > f)
        return true;
    }
    return false;
  }

  // ---- effect grounding ----

  struct TaggedFluent {
    int fluent;
    Atom lifted;  // pre-substitution source, for alias diagnostics
  };

  struct EffectAcc {
    std::vector<TaggedFluent> add, del;
    struct Group {
      GroundFormula condition;
      std::vector<TaggedFluent> add, del;
    };
    std::vector<Group> groups;
    // increase amounts, kept unresolved so degenerate bindings can be pruned
    // before a missing cost function is reported
    std::vector<double> constant_amounts;
    std::vector<Atom> function_amounts;
  };

  void walk_effect(const Effect& e, Binding& b, EffectAcc& acc, int group,
                   const std::string& ctx) {
    switch (e.kind) {
      case Effect::Kind::And:
        for (const auto& c : e.children) walk_effect(c, b, acc, group, ctx);
        return;
      case Effect::Kind::Forall: {
        for (const auto& o : objects_of(e.var_type)) {
          b[e.var] = o;
          walk_effect(e.children.front(), b, acc, group, ctx);
        }
        b.erase(e.var);
        return;
      }
      case Effect::Kind::Add:
      case Effect::Kind::Del: {
        Atom ga{e.atom.predicate, substitute(e.atom.terms, b)};
        if (!dynamic_.count(ga.predicate))
          throw PddlError("internal: static predicate in effect");
        TaggedFluent tf{fluent_id(atom_key(ga)), e.atom};
        auto& add = group < 0 ? acc.add : acc.groups[group].add;
        auto& del = group < 0 ? acc.del : acc.groups[group].del;
        (e.kind == Effect::Kind::Add ? add : del).push_back(tf);
        return;
      }
      case Effect::Kind::When: {
        if (group >= 0) throw PddlError("nested 'when' effects are not supported");
        GroundFormula cond = ground_formula(e.condition, b, false, ctx);
        if (cond.kind == GroundFormula::Kind::False) return;
        if (cond.kind == GroundFormula::Kind::True) {
          walk_effect(e.children.front(), b, acc, -1, ctx);
          return;
        }
        acc.groups.push_back({std::move(cond), {}, {}});
        walk_effect(e.children.front(), b, acc,
                    static_cast<int>(acc.groups.size()) - 1, ctx);
        return;
      }
      case Effect::Kind::Increase: {
        if (e.amount.is_function) {
          acc.function_amounts.push_back(
              Atom{e.amount.function.predicate, substitute(e.amount.function.terms, b)});
        } else {
          acc.constant_amounts.push_back(e.amount.constant);
        }
        return;
      }
    }
  }

  // Mirror effects onto complement fluents, then sort and dedupe.
  static void expand_and_pack(std::vector<TaggedFluent>& add,
                              std::vector<TaggedFluent>& del,
                              const std::vector<int>& complement_of,
                              std::vector<int>& add_out, std::vector<int>& del_out) {
    std::vector<TaggedFluent> add2 = add, del2 = del;
    for (const auto& tf : add) {
      if (complement_of[tf.fluent] >= 0)
        del2.push_back({complement_of[tf.fluent], tf.lifted});
    }
    for (const auto& tf : del) {
      if (complement_of[tf.fluent] >= 0)
        add2.push_back({complement_of[tf.fluent], tf.lifted});
    }
    add = std::move(add2);
    del = std::move(del2);
    auto pack = [](const std::vector<TaggedFluent>& in, std::vector<int>& out) {
      for (const auto& tf : in) out.push_back(tf.fluent);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    };
    pack(add, add_out);
    pack(del, del_out);
  }

  // nullopt: conflict from parameter aliasing, caller prunes the binding.
  // Throws when the schema itself adds and deletes one lifted atom.
  bool check_conflicts(const std::vector<TaggedFluent>& add,
                       const std::vector<TaggedFluent>& del,
                       const std::string& ctx) {
    for (const auto& a : add) {
      for (const auto& d : del) {
        if (a.fluent != d.fluent) continue;
        if (a.lifted == d.lifted) {
          throw PddlError(ctx + " both adds and deletes " +
                          task_.fluent_names[a.fluent]);
        }
        note(ctx + " pruned: parameter aliasing makes it add and delete " +
             task_.fluent_names[a.fluent]);
        return false;
      }
    }
    return true;
  }

  // ---- schema grounding ----

  struct StaticConjunct {
    Atom atom;
    bool negated;
    std::vector<std::size_t> params;  // schema parameter indices it mentions
  };

  // Top-level static conjuncts let the binding enumeration prune early.
  void collect_static_conjuncts(const Formula& f, const ActionSchema& schema,
                                bool negated, std::vector<StaticConjunct>& out) {
    if (f.kind == Formula::Kind::Not) {
      collect_static_conjuncts(f.children.front(), schema, !negated, out);
      return;
    }
    if (f.kind == Formula::Kind::And && !negated) {
      for (const auto& c : f.children)
        collect_static_conjuncts(c, schema, negated, out);
      return;
    }
    if (f.kind != Formula::Kind::Atom) return;
    if (dynamic_.count(f.atom.predicate)) return;
    StaticConjunct sc{f.atom, negated, {}};
    bool only_params = true;
    for (const auto& t : sc.atom.terms) {
      if (t.empty() || t[0] != '?') continue;
      bool found = false;
      for (std::size_t i = 0; i < schema.params.size(); ++i) {
        if (schema.params[i].name == t) {
          sc.params.push_back(i);
          found = true;
          break;
        }
      }
      if (!found) only_params = false;
    }
    if (only_params) out.push_back(std::move(sc));
  }

  void ground_schema(const ActionSchema& schema) {
    std::vector<StaticConjunct> statics;
    collect_static_conjuncts(schema.precondition, schema, false, statics);
    std::vector<std::vector<std::string>> columns;
    for (const auto& p : schema.params) columns.push_back(objects_of(p.type));
    std::vector<std::string> pick(columns.size());
    ground_schema_rec(schema, statics, columns, 0, pick);
  }

  void ground_schema_rec(const ActionSchema& schema,
                         const std::vector<StaticConjunct>& statics,
                         const std::vector<std::vector<std::string>>& columns,
                         std::size_t level, std::vector<std::string>& pick) {
    if (level == columns.size()) {
      ground_binding(schema, pick);
      return;
    }
    for (const auto& obj : columns[level]) {
      pick[level] = obj;
      bool viable = true;
      for (const auto& sc : statics) {
        bool all_bound = true;
        for (std::size_t pi : sc.params) {
          if (pi > level) {
            all_bound = false;
            break;
          }
        }
        if (!all_bound) continue;
        bool relevant = false;
        for (std::size_t pi : sc.params) relevant |= (pi == level);
        if (!relevant) continue;  // was already checked at an earlier level
        std::vector<std::string> terms;
        terms.reserve(sc.atom.terms.size());
        for (const auto& t : sc.atom.terms) {
          if (!t.empty() && t[0] == '?') {
            for (std::size_t i = 0; i < schema.params.size(); ++i) {
              if (schema.params[i].name == t) {
                terms.push_back(pick[i]);
                break;
              }
            }
          } else {
            terms.push_back(t);
          }
        }
        bool v = init_atoms_.count(atom_key(sc.atom.predicate, terms)) > 0;
        if (sc.negated) v = !v;
        if (!v) {
          viable = false;
          break;
        }
      }
      if (viable) ground_schema_rec(schema, statics, columns, level + 1, pick);
    }
  }

  void ground_binding(const ActionSchema& schema, const std::vector<std::string>& pick) {
    Binding b;
    for (std::size_t i = 0; i < schema.params.size(); ++i)
      b[schema.params[i].name] = pick[i];

    std::string ctx = "(" + schema.name;
    for (const auto& a : pick) ctx += " " + a;
    ctx += ")";

    GroundFormula pre = ground_formula(schema.precondition, b, false, ctx);
    if (pre.kind == GroundFormula::Kind::False) return;
    std::vector<std::vector<int>> disjuncts = to_dnf(pre);
    if (disjuncts.empty()) return;

    EffectAcc acc;
    walk_effect(schema.effect, b, acc, -1, ctx);

    if (!check_conflicts(acc.add, acc.del, ctx)) return;
    for (auto& g : acc.groups) {
      if (!check_conflicts(g.add, g.del, ctx)) return;
      // conditional effects clashing with unconditional ones is a schema bug
      for (const auto& ga : g.add)
        for (const auto& ua : acc.del)
          if (ga.fluent == ua.fluent)
            throw PddlError(ctx + " conditionally adds what it deletes: " +
                            task_.fluent_names[ga.fluent]);
      for (const auto& gd : g.del)
        for (const auto& ua : acc.add)
          if (gd.fluent == ua.fluent)
            throw PddlError(ctx + " conditionally deletes what it adds: " +
                            task_.fluent_names[gd.fluent]);
    }

    double cost = 0.0;
    for (double c : acc.constant_amounts) cost += c;
    for (const auto& fn : acc.function_amounts) {
      auto it = numeric_.find(atom_key(fn));
      if (it == numeric_.end())
        throw PddlError(atom_key(fn) + " is undefined but required by " + ctx);
      cost += it->second;
    }
    if (acc.constant_amounts.empty() && acc.function_amounts.empty())
      cost = 1.0;  // unit cost convention
    if (cost < 0) throw PddlError(ctx + " has negative cost");

    GroundAction proto;
    proto.schema = schema.name;
    proto.args = pick;
    proto.cost = cost;
    expand_and_pack(acc.add, acc.del, task_.complement_of, proto.add, proto.del);
    for (auto& g : acc.groups) {
      std::vector<std::vector<int>> cond_dnf = to_dnf(g.condition);
      for (const auto& cd : cond_dnf) {
        GroundCondEffect ce;
        ce.condition = cd;
        expand_and_pack(g.add, g.del, task_.complement_of, ce.add, ce.del);
        proto.cond_effects.push_back(std::move(ce));
      }
    }

    int variant = 0;
    for (auto& d : disjuncts) {
      GroundAction ga = proto;
      ga.variant = variant++;
      ga.precondition = std::move(d);
      task_.actions.push_back(std::move(ga));
    }
  }

  void finalize_init() {
    task_.init.fluents = FluentSet(task_.num_fluents());
    for (const auto& a : problem_.init) {
      if (!dynamic_.count(a.predicate)) continue;
      auto it = task_.fluent_ids.find(atom_key(a));
      if (it != task_.fluent_ids.end()) task_.init.fluents.set(it->second);
    }
    // complements: exactly one of (p ...) / (not-p ...) holds initially
    for (int f = 0; f < task_.num_fluents(); ++f) {
      int c = task_.complement_of[f];
      if (c < 0 || c < f) continue;
      bool base_is_complement = task_.fluent_names[f].rfind("(not-", 0) == 0;
      int base = base_is_complement ? c : f;
      int comp = base_is_complement ? f : c;
      if (!task_.init.fluents.test(base)) task_.init.fluents.set(comp);
    }
  }

  static constexpr std::size_t kDnfCap = 4096;

  const Domain& domain_;
  const Problem& problem_;
  std::unordered_map<std::string, std::string> supertype_;
  std::map<std::string, std::vector<std::string>> members_;
  std::unordered_set<std::string> dynamic_;
  std::unordered_set<std::string> negative_;
  std::unordered_set<std::string> init_atoms_;
  std::unordered_map<std::string, double> numeric_;
  std::unordered_set<std::string> noted_;
  GroundTask task_;
};

}  // namespace

std::string GroundAction::display() const {
  std::string out = "(" + schema;
  for (const auto& a : args) out += " " + a;
  out += ")";
  if (variant > 0) out += "#" + std::to_string(variant);
  return out;
}

int GroundTask::fluent(const std::string& name) const {
  auto it = fluent_ids.find(name);
  return it == fluent_ids.end() ? -1 : it->second;
}

namespace {

void dump_formula(const GroundTask& t, const GroundFormula& g, std::ostream& os) {
  switch (g.kind) {
    case GroundFormula::Kind::True: os << "true"; return;
    case GroundFormula::Kind::False: os << "false"; return;
    case GroundFormula::Kind::Lit: os << t.fluent_names[g.fluent]; return;
    case GroundFormula::Kind::Not:
      os << "(not ";
      dump_formula(t, g.children.front(), os);
      os << ")";
      return;
    case GroundFormula::Kind::And:
    case GroundFormula::Kind::Or: {
      os << (g.kind == GroundFormula::Kind::And ? "(and" : "(or");
      for (const auto& c : g.children) {
        os << ' ';
        dump_formula(t, c, os);
      }
      os << ')';
      return;
    }
  }
}

}  // namespace

std::string GroundTask::dump() const {
  std::ostringstream os;
  os << "fluents " << fluent_names.size() << "\n";
  for (std::size_t i = 0; i < fluent_names.size(); ++i) {
    os << "  f" << i << " " << fluent_names[i];
    if (complement_of[i] >= 0) os << " complement f" << complement_of[i];
    if (init.fluents.test(static_cast<int>(i))) os << " [init]";
    os << "\n";
  }
  os << "actions " << actions.size() << "\n";
  for (const auto& a : actions) {
    os << "  " << a.display() << " cost " << a.cost << "\n    pre";
    for (int f : a.precondition) os << " " << fluent_names[f];
    os << "\n    add";
    for (int f : a.add) os << " " << fluent_names[f];
    os << "\n    del";
    for (int f : a.del) os << " " << fluent_names[f];
    os << "\n";
    for (const auto& ce : a.cond_effects) {
      os << "    when";
      for (int f : ce.condition) os << " " << fluent_names[f];
      os << " add";
      for (int f : ce.add) os << " " << fluent_names[f];
      os << " del";
      for (int f : ce.del) os << " " << fluent_names[f];
      os << "\n";
    }
  }
  os << "goal ";
  dump_formula(*this, goal, os);
  os << "\n";
  for (const auto& n : notes) os << "note " << n << "\n";
  return os.str();
}

bool holds(const State& s, const GroundFormula& f) {
  switch (f.kind) {
    case GroundFormula::Kind::True: return true;
    case GroundFormula::Kind::False: return false;
    case GroundFormula::Kind::Lit: return s.fluents.test(f.fluent);
    case GroundFormula::Kind::Not: return !holds(s, f.children.front());
    case GroundFormula::Kind::And:
      for (const auto& c : f.children)
        if (!holds(s, c)) return false;
      return true;
    case GroundFormula::Kind::Or:
      for (const auto& c : f.children)
        if (holds(s, c)) return true;
      return false;
  }
  return false;
}

bool applicable(const State& s, const GroundAction& a) {
  for (int f : a.precondition)
    if (!s.fluents.test(f)) return false;
  return true;
}

State apply(const GroundTask& task, const State& s, const GroundAction& a) {
  for (int f : a.precondition) {
    if (!s.fluents.test(f)) {
      throw PddlError("precondition of " + a.display() + " violated: " +
                      task.fluent_names[f] + " does not hold");
    }
  }
  State next = s;
  // conditions are evaluated against the pre-state; deletes land before adds
  std::vector<const GroundCondEffect*> fired;
  for (const auto& ce : a.cond_effects) {
    bool ok = true;
    for (int f : ce.condition) {
      if (!s.fluents.test(f)) {
        ok = false;
        break;
      }
    }
    if (ok) fired.push_back(&ce);
  }
  for (int f : a.del) next.fluents.reset(f);
  for (const auto* ce : fired)
    for (int f : ce->del) next.fluents.reset(f);
  for (int f : a.add) next.fluents.set(f);
  for (const auto* ce : fired)
    for (int f : ce->add) next.fluents.set(f);
  next.total_cost += a.cost;
  return next;
}

GroundTask ground(const Domain& domain, const Problem& problem) {
  validate_domain(domain);
  validate_problem(domain, problem);
  Grounder g(domain, problem);
  return g.run();
}

}  // namespace hiprl::pddl
