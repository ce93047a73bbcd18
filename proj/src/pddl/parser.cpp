#include "hiprl/pddl/parser.hpp"

#include <cstdlib>
#include <vector>

namespace hiprl::pddl {

namespace {

struct Token {
  enum class Kind { LParen, RParen, Symbol, Number, End };
  Kind kind = Kind::End;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) {
      t.kind = Token::Kind::End;
      return t;
    }
    char c = text_[pos_];
    if (c == '(') {
      advance();
      t.kind = Token::Kind::LParen;
      t.text = "(";
      return t;
    }
    if (c == ')') {
      advance();
      t.kind = Token::Kind::RParen;
      t.text = ")";
      return t;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) advance();
    t.text = std::string(text_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(t.text.c_str(), &end);
    if (end && *end == '\0' && end != t.text.c_str()) {
      t.kind = Token::Kind::Number;
      t.value = v;
    } else {
      t.kind = Token::Kind::Symbol;
    }
    return t;
  }

 private:
  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' || c == ' ' || c == '\t' ||
           c == '\n' || c == '\r';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct OpenForm {
  std::string label;
  int line;
  int col;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : lexer_(text) { cur_ = lexer_.next(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    cur_ = lexer_.next();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur_.line, cur_.col);
  }

  Token expect(Token::Kind k, const std::string& what) {
    if (cur_.kind != k) {
      if (cur_.kind == Token::Kind::End && !open_.empty()) unclosed();
      fail("expected " + what + ", got '" + describe(cur_) + "'");
    }
    Token t = take();
    if (k == Token::Kind::LParen) open_.push_back({"(", t.line, t.col});
    if (k == Token::Kind::RParen && !open_.empty()) open_.pop_back();
    return t;
  }

  Token open(const std::string& label_hint = "(") {
    Token t = expect(Token::Kind::LParen, "'('");
    open_.back().label = label_hint;
    return t;
  }

  void close() { expect(Token::Kind::RParen, "')'"); }

  // Name the innermost open form once its head symbol is known; improves the
  // unclosed-paren message.
  void label_innermost(const std::string& head) {
    if (!open_.empty()) open_.back().label = "(" + head;
  }

  [[noreturn]] void unclosed() const {
    const OpenForm& f = open_.back();
    throw ParseError("unexpected end of input; unclosed form '" + f.label +
                         "' starts here",
                     f.line, f.col);
  }

  std::string take_symbol(const std::string& what) {
    if (cur_.kind == Token::Kind::End && !open_.empty()) unclosed();
    if (cur_.kind != Token::Kind::Symbol)
      fail("expected " + what + ", got '" + describe(cur_) + "'");
    return take().text;
  }

  bool at_rparen() const { return cur_.kind == Token::Kind::RParen; }
  bool at_lparen() const { return cur_.kind == Token::Kind::LParen; }
  bool at_end() const { return cur_.kind == Token::Kind::End; }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Token::Kind::End: return "<end of input>";
      default: return t.text;
    }
  }

 private:
  Lexer lexer_;
  Token cur_;
  std::vector<OpenForm> open_;
};

// `a b - t c d - u` style lists. Names before a '-' since the previous type
// marker all receive the type that follows it.
std::vector<TypedName> parse_typed_list(Reader& r, bool require_types) {
  std::vector<TypedName> out;
  std::size_t untyped_from = 0;
  while (!r.at_rparen()) {
    if (r.at_end()) r.unclosed();
    std::string sym = r.take_symbol("name or '-'");
    if (sym == "-") {
      std::string type = r.take_symbol("type name");
      if (untyped_from == out.size()) r.fail("'-' with no names before it");
      for (std::size_t i = untyped_from; i < out.size(); ++i) out[i].type = type;
      untyped_from = out.size();
    } else {
      out.push_back({sym, ""});
    }
  }
  if (require_types && untyped_from != out.size())
    r.fail("typed list is missing a type for '" + out[untyped_from].name + "'");
  return out;
}

Atom parse_atom_body(Reader& r, const std::string& head) {
  Atom a;
  a.predicate = head;
  while (!r.at_rparen()) {
    if (r.at_end()) r.unclosed();
    a.terms.push_back(r.take_symbol("term"));
  }
  return a;
}

Formula parse_formula_rec(Reader& r);

Formula parse_quantified(Reader& r, Formula::Kind kind) {
  r.open();
  std::vector<TypedName> vars = parse_typed_list(r, true);
  r.close();
  if (vars.empty()) r.fail("quantifier needs at least one variable");
  Formula body = parse_formula_rec(r);
  for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
    body = Formula::quantified(kind, it->name, it->type, std::move(body));
  }
  return body;
}

Formula parse_formula_rec(Reader& r) {
  r.open();
  std::string head = r.take_symbol("formula head");
  r.label_innermost(head);
  Formula f;
  if (head == "and" || head == "or") {
    f.kind = head == "and" ? Formula::Kind::And : Formula::Kind::Or;
    while (!r.at_rparen()) {
      if (r.at_end()) r.unclosed();
      f.children.push_back(parse_formula_rec(r));
    }
  } else if (head == "not") {
    f.kind = Formula::Kind::Not;
    f.children.push_back(parse_formula_rec(r));
  } else if (head == "forall" || head == "exists") {
    Formula q = parse_quantified(
        r, head == "forall" ? Formula::Kind::Forall : Formula::Kind::Exists);
    r.close();
    return q;
  } else {
    f = Formula::make_atom(parse_atom_body(r, head));
  }
  r.close();
  return f;
}

NumericExpr parse_amount(Reader& r) {
  NumericExpr e;
  if (r.at_lparen()) {
    r.open();
    std::string head = r.take_symbol("function name");
    e.is_function = true;
    e.function = parse_atom_body(r, head);
    r.close();
  } else {
    if (r.peek().kind != Token::Kind::Number) r.fail("expected number or function term");
    e.constant = r.take().value;
  }
  return e;
}

Effect parse_effect_rec(Reader& r) {
  r.open();
  std::string head = r.take_symbol("effect head");
  r.label_innermost(head);
  Effect e;
  if (head == "and") {
    e.kind = Effect::Kind::And;
    while (!r.at_rparen()) {
      if (r.at_end()) r.unclosed();
      e.children.push_back(parse_effect_rec(r));
    }
  } else if (head == "not") {
    r.open();
    std::string pred = r.take_symbol("predicate name");
    e = Effect::del(parse_atom_body(r, pred));
    r.close();
  } else if (head == "forall") {
    r.open();
    std::vector<TypedName> vars = parse_typed_list(r, true);
    r.close();
    if (vars.empty()) r.fail("effect forall needs a variable");
    Effect body = parse_effect_rec(r);
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      Effect wrap;
      wrap.kind = Effect::Kind::Forall;
      wrap.var = it->name;
      wrap.var_type = it->type;
      wrap.children.push_back(std::move(body));
      body = std::move(wrap);
    }
    r.close();
    return body;
  } else if (head == "when") {
    e.kind = Effect::Kind::When;
    e.condition = parse_formula_rec(r);
    e.children.push_back(parse_effect_rec(r));
  } else if (head == "increase") {
    e.kind = Effect::Kind::Increase;
    r.open();
    std::string fn = r.take_symbol("function name");
    e.function = parse_atom_body(r, fn);
    r.close();
    e.amount = parse_amount(r);
  } else {
    e = Effect::add(parse_atom_body(r, head));
  }
  r.close();
  return e;
}

}  // namespace

Domain parse_domain(std::string_view text, const std::string& source_name) {
  Reader r(text);
  Domain d;
  try {
    r.open();
    std::string def = r.take_symbol("'define'");
    if (def != "define") r.fail("expected 'define'");
    r.label_innermost("define");
    r.open();
    std::string kw = r.take_symbol("'domain'");
    if (kw != "domain") r.fail("expected '(domain ...)'");
    r.label_innermost("domain");
    d.name = r.take_symbol("domain name");
    r.close();

    while (!r.at_rparen()) {
      if (r.at_end()) r.unclosed();
      r.open();
      std::string section = r.take_symbol("section keyword");
      r.label_innermost(section);
      if (section == ":requirements") {
        while (!r.at_rparen()) d.requirements.push_back(r.take_symbol("requirement"));
      } else if (section == ":types") {
        d.types = parse_typed_list(r, false);
      } else if (section == ":predicates") {
        while (!r.at_rparen()) {
          if (r.at_end()) r.unclosed();
          r.open();
          PredicateDecl p;
          p.name = r.take_symbol("predicate name");
          r.label_innermost(p.name);
          p.params = parse_typed_list(r, false);
          r.close();
          d.predicates.push_back(std::move(p));
        }
      } else if (section == ":functions") {
        while (!r.at_rparen()) {
          if (r.at_end()) r.unclosed();
          r.open();
          FunctionDecl f;
          f.name = r.take_symbol("function name");
          r.label_innermost(f.name);
          f.params = parse_typed_list(r, false);
          r.close();
          d.functions.push_back(std::move(f));
        }
      } else if (section == ":action") {
        ActionSchema a;
        a.name = r.take_symbol("action name");
        r.label_innermost(":action " + a.name);
        bool saw_pre = false, saw_eff = false;
        while (!r.at_rparen()) {
          if (r.at_end()) r.unclosed();
          std::string part = r.take_symbol("action keyword");
          if (part == ":parameters") {
            r.open();
            a.params = parse_typed_list(r, true);
            r.close();
          } else if (part == ":precondition") {
            a.precondition = parse_formula_rec(r);
            saw_pre = true;
          } else if (part == ":effect") {
            a.effect = parse_effect_rec(r);
            saw_eff = true;
          } else {
            r.fail("unknown action keyword '" + part + "'");
          }
        }
        if (!saw_pre) a.precondition = Formula::make(Formula::Kind::And, {});
        if (!saw_eff) r.fail("action '" + a.name + "' has no :effect");
        d.actions.push_back(std::move(a));
      } else {
        r.fail("unknown section '" + section + "'");
      }
      r.close();
    }
    r.close();
    if (!r.at_end()) r.fail("trailing input after domain definition");
  } catch (ParseError& e) {
    throw ParseError(source_name + ": " + e.message, e.line, e.col);
  }
  validate_domain(d);
  return d;
}

Problem parse_problem(std::string_view text, const Domain& domain,
                      const std::string& source_name) {
  Reader r(text);
  Problem p;
  try {
    r.open();
    std::string def = r.take_symbol("'define'");
    if (def != "define") r.fail("expected 'define'");
    r.label_innermost("define");
    r.open();
    std::string kw = r.take_symbol("'problem'");
    if (kw != "problem") r.fail("expected '(problem ...)'");
    r.label_innermost("problem");
    p.name = r.take_symbol("problem name");
    r.close();

    bool saw_goal = false;
    while (!r.at_rparen()) {
      if (r.at_end()) r.unclosed();
      r.open();
      std::string section = r.take_symbol("section keyword");
      r.label_innermost(section);
      if (section == ":domain") {
        p.domain_name = r.take_symbol("domain name");
      } else if (section == ":objects") {
        p.objects = parse_typed_list(r, true);
      } else if (section == ":init") {
        while (!r.at_rparen()) {
          if (r.at_end()) r.unclosed();
          r.open();
          std::string head = r.take_symbol("predicate or '='");
          if (head == "=") {
            NumericInit ni;
            r.open();
            std::string fn = r.take_symbol("function name");
            ni.function = parse_atom_body(r, fn);
            r.close();
            if (r.peek().kind != Token::Kind::Number) r.fail("expected number");
            ni.value = r.take().value;
            p.numeric_init.push_back(std::move(ni));
          } else {
            p.init.push_back(parse_atom_body(r, head));
          }
          r.close();
        }
      } else if (section == ":goal") {
        p.goal = parse_formula_rec(r);
        saw_goal = true;
      } else if (section == ":metric") {
        std::string dir = r.take_symbol("'minimize'");
        if (dir != "minimize") r.fail("only 'minimize' metrics are supported");
        r.open();
        p.metric_function = r.take_symbol("function name");
        r.close();
        p.minimize_metric = true;
      } else {
        r.fail("unknown section '" + section + "'");
      }
      r.close();
    }
    r.close();
    if (!r.at_end()) r.fail("trailing input after problem definition");
    if (!saw_goal) r.fail("problem has no :goal");
  } catch (ParseError& e) {
    throw ParseError(source_name + ": " + e.message, e.line, e.col);
  }
  validate_problem(domain, p);
  return p;
}

Formula parse_formula(std::string_view text, const Domain&) {
  Reader r(text);
  Formula f = parse_formula_rec(r);
  if (!r.at_end()) r.fail("trailing input after formula");
  return f;
}

Formula parse_goal_block(std::string_view text) {
  Reader r(text);
  r.open(":goal block");
  std::string head = r.take_symbol("':goal'");
  if (head != ":goal") r.fail("expected ':goal', got '" + head + "'");
  Formula f = parse_formula_rec(r);
  r.close();
  if (!r.at_end()) r.fail("trailing input after goal block");
  return f;
}

}  // namespace hiprl::pddl
