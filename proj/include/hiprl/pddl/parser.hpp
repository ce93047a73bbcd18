#pragma once

#include <string>
#include <string_view>

#include "hiprl/pddl/ast.hpp"

namespace hiprl::pddl {

// Recursive-descent reader for domain and problem files. Errors carry line
// and column of the offending token plus the form being read; unclosed
// parentheses are reported with the location where the form started.

struct ParseError : PddlError {
  ParseError(const std::string& msg, int line, int col)
      : PddlError("parse error at " + std::to_string(line) + ":" +
                  std::to_string(col) + ": " + msg),
        message(msg),
        line(line),
        col(col) {}

  std::string message;
  int line;
  int col;
};

/// Parse and validate a domain. `source_name` appears in error messages.
Domain parse_domain(std::string_view text, const std::string& source_name = "<domain>");

/// Parse a problem and validate it against its domain.
Problem parse_problem(std::string_view text, const Domain& domain,
                      const std::string& source_name = "<problem>");

/// Parse a bare formula (a single s-expression). Purely syntactic; callers
/// validate against a domain when needed.
Formula parse_formula(std::string_view text, const Domain& domain);

/// Parse a `(:goal <formula>)` block and return the formula.
Formula parse_goal_block(std::string_view text);

}  // namespace hiprl::pddl
