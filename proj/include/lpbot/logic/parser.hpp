#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpbot/logic/term.hpp"

namespace lpbot::logic {

/// A program clause.  Variables are numbered 0..var_count-1.
struct Clause {
  Term head;
  Term body;  // the atom `true` for facts
  bool dynamic = false;
  std::uint64_t sequence = 0;
  VarId var_count = 0;
};

struct ParsedTerm {
  Term term;
  /// Named variables in first-occurrence order (`_` excluded).
  std::vector<std::pair<std::string, Term>> variables;
};

/// Parses clauses terminated by `.`.  Throws SyntaxError with line/column.
std::vector<Clause> parse_program(std::string_view source);

/// Parses a single term; a trailing `.` is optional.  Variables receive
/// ids starting at first_var_id.
ParsedTerm parse_term(std::string_view source, VarId first_var_id = 0);

/// Converts a term `H :- B` (or a bare head) into a clause with compact
/// variable numbering.  Throws EngineError(type) for non-callable heads.
Clause make_clause(const Term& term);

/// Renders a term in Edinburgh syntax, quoting atoms where needed.
std::string to_string(const Term& t);

}  // namespace lpbot::logic
