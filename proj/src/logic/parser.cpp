#include "lpbot/logic/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <unordered_map>

#include "lpbot/logic/errors.hpp"

namespace lpbot::logic {

namespace {

enum class OpType { xfx, xfy, yfx, fy, fx };

struct OpDef {
  int priority;
  OpType type;
};

const std::map<std::string, OpDef, std::less<>>& infix_ops() {
  static const std::map<std::string, OpDef, std::less<>> ops = {
      {":-", {1200, OpType::xfx}}, {";", {1100, OpType::xfy}},   {"->", {1050, OpType::xfy}},
      {",", {1000, OpType::xfy}},  {"=", {700, OpType::xfx}},    {"\\=", {700, OpType::xfx}},
      {"==", {700, OpType::xfx}},  {"\\==", {700, OpType::xfx}}, {"is", {700, OpType::xfx}},
      {"<", {700, OpType::xfx}},   {">", {700, OpType::xfx}},    {"=<", {700, OpType::xfx}},
      {">=", {700, OpType::xfx}},  {"=:=", {700, OpType::xfx}},  {"=\\=", {700, OpType::xfx}},
      {"@<", {700, OpType::xfx}},  {"@>", {700, OpType::xfx}},   {"@=<", {700, OpType::xfx}},
      {"@>=", {700, OpType::xfx}}, {"+", {500, OpType::yfx}},    {"-", {500, OpType::yfx}},
      {"*", {400, OpType::yfx}},   {"//", {400, OpType::yfx}},   {"/", {400, OpType::yfx}},
      {"mod", {400, OpType::yfx}},
  };
  return ops;
}

const std::map<std::string, OpDef, std::less<>>& prefix_ops() {
  static const std::map<std::string, OpDef, std::less<>> ops = {
      {":-", {1200, OpType::fx}},
      {"\\+", {900, OpType::fy}},
      {"-", {200, OpType::fy}},
  };
  return ops;
}

bool is_symbol_char(char c) {
  switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>':
    case '=': case '~': case ':': case '.': case '?': case '@': case '#': case '&': case '$':
      return true;
    default:
      return false;
  }
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

enum class Tok { name, quoted, var, integer, punct, end, eof };

struct Token {
  Tok type = Tok::eof;
  std::string text;
  std::int64_t value = 0;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
  bool layout_before = false;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    bool layout = skip_layout();
    Token t;
    t.line = line_;
    t.column = col_;
    t.offset = pos_;
    t.layout_before = layout;
    if (pos_ >= src_.size()) {
      t.type = Tok::eof;
      return t;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      t.type = Tok::integer;
      t.text = std::string(src_.substr(start, pos_ - start));
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
      if (ec != std::errc()) fail(t, "integer literal out of range");
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      t.type = Tok::var;
      t.text = take_while(is_alnum);
      return t;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      t.type = Tok::name;
      t.text = take_while(is_alnum);
      return t;
    }
    if (c == '\'') {
      t.type = Tok::quoted;
      t.text = read_quoted(t);
      return t;
    }
    if (c == '(' || c == ')' || c == '[' || c == ']' || c == '|' || c == ',' || c == '{' ||
        c == '}') {
      advance();
      t.type = Tok::punct;
      t.text = std::string(1, c);
      return t;
    }
    if (c == '!' || c == ';') {
      advance();
      t.type = Tok::name;
      t.text = std::string(1, c);
      return t;
    }
    if (c == '.') {
      char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : ' ';
      if (std::isspace(static_cast<unsigned char>(n)) || n == '%' || pos_ + 1 >= src_.size()) {
        advance();
        t.type = Tok::end;
        t.text = ".";
        return t;
      }
    }
    if (is_symbol_char(c)) {
      t.type = Tok::name;
      t.text = take_while(is_symbol_char);
      return t;
    }
    if (c == '"') fail(t, "double-quoted strings are not supported");
    fail(t, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw SyntaxError(at.line, at.column, message, excerpt(at.offset));
  }

  std::string excerpt(std::size_t offset) const {
    std::size_t begin = offset;
    while (begin > 0 && src_[begin - 1] != '\n') --begin;
    std::size_t end = offset;
    while (end < src_.size() && src_[end] != '\n') ++end;
    std::string line(src_.substr(begin, end - begin));
    if (line.size() > 120) line = line.substr(0, 120) + "...";
    return line;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool skip_layout() {
    bool any = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        any = true;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        any = true;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        Token at;
        at.line = line_;
        at.column = col_;
        at.offset = pos_;
        advance();
        advance();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= src_.size()) fail(at, "unterminated block comment");
        advance();
        advance();
        any = true;
      } else {
        break;
      }
    }
    return any;
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && pred(src_[pos_])) advance();
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string read_quoted(const Token& at) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) fail(at, "unterminated quoted atom");
      char c = src_[pos_];
      if (c == '\'') {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
          out += '\'';
          advance();
          advance();
          continue;
        }
        advance();
        return out;
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        char e = src_[pos_ + 1];
        advance();
        advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          default: fail(at, std::string("unknown escape \\") + e);
        }
        continue;
      }
      if (c == '\n') fail(at, "newline in quoted atom");
      out += c;
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, VarId first_var) : lex_(src), next_var_(first_var) {
    tok_ = lex_.next();
  }

  bool at_eof() const { return tok_.type == Tok::eof; }

  /// Reads one term followed by an end token (or eof when allowed).
  Term read_clause_term(bool end_optional) {
    var_map_.clear();
    var_names_.clear();
    Term t = parse(1200).first;
    if (tok_.type == Tok::end) {
      advance();
    } else if (!(end_optional && tok_.type == Tok::eof)) {
      if (tok_.type == Tok::eof) lex_.fail(tok_, "unexpected end of input, expected '.'");
      lex_.fail(tok_, "operator expected, found '" + tok_.text + "'");
    }
    return t;
  }

  void expect_eof() {
    if (tok_.type != Tok::eof) lex_.fail(tok_, "unexpected text after term");
  }

  const std::vector<std::pair<std::string, Term>>& var_names() const { return var_names_; }
  VarId next_var() const { return next_var_; }
  void reset_vars(VarId first) { next_var_ = first; }

 private:
  void advance() { tok_ = lex_.next(); }

  bool is_punct(const char* p) const { return tok_.type == Tok::punct && tok_.text == p; }

  void expect_punct(const char* p) {
    if (!is_punct(p)) {
      if (tok_.type == Tok::eof) lex_.fail(tok_, std::string("unexpected end of input, expected '") + p + "'");
      lex_.fail(tok_, std::string("expected '") + p + "', found '" + tok_.text + "'");
    }
    advance();
  }

  // Name of the current token when it can act as an infix operator.
  std::optional<std::string> infix_name() const {
    if (tok_.type == Tok::name) return tok_.text;
    if (tok_.type == Tok::punct && tok_.text == ",") return std::string(",");
    return std::nullopt;
  }

  bool starts_term() const {
    switch (tok_.type) {
      case Tok::integer: case Tok::var: case Tok::quoted: return true;
      case Tok::punct: return tok_.text == "(" || tok_.text == "[";
      case Tok::name:
        if (infix_ops().count(tok_.text) && !prefix_ops().count(tok_.text)) return false;
        return true;
      default: return false;
    }
  }

  std::pair<Term, int> parse(int max_prec) {
    auto [left, left_prec] = parse_primary(max_prec);
    while (true) {
      auto name = infix_name();
      if (!name) break;
      auto it = infix_ops().find(*name);
      if (it == infix_ops().end()) break;
      const OpDef& op = it->second;
      int left_max = op.type == OpType::yfx ? op.priority : op.priority - 1;
      int right_max = op.type == OpType::xfy ? op.priority : op.priority - 1;
      if (op.priority > max_prec || left_prec > left_max) break;
      advance();
      Term right = parse(right_max).first;
      left = Term::compound(*name, {left, right});
      left_prec = op.priority;
    }
    return {left, left_prec};
  }

  std::pair<Term, int> parse_primary(int max_prec) {
    Token t = tok_;
    switch (t.type) {
      case Tok::integer:
        advance();
        return {Term::integer(t.value), 0};
      case Tok::var:
        advance();
        return {variable(t.text), 0};
      case Tok::punct:
        if (t.text == "(") {
          advance();
          Term inner = parse(1200).first;
          expect_punct(")");
          return {inner, 0};
        }
        if (t.text == "[") {
          advance();
          if (is_punct("]")) {
            advance();
            return {Term(), 0};
          }
          std::vector<Term> items;
          items.push_back(parse(999).first);
          while (is_punct(",")) {
            advance();
            items.push_back(parse(999).first);
          }
          Term tail;
          if (is_punct("|")) {
            advance();
            tail = parse(999).first;
          }
          expect_punct("]");
          return {Term::list(items, tail), 0};
        }
        if (t.text == "{") lex_.fail(t, "curly-brace terms are not supported");
        lex_.fail(t, "unexpected '" + t.text + "'");
      case Tok::name:
      case Tok::quoted: {
        advance();
        if (is_punct("(") && !tok_.layout_before) {
          advance();
          std::vector<Term> args;
          args.push_back(parse(999).first);
          while (is_punct(",")) {
            advance();
            args.push_back(parse(999).first);
          }
          expect_punct(")");
          return {Term::compound(t.text, std::move(args)), 0};
        }
        if (t.type == Tok::name && t.text == "-" && tok_.type == Tok::integer &&
            !tok_.layout_before) {
          std::int64_t v = tok_.value;
          advance();
          return {Term::integer(-v), 0};
        }
        if (t.type == Tok::name) {
          auto it = prefix_ops().find(t.text);
          if (it != prefix_ops().end() && it->second.priority <= max_prec && starts_term()) {
            const OpDef& op = it->second;
            int arg_max = op.type == OpType::fy ? op.priority : op.priority - 1;
            Term arg = parse(arg_max).first;
            return {Term::compound(t.text, {arg}), op.priority};
          }
        }
        return {Term::atom(t.text), 0};
      }
      case Tok::end:
        lex_.fail(t, "unexpected end of clause");
      case Tok::eof:
        lex_.fail(t, "unexpected end of input");
    }
    lex_.fail(t, "unexpected token");
  }

  Term variable(const std::string& name) {
    if (name == "_") return Term::variable(next_var_++);
    auto it = var_map_.find(name);
    if (it != var_map_.end()) return it->second;
    Term v = Term::variable(next_var_++, name);
    var_map_.emplace(name, v);
    var_names_.emplace_back(name, v);
    return v;
  }

  Lexer lex_;
  Token tok_;
  VarId next_var_;
  std::unordered_map<std::string, Term> var_map_;
  std::vector<std::pair<std::string, Term>> var_names_;
};

// Variables in goal positions become call/1 so that cut inside them stays local.
Term wrap_body(const Term& body) {
  if (body.is_variable()) return Term::compound("call", {body});
  if (body.is_functor(",", 2) || body.is_functor(";", 2) || body.is_functor("->", 2)) {
    return Term::compound(body.name(), {wrap_body(body.arg(0)), wrap_body(body.arg(1))});
  }
  return body;
}

Term renumber(const Term& t, std::unordered_map<VarId, VarId>& map) {
  if (t.ground()) return t;
  if (t.is_variable()) {
    auto [it, inserted] = map.emplace(t.var_id(), static_cast<VarId>(map.size()));
    return Term::variable(it->second, t.name());
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(renumber(a, map));
  return Term::compound(t.name(), std::move(args));
}

}  // namespace

Clause make_clause(const Term& term) {
  Term head = term;
  Term body = Term::atom("true");
  if (term.is_functor(":-", 2)) {
    head = term.arg(0);
    body = term.arg(1);
  }
  if (head.is_variable()) throw EngineError(ErrorKind::instantiation, "clause head is a variable");
  if (!head.is_callable()) throw EngineError(ErrorKind::type, "clause head is not callable");
  if (body.is_integer()) throw EngineError(ErrorKind::type, "clause body is not callable");
  std::unordered_map<VarId, VarId> map;
  Clause c;
  c.head = renumber(head, map);
  c.body = wrap_body(renumber(body, map));
  c.var_count = map.size();
  return c;
}

std::vector<Clause> parse_program(std::string_view source) {
  Parser p(source, 0);
  std::vector<Clause> out;
  std::uint64_t seq = 0;
  while (!p.at_eof()) {
    p.reset_vars(0);
    Term t = p.read_clause_term(false);
    if (t.is_functor(":-", 1)) {
      throw EngineError(ErrorKind::syntax, "directives are not supported: " + to_string(t));
    }
    Clause c = make_clause(t);
    c.sequence = seq++;
    out.push_back(std::move(c));
  }
  return out;
}

ParsedTerm parse_term(std::string_view source, VarId first_var_id) {
  Parser p(source, first_var_id);
  if (p.at_eof()) throw SyntaxError(1, 1, "empty input", "");
  Term t = p.read_clause_term(true);
  p.expect_eof();
  return ParsedTerm{t, p.var_names()};
}

// ---------------------------------------------------------------- writer

namespace {

bool is_letter_atom(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!is_alnum(c)) return false;
  return true;
}

bool is_symbol_atom(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_symbol_char(c)) return false;
  return true;
}

std::string quote_atom(const std::string& s) {
  if (is_letter_atom(s) || is_symbol_atom(s) || s == "[]" || s == "!" || s == ";" || s == "{}")
    return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "\\'";
    else if (c == '\\') out += "\\\\";
    else if (c == '\n') out += "\\n";
    else if (c == '\t') out += "\\t";
    else out += c;
  }
  return out + "'";
}

void write_term(const Term& t, int max_prec, std::string& out);

void write_operand(const Term& t, int max_prec, std::string& out) {
  std::string s;
  write_term(t, max_prec, s);
  if (!out.empty() && !s.empty() && is_symbol_char(out.back()) && is_symbol_char(s.front()))
    out += ' ';
  out += s;
}

void write_term(const Term& t, int max_prec, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::variable:
      out += t.name().empty() ? "_G" + std::to_string(t.var_id()) : t.name();
      return;
    case Term::Kind::integer:
      out += std::to_string(t.int_value());
      return;
    case Term::Kind::atom: {
      bool is_op = infix_ops().count(t.name()) || prefix_ops().count(t.name());
      if (is_op && max_prec < 1200 && t.name() != "[]") {
        out += "(" + quote_atom(t.name()) + ")";
      } else {
        out += quote_atom(t.name());
      }
      return;
    }
    case Term::Kind::compound:
      break;
  }
  if (t.is_functor(".", 2)) {
    out += '[';
    Term cur = t;
    bool first = true;
    while (cur.is_functor(".", 2)) {
      if (!first) out += ',';
      first = false;
      write_term(cur.arg(0), 999, out);
      cur = cur.arg(1);
    }
    if (!cur.is_atom("[]")) {
      out += '|';
      write_term(cur, 999, out);
    }
    out += ']';
    return;
  }
  if (t.arity() == 2) {
    auto it = infix_ops().find(t.name());
    if (it != infix_ops().end()) {
      const OpDef& op = it->second;
      int left_max = op.type == OpType::yfx ? op.priority : op.priority - 1;
      int right_max = op.type == OpType::xfy ? op.priority : op.priority - 1;
      std::string s;
      write_term(t.arg(0), left_max, s);
      if (t.name() == ",") {
        s += ',';
      } else if (is_letter_atom(t.name()) || t.name() == "->" || t.name() == ":-") {
        s += ' ' + t.name() + ' ';
      } else {
        if (!s.empty() && is_symbol_char(s.back())) s += ' ';
        s += t.name();
      }
      if (t.arg(1).is_integer() && t.arg(1).int_value() < 0 && t.name() != ",") {
        s += '(' + std::to_string(t.arg(1).int_value()) + ')';
      } else {
        write_operand(t.arg(1), right_max, s);
      }
      if (op.priority > max_prec) out += '(' + s + ')';
      else out += s;
      return;
    }
  }
  if (t.arity() == 1) {
    auto it = prefix_ops().find(t.name());
    if (it != prefix_ops().end() && t.name() != ":-") {
      const OpDef& op = it->second;
      int arg_max = op.type == OpType::fy ? op.priority : op.priority - 1;
      std::string s = t.name();
      if (t.arg(0).is_integer()) {
        s += ' ';
        write_term(t.arg(0), arg_max, s);
      } else {
        write_operand(t.arg(0), arg_max, s);
      }
      if (op.priority > max_prec) out += '(' + s + ')';
      else out += s;
      return;
    }
  }
  out += quote_atom(t.name());
  out += '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out += ',';
    write_term(t.arg(i), 999, out);
  }
  out += ')';
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  write_term(t, 1200, out);
  return out;
}

}  // namespace lpbot::logic
