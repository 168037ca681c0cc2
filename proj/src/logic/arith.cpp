#include "lpbot/logic/arith.hpp"

#include <algorithm>

#include "lpbot/logic/errors.hpp"
#include "lpbot/logic/parser.hpp"

namespace lpbot::logic {

namespace {

[[noreturn]] void overflow() { throw EngineError(ErrorKind::evaluation, "integer overflow"); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EngineError(ErrorKind::evaluation, "zero divisor");
  if (a == INT64_MIN && b == -1) overflow();
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EngineError(ErrorKind::evaluation, "zero divisor");
  if (b == -1) return 0;
  std::int64_t m = a % b;
  if (m != 0 && ((m < 0) != (b < 0))) m += b;
  return m;
}

}  // namespace

std::int64_t eval_arith(const Term& expr, const Bindings& bindings) {
  Term t = bindings.deref(expr);
  switch (t.kind()) {
    case Term::Kind::integer:
      return t.int_value();
    case Term::Kind::variable:
      throw EngineError(ErrorKind::instantiation, "arithmetic on unbound variable");
    case Term::Kind::atom:
      throw EngineError(ErrorKind::type, "not evaluable: " + to_string(t));
    case Term::Kind::compound:
      break;
  }
  const std::string& f = t.name();
  if (t.arity() == 1) {
    std::int64_t x = eval_arith(t.arg(0), bindings);
    if (f == "-") {
      if (x == INT64_MIN) overflow();
      return -x;
    }
    if (f == "+") return x;
    if (f == "abs") {
      if (x == INT64_MIN) overflow();
      return x < 0 ? -x : x;
    }
  } else if (t.arity() == 2) {
    std::int64_t x = eval_arith(t.arg(0), bindings);
    std::int64_t y = eval_arith(t.arg(1), bindings);
    std::int64_t r = 0;
    if (f == "+") {
      if (__builtin_add_overflow(x, y, &r)) overflow();
      return r;
    }
    if (f == "-") {
      if (__builtin_sub_overflow(x, y, &r)) overflow();
      return r;
    }
    if (f == "*") {
      if (__builtin_mul_overflow(x, y, &r)) overflow();
      return r;
    }
    if (f == "//") return floor_div(x, y);
    if (f == "mod") return floor_mod(x, y);
    if (f == "min") return std::min(x, y);
    if (f == "max") return std::max(x, y);
  }
  throw EngineError(ErrorKind::type, "not evaluable: " + f + "/" + std::to_string(t.arity()));
}

}  // namespace lpbot::logic
