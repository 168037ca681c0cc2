#pragma once

#include <cstdint>

#include "lpbot/logic/bindings.hpp"

namespace lpbot::logic {

/// Evaluates an integer expression over `+ - * // mod abs min max` and
/// unary minus.  `//` floors; `mod` takes the sign of the divisor.
/// Throws EngineError: instantiation (unbound), type (non-numeric atom or
/// unknown functor), evaluation (zero divisor, overflow).
std::int64_t eval_arith(const Term& expr, const Bindings& bindings);

}  // namespace lpbot::logic
