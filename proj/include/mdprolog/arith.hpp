#pragma once

#include "mdprolog/bindings.hpp"
#include "mdprolog/term.hpp"

namespace mdprolog {

/// Evaluates an arithmetic expression to an Integer or Float term.
/// Throws PrologError for unbound leaves, non-evaluable terms, division by
/// zero and 64-bit integer overflow.
Term evaluate(const BindingStore& store, const Term& expr);

/// Numeric comparison of two evaluated numbers: <0, 0, >0.
int compare_numbers(const Term& a, const Term& b);

} // namespace mdprolog
