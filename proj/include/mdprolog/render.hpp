#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>

#include "mdprolog/bindings.hpp"
#include "mdprolog/operators.hpp"
#include "mdprolog/term.hpp"

namespace mdprolog {

struct RenderOptions {
  /// Quote atoms that would not read back as themselves (writeq style).
  bool quoted = true;
  /// Nesting depth after which subterms print as `...`.
  std::size_t max_depth = 10000;
  /// Print names for variables; others print as `_G<id>`.
  const std::unordered_map<VarId, std::string>* var_names = nullptr;
};

/// Renders a term using operator notation from `ops`. When `store` is given,
/// variables are dereferenced on the way.
std::string render(const Term& t, const OperatorTable& ops, const BindingStore* store = nullptr,
                   const RenderOptions& options = {});

/// Atom text as it must be written to read back as the same atom.
std::string quote_atom_if_needed(std::string_view name);

/// Shortest text that reads back as the same double, always with a `.` or exponent.
std::string format_float(double value);

} // namespace mdprolog
