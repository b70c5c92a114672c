#pragma once

#include <optional>
#include <string_view>
#include <unordered_map>

#include "mdprolog/term.hpp"

namespace mdprolog {

enum class Fixity { xfx, xfy, yfx, fy, fx, xf, yf };

std::optional<Fixity> parse_fixity(std::string_view text);
std::string_view fixity_name(Fixity f);

struct OperatorDef {
  int priority = 0;
  Fixity type = Fixity::xfx;

  bool is_prefix() const { return type == Fixity::fy || type == Fixity::fx; }
  bool is_postfix() const { return type == Fixity::xf || type == Fixity::yf; }
  bool is_infix() const { return !is_prefix() && !is_postfix(); }

  /// Maximum priority of the left operand (infix/postfix) or the only operand (prefix).
  int left_max() const;
  int right_max() const;
};

/// User-extensible operator table. A name holds at most one prefix entry and
/// one infix-or-postfix entry.
class OperatorTable {
public:
  /// Standard Prolog operators plus the multidimensional extensions `#`, `?`, `@`.
  static OperatorTable defaults();

  /// Adds or replaces a definition. Priority 0 removes it. Throws std::invalid_argument
  /// for priorities outside 0..1200.
  void add(std::string_view name, int priority, Fixity type);

  std::optional<OperatorDef> prefix(Symbol name) const;
  std::optional<OperatorDef> infix(Symbol name) const;
  std::optional<OperatorDef> postfix(Symbol name) const;
  bool is_operator(Symbol name) const;

private:
  struct Entry {
    std::optional<OperatorDef> prefix;
    std::optional<OperatorDef> infix_or_postfix;
  };
  std::unordered_map<Symbol, Entry, SymbolHash> entries_;
};

} // namespace mdprolog
