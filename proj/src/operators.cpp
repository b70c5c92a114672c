#include "mdprolog/operators.hpp"

#include <stdexcept>
#include <string>

namespace mdprolog {

std::optional<Fixity> parse_fixity(std::string_view text) {
  if (text == "xfx") return Fixity::xfx;
  if (text == "xfy") return Fixity::xfy;
  if (text == "yfx") return Fixity::yfx;
  if (text == "fy") return Fixity::fy;
  if (text == "fx") return Fixity::fx;
  if (text == "xf") return Fixity::xf;
  if (text == "yf") return Fixity::yf;
  return std::nullopt;
}

std::string_view fixity_name(Fixity f) {
  switch (f) {
  case Fixity::xfx: return "xfx";
  case Fixity::xfy: return "xfy";
  case Fixity::yfx: return "yfx";
  case Fixity::fy: return "fy";
  case Fixity::fx: return "fx";
  case Fixity::xf: return "xf";
  case Fixity::yf: return "yf";
  }
  return "?";
}

int OperatorDef::left_max() const {
  switch (type) {
  case Fixity::yfx:
  case Fixity::yf:
  case Fixity::fy: return priority;
  default: return priority - 1;
  }
}

int OperatorDef::right_max() const {
  return type == Fixity::xfy ? priority : priority - 1;
}

OperatorTable OperatorTable::defaults() {
  OperatorTable t;
  t.add(":-", 1200, Fixity::xfx);
  t.add("-->", 1200, Fixity::xfx);
  t.add(":-", 1200, Fixity::fx);
  t.add("?-", 1200, Fixity::fx);
  t.add("#", 1150, Fixity::xfx);
  t.add("dynamic", 1150, Fixity::fx);
  t.add(";", 1100, Fixity::xfy);
  t.add("|", 1100, Fixity::xfy);
  t.add("->", 1050, Fixity::xfy);
  t.add("*->", 1050, Fixity::xfy);
  t.add(",", 1000, Fixity::xfy);
  // Contextual query sits at the level of \+ so that `\+ Ctx ? G` negates the query.
  t.add("?", 900, Fixity::xfx);
  t.add("?", 900, Fixity::fy);
  t.add("\\+", 900, Fixity::fy);
  for (const char* op : {"=", "\\=", "==", "\\==", "@<", "@>", "@=<", "@>=", "=..", "is", "=:=", "=\\=",
                         "<", ">", "=<", ">="}) {
    t.add(op, 700, Fixity::xfx);
  }
  for (const char* op : {"+", "-", "/\\", "\\/", "xor"}) t.add(op, 500, Fixity::yfx);
  for (const char* op : {"*", "/", "//", "mod", "rem", "<<", ">>", "div"}) t.add(op, 400, Fixity::yfx);
  t.add("**", 200, Fixity::xfx);
  t.add("^", 200, Fixity::xfy);
  t.add(":", 200, Fixity::xfy);
  t.add("@", 200, Fixity::xfx);
  t.add("-", 200, Fixity::fy);
  t.add("+", 200, Fixity::fy);
  t.add("\\", 200, Fixity::fy);
  return t;
}

void OperatorTable::add(std::string_view name, int priority, Fixity type) {
  if (priority < 0 || priority > 1200) {
    throw std::invalid_argument("operator priority out of range: " + std::to_string(priority));
  }
  auto& entry = entries_[Symbol(name)];
  OperatorDef def{priority, type};
  auto& slot = def.is_prefix() ? entry.prefix : entry.infix_or_postfix;
  if (priority == 0) {
    slot.reset();
  } else {
    slot = def;
  }
}

std::optional<OperatorDef> OperatorTable::prefix(Symbol name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second.prefix;
}

std::optional<OperatorDef> OperatorTable::infix(Symbol name) const {
  auto it = entries_.find(name);
  if (it == entries_.end() || !it->second.infix_or_postfix || !it->second.infix_or_postfix->is_infix()) {
    return std::nullopt;
  }
  return it->second.infix_or_postfix;
}

std::optional<OperatorDef> OperatorTable::postfix(Symbol name) const {
  auto it = entries_.find(name);
  if (it == entries_.end() || !it->second.infix_or_postfix || !it->second.infix_or_postfix->is_postfix()) {
    return std::nullopt;
  }
  return it->second.infix_or_postfix;
}

bool OperatorTable::is_operator(Symbol name) const {
  auto it = entries_.find(name);
  return it != entries_.end() && (it->second.prefix || it->second.infix_or_postfix);
}

} // namespace mdprolog
