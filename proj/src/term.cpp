#include "mdprolog/term.hpp"

#include <mutex>
#include <unordered_set>

namespace mdprolog {

namespace {

struct SymbolTable {
  std::mutex mutex;
  std::unordered_set<std::string> names;
};

SymbolTable& symbol_table() {
  static SymbolTable* table = new SymbolTable();  // never destroyed; symbols outlive statics
  return *table;
}

const std::string* intern(std::string_view text) {
  auto& table = symbol_table();
  std::lock_guard lock(table.mutex);
  auto [it, inserted] = table.names.emplace(text);
  return &*it;
}

} // namespace

Symbol::Symbol() {
  static const std::string* const empty = intern("");
  text_ = empty;
}
Symbol::Symbol(std::string_view text) : text_(intern(text)) {}

namespace sym {
#define MDPROLOG_SYMBOL(fn, text) \
  Symbol fn() {                   \
    static const Symbol s(text);  \
    return s;                     \
  }
MDPROLOG_SYMBOL(nil, "[]")
MDPROLOG_SYMBOL(dot, ".")
MDPROLOG_SYMBOL(comma, ",")
MDPROLOG_SYMBOL(semicolon, ";")
MDPROLOG_SYMBOL(arrow, "->")
MDPROLOG_SYMBOL(neck, ":-")
MDPROLOG_SYMBOL(true_, "true")
MDPROLOG_SYMBOL(fail, "fail")
MDPROLOG_SYMBOL(false_, "false")
MDPROLOG_SYMBOL(cut, "!")
MDPROLOG_SYMBOL(minus, "-")
MDPROLOG_SYMBOL(plus, "+")
MDPROLOG_SYMBOL(colon, ":")
MDPROLOG_SYMBOL(slash, "/")
MDPROLOG_SYMBOL(curly, "{}")
MDPROLOG_SYMBOL(not_provable, "\\+")
MDPROLOG_SYMBOL(call, "call")
MDPROLOG_SYMBOL(hash, "#")
MDPROLOG_SYMBOL(query, "?")
MDPROLOG_SYMBOL(at, "@")
MDPROLOG_SYMBOL(error, "error")
#undef MDPROLOG_SYMBOL
} // namespace sym

Term::Term() : kind_(Kind::Atom), atom_(sym::nil().text_) {}

Term Term::atom(Symbol name) {
  Term t;
  t.atom_ = name.text_;
  return t;
}

Term Term::integer(std::int64_t value) {
  Term t;
  t.kind_ = Kind::Integer;
  t.int_ = value;
  return t;
}

Term Term::floating(double value) {
  Term t;
  t.kind_ = Kind::Float;
  t.float_ = value;
  return t;
}

Term Term::var(VarId id) {
  Term t;
  t.kind_ = Kind::Var;
  t.var_ = id;
  return t;
}

Term Term::compound(Symbol functor, std::vector<Term> args) {
  if (args.empty()) return atom(functor);
  Term t;
  t.kind_ = Kind::Compound;
  t.atom_ = nullptr;
  t.compound_ = std::make_shared<const CompoundData>(functor, std::move(args));
  return t;
}

bool Term::is_nil() const { return is_atom(sym::nil()); }
bool Term::is_cons() const { return is_compound(sym::dot(), 2); }

Symbol Term::functor() const {
  if (kind_ == Kind::Compound) return compound_->functor;
  if (kind_ == Kind::Atom) return Symbol(atom_);
  return Symbol();
}

CompoundData::CompoundData(Symbol f, std::vector<Term> a)
    : functor(f), args(std::move(a)), ground(true) {
  for (const auto& x : args) {
    if (!x.ground()) {
      ground = false;
      break;
    }
  }
}

// Long lists would otherwise be released recursively, one stack frame per cell.
CompoundData::~CompoundData() {
  std::vector<std::shared_ptr<const CompoundData>> pending;
  auto detach = [&pending](std::vector<Term>& args) {
    for (auto& a : args) {
      if (!a.is_compound()) continue;
      // Steal the child's reference only when we hold the last one.
      auto& slot = a.compound_;
      if (slot.use_count() == 1) pending.push_back(std::move(slot));
    }
  };
  detach(args);
  while (!pending.empty()) {
    auto node = std::move(pending.back());
    pending.pop_back();
    detach(const_cast<CompoundData&>(*node).args);
  }
}

Term make_list(std::span<const Term> items, Term tail) {
  Term result = std::move(tail);
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    result = Term::compound(sym::dot(), {*it, std::move(result)});
  }
  return result;
}

Term make_list(std::initializer_list<Term> items) {
  return make_list(std::span<const Term>(items.begin(), items.size()));
}

Term make_pair(Term key, Term value) {
  return Term::compound(sym::minus(), {std::move(key), std::move(value)});
}

Term make_indicator(Symbol name, std::size_t arity) {
  return Term::compound(sym::slash(), {Term::atom(name), Term::integer(static_cast<std::int64_t>(arity))});
}

Term make_conjunction(std::span<const Term> goals) {
  if (goals.empty()) return Term::atom(sym::true_());
  Term result = goals.back();
  for (auto i = goals.size() - 1; i-- > 0;) {
    result = Term::compound(sym::comma(), {goals[i], std::move(result)});
  }
  return result;
}

bool structurally_equal(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
  case Term::Kind::Var: return a.var_id() == b.var_id();
  case Term::Kind::Atom: return a.functor() == b.functor();
  case Term::Kind::Integer: return a.int_value() == b.int_value();
  case Term::Kind::Float: return a.float_value() == b.float_value();
  case Term::Kind::Compound:
    if (a.compound_data() == b.compound_data()) return true;
    if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (!structurally_equal(a.arg(i), b.arg(i))) return false;
    }
    return true;
  }
  return false;
}

namespace {

int kind_rank(const Term& t) {
  switch (t.kind()) {
  case Term::Kind::Var: return 0;
  case Term::Kind::Integer:
  case Term::Kind::Float: return 1;
  case Term::Kind::Atom: return 3;
  case Term::Kind::Compound: return 4;
  }
  return 5;
}

template <typename T>
int three_way(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

} // namespace

int compare_terms(const Term& a, const Term& b) {
  int ra = kind_rank(a);
  int rb = kind_rank(b);
  if (ra != rb) return three_way(ra, rb);
  switch (a.kind()) {
  case Term::Kind::Var: return three_way(a.var_id(), b.var_id());
  case Term::Kind::Integer:
  case Term::Kind::Float: {
    if (a.is_integer() && b.is_integer()) return three_way(a.int_value(), b.int_value());
    int c = three_way(a.numeric_value(), b.numeric_value());
    if (c != 0) return c;
    // Equal by value: Float precedes Integer.
    if (a.is_float() && b.is_integer()) return -1;
    if (a.is_integer() && b.is_float()) return 1;
    return 0;
  }
  case Term::Kind::Atom: return three_way(a.functor().str().compare(b.functor().str()), 0);
  case Term::Kind::Compound: {
    if (a.arity() != b.arity()) return three_way(a.arity(), b.arity());
    if (a.functor() != b.functor()) return three_way(a.functor().str().compare(b.functor().str()), 0);
    for (std::size_t i = 0; i < a.arity(); ++i) {
      int c = compare_terms(a.arg(i), b.arg(i));
      if (c != 0) return c;
    }
    return 0;
  }
  }
  return 0;
}

std::string to_string(const PredicateKey& key) {
  return key.name.str() + "/" + std::to_string(key.arity);
}

} // namespace mdprolog
