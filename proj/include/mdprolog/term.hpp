#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdprolog {

/// Interned atom/functor name. Two symbols compare equal iff their text is equal.
class Symbol {
public:
  Symbol();
  explicit Symbol(std::string_view text);

  const std::string& str() const { return *text_; }
  std::string_view name() const { return *text_; }

  friend bool operator==(Symbol a, Symbol b) { return a.text_ == b.text_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.text_ != b.text_; }

  std::size_t hash() const { return std::hash<const void*>{}(text_); }

private:
  explicit Symbol(const std::string* text) : text_(text) {}
  friend class Term;

  const std::string* text_;
};

using VarId = std::uint64_t;

class Term;
struct CompoundData;

/// Immutable term value. Compounds share structure through reference counting.
class Term {
public:
  enum class Kind : std::uint8_t { Var, Atom, Integer, Float, Compound };

  /// The empty list atom.
  Term();

  static Term atom(Symbol name);
  static Term atom(std::string_view name) { return atom(Symbol(name)); }
  static Term integer(std::int64_t value);
  static Term floating(double value);
  static Term var(VarId id);
  static Term compound(Symbol functor, std::vector<Term> args);
  static Term compound(std::string_view functor, std::vector<Term> args) {
    return compound(Symbol(functor), std::move(args));
  }

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Var; }
  bool is_atom() const { return kind_ == Kind::Atom; }
  bool is_integer() const { return kind_ == Kind::Integer; }
  bool is_float() const { return kind_ == Kind::Float; }
  bool is_number() const { return kind_ == Kind::Integer || kind_ == Kind::Float; }
  bool is_compound() const { return kind_ == Kind::Compound; }
  bool is_atomic() const { return !is_var() && !is_compound(); }
  bool is_callable() const { return is_atom() || is_compound(); }

  bool is_atom(Symbol s) const { return is_atom() && atom_ == s.text_; }
  bool is_compound(Symbol f, std::size_t n) const;
  bool is_nil() const;
  bool is_cons() const;

  /// Atom name or compound functor.
  Symbol functor() const;
  std::size_t arity() const;
  const Term& arg(std::size_t i) const;
  std::span<const Term> args() const;

  std::int64_t int_value() const { return int_; }
  double float_value() const { return float_; }
  double numeric_value() const { return is_integer() ? static_cast<double>(int_) : float_; }
  VarId var_id() const { return var_; }

  /// True when no variable occurs in the term.
  bool ground() const;

  const CompoundData* compound_data() const { return compound_.get(); }

private:
  friend struct CompoundData;

  Kind kind_;
  union {
    std::int64_t int_;
    double float_;
    VarId var_;
    const std::string* atom_;
  };
  std::shared_ptr<const CompoundData> compound_;
};

struct CompoundData {
  CompoundData(Symbol f, std::vector<Term> a);
  ~CompoundData();
  CompoundData(const CompoundData&) = delete;
  CompoundData& operator=(const CompoundData&) = delete;

  Symbol functor;
  std::vector<Term> args;
  bool ground;
};

inline bool Term::is_compound(Symbol f, std::size_t n) const {
  return kind_ == Kind::Compound && compound_->functor == f && compound_->args.size() == n;
}
inline std::size_t Term::arity() const { return kind_ == Kind::Compound ? compound_->args.size() : 0; }
inline const Term& Term::arg(std::size_t i) const { return compound_->args[i]; }
inline std::span<const Term> Term::args() const {
  if (kind_ != Kind::Compound) return {};
  return compound_->args;
}
inline bool Term::ground() const {
  switch (kind_) {
  case Kind::Var: return false;
  case Kind::Compound: return compound_->ground;
  default: return true;
  }
}

/// Frequently used names.
namespace sym {
Symbol nil();
Symbol dot();
Symbol comma();
Symbol semicolon();
Symbol arrow();
Symbol neck();
Symbol true_();
Symbol fail();
Symbol false_();
Symbol cut();
Symbol minus();
Symbol plus();
Symbol colon();
Symbol slash();
Symbol curly();
Symbol not_provable();
Symbol call();
Symbol hash();
Symbol query();
Symbol at();
Symbol error();
} // namespace sym

Term make_list(std::span<const Term> items, Term tail = Term());
Term make_list(std::initializer_list<Term> items);
Term make_pair(Term key, Term value);  // Key-Value
Term make_indicator(Symbol name, std::size_t arity);  // Name/Arity
Term make_conjunction(std::span<const Term> goals);

/// Structural equality without dereferencing; variables equal iff same id.
bool structurally_equal(const Term& a, const Term& b);

/// Standard order comparison (Var < Number < Atom < Compound) over terms
/// whose variables are already dereferenced. Returns <0, 0, >0.
int compare_terms(const Term& a, const Term& b);

struct SymbolHash {
  std::size_t operator()(Symbol s) const { return s.hash(); }
};

/// Name/Arity key used for predicate and signature lookup.
struct PredicateKey {
  Symbol name;
  std::size_t arity = 0;
  friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
};

struct PredicateKeyHash {
  std::size_t operator()(const PredicateKey& k) const { return k.name.hash() * 31 + k.arity; }
};

inline PredicateKey key_of(const Term& callable) { return {callable.functor(), callable.arity()}; }

std::string to_string(const PredicateKey& key);

} // namespace mdprolog
