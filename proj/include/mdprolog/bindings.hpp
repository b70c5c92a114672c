#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mdprolog/term.hpp"

namespace mdprolog {

/// Variable bindings for one solve run, with a trail for undoing them.
///
/// Variables are dense ids. Resetting to a mark unbinds everything trailed
/// after the mark and forgets variables created after it, so ids are reused
/// once the search backtracks past their creation.
class BindingStore {
public:
  struct Mark {
    std::size_t trail = 0;
    VarId vars = 0;
  };

  Term new_var();
  /// Reserves `n` consecutive unbound variables and returns the first id.
  VarId allocate(std::size_t n);
  VarId var_count() const { return static_cast<VarId>(bound_.size()); }

  bool is_bound(VarId v) const { return v < bound_.size() && bound_[v] != 0; }
  Term deref(Term t) const;
  void bind(VarId v, Term value);

  Mark mark() const { return {trail_.size(), var_count()}; }
  std::size_t trail_size() const { return trail_.size(); }
  void undo(std::size_t trail_mark);
  void reset(const Mark& m);

  /// Unifies two terms. On failure every binding made by the attempt is undone.
  bool unify(const Term& a, const Term& b, bool occurs_check = false);

  /// Applies all bindings. Cyclic structures are cut off at `depth_limit`.
  Term resolve(const Term& t, std::size_t depth_limit = 100000) const;

  /// True when `v` occurs in `t` after dereferencing.
  bool occurs(VarId v, const Term& t) const;

private:
  std::vector<Term> values_;
  std::vector<std::uint8_t> bound_;
  std::vector<VarId> trail_;
};

/// A term whose variables are numbered 0..var_count-1, independent of any store.
struct FrozenTerm {
  Term term;
  std::uint32_t var_count = 0;
};

/// Copies live terms out of a store, renumbering their free variables densely.
/// One freezer shares a numbering across several terms (e.g. clause head and body).
class Freezer {
public:
  explicit Freezer(const BindingStore& store) : store_(store) {}

  Term freeze(const Term& t);
  std::uint32_t var_count() const { return static_cast<std::uint32_t>(order_.size()); }
  /// Live variable ids, indexed by their frozen number.
  const std::vector<VarId>& live_vars() const { return order_; }

private:
  const BindingStore& store_;
  std::unordered_map<VarId, VarId> mapping_;
  std::vector<VarId> order_;
};

FrozenTerm freeze(const BindingStore& store, const Term& t);

/// Shifts every variable of a frozen term by `base`. Ground subterms are shared.
Term instantiate(const Term& frozen, VarId base);

/// Fresh live copy of a frozen term.
Term instantiate(BindingStore& store, const FrozenTerm& frozen);

/// Elements of a proper list, or nullopt for partial lists and non-lists.
std::optional<std::vector<Term>> list_items(const BindingStore& store, const Term& list);

/// Standard order over live terms.
int compare(const BindingStore& store, const Term& a, const Term& b);

/// Structural identity up to consistent renaming of variables (resolved terms).
bool is_variant(const Term& a, const Term& b);

} // namespace mdprolog
