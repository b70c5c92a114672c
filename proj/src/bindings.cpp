#include "mdprolog/bindings.hpp"

#include <utility>

namespace mdprolog {

Term BindingStore::new_var() {
  return Term::var(allocate(1));
}

VarId BindingStore::allocate(std::size_t n) {
  VarId base = var_count();
  bound_.resize(bound_.size() + n, 0);
  values_.resize(bound_.size());
  return base;
}

Term BindingStore::deref(Term t) const {
  while (t.is_var() && is_bound(t.var_id())) {
    t = values_[t.var_id()];
  }
  return t;
}

void BindingStore::bind(VarId v, Term value) {
  if (v >= bound_.size()) allocate(v + 1 - bound_.size());
  values_[v] = std::move(value);
  bound_[v] = 1;
  trail_.push_back(v);
}

void BindingStore::undo(std::size_t trail_mark) {
  while (trail_.size() > trail_mark) {
    VarId v = trail_.back();
    trail_.pop_back();
    if (v < bound_.size()) {
      bound_[v] = 0;
      values_[v] = Term();
    }
  }
}

void BindingStore::reset(const Mark& m) {
  undo(m.trail);
  if (m.vars < bound_.size()) {
    bound_.resize(m.vars);
    values_.resize(m.vars);
  }
}

bool BindingStore::occurs(VarId v, const Term& t) const {
  std::vector<Term> stack{t};
  while (!stack.empty()) {
    Term x = deref(stack.back());
    stack.pop_back();
    if (x.is_var()) {
      if (x.var_id() == v) return true;
    } else if (x.is_compound() && !x.ground()) {
      for (const auto& a : x.args()) stack.push_back(a);
    }
  }
  return false;
}

bool BindingStore::unify(const Term& a, const Term& b, bool occurs_check) {
  const std::size_t start = trail_.size();
  std::vector<std::pair<Term, Term>> stack;
  stack.emplace_back(a, b);
  while (!stack.empty()) {
    auto [x0, y0] = std::move(stack.back());
    stack.pop_back();
    Term x = deref(x0);
    Term y = deref(y0);
    if (x.is_var() && y.is_var()) {
      if (x.var_id() == y.var_id()) continue;
      // Younger variable points at the older one.
      if (x.var_id() < y.var_id()) std::swap(x, y);
      bind(x.var_id(), y);
      continue;
    }
    if (x.is_var() || y.is_var()) {
      if (y.is_var()) std::swap(x, y);
      if (occurs_check && occurs(x.var_id(), y)) {
        undo(start);
        return false;
      }
      bind(x.var_id(), y);
      continue;
    }
    bool same = false;
    switch (x.kind()) {
    case Term::Kind::Atom: same = y.is_atom() && x.functor() == y.functor(); break;
    case Term::Kind::Integer: same = y.is_integer() && x.int_value() == y.int_value(); break;
    case Term::Kind::Float: same = y.is_float() && x.float_value() == y.float_value(); break;
    case Term::Kind::Compound:
      if (y.is_compound() && x.functor() == y.functor() && x.arity() == y.arity()) {
        same = true;
        if (x.compound_data() != y.compound_data()) {
          for (std::size_t i = x.arity(); i-- > 0;) stack.emplace_back(x.arg(i), y.arg(i));
        }
      }
      break;
    case Term::Kind::Var: break;
    }
    if (!same) {
      undo(start);
      return false;
    }
  }
  return true;
}

namespace {

Term resolve_impl(const BindingStore& store, const Term& t, std::size_t depth) {
  Term x = store.deref(t);
  if (!x.is_compound() || x.ground()) return x;
  if (depth == 0) return x;
  std::vector<Term> args;
  args.reserve(x.arity());
  for (const auto& a : x.args()) args.push_back(resolve_impl(store, a, depth - 1));
  return Term::compound(x.functor(), std::move(args));
}

} // namespace

Term BindingStore::resolve(const Term& t, std::size_t depth_limit) const {
  // Lists are resolved iteratively along the tail so long lists do not recurse.
  Term x = deref(t);
  if (!x.is_cons() || x.ground()) return resolve_impl(*this, x, depth_limit);
  std::vector<Term> items;
  while (x.is_cons() && !x.ground() && items.size() < depth_limit) {
    items.push_back(resolve_impl(*this, x.arg(0), depth_limit));
    x = deref(x.arg(1));
  }
  return make_list(items, resolve_impl(*this, x, depth_limit));
}

Term Freezer::freeze(const Term& t) {
  Term x = store_.deref(t);
  if (x.is_var()) {
    auto [it, inserted] = mapping_.emplace(x.var_id(), static_cast<VarId>(order_.size()));
    if (inserted) order_.push_back(x.var_id());
    return Term::var(it->second);
  }
  if (!x.is_compound() || x.ground()) return x;
  if (x.is_cons()) {
    std::vector<Term> items;
    while (x.is_cons() && !x.ground()) {
      items.push_back(freeze(x.arg(0)));
      x = store_.deref(x.arg(1));
    }
    return make_list(items, freeze(x));
  }
  std::vector<Term> args;
  args.reserve(x.arity());
  for (const auto& a : x.args()) args.push_back(freeze(a));
  return Term::compound(x.functor(), std::move(args));
}

FrozenTerm freeze(const BindingStore& store, const Term& t) {
  Freezer f(store);
  Term frozen = f.freeze(t);
  return {std::move(frozen), f.var_count()};
}

Term instantiate(const Term& frozen, VarId base) {
  if (frozen.is_var()) return Term::var(frozen.var_id() + base);
  if (frozen.ground() || base == 0) return frozen;
  if (frozen.is_cons()) {
    std::vector<Term> items;
    Term x = frozen;
    while (x.is_cons() && !x.ground()) {
      items.push_back(instantiate(x.arg(0), base));
      x = x.arg(1);
    }
    return make_list(items, instantiate(x, base));
  }
  std::vector<Term> args;
  args.reserve(frozen.arity());
  for (const auto& a : frozen.args()) args.push_back(instantiate(a, base));
  return Term::compound(frozen.functor(), std::move(args));
}

Term instantiate(BindingStore& store, const FrozenTerm& frozen) {
  if (frozen.var_count == 0) return frozen.term;
  VarId base = store.allocate(frozen.var_count);
  return instantiate(frozen.term, base);
}

std::optional<std::vector<Term>> list_items(const BindingStore& store, const Term& list) {
  std::vector<Term> items;
  Term x = store.deref(list);
  while (x.is_cons()) {
    items.push_back(x.arg(0));
    x = store.deref(x.arg(1));
  }
  if (!x.is_nil()) return std::nullopt;
  return items;
}

int compare(const BindingStore& store, const Term& a, const Term& b) {
  return compare_terms(store.resolve(a), store.resolve(b));
}

namespace {

bool variant_impl(const Term& a, const Term& b, std::unordered_map<VarId, VarId>& ab,
                  std::unordered_map<VarId, VarId>& ba) {
  if (a.kind() != b.kind()) return false;
  if (a.is_var()) {
    auto [i, ins1] = ab.emplace(a.var_id(), b.var_id());
    auto [j, ins2] = ba.emplace(b.var_id(), a.var_id());
    return i->second == b.var_id() && j->second == a.var_id();
  }
  if (!a.is_compound()) return structurally_equal(a, b);
  if (a.functor() != b.functor() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    if (!variant_impl(a.arg(i), b.arg(i), ab, ba)) return false;
  }
  return true;
}

} // namespace

bool is_variant(const Term& a, const Term& b) {
  std::unordered_map<VarId, VarId> ab;
  std::unordered_map<VarId, VarId> ba;
  return variant_impl(a, b, ab, ba);
}

} // namespace mdprolog
