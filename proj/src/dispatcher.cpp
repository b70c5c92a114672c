#include "mdprolog/dispatcher.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "mdprolog/render.hpp"

namespace mdprolog {

namespace {

using Args = std::span<const Term>;

Symbol predicate_dimension() {
  static const Symbol s("predicate");
  return s;
}

struct Entry {
  Symbol key;
  Term value;
};

std::vector<Term> proper_list(const BindingStore& store, const Term& raw) {
  Term t = store.deref(raw);
  if (auto items = list_items(store, t)) return *items;
  Term x = t;
  while (x.is_cons()) x = store.deref(x.arg(1));
  if (x.is_var()) errors::instantiation();
  errors::type("list", t);
}

/// Reads a context list into ordered entries.
std::vector<Entry> context_entries(const BindingStore& store, const Term& context) {
  std::vector<Entry> entries;
  for (const Term& raw : proper_list(store, context)) {
    Term e = store.deref(raw);
    if (e.is_var()) errors::instantiation();
    if (!e.is_compound(sym::colon(), 2)) errors::type("context_entry", e);
    Term key = store.deref(e.arg(0));
    if (key.is_var()) errors::instantiation();
    if (!key.is_atom()) errors::type("context_entry", e);
    entries.push_back({key.functor(), e.arg(1)});
  }
  return entries;
}

void remove_key(std::vector<Entry>& entries, Symbol key) {
  std::erase_if(entries, [&](const Entry& e) { return e.key == key; });
}

void upsert(std::vector<Entry>& entries, Symbol key, const Term& value) {
  for (Entry& e : entries) {
    if (e.key == key) {
      e.value = value;
      return;
    }
  }
  entries.push_back({key, value});
}

std::string format_score(double score) {
  if (std::floor(score) == score && std::fabs(score) < 1e15) return std::to_string(static_cast<long long>(score));
  std::ostringstream s;
  s << score;
  return s.str();
}

std::string describe(const Signature& sig) {
  return quote_atom_if_needed(sig.implementation.name()) + " (" + sig.where.describe() + ")";
}

/// Shared core of dispatch/3 and the `?` forms.
bool dispatch(Machine& m, const Term& implicit, const Term& given, const Term& raw_goal) {
  BindingStore& store = m.store();
  Term goal = store.deref(raw_goal);
  if (goal.is_var()) errors::instantiation();
  if (!goal.is_callable()) errors::type("callable", goal);

  Term context = updated_context(store, implicit, given, goal);
  std::vector<SignaturePtr> candidates = dispatch_candidates(m.kb(), goal);
  if (candidates.empty()) errors::existence("procedure", make_indicator(goal.functor(), goal.arity()));

  std::vector<CandidateScore> scored;
  scored.reserve(candidates.size());
  for (const SignaturePtr& sig : candidates) scored.push_back(predicate_score(m, context, sig));

  bool any = false;
  double best = 0;
  for (const CandidateScore& c : scored) {
    if (!c.eligible) continue;
    if (!any || c.score > best) best = c.score;
    any = true;
  }

  Runtime& rt = m.runtime();
  if (rt.trace_dispatch && rt.err) {
    const OperatorTable& ops = m.kb().operators();
    std::ostream& out = *rt.err;
    out << "dispatch " << render(goal, ops, &store) << " in " << render(context, ops, &store) << "\n";
    for (const CandidateScore& c : scored) {
      out << "  " << describe(*c.signature) << ": ";
      if (c.eligible) {
        out << "score " << format_score(c.score) << (c.score == best ? " selected" : "") << "\n";
      } else {
        out << "ineligible, " << c.reason << "\n";
      }
    }
    if (!any) out << "  no applicable rule\n";
  }
  if (!any) return false;

  std::vector<Term> calls;
  for (const CandidateScore& c : scored) {
    if (!c.eligible || c.score != best) continue;
    const Signature& sig = *c.signature;
    std::vector<Term> args{context};
    if (!sig.anonymous) args.insert(args.end(), goal.args().begin(), goal.args().end());
    calls.push_back(Term::compound(sig.implementation, std::move(args)));
  }
  Term alternatives = calls.back();
  for (std::size_t i = calls.size() - 1; i-- > 0;) {
    alternatives = Term::compound(sym::semicolon(), {calls[i], alternatives});
  }
  m.then_call(alternatives);
  return true;
}

bool b_dispatch(Machine& m, Args a) { return dispatch(m, a[0], a[1], a[2]); }
bool b_query1(Machine& m, Args a) { return dispatch(m, Term(), Term(), a[0]); }
bool b_query2(Machine& m, Args a) { return dispatch(m, Term(), a[0], a[1]); }
bool b_query3(Machine& m, Args a) { return dispatch(m, a[0], a[1], a[2]); }

} // namespace

Term updated_context(const BindingStore& store, const Term& implicit, const Term& given, const Term& goal) {
  std::vector<Entry> entries = context_entries(store, implicit);
  for (const Term& raw : proper_list(store, given)) {
    Term e = store.deref(raw);
    if (e.is_var()) errors::instantiation();
    if (e.is_compound(sym::minus(), 1)) {
      Term key = store.deref(e.arg(0));
      if (key.is_var()) errors::instantiation();
      if (!key.is_atom()) errors::type("context_entry", e);
      remove_key(entries, key.functor());
      continue;
    }
    if (e.is_compound(sym::colon(), 2)) {
      Term key = store.deref(e.arg(0));
      if (key.is_var()) errors::instantiation();
      if (!key.is_atom()) errors::type("context_entry", e);
      upsert(entries, key.functor(), e.arg(1));
      continue;
    }
    errors::type("context_entry", e);
  }
  remove_key(entries, predicate_dimension());
  entries.push_back({predicate_dimension(), goal});

  std::vector<Term> items;
  items.reserve(entries.size());
  for (const Entry& e : entries) items.push_back(Term::compound(sym::colon(), {Term::atom(e.key), e.value}));
  return make_list(items);
}

std::vector<Symbol> context_keys(const BindingStore& store, const Term& context) {
  std::vector<Symbol> keys;
  for (const Entry& e : context_entries(store, context)) keys.push_back(e.key);
  return keys;
}

CandidateScore predicate_score(Machine& m, const Term& context, const SignaturePtr& sig) {
  CandidateScore result;
  result.signature = sig;

  BindingStore& store = m.store();
  std::vector<Symbol> keys = context_keys(store, context);
  for (Symbol d : sig->dimensions) {
    if (std::find(keys.begin(), keys.end(), d) == keys.end()) {
      result.reason = "missing dimension " + quote_atom_if_needed(d.name());
      return result;
    }
  }

  const BindingStore::Mark mark = store.mark();
  Term spec = instantiate(store, FrozenTerm{sig->spec, sig->var_count});
  // context_spec(Ctx, Dimensions, Rules, Scores)
  if (!store.unify(spec.arg(0), context, m.runtime().occurs_check)) {
    store.reset(mark);
    result.reason = "context does not unify";
    return result;
  }

  bool solved = false;
  try {
    Machine sub(m.runtime(), store, spec.arg(2));
    solved = sub.next();
    if (solved) {
      double total = 0;
      for (Symbol d : sig->dimensions) {
        if (d != predicate_dimension()) total += 1;
      }
      for (const Term& raw : proper_list(store, spec.arg(3))) {
        Term w = store.deref(raw);
        if (!w.is_number()) {
          Term culprit = store.resolve(w);
          errors::type("number", culprit, make_indicator(sig->implementation, sig->implementation_arity()));
        }
        total += w.numeric_value();
      }
      result.score = total;
    }
  } catch (const PrologError& e) {
    FrozenTerm ball = freeze(store, store.resolve(e.ball()));
    store.reset(mark);
    throw PrologError(instantiate(store, ball));
  }
  store.reset(mark);
  result.eligible = solved;
  if (!solved) result.reason = "context rules failed";
  return result;
}

std::vector<SignaturePtr> dispatch_candidates(const KnowledgeBase& kb, const Term& goal) {
  std::vector<SignaturePtr> out = kb.signatures(key_of(goal));
  const auto& anonymous = kb.anonymous_signatures();
  out.insert(out.end(), anonymous.begin(), anonymous.end());
  return out;
}

void register_dispatch_builtins(std::unordered_map<PredicateKey, Builtin, PredicateKeyHash>& table) {
  table[{Symbol("dispatch"), 3}] = b_dispatch;
  table[{sym::query(), 1}] = b_query1;
  table[{sym::query(), 2}] = b_query2;
  table[{sym::query(), 3}] = b_query3;
}

} // namespace mdprolog
