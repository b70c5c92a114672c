#include "mdprolog/transformer.hpp"

#include <algorithm>

#include "mdprolog/render.hpp"

namespace mdprolog {

namespace {

struct Names {
  Symbol hook_mdp_term{"hook_mdp_term"};
  Symbol hook_context_rule{"hook_context_rule_mdp_term"};
  Symbol dispatch{"dispatch"};
  Symbol ctx_member{"ctx_member"};
  Symbol context_spec{"context_spec"};
  Symbol soft_arrow{"*->"};
  Symbol not_{"not"};
  Symbol findall{"findall"};
  Symbol forall{"forall"};
  Symbol catch_{"catch"};
  Symbol mdp_signature{"mdp_signature"};
  Symbol mdp_implementation{"mdp_implementation"};
};

const Names& names() {
  static const Names n;
  return n;
}

void flatten_conjunction(const BindingStore& store, const Term& raw, std::vector<Term>& out) {
  Term t = store.deref(raw);
  if (t.is_compound(sym::comma(), 2)) {
    flatten_conjunction(store, t.arg(0), out);
    flatten_conjunction(store, t.arg(1), out);
    return;
  }
  out.push_back(t);
}

/// Pairs up the variables of two variant terms.
void match_variables(const Term& from, const Term& to, std::unordered_map<VarId, Term>& map) {
  if (from.is_var()) {
    map.emplace(from.var_id(), to);
    return;
  }
  if (!from.is_compound()) return;
  for (std::size_t i = 0; i < from.arity(); ++i) match_variables(from.arg(i), to.arg(i), map);
}

Term substitute(const Term& t, const std::unordered_map<VarId, Term>& map) {
  if (t.is_var()) {
    auto it = map.find(t.var_id());
    return it == map.end() ? t : it->second;
  }
  if (!t.is_compound() || t.ground()) return t;
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const Term& a : t.args()) args.push_back(substitute(a, map));
  return Term::compound(t.functor(), std::move(args));
}

std::unordered_map<VarId, std::string> frozen_names(const std::vector<std::string>& names, std::uint32_t count) {
  std::unordered_map<VarId, std::string> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (i < names.size() && !names[i].empty()) {
      out[i] = names[i];
    } else {
      out[i] = "_" + std::to_string(i);
    }
  }
  return out;
}

} // namespace

struct Transformer::Env {
  Term context;
  std::vector<Symbol> dimensions;
  std::vector<Term> rules;
  std::vector<Term> scores;
  std::vector<Term> residue;  // specification goals re-run at the start of the implementation body
};

void Transformer::fail(const std::string& message) const { throw ConsultError(message, where_); }

std::optional<Term> Transformer::call_hook(Symbol hook, const Term& context, const Term& input) {
  ClauseListPtr clauses = rt_.kb.clauses({hook, 3});
  if (!clauses || clauses->empty()) return std::nullopt;

  const Term probe = Term::compound(sym::comma(), {input, context});
  const Term before = store_.resolve(probe);
  const std::size_t trail = store_.trail_size();
  Term output = store_.new_var();
  std::optional<Term> result;
  try {
    Machine sub(rt_, store_, Term::compound(hook, {context, input, output}));
    while (sub.next()) {
      Term after = store_.resolve(probe);
      // A hook solution that instantiates its input matched a more general pattern by accident.
      if (!is_variant(after, before)) continue;
      std::unordered_map<VarId, Term> map;
      match_variables(after, before, map);
      result = substitute(store_.resolve(output), map);
      break;
    }
  } catch (const PrologError& e) {
    std::string ball = render(e.ball(), rt_.kb.operators(), &store_);
    store_.undo(trail);
    fail(hook.str() + " raised " + ball);
  }
  store_.undo(trail);
  return result;
}

Term Transformer::rewrite_goal(const Term& goal, const Term& context) { return phase1(goal, context, 0); }

Term Transformer::phase1(const Term& raw, const Term& context, int depth) {
  Term t = store_.deref(raw);
  if (t.is_var() || !t.is_callable()) return t;
  if (depth > kMaxRewriteDepth) {
    fail("term rewriting exceeds " + std::to_string(kMaxRewriteDepth) + " layers: " +
         render(t, rt_.kb.operators(), &store_));
  }
  if (auto rewritten = call_hook(names().hook_mdp_term, context, t)) return phase1(*rewritten, context, depth + 1);
  if (!t.is_compound()) return t;

  const Names& n = names();
  const Symbol f = t.functor();
  const std::size_t arity = t.arity();
  auto with_args = [&](std::initializer_list<std::size_t> rewrite) {
    std::vector<Term> args(t.args().begin(), t.args().end());
    for (std::size_t i : rewrite) args[i] = phase1(args[i], context, 0);
    return Term::compound(f, std::move(args));
  };

  if (f == sym::query()) {
    if (arity == 1) return Term::compound(n.dispatch, {context, Term(), t.arg(0)});
    if (arity == 2) return Term::compound(n.dispatch, {context, t.arg(0), t.arg(1)});
    if (arity == 3) return Term::compound(n.dispatch, {t.arg(0), t.arg(1), t.arg(2)});
  }
  if (arity == 2 && (f == sym::comma() || f == sym::semicolon() || f == sym::arrow() || f == n.soft_arrow ||
                     f == n.forall)) {
    return with_args({0, 1});
  }
  if (arity == 1 && (f == sym::not_provable() || f == n.not_ || f == sym::call())) return with_args({0});
  if (f == n.findall && (arity == 3 || arity == 4)) return with_args({1});
  if (f == n.catch_ && arity == 3) return with_args({0, 2});
  return t;
}

void Transformer::classify(Env& env, const Term& raw, bool offer_hook) {
  const Names& n = names();
  Term e = store_.deref(raw);
  if (e.is_var()) fail("unbound entry in context specification");

  if (e.is_compound(sym::colon(), 2)) {
    Term name = store_.deref(e.arg(0));
    if (!name.is_atom()) {
      fail("dimension name must be an atom: " + render(e, rt_.kb.operators(), &store_));
    }
    if (std::find(env.dimensions.begin(), env.dimensions.end(), name.functor()) == env.dimensions.end()) {
      env.dimensions.push_back(name.functor());
    }
    Term member = Term::compound(n.ctx_member, {env.context, name, e.arg(1)});
    env.rules.push_back(member);
    env.residue.push_back(member);
    return;
  }
  if (e.is_compound(sym::at(), 2)) {
    Term weight = store_.deref(e.arg(1));
    if (!weight.is_var() && !weight.is_number()) {
      fail("weight must be a variable or a number: " + render(e, rt_.kb.operators(), &store_));
    }
    env.rules.push_back(phase1(e.arg(0), env.context, 0));
    env.scores.push_back(weight);
    return;
  }
  if (e.is_compound(sym::minus(), 1)) {
    fail("dimension removal is only allowed in queries: " + render(e, rt_.kb.operators(), &store_));
  }
  if (offer_hook) {
    if (auto translated = call_hook(n.hook_context_rule, env.context, e)) {
      std::vector<Term> parts;
      flatten_conjunction(store_, *translated, parts);
      for (const Term& part : parts) classify(env, part, false);
      return;
    }
  }
  Term goal = phase1(e, env.context, 0);
  env.rules.push_back(goal);
  env.residue.push_back(goal);
}

Expansion Transformer::expand(const Term& raw, const SourceLocation& where, const VarNames& source_names) {
  where_ = where;
  Term c = store_.deref(raw);
  if (c.is_var()) fail("clause is a variable");
  Term head = c;
  Term body = Term::atom(sym::true_());
  const bool has_body = c.is_compound(sym::neck(), 2);
  if (has_body) {
    head = store_.deref(c.arg(0));
    body = c.arg(1);
  }

  Term spec_list;
  Term goal_head;
  bool anonymous = false;
  if (head.is_compound(sym::hash(), 2)) {
    spec_list = head.arg(0);
    goal_head = store_.deref(head.arg(1));
    if (goal_head.is_var()) fail("mdp rule head is a variable");
    if (!goal_head.is_callable()) fail("mdp rule head is not callable: " + render(goal_head, rt_.kb.operators(), &store_));
  } else if (head.is_cons() || head.is_nil()) {
    spec_list = head;
    anonymous = true;
  } else {
    if (head.is_var()) fail("clause head is a variable");
    if (!head.is_callable()) fail("clause head is not callable: " + render(head, rt_.kb.operators(), &store_));
    Term rewritten = phase1(body, Term(), 0);
    Expansion out;
    out.key = key_of(head);
    out.clause = make_clause(store_, head, rewritten, where, &source_names);
    return out;
  }

  auto entries = list_items(store_, spec_list);
  if (!entries) fail("context specification is not a proper list: " + render(spec_list, rt_.kb.operators(), &store_));

  Env env;
  env.context = store_.new_var();
  for (const Term& entry : *entries) classify(env, entry, true);

  Term rewritten_body = phase1(body, env.context, 0);
  std::vector<Term> goals = env.residue;
  if (goals.empty() || !store_.deref(rewritten_body).is_atom(sym::true_())) goals.push_back(rewritten_body);
  Term impl_body = make_conjunction(goals);

  PredicateKey source_key = anonymous ? PredicateKey{anonymous_rule_name(), 0} : key_of(goal_head);
  auto [impl, impl_id] = rt_.kb.fresh_implementation(source_key.name);
  std::vector<Term> impl_args{env.context};
  if (!anonymous) impl_args.insert(impl_args.end(), goal_head.args().begin(), goal_head.args().end());
  Term impl_head = Term::compound(impl, std::move(impl_args));

  VarNames all_names = source_names;
  all_names.emplace_back("Ctx", env.context);

  Expansion out;
  out.key = key_of(impl_head);
  out.clause = make_clause(store_, impl_head, impl_body, where, &all_names);

  std::vector<Term> dims;
  for (Symbol d : env.dimensions) dims.push_back(Term::atom(d));
  Term spec = Term::compound(names().context_spec,
                             {env.context, make_list(dims), make_conjunction(env.rules), make_list(env.scores)});
  auto sig = std::make_shared<Signature>();
  sig->key = source_key;
  sig->anonymous = anonymous;
  sig->implementation = impl;
  sig->implementation_id = impl_id;
  sig->dimensions = env.dimensions;
  sig->where = where;
  Freezer freezer(store_);
  sig->spec = freezer.freeze(spec);
  sig->var_count = freezer.var_count();
  sig->var_names.resize(sig->var_count);
  const auto& live = freezer.live_vars();
  for (const auto& [name, var] : all_names) {
    Term v = store_.deref(var);
    if (!v.is_var()) continue;
    auto it = std::find(live.begin(), live.end(), v.var_id());
    if (it != live.end()) sig->var_names[static_cast<std::size_t>(it - live.begin())] = name;
  }
  out.signature = std::move(sig);
  return out;
}

std::string render_signature(const Signature& sig, const OperatorTable& ops) {
  const Names& n = names();
  auto var_names = frozen_names(sig.var_names, sig.var_count);
  RenderOptions options;
  options.var_names = &var_names;
  Term term = Term::compound(
      n.mdp_signature,
      {make_indicator(sig.key.name, sig.key.arity),
       Term::compound(n.mdp_implementation,
                      {make_indicator(sig.key.name, static_cast<std::size_t>(sig.implementation_id))}),
       sig.spec});
  return render(term, ops, nullptr, options);
}

std::string render_clause(const Clause& clause, const OperatorTable& ops) {
  auto var_names = frozen_names(clause.var_names, clause.var_count);
  RenderOptions options;
  options.var_names = &var_names;
  if (clause.body.is_atom(sym::true_())) return render(clause.head, ops, nullptr, options);
  return render(Term::compound(sym::neck(), {clause.head, clause.body}), ops, nullptr, options);
}

} // namespace mdprolog
