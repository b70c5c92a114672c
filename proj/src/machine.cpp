#include "mdprolog/machine.hpp"

#include <algorithm>
#include <unordered_set>

namespace mdprolog {

namespace {

constexpr int kMaxNesting = 1000;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct Names {
  Symbol soft_arrow{"*->"};
  Symbol not_{"not"};
  Symbol findall{"findall"};
  Symbol forall{"forall"};
  Symbol catch_{"catch"};
};

const Names& names() {
  static const Names n;
  return n;
}

/// Cheap pre-unification check on principal functors of the arguments.
bool may_match(const Term& goal_arg, const Term& head_arg) {
  if (head_arg.is_var() || goal_arg.is_var()) return true;
  if (goal_arg.kind() != head_arg.kind()) return false;
  switch (goal_arg.kind()) {
  case Term::Kind::Atom: return goal_arg.functor() == head_arg.functor();
  case Term::Kind::Integer: return goal_arg.int_value() == head_arg.int_value();
  case Term::Kind::Float: return goal_arg.float_value() == head_arg.float_value();
  case Term::Kind::Compound:
    return goal_arg.functor() == head_arg.functor() && goal_arg.arity() == head_arg.arity();
  case Term::Kind::Var: return true;
  }
  return true;
}

} // namespace

struct Machine::Frame {
  Goal goal;
  mutable Cont next;

  Frame(Goal g, Cont n) : goal(std::move(g)), next(std::move(n)) {}
  ~Frame() {
    // Unlink uniquely owned tails one by one so long continuations do not recurse.
    Cont n = std::move(next);
    while (n && n.use_count() == 1) {
      Cont after = std::move(n->next);
      n = std::move(after);
    }
  }
};

Machine::Cont Machine::push(Goal g, Cont next) { return std::make_shared<const Frame>(std::move(g), std::move(next)); }

Machine::Machine(Runtime& rt, BindingStore& store, Term goal) : rt_(rt), store_(store), start_(store.mark()) {
  if (rt_.nesting >= kMaxNesting) errors::resource("nesting_depth");
  ++rt_.nesting;
  cont_ = push(Goal{GoalKind::Call, std::move(goal), 0}, nullptr);
}

Machine::~Machine() {
  --rt_.nesting;
  // Choicepoints hold continuations; release them before the stack vector.
  while (!cps_.empty()) cps_.pop_back();
}

void Machine::stop() {
  cps_.clear();
  cont_.reset();
  done_ = true;
}

bool Machine::next() {
  if (done_) return false;
  if (started_) resume_ = true;
  started_ = true;
  bool ok = run();
  if (!ok) done_ = true;
  return ok;
}

void Machine::count_inference() {
  ++rt_.inferences;
  if (rt_.budget != 0 && rt_.inferences > rt_.budget) throw BudgetExhausted(rt_.budget);
}

bool Machine::run() {
  for (;;) {
    try {
      if (resume_) {
        resume_ = false;
        if (!backtrack()) return false;
      }
      for (;;) {
        if (!cont_) return true;
        Goal g = cont_->goal;
        cont_ = cont_->next;
        bool ok = true;
        switch (g.kind) {
        case GoalKind::Call: ok = step(g.term, g.barrier); break;
        case GoalKind::CutTo: cut_to(g.barrier); break;
        case GoalKind::SoftCut:
          if (g.barrier < cps_.size()) cps_[g.barrier].kind = ChoiceKind::Dead;
          break;
        case GoalKind::PopCatch: pop_catch(g.barrier); break;
        }
        if (!ok && !backtrack()) return false;
      }
    } catch (const PrologError& e) {
      handle_exception(e.ball());
    }
  }
}

bool Machine::backtrack() {
  while (!cps_.empty()) {
    ChoicePoint& cp = cps_.back();
    switch (cp.kind) {
    case ChoiceKind::Dead:
    case ChoiceKind::Catch:
      cps_.pop_back();
      continue;
    case ChoiceKind::Reactivate: {
      std::uint64_t id = cp.catch_id;
      cps_.pop_back();
      for (auto it = cps_.rbegin(); it != cps_.rend(); ++it) {
        if (it->kind == ChoiceKind::Catch && it->catch_id == id) {
          it->active = true;
          break;
        }
      }
      continue;
    }
    case ChoiceKind::Alternative: {
      store_.reset(cp.mark);
      cont_ = push(Goal{GoalKind::Call, std::move(cp.alternative), cp.barrier}, std::move(cp.cont));
      cps_.pop_back();
      return true;
    }
    case ChoiceKind::Clauses: {
      store_.reset(cp.mark);
      const std::size_t barrier = cps_.size() - 1;
      ClauseListPtr clauses = cp.clauses;
      Term goal = cp.goal;
      std::size_t index = cp.next_clause;
      cont_ = cp.cont;
      std::size_t following = next_candidate(goal, *clauses, index + 1);
      if (following == kNone) {
        cps_.pop_back();
      } else {
        cp.next_clause = following;
      }
      count_inference();
      if (try_clause(goal, (*clauses)[index], barrier)) return true;
      continue;
    }
    case ChoiceKind::Retry: {
      store_.reset(cp.mark);
      cont_ = cp.cont;
      auto attempt = cp.attempt;
      if ((*attempt)()) return true;
      store_.reset(cps_.back().mark);
      cps_.pop_back();
      continue;
    }
    }
  }
  cont_.reset();
  return false;
}

void Machine::cut_to(std::size_t height) {
  if (cps_.size() > height) cps_.erase(cps_.begin() + static_cast<std::ptrdiff_t>(height), cps_.end());
}

void Machine::pop_catch(std::uint64_t id) {
  for (std::size_t i = cps_.size(); i-- > 0;) {
    ChoicePoint& cp = cps_[i];
    if (cp.kind != ChoiceKind::Catch || cp.catch_id != id) continue;
    if (i + 1 == cps_.size()) {
      cps_.pop_back();
    } else {
      cp.active = false;
      ChoicePoint re{ChoiceKind::Reactivate, store_.mark(), nullptr};
      re.catch_id = id;
      cps_.push_back(std::move(re));
    }
    return;
  }
}

bool Machine::handle_exception(const Term& ball) {
  Term resolved = store_.resolve(ball);
  FrozenTerm frozen = freeze(store_, resolved);
  while (!cps_.empty()) {
    ChoicePoint cp = std::move(cps_.back());
    cps_.pop_back();
    if (cp.kind != ChoiceKind::Catch || !cp.active) continue;
    store_.reset(cp.mark);
    Term copy = instantiate(store_, frozen);
    if (unify(cp.catcher, copy)) {
      cont_ = push(Goal{GoalKind::Call, cp.alternative, cps_.size()}, cp.cont);
      return true;
    }
    store_.reset(cp.mark);
  }
  cont_.reset();
  done_ = true;
  throw PrologError(resolved);
}

void Machine::then_call(Term goal) { cont_ = push(Goal{GoalKind::Call, std::move(goal), cps_.size()}, cont_); }

void Machine::retry_with(std::function<bool()> attempt) {
  ChoicePoint cp{ChoiceKind::Retry, store_.mark(), cont_};
  cp.attempt = std::make_shared<std::function<bool()>>(std::move(attempt));
  cps_.push_back(std::move(cp));
}

std::vector<FrozenTerm> Machine::collect(const Term& templ, const Term& goal) {
  const BindingStore::Mark mark = store_.mark();
  std::vector<FrozenTerm> results;
  try {
    Machine sub(rt_, store_, goal);
    while (sub.next()) results.push_back(freeze(store_, templ));
  } catch (const PrologError& e) {
    FrozenTerm ball = freeze(store_, e.ball());
    store_.reset(mark);
    throw PrologError(instantiate(store_, ball));
  }
  store_.reset(mark);
  return results;
}

bool Machine::solve_once(const Term& goal) {
  Machine sub(rt_, store_, goal);
  return sub.next();
}

std::size_t Machine::next_candidate(const Term& goal, const ClauseList& clauses, std::size_t from) const {
  const std::size_t n = goal.arity();
  for (std::size_t i = from; i < clauses.size(); ++i) {
    const Term& head = clauses[i]->head;
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) ok = may_match(store_.deref(goal.arg(a)), head.arg(a));
    if (ok) return i;
  }
  return kNone;
}

bool Machine::try_clause(const Term& goal, const ClausePtr& clause, std::size_t barrier) {
  const VarId base = clause->var_count ? store_.allocate(clause->var_count) : 0;
  Term head = instantiate(clause->head, base);
  if (!unify(head, goal)) return false;
  if (!clause->body.is_atom(sym::true_())) {
    cont_ = push(Goal{GoalKind::Call, instantiate(clause->body, base), barrier}, std::move(cont_));
  }
  return true;
}

bool Machine::call_user(const Term& goal, const PredicateKey& key) {
  ClauseListPtr clauses = kb().clauses(key);
  if (!clauses) errors::existence("procedure", make_indicator(key.name, key.arity));
  std::size_t first = next_candidate(goal, *clauses, 0);
  if (first == kNone) return false;
  std::size_t second = next_candidate(goal, *clauses, first + 1);
  const std::size_t barrier = cps_.size();
  if (second != kNone) {
    ChoicePoint cp{ChoiceKind::Clauses, store_.mark(), cont_};
    cp.goal = goal;
    cp.clauses = clauses;
    cp.next_clause = second;
    cps_.push_back(std::move(cp));
  }
  return try_clause(goal, (*clauses)[first], barrier);
}

bool Machine::is_control(const PredicateKey& key) {
  static const std::unordered_set<PredicateKey, PredicateKeyHash> control = [] {
    std::unordered_set<PredicateKey, PredicateKeyHash> s;
    for (auto [name, arity] : std::initializer_list<std::pair<const char*, std::size_t>>{
             {"true", 0}, {"fail", 0}, {"false", 0}, {"!", 0}, {",", 2}, {";", 2}, {"->", 2}, {"*->", 2},
             {"\\+", 1}, {"not", 1}, {"findall", 3}, {"findall", 4}, {"forall", 2}, {"catch", 3}}) {
      s.insert({Symbol(name), arity});
    }
    for (std::size_t i = 1; i <= 8; ++i) s.insert({sym::call(), i});
    return s;
  }();
  return control.count(key) > 0;
}

bool Machine::step(const Term& raw_goal, std::size_t barrier) {
  count_inference();
  Term goal = store_.deref(raw_goal);
  if (goal.is_var()) errors::instantiation();
  if (!goal.is_callable()) errors::type("callable", goal);
  const Symbol f = goal.functor();
  const std::size_t arity = goal.arity();
  const Names& n = names();

  auto call_goal = [&](Term g, std::size_t b, Cont next) { return push(Goal{GoalKind::Call, std::move(g), b}, std::move(next)); };
  auto alternative = [&](Term alt, std::size_t b) {
    ChoicePoint cp{ChoiceKind::Alternative, store_.mark(), cont_};
    cp.alternative = std::move(alt);
    cp.barrier = b;
    cps_.push_back(std::move(cp));
  };

  switch (arity) {
  case 0:
    if (f == sym::true_()) return true;
    if (f == sym::fail() || f == sym::false_()) return false;
    if (f == sym::cut()) {
      cut_to(barrier);
      return true;
    }
    break;
  case 1:
    if (f == sym::not_provable() || f == n.not_) {
      const std::size_t k = cps_.size();
      alternative(Term::atom(sym::true_()), barrier);
      cont_ = call_goal(goal.arg(0), k + 1,
                        push(Goal{GoalKind::CutTo, Term(), k}, call_goal(Term::atom(sym::fail()), k, cont_)));
      return true;
    }
    break;
  case 2:
    if (f == sym::comma()) {
      cont_ = call_goal(goal.arg(0), barrier, call_goal(goal.arg(1), barrier, cont_));
      return true;
    }
    if (f == sym::semicolon()) {
      Term lhs = store_.deref(goal.arg(0));
      const std::size_t k = cps_.size();
      if (lhs.is_compound(sym::arrow(), 2)) {
        alternative(goal.arg(1), barrier);
        cont_ = call_goal(lhs.arg(0), k + 1,
                          push(Goal{GoalKind::CutTo, Term(), k}, call_goal(lhs.arg(1), barrier, cont_)));
        return true;
      }
      if (lhs.is_compound(n.soft_arrow, 2)) {
        alternative(goal.arg(1), barrier);
        cont_ = call_goal(lhs.arg(0), k + 1,
                          push(Goal{GoalKind::SoftCut, Term(), k}, call_goal(lhs.arg(1), barrier, cont_)));
        return true;
      }
      alternative(goal.arg(1), barrier);
      cont_ = call_goal(goal.arg(0), barrier, cont_);
      return true;
    }
    if (f == sym::arrow()) {
      const std::size_t k = cps_.size();
      alternative(Term::atom(sym::fail()), barrier);
      cont_ = call_goal(goal.arg(0), k + 1,
                        push(Goal{GoalKind::CutTo, Term(), k}, call_goal(goal.arg(1), barrier, cont_)));
      return true;
    }
    if (f == n.soft_arrow) {
      cont_ = call_goal(goal.arg(0), cps_.size(), call_goal(goal.arg(1), barrier, cont_));
      return true;
    }
    if (f == n.forall) {
      Term inner = Term::compound(sym::comma(), {goal.arg(0), Term::compound(sym::not_provable(), {goal.arg(1)})});
      cont_ = call_goal(Term::compound(sym::not_provable(), {inner}), barrier, cont_);
      return true;
    }
    break;
  case 3:
    if (f == n.catch_) {
      const std::uint64_t id = ++catch_counter_;
      ChoicePoint cp{ChoiceKind::Catch, store_.mark(), cont_};
      cp.catcher = goal.arg(1);
      cp.alternative = goal.arg(2);
      cp.catch_id = id;
      cps_.push_back(std::move(cp));
      cont_ = call_goal(goal.arg(0), cps_.size(), push(Goal{GoalKind::PopCatch, Term(), id}, cont_));
      return true;
    }
    if (f == n.findall) {
      auto results = collect(goal.arg(0), goal.arg(1));
      std::vector<Term> items;
      items.reserve(results.size());
      for (const auto& r : results) items.push_back(instantiate(store_, r));
      return unify(goal.arg(2), make_list(items));
    }
    break;
  case 4:
    if (f == n.findall) {
      auto results = collect(goal.arg(0), goal.arg(1));
      std::vector<Term> items;
      items.reserve(results.size());
      for (const auto& r : results) items.push_back(instantiate(store_, r));
      return unify(goal.arg(2), make_list(items, goal.arg(3)));
    }
    break;
  default:
    break;
  }

  if (f == sym::call() && arity >= 1) {
    Term target = store_.deref(goal.arg(0));
    if (arity > 1) {
      if (target.is_var()) errors::instantiation();
      if (!target.is_callable()) errors::type("callable", target);
      std::vector<Term> args(target.args().begin(), target.args().end());
      for (std::size_t i = 1; i < arity; ++i) args.push_back(goal.arg(i));
      target = Term::compound(target.functor(), std::move(args));
    }
    cont_ = call_goal(std::move(target), cps_.size(), cont_);
    return true;
  }

  const PredicateKey key{f, arity};
  const auto& table = builtins();
  if (auto it = table.find(key); it != table.end()) return it->second(*this, goal.args());
  return call_user(goal, key);
}

} // namespace mdprolog
