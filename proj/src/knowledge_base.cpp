#include "mdprolog/knowledge_base.hpp"

#include <algorithm>

namespace mdprolog {

Symbol anonymous_rule_name() {
  static const Symbol s("$anonymous_rule");
  return s;
}

ClausePtr make_clause(const BindingStore& store, const Term& head, const Term& body, SourceLocation where,
                      const std::vector<std::pair<std::string, Term>>* names) {
  Freezer freezer(store);
  auto clause = std::make_shared<Clause>();
  clause->head = freezer.freeze(head);
  clause->body = freezer.freeze(body);
  clause->var_count = freezer.var_count();
  clause->where = std::move(where);
  if (names) {
    clause->var_names.resize(clause->var_count);
    const auto& live = freezer.live_vars();
    for (const auto& [name, var] : *names) {
      Term v = store.deref(var);
      if (!v.is_var()) continue;
      auto it = std::find(live.begin(), live.end(), v.var_id());
      if (it != live.end()) clause->var_names[static_cast<std::size_t>(it - live.begin())] = name;
    }
  }
  return clause;
}

KnowledgeBase::KnowledgeBase() : ops_(OperatorTable::defaults()) {}

KnowledgeBase::Predicate& KnowledgeBase::predicate(const PredicateKey& key) {
  auto [it, inserted] = predicates_.try_emplace(key);
  if (inserted) order_.push_back(key);
  return it->second;
}

ClauseListPtr KnowledgeBase::clauses(const PredicateKey& key) const {
  auto it = predicates_.find(key);
  return it == predicates_.end() ? nullptr : it->second.clauses;
}

bool KnowledgeBase::is_defined(const PredicateKey& key) const { return predicates_.count(key) > 0; }

bool KnowledgeBase::is_dynamic(const PredicateKey& key) const {
  auto it = predicates_.find(key);
  return it != predicates_.end() && it->second.dynamic;
}

void KnowledgeBase::add_clause(const PredicateKey& key, ClausePtr clause, bool at_front) {
  Predicate& p = predicate(key);
  auto next = std::make_shared<ClauseList>();
  next->reserve(p.clauses->size() + 1);
  if (at_front) next->push_back(clause);
  next->insert(next->end(), p.clauses->begin(), p.clauses->end());
  if (!at_front) next->push_back(std::move(clause));
  p.clauses = std::move(next);
}

bool KnowledgeBase::remove_clause(const PredicateKey& key, const ClausePtr& clause) {
  auto it = predicates_.find(key);
  if (it == predicates_.end()) return false;
  const ClauseList& current = *it->second.clauses;
  auto pos = std::find(current.begin(), current.end(), clause);
  if (pos == current.end()) return false;
  auto next = std::make_shared<ClauseList>();
  next->reserve(current.size() - 1);
  next->insert(next->end(), current.begin(), pos);
  next->insert(next->end(), pos + 1, current.end());
  it->second.clauses = std::move(next);
  return true;
}

void KnowledgeBase::declare_dynamic(const PredicateKey& key) { predicate(key).dynamic = true; }

void KnowledgeBase::mark_library(const PredicateKey& key) { predicate(key).library = true; }

bool KnowledgeBase::is_library(const PredicateKey& key) const {
  auto it = predicates_.find(key);
  return it != predicates_.end() && it->second.library;
}

void KnowledgeBase::release_library(const PredicateKey& key) {
  Predicate& p = predicate(key);
  if (!p.library) return;
  p.library = false;
  p.clauses = std::make_shared<ClauseList>();
}

void KnowledgeBase::add_signature(SignaturePtr sig) {
  if (sig->anonymous) {
    anonymous_.push_back(sig);
  } else {
    signatures_[sig->key].push_back(sig);
  }
  all_signatures_.push_back(std::move(sig));
}

const std::vector<SignaturePtr>& KnowledgeBase::signatures(const PredicateKey& key) const {
  static const std::vector<SignaturePtr> none;
  auto it = signatures_.find(key);
  return it == signatures_.end() ? none : it->second;
}

bool KnowledgeBase::is_multidimensional(const PredicateKey& key) const {
  auto it = signatures_.find(key);
  return it != signatures_.end() && !it->second.empty();
}

std::pair<Symbol, std::uint64_t> KnowledgeBase::fresh_implementation(Symbol name) {
  std::uint64_t id = ++impl_counters_[name];
  return {Symbol("$impl(" + name.str() + "/" + std::to_string(id) + ")"), id};
}

void KnowledgeBase::remove_file(const std::string& file) {
  for (auto& [key, pred] : predicates_) {
    const ClauseList& current = *pred.clauses;
    bool any = std::any_of(current.begin(), current.end(), [&](const ClausePtr& c) { return c->where.file == file; });
    if (!any) continue;
    auto next = std::make_shared<ClauseList>();
    for (const auto& c : current) {
      if (c->where.file != file) next->push_back(c);
    }
    pred.clauses = std::move(next);
  }
  auto from_file = [&](const SignaturePtr& s) { return s->where.file == file; };
  for (auto& [key, sigs] : signatures_) std::erase_if(sigs, from_file);
  std::erase_if(anonymous_, from_file);
  std::erase_if(all_signatures_, from_file);
}

} // namespace mdprolog
