#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mdprolog/bindings.hpp"
#include "mdprolog/errors.hpp"
#include "mdprolog/operators.hpp"
#include "mdprolog/term.hpp"

namespace mdprolog {

/// A stored clause. Head and body share one variable numbering 0..var_count-1.
struct Clause {
  Term head;
  Term body;
  std::uint32_t var_count = 0;
  std::vector<std::string> var_names;  // source names by frozen number, empty if unnamed
  SourceLocation where;
};

using ClausePtr = std::shared_ptr<const Clause>;
/// Clause lists are replaced, never edited in place, so running goals keep a stable snapshot.
using ClauseList = std::vector<ClausePtr>;
using ClauseListPtr = std::shared_ptr<const ClauseList>;

/// Builds a clause from live terms.
ClausePtr make_clause(const BindingStore& store, const Term& head, const Term& body, SourceLocation where = {},
                      const std::vector<std::pair<std::string, Term>>* names = nullptr);

/// Compiled context specification of one mdp rule.
struct Signature {
  PredicateKey key;            // source predicate; {'$anonymous_rule', 0} for anonymous rules
  bool anonymous = false;
  Symbol implementation;       // functor of the implementation clauses
  std::uint64_t implementation_id = 0;
  std::vector<Symbol> dimensions;
  /// context_spec(Ctx, Dimensions, Rules, Scores), frozen.
  Term spec;
  std::uint32_t var_count = 0;
  std::vector<std::string> var_names;
  SourceLocation where;

  std::size_t implementation_arity() const { return anonymous ? 1 : key.arity + 1; }
};

using SignaturePtr = std::shared_ptr<const Signature>;

/// Clause store, signature store, operator table and engine-global counters.
class KnowledgeBase {
public:
  KnowledgeBase();

  OperatorTable& operators() { return ops_; }
  const OperatorTable& operators() const { return ops_; }

  /// Snapshot of the clauses of a predicate; null when the predicate is unknown.
  ClauseListPtr clauses(const PredicateKey& key) const;
  bool is_defined(const PredicateKey& key) const;
  bool is_dynamic(const PredicateKey& key) const;

  void add_clause(const PredicateKey& key, ClausePtr clause, bool at_front = false);
  /// Removes one clause by identity. Returns false when it is already gone.
  bool remove_clause(const PredicateKey& key, const ClausePtr& clause);
  void declare_dynamic(const PredicateKey& key);

  /// Library predicates are replaced wholesale by the first program clause
  /// for the same key instead of being extended by it.
  void mark_library(const PredicateKey& key);
  bool is_library(const PredicateKey& key) const;
  /// Drops the library definition of `key` so a program can redefine it.
  void release_library(const PredicateKey& key);

  /// Predicates in first-definition order.
  const std::vector<PredicateKey>& predicate_order() const { return order_; }

  void add_signature(SignaturePtr sig);
  const std::vector<SignaturePtr>& signatures(const PredicateKey& key) const;
  const std::vector<SignaturePtr>& anonymous_signatures() const { return anonymous_; }
  /// Every signature in consult order.
  const std::vector<SignaturePtr>& all_signatures() const { return all_signatures_; }
  bool is_multidimensional(const PredicateKey& key) const;

  /// Fresh implementation functor `'$impl(Name/N)'` and its N, counting per name from 1.
  std::pair<Symbol, std::uint64_t> fresh_implementation(Symbol name);

  /// Next object id, starting at 1.
  std::int64_t next_object_id() { return ++object_counter_; }

  /// Forgets every clause and signature that came from `file`.
  void remove_file(const std::string& file);

private:
  struct Predicate {
    ClauseListPtr clauses = std::make_shared<ClauseList>();
    bool dynamic = false;
    bool library = false;
  };

  Predicate& predicate(const PredicateKey& key);

  OperatorTable ops_;
  std::unordered_map<PredicateKey, Predicate, PredicateKeyHash> predicates_;
  std::vector<PredicateKey> order_;
  std::unordered_map<PredicateKey, std::vector<SignaturePtr>, PredicateKeyHash> signatures_;
  std::vector<SignaturePtr> anonymous_;
  std::vector<SignaturePtr> all_signatures_;
  std::unordered_map<Symbol, std::uint64_t, SymbolHash> impl_counters_;
  std::int64_t object_counter_ = 0;
};

/// Name of the reserved signature key for anonymous rules.
Symbol anonymous_rule_name();

} // namespace mdprolog
