#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdprolog/knowledge_base.hpp"
#include "mdprolog/machine.hpp"
#include "mdprolog/reader.hpp"

namespace mdprolog {

/// Result of expanding one source clause.
struct Expansion {
  PredicateKey key;  // predicate the clause is stored under
  ClausePtr clause;
  /// Set for mdp rules; the clause is then its implementation.
  SignaturePtr signature;
};

/// Consult-time translation of mdp rules into implementation clauses plus
/// signatures. Hooks (hook_mdp_term/3, hook_context_rule_mdp_term/3) are
/// looked up in the knowledge base when they are needed.
class Transformer {
public:
  /// Hook rewrites deeper than this are rejected as loops.
  static constexpr int kMaxRewriteDepth = 32;

  Transformer(Runtime& rt, BindingStore& store) : rt_(rt), store_(store) {}

  /// Rewrites `?` queries and hook-defined terms in a goal, descending
  /// through control constructs. `context` is the implicit context term.
  Term rewrite_goal(const Term& goal, const Term& context);

  /// Expands a clause term. Plain clauses keep their head; mdp rules become
  /// an implementation clause and a signature.
  Expansion expand(const Term& clause, const SourceLocation& where, const VarNames& names);

private:
  struct Env;

  Term phase1(const Term& t, const Term& context, int depth);
  std::optional<Term> call_hook(Symbol hook, const Term& context, const Term& input);
  void classify(Env& env, const Term& entry, bool offer_hook);
  [[noreturn]] void fail(const std::string& message) const;

  Runtime& rt_;
  BindingStore& store_;
  SourceLocation where_;
};

/// Renders a signature in the `mdp_signature(Name/Arity, mdp_implementation(Name/Id),
/// context_spec(Ctx, Dims, Rules, Scores))` shape, with source variable names.
std::string render_signature(const Signature& sig, const OperatorTable& ops);

/// Renders a stored clause as `Head :- Body.` with source variable names.
std::string render_clause(const Clause& clause, const OperatorTable& ops);

} // namespace mdprolog
