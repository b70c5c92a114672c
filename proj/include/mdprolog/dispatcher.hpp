#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mdprolog/knowledge_base.hpp"
#include "mdprolog/machine.hpp"

namespace mdprolog {

/// Builds the context a dispatched goal runs under: `implicit` with the
/// removals and pairs of `given` applied in order, then `predicate: Goal`
/// as the last entry. Returns a fresh list; neither input is modified.
Term updated_context(const BindingStore& store, const Term& implicit, const Term& given, const Term& goal);

/// Dimension names of a context list, in order.
std::vector<Symbol> context_keys(const BindingStore& store, const Term& context);

struct CandidateScore {
  SignaturePtr signature;
  bool eligible = false;
  double score = 0;
  std::string reason;  // why an ineligible candidate was dropped
};

/// Scores one signature against `context`. The signature's context rules run in a
/// nested solve; every binding they make is undone before returning.
CandidateScore predicate_score(Machine& m, const Term& context, const SignaturePtr& sig);

/// Candidates for `goal` in dispatch order: its own signatures in consult
/// order, then every anonymous signature.
std::vector<SignaturePtr> dispatch_candidates(const KnowledgeBase& kb, const Term& goal);

/// Registers dispatch/3 and the run-time forms of `?`/1..3.
void register_dispatch_builtins(std::unordered_map<PredicateKey, Builtin, PredicateKeyHash>& table);

} // namespace mdprolog
