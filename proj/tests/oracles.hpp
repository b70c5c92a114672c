#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mdprolog/bindings.hpp"
#include "mdprolog/term.hpp"

namespace mdprolog::oracles {

/// Random term built directly as a value, for round-trip checks.
class TermGenerator {
public:
  TermGenerator(BindingStore& store, std::uint32_t seed) : store_(store), rng_(seed) {}

  Term next(int depth = 4) {
    const int pick = static_cast<int>(rng_() % (depth <= 0 ? 4 : 10));
    switch (pick) {
    case 0: return atom();
    case 1: return Term::integer(static_cast<std::int64_t>(rng_() % 2001) - 1000);
    case 2: return Term::floating(floats_[rng_() % floats_.size()]);
    case 3: return variable();
    case 4: case 5: {
      const auto& op = binary_[rng_() % binary_.size()];
      return Term::compound(op, {next(depth - 1), next(depth - 1)});
    }
    case 6: {
      const auto& op = prefix_[rng_() % prefix_.size()];
      return Term::compound(op, {next(depth - 1)});
    }
    case 7: {
      std::vector<Term> items;
      const std::size_t n = rng_() % 4;
      for (std::size_t i = 0; i < n; ++i) items.push_back(next(depth - 1));
      Term tail = rng_() % 4 == 0 ? variable() : Term();
      return make_list(items, tail);
    }
    case 8: return Term::compound("{}", {next(depth - 1)});
    default: {
      std::vector<Term> args;
      const std::size_t n = 1 + rng_() % 3;
      for (std::size_t i = 0; i < n; ++i) args.push_back(next(depth - 1));
      return Term::compound(functors_[rng_() % functors_.size()], std::move(args));
    }
    }
  }

private:
  Term atom() { return Term::atom(atoms_[rng_() % atoms_.size()]); }
  Term variable() {
    if (vars_.empty() || rng_() % 2) vars_.push_back(store_.new_var());
    return vars_[rng_() % vars_.size()];
  }

  BindingStore& store_;
  std::mt19937 rng_;
  std::vector<Term> vars_;
  const std::vector<std::string> atoms_{"a",   "foo", "[]",    "{}", "'quoted'", "Upper", "hello world", "-",
                                        "+",   ",",   "|",     ";",  "!",        "?",     "#",           "@",
                                        "\\+", "",    "it's", "\n", "debug",    "mod",   ":-",          "[x]"};
  const std::vector<std::string> functors_{"f", "g", "edge", "Odd name", "-", "+", "[]", "{}", "'", "is"};
  const std::vector<std::string> binary_{"+", "-", "*", "/", ":-", ",", ";", "->", "=", ":", "#", "?", "@", "^",
                                         "**", "mod", "is", "=..", "<", "-->", "|"};
  const std::vector<std::string> prefix_{"-", "+", "\\+", "?", "\\", ":-"};
  const std::vector<double> floats_{0.5, -2.25, 1e20, 3.0, -0.0001, 1.5e-7, 100.0};
};

/// A random stratified program with no cuts, rendered twice: once as plain
/// clauses and once as mdp rules with empty context specifications whose
/// calls to user predicates go through `?`.
struct RandomProgram {
  std::string plain;
  std::string dispatched;
  std::vector<std::string> queries;  // plain form
  std::vector<std::string> dispatched_queries;
};

inline RandomProgram random_program(std::uint32_t seed) {
  std::mt19937 rng(seed);
  const std::vector<std::string> consts{"a", "b", "c", "1", "2"};
  const std::vector<std::string> vars{"X", "Y", "Z", "W"};
  const int preds = 2 + static_cast<int>(rng() % 4);
  std::vector<int> arity(static_cast<std::size_t>(preds));
  for (auto& a : arity) a = 1 + static_cast<int>(rng() % 2);

  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  auto term = [&]() { return rng() % 3 == 0 ? pick(consts) : pick(vars); };
  auto atom_args = [&](int n, bool ground) {
    std::string s = "(";
    for (int i = 0; i < n; ++i) s += (i ? ", " : "") + (ground ? pick(consts) : term());
    return s + ")";
  };
  auto name = [](int p) { return "p" + std::to_string(p); };

  RandomProgram out;
  for (int p = 0; p < preds; ++p) {
    const int clauses = 1 + static_cast<int>(rng() % 4);
    for (int c = 0; c < clauses; ++c) {
      const std::string head = name(p) + atom_args(arity[static_cast<std::size_t>(p)], p == 0 || rng() % 3 == 0);
      std::vector<std::pair<std::string, std::string>> body;  // plain, dispatched
      if (p > 0) {
        const int goals = static_cast<int>(rng() % 3);
        for (int g = 0; g < goals; ++g) {
          const int q = static_cast<int>(rng() % static_cast<unsigned>(p));
          const std::string call = name(q) + atom_args(arity[static_cast<std::size_t>(q)], false);
          switch (rng() % 6) {
          case 0: body.emplace_back("\\+ " + call, "\\+ ? " + call); break;
          case 1: {
            std::string v = pick(vars);
            body.emplace_back("findall(" + v + ", " + call + ", _)", "findall(" + v + ", ? " + call + ", _)");
            break;
          }
          case 2: body.emplace_back(pick(vars) + " \\== " + term(), ""); break;
          default: body.emplace_back(call, "? " + call); break;
          }
          if (body.back().second.empty()) body.back().second = body.back().first;
        }
      }
      std::string plain = head;
      std::string dispatched = "[] # " + head;
      for (std::size_t i = 0; i < body.size(); ++i) {
        plain += (i ? ", " : " :- ") + body[i].first;
        dispatched += (i ? ", " : " :- ") + body[i].second;
      }
      out.plain += plain + ".\n";
      out.dispatched += dispatched + ".\n";
    }
  }
  for (int p = 0; p < preds; ++p) {
    const std::string goal = name(p) + atom_args(arity[static_cast<std::size_t>(p)], false);
    out.queries.push_back(goal);
    out.dispatched_queries.push_back("[] ? " + goal);
  }
  return out;
}

/// Independent model of depth-first search for
/// `path(A, B) :- edge(A, B). path(A, C) :- edge(A, B), path(B, C).`
/// over an acyclic edge list. Records the solutions in order and every
/// successful edge lookup in order, including those on branches that fail later.
struct PathTrace {
  std::vector<std::pair<std::string, std::string>> solutions;
  std::vector<std::pair<std::string, std::string>> edge_lookups;
};

inline PathTrace trace_paths(const std::vector<std::pair<std::string, std::string>>& edges,
                             const std::string* from = nullptr, const std::string* to = nullptr) {
  PathTrace trace;
  using Cont = std::function<void(const std::string&)>;
  std::function<void(const std::string*, const std::string*, const Cont&)> path =
      [&](const std::string* a, const std::string* c, const Cont& k) {
        for (const auto& e : edges) {
          if ((a && e.first != *a) || (c && e.second != *c)) continue;
          trace.edge_lookups.push_back(e);
          k(e.second);
        }
        for (const auto& e : edges) {
          if (a && e.first != *a) continue;
          trace.edge_lookups.push_back(e);
          path(&e.second, c, k);
        }
      };
  if (from) {
    path(from, to, [&](const std::string& end) { trace.solutions.emplace_back(*from, end); });
  } else {
    // An unbound start is resolved by the edge lookups themselves.
    for (const auto& e : edges) {
      if (to && e.second != *to) continue;
      trace.edge_lookups.push_back(e);
      trace.solutions.emplace_back(e.first, e.second);
    }
    for (const auto& e : edges) {
      trace.edge_lookups.push_back(e);
      path(&e.second, to, [&](const std::string& end) { trace.solutions.emplace_back(e.first, end); });
    }
  }
  return trace;
}

} // namespace mdprolog::oracles
