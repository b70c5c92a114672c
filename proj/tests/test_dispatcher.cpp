#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mdprolog/dispatcher.hpp"
#include "support.hpp"

using namespace mdprolog;
using namespace mdprolog::testing;

namespace {

struct ContextFixture {
  OperatorTable ops = OperatorTable::defaults();
  BindingStore store;
  Term parse(std::string_view text) { return parse_term(text, ops, store); }
  std::string updated(std::string_view implicit, std::string_view given, std::string_view goal) {
    return render(updated_context(store, parse(implicit), parse(given), parse(goal)), ops, &store);
  }
  std::string error(std::string_view implicit, std::string_view given) {
    try {
      updated_context(store, parse(implicit), parse(given), parse("g"));
    } catch (const PrologError& e) {
      return render(store.resolve(e.ball()).arg(0), ops, &store);
    }
    return {};
  }
};

/// Scores every candidate of `goal` under `context`.
std::vector<CandidateScore> scores(Session& s, const std::string& context, const std::string& goal) {
  BindingStore store;
  const OperatorTable& ops = s.engine.kb().operators();
  Term g = parse_term(goal, ops, store);
  Term ctx = updated_context(store, Term(), parse_term(context, ops, store), g);
  Machine m(s.engine.runtime(), store, Term::atom("true"));
  std::vector<CandidateScore> out;
  for (const SignaturePtr& sig : dispatch_candidates(s.engine.kb(), g)) out.push_back(predicate_score(m, ctx, sig));
  return out;
}

} // namespace

TEST(UpdatedContext, AppendsPredicateLast) {
  ContextFixture f;
  EXPECT_EQ(f.updated("[]", "[]", "edge(a, b)"), "[predicate:edge(a, b)]");
  EXPECT_EQ(f.updated("[debug:writeln]", "[]", "p"), "[debug:writeln, predicate:p]");
}

TEST(UpdatedContext, GivenEntriesOverrideInPlace) {
  ContextFixture f;
  EXPECT_EQ(f.updated("[a:1, b:2]", "[a:3, c:4]", "p"), "[a:3, b:2, c:4, predicate:p]");
}

TEST(UpdatedContext, RemovalDropsDimension) {
  ContextFixture f;
  EXPECT_EQ(f.updated("[debug:writeln, x:1]", "[-debug]", "edge(A, B)"), "[x:1, predicate:edge(_G0, _G1)]");
  EXPECT_EQ(f.updated("[x:1]", "[-missing]", "p"), "[x:1, predicate:p]");
}

TEST(UpdatedContext, EntriesApplyInOrder) {
  ContextFixture f;
  EXPECT_EQ(f.updated("[]", "[a:1, -a, a:2]", "p"), "[a:2, predicate:p]");
  EXPECT_EQ(f.updated("[]", "[a:1, -a]", "p"), "[predicate:p]");
}

TEST(UpdatedContext, OldPredicateEntryIsReplaced) {
  ContextFixture f;
  EXPECT_EQ(f.updated("[predicate:old, a:1]", "[]", "new"), "[a:1, predicate:new]");
}

TEST(UpdatedContext, MalformedEntries) {
  ContextFixture f;
  EXPECT_EQ(f.error("[]", "[X]"), "instantiation_error");
  EXPECT_EQ(f.error("[]", "[foo]"), "type_error(context_entry, foo)");
  EXPECT_EQ(f.error("[]", "[1:a]"), "type_error(context_entry, 1:a)");
  EXPECT_EQ(f.error("[]", "[a:1|T]"), "instantiation_error");
  EXPECT_EQ(f.error("[]", "notalist"), "type_error(list, notalist)");
}

TEST(UpdatedContext, InputsAreUnchanged) {
  ContextFixture f;
  Term implicit = f.parse("[a:1]");
  Term given = f.parse("[a:2]");
  updated_context(f.store, implicit, given, f.parse("p"));
  EXPECT_EQ(render(implicit, f.ops, &f.store), "[a:1]");
}

TEST(Scoring, SubtypeTable) {
  Session s;
  s.load_program("shapes.mdp");
  ASSERT_TRUE(s.succeeds("new_oid(O), O ! write(type, special_rectangle)"));
  auto table = scores(s, "[rcvr: oid(1)]", "representation(R)");
  ASSERT_EQ(table.size(), 4u);
  EXPECT_TRUE(table[0].eligible);
  EXPECT_EQ(table[0].score, 2);
  EXPECT_TRUE(table[1].eligible);
  EXPECT_EQ(table[1].score, 3);
  EXPECT_TRUE(table[2].eligible);
  EXPECT_EQ(table[2].score, 4);
  EXPECT_FALSE(table[3].eligible);
}

TEST(Scoring, MissingDimensionIsIneligible) {
  Session s;
  s.load_program("graph.mdp");
  s.load_program("graph_debug.mdp");
  auto plain = scores(s, "[]", "edge(a, B)");
  ASSERT_EQ(plain.size(), 3u);
  EXPECT_TRUE(plain[0].eligible);
  EXPECT_EQ(plain[0].score, 0);
  EXPECT_FALSE(plain[2].eligible);
  EXPECT_NE(plain[2].reason.find("debug"), std::string::npos);
  auto debug = scores(s, "[debug: writeln]", "edge(a, B)");
  EXPECT_TRUE(debug[2].eligible);
  EXPECT_EQ(debug[2].score, 1);
}

TEST(Scoring, WeightsAddToDimensionCount) {
  Session s;
  s.load("[a: _, b: _, bonus(W)@W] # p.\nbonus(2.5).\n");
  auto table = scores(s, "[a: 1, b: 2]", "p");
  ASSERT_EQ(table.size(), 1u);
  EXPECT_DOUBLE_EQ(table[0].score, 4.5);
}

TEST(Scoring, NonNumericWeightRaises) {
  Session s;
  s.load("[w(X)@X] # p.\nw(heavy).\n");
  EXPECT_EQ(s.error_of("[] ? p"), "error(type_error(number, heavy), '$impl(p/1)'/1)");
}

TEST(Scoring, PredicateDimensionScoresNothing) {
  Session s;
  s.load("[predicate: G] :- true.\n");
  auto table = scores(s, "[]", "anything(1)");
  ASSERT_EQ(table.size(), 1u);
  EXPECT_TRUE(table[0].eligible);
  EXPECT_EQ(table[0].score, 0);
}

TEST(Scoring, ScoringLeavesNoBindings) {
  Session s;
  s.load("[a: X, X = 5] # p.\n");
  BindingStore store;
  const OperatorTable& ops = s.engine.kb().operators();
  Term v = store.new_var();
  Term ctx = make_list({Term::compound(sym::colon(), {Term::atom("a"), v})});
  Machine m(s.engine.runtime(), store, Term::atom("true"));
  auto sigs = dispatch_candidates(s.engine.kb(), Term::atom("p"));
  ASSERT_EQ(sigs.size(), 1u);
  CandidateScore c = predicate_score(m, ctx, sigs[0]);
  EXPECT_TRUE(c.eligible);
  EXPECT_TRUE(store.deref(v).is_var()) << render(v, ops, &store);
}

TEST(Dispatch, NoSignaturesIsExistenceError) {
  Session s;
  EXPECT_EQ(s.error_of("[] ? nothing"), "error(existence_error(procedure, nothing/0), [])");
}

TEST(Dispatch, NoEligibleRuleFails) {
  Session s;
  s.load("[a: _] # p.\n");
  EXPECT_TRUE(s.solutions("[] ? p").empty());
}

TEST(Dispatch, TiesRunInDefinitionOrder) {
  Session s;
  s.load("[a: _] # p(first).\n[] # p(never).\n[a: _] # p(second).\n");
  EXPECT_EQ(s.solutions("[a: 1] ? p(X)"), (Solutions{"X = first", "X = second"}));
}

TEST(Dispatch, CutInsideImplementationIsLocal) {
  Session s;
  s.load("[a: _] # p(X) :- member(X, [1, 2]), !.\n[a: _] # p(3).\n");
  EXPECT_EQ(s.solutions("[a: 1] ? p(X)"), (Solutions{"X = 1", "X = 3"}));
}

TEST(Dispatch, ContextBindingsFlowIntoRule) {
  Session s;
  s.load("[scale: K] # scaled(X, Y) :- Y is X * K.\n");
  EXPECT_EQ(s.solutions("[scale: 3] ? scaled(2, Y)"), (Solutions{"Y = 6"}));
  EXPECT_EQ(s.error_of("[scale: K] ? scaled(2, Y)"), "error(instantiation_error, [])");
}

TEST(Dispatch, TraceListsEveryCandidate) {
  EngineOptions options;
  options.trace_dispatch = true;
  Session s(options);
  s.load("[a: _] # p(1).\n[] # p(2).\n[b: _] # p(3).\n");
  EXPECT_EQ(s.solutions("[a: x] ? p(X)"), (Solutions{"X = 1"}));
  const std::string trace = s.err.str();
  EXPECT_NE(trace.find("dispatch p(_"), std::string::npos) << trace;
  EXPECT_NE(trace.find("score 1 selected"), std::string::npos) << trace;
  EXPECT_NE(trace.find("score 0\n"), std::string::npos) << trace;
  EXPECT_NE(trace.find("ineligible, missing dimension b"), std::string::npos) << trace;
}

TEST(Dispatch, SelectedRulesAreExactlyTheMaximalEligibleOnes) {
  // Random rule sets over three dimensions: the dispatched solutions must be the
  // ids of the eligible rules with maximal dimension count, in definition order.
  std::mt19937 rng(7);
  const std::vector<std::string> dims{"a", "b", "c"};
  for (int round = 0; round < 60; ++round) {
    Session s;
    std::string program;
    std::vector<std::vector<std::string>> rules;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> used;
      for (const auto& d : dims) {
        if (rng() % 2) used.push_back(d);
      }
      rules.push_back(used);
      program += "[";
      for (std::size_t k = 0; k < used.size(); ++k) program += (k ? ", " : "") + used[k] + ": _";
      program += "] # r(" + std::to_string(i) + ").\n";
    }
    std::vector<std::string> present;
    for (const auto& d : dims) {
      if (rng() % 2) present.push_back(d);
    }
    std::string context = "[";
    for (std::size_t k = 0; k < present.size(); ++k) context += (k ? ", " : "") + present[k] + ": 1";
    context += "]";
    s.load(program);

    int best = -1;
    for (const auto& used : rules) {
      bool ok = std::all_of(used.begin(), used.end(), [&](const std::string& d) {
        return std::find(present.begin(), present.end(), d) != present.end();
      });
      if (ok) best = std::max(best, static_cast<int>(used.size()));
    }
    Solutions expected;
    for (int i = 0; i < n; ++i) {
      const auto& used = rules[static_cast<std::size_t>(i)];
      bool ok = std::all_of(used.begin(), used.end(), [&](const std::string& d) {
        return std::find(present.begin(), present.end(), d) != present.end();
      });
      if (ok && static_cast<int>(used.size()) == best) expected.push_back("X = " + std::to_string(i));
    }
    EXPECT_EQ(s.solutions(context + " ? r(X)"), expected) << program << context;
  }
}
