#include <gtest/gtest.h>

#include "mdprolog/transformer.hpp"
#include "support.hpp"

using namespace mdprolog;
using namespace mdprolog::testing;

namespace {

struct Expanded {
  std::vector<std::string> lines;
  std::vector<SignaturePtr> signatures;
};

Expanded expand_program(const std::string& text) {
  EngineOptions options;
  options.dump_expansion = true;
  Session s(options);
  s.load(text);
  Expanded out;
  std::istringstream in(s.out.str());
  for (std::string line; std::getline(in, line);) out.lines.push_back(line);
  for (const SignaturePtr& sig : s.engine.kb().all_signatures()) {
    if (sig->where.file == "<test>") out.signatures.push_back(sig);
  }
  return out;
}

} // namespace

TEST(Transformer, GoldenWeightedDebugRule) {
  Expanded x = expand_program(
      "weight(debug, 1).\n"
      "[debug: P, weight(debug, D)@D] # edge(A, B) :-\n"
      "   [-debug] ? edge(A, B),\n"
      "   call(P, (A, B)).\n");
  ASSERT_EQ(x.lines.size(), 2u);
  EXPECT_EQ(x.lines[0],
            "mdp_signature(edge/2, mdp_implementation(edge/1), context_spec(Ctx, [debug], "
            "(ctx_member(Ctx, debug, P),weight(debug, D)), [D])).");
  EXPECT_EQ(x.lines[1],
            "'$impl(edge/1)'(Ctx, A, B) :- ctx_member(Ctx, debug, P),dispatch(Ctx, [-debug], edge(A, B)),"
            "call(P, (A,B)).");
  ASSERT_EQ(x.signatures.size(), 1u);
  const Signature& sig = *x.signatures[0];
  EXPECT_EQ(sig.key, (PredicateKey{Symbol("edge"), 2}));
  EXPECT_EQ(sig.implementation_arity(), 3u);
  ASSERT_EQ(sig.dimensions.size(), 1u);
  EXPECT_EQ(sig.dimensions[0], Symbol("debug"));
}

TEST(Transformer, EmptySpecificationHasTrueRules) {
  Expanded x = expand_program("[] # edge(a, b).\n");
  ASSERT_EQ(x.lines.size(), 2u);
  EXPECT_EQ(x.lines[0], "mdp_signature(edge/2, mdp_implementation(edge/1), context_spec(Ctx, [], true, [])).");
  EXPECT_EQ(x.lines[1], "'$impl(edge/1)'(Ctx, a, b).");
}

TEST(Transformer, ImplicitContextIsThreadedThroughQueries) {
  Expanded x = expand_program("[] # path(A, C) :- ? edge(A, B), ? path(B, C).\n");
  ASSERT_EQ(x.lines.size(), 2u);
  EXPECT_EQ(x.lines[1],
            "'$impl(path/1)'(Ctx, A, C) :- dispatch(Ctx, [], edge(A, B)),dispatch(Ctx, [], path(B, C)).");
}

TEST(Transformer, QueriesInsideControlConstructsAreRewritten) {
  Expanded x = expand_program(
      "[] # p(X) :- ( ? q(X) -> true ; \\+ ? r(X) ), findall(Y, ? s(Y), _), catch(? t, _, ? u).\n");
  ASSERT_EQ(x.lines.size(), 2u);
  EXPECT_NE(x.lines[1].find("(dispatch(Ctx, [], q(X)) -> true;\\+dispatch(Ctx, [], r(X)))"), std::string::npos)
      << x.lines[1];
  EXPECT_NE(x.lines[1].find("findall(Y, dispatch(Ctx, [], s(Y)), _"), std::string::npos) << x.lines[1];
  EXPECT_NE(x.lines[1].find("catch(dispatch(Ctx, [], t), _"), std::string::npos) << x.lines[1];
  EXPECT_NE(x.lines[1].find(", dispatch(Ctx, [], u))"), std::string::npos) << x.lines[1];
}

TEST(Transformer, QuotedDataIsNotRewritten) {
  Expanded x = expand_program("[] # p(T) :- T = (? q).\n");
  ASSERT_EQ(x.lines.size(), 2u);
  EXPECT_EQ(x.lines[1].find("dispatch"), std::string::npos) << x.lines[1];
}

TEST(Transformer, AnonymousRuleTakesOnlyTheContext) {
  Expanded x = expand_program("[debug: P, predicate: G] :- call(P, G), call(G).\n");
  ASSERT_EQ(x.signatures.size(), 1u);
  EXPECT_TRUE(x.signatures[0]->anonymous);
  EXPECT_EQ(x.signatures[0]->implementation_arity(), 1u);
  EXPECT_EQ(x.lines[0],
            "mdp_signature('$anonymous_rule'/0, mdp_implementation('$anonymous_rule'/1), context_spec(Ctx, "
            "[debug, predicate], (ctx_member(Ctx, debug, P),ctx_member(Ctx, predicate, G)), [])).");
}

TEST(Transformer, ImplementationIdsAreFresh) {
  Expanded x = expand_program("[] # e(1).\n[] # e(2).\n[a: _] # e(3).\n");
  ASSERT_EQ(x.signatures.size(), 3u);
  EXPECT_NE(x.signatures[0]->implementation, x.signatures[1]->implementation);
  EXPECT_NE(x.signatures[1]->implementation, x.signatures[2]->implementation);
}

TEST(Transformer, DuplicateDimensionsCountOnce) {
  Expanded x = expand_program("[a: X, a: Y] # p(X, Y).\n");
  ASSERT_EQ(x.signatures.size(), 1u);
  EXPECT_EQ(x.signatures[0]->dimensions.size(), 1u);
}

TEST(Transformer, GuardGoalsRunAgainInTheBody) {
  Expanded x = expand_program("ok(1).\n[a: X, ok(X)] # p(X) :- true.\n");
  ASSERT_EQ(x.lines.size(), 2u);
  EXPECT_EQ(x.lines[1], "'$impl(p/1)'(Ctx, X) :- ctx_member(Ctx, a, X),ok(X).");
}

TEST(Transformer, PlainClausesHaveQueriesRewritten) {
  Session s;
  s.load("[] # e(1).\nuse(X) :- ? e(X).\n");
  ClauseListPtr clauses = s.engine.kb().clauses({Symbol("use"), 1});
  ASSERT_TRUE(clauses);
  ASSERT_EQ(clauses->size(), 1u);
  EXPECT_EQ(render_clause(*(*clauses)[0], s.engine.kb().operators()), "use(X) :- dispatch([], [], e(X))");
  EXPECT_EQ(s.solutions("use(X)"), (Solutions{"X = 1"}));
}

TEST(Transformer, Errors) {
  auto rejects = [](const std::string& text) {
    Session s;
    EXPECT_THROW(s.load(text), ConsultError) << text;
  };
  rejects("[-debug] # p.\n");
  rejects("[W@foo] # p.\n");
  rejects("[f(x): 1] # p.\n");
  rejects("[a: 1 | T] # p.\n");
  rejects(":- dynamic d/1.\n[] # d(1).\n");
  rejects("[] # 42.\n");
}

TEST(Transformer, HookRewritesGoals) {
  Session s;
  s.load("hook_mdp_term(_, twice(G), (G, G)).\n"
         ":- dynamic hits/1.\nhits(0).\n"
         "bump :- retract(hits(N)), M is N + 1, assertz(hits(M)).\n"
         "go :- twice(bump).\n");
  EXPECT_EQ(s.solutions("go, hits(N)"), (Solutions{"N = 2"}));
}

TEST(Transformer, HookThatInstantiatesItsInputIsIgnored) {
  Session s;
  s.load("hook_mdp_term(_, special(x), rewritten).\n"
         "rewritten.\n"
         "special(_).\n"
         "go(Y) :- special(Y).\n");
  EXPECT_EQ(s.solutions("go(z)"), (Solutions{"true"}));
}

TEST(Transformer, RunawayHookIsRejected) {
  Session s;
  EXPECT_THROW(s.load("hook_mdp_term(_, grow(X), grow(s(X))).\np :- grow(0).\n"), ConsultError);
  EXPECT_NE(s.err.str().find("32"), std::string::npos);
}

TEST(Transformer, ContextRuleHookTranslatesSpecEntries) {
  Session s;
  s.load("hook_context_rule_mdp_term(Ctx, big(X), (X: V, V > 10)).\n"
         "[big(size)] # p(yes).\n");
  EXPECT_EQ(s.solutions("[size: 20] ? p(X)"), (Solutions{"X = yes"}));
  EXPECT_TRUE(s.solutions("[size: 5] ? p(X)").empty());
}

TEST(Transformer, RenderersUseSourceNames) {
  Session s;
  s.load("[mode: M] # run(Input, Output) :- Output = M-Input.\n");
  const auto& sigs = s.engine.kb().signatures({Symbol("run"), 2});
  ASSERT_EQ(sigs.size(), 1u);
  EXPECT_EQ(render_signature(*sigs[0], s.engine.kb().operators()),
            "mdp_signature(run/2, mdp_implementation(run/1), context_spec(Ctx, [mode], "
            "ctx_member(Ctx, mode, M), []))");
}
