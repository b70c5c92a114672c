#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "mdprolog/bindings.hpp"
#include "mdprolog/errors.hpp"
#include "mdprolog/knowledge_base.hpp"
#include "mdprolog/term.hpp"

namespace mdprolog {

/// State shared by every solve run of one engine.
struct Runtime {
  explicit Runtime(KnowledgeBase& kb) : kb(kb) {}

  KnowledgeBase& kb;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  bool occurs_check = false;
  bool trace_dispatch = false;
  /// Maximum number of goal steps per top-level run; 0 means unlimited.
  std::uint64_t budget = 0;
  std::uint64_t inferences = 0;
  /// Current depth of nested runs (findall, dispatch scoring, hooks).
  int nesting = 0;
};

class Machine;

/// Native predicate. Returns false to fail. May schedule a follow-up goal
/// with Machine::then_call or leave a retry point with Machine::retry_with.
using Builtin = bool (*)(Machine&, std::span<const Term> args);

/// Depth-first resolution engine for one goal over a shared binding store.
class Machine {
public:
  Machine(Runtime& rt, BindingStore& store, Term goal);
  ~Machine();
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  /// Finds the next solution. Throws PrologError for an uncaught ball (resolved
  /// against the store), BudgetExhausted, or Halt.
  bool next();

  /// Drops all choicepoints; the next call to next() fails.
  void stop();

  BindingStore& store() { return store_; }
  Runtime& runtime() { return rt_; }
  KnowledgeBase& kb() { return rt_.kb; }

  bool unify(const Term& a, const Term& b) { return store_.unify(a, b, rt_.occurs_check); }
  Term deref(const Term& t) const { return store_.deref(t); }

  /// Runs `goal` right after the current builtin succeeds, opaque to cut.
  void then_call(Term goal);

  /// Leaves a retry point. `attempt` runs on every backtrack into it, with the
  /// bindings restored to the moment of this call; it returns false once
  /// exhausted. The builtin itself should return false so the first attempt
  /// runs immediately.
  void retry_with(std::function<bool()> attempt);

  /// Solves `goal` to exhaustion in a nested run, collecting `templ` per solution.
  /// Bindings are undone afterwards.
  std::vector<FrozenTerm> collect(const Term& templ, const Term& goal);

  /// First solution of `goal` in a nested run. Bindings are kept on success.
  bool solve_once(const Term& goal);

  static const std::unordered_map<PredicateKey, Builtin, PredicateKeyHash>& builtins();
  static bool is_control(const PredicateKey& key);

private:
  enum class GoalKind : std::uint8_t { Call, CutTo, SoftCut, PopCatch };
  struct Goal {
    GoalKind kind = GoalKind::Call;
    Term term;
    std::size_t barrier = 0;  // cut target for Call; choicepoint index for CutTo/SoftCut; catch id for PopCatch
  };
  struct Frame;
  using Cont = std::shared_ptr<const Frame>;

  enum class ChoiceKind : std::uint8_t { Clauses, Alternative, Catch, Reactivate, Retry, Dead };
  struct ChoicePoint {
    ChoiceKind kind;
    BindingStore::Mark mark;
    Cont cont;
    // Clauses
    Term goal{};
    ClauseListPtr clauses{};
    std::size_t next_clause = 0;
    // Alternative and Catch recovery
    Term alternative{};
    std::size_t barrier = 0;
    // Catch
    Term catcher{};
    std::uint64_t catch_id = 0;
    bool active = true;
    // Retry
    std::shared_ptr<std::function<bool()>> attempt{};
  };

  static Cont push(Goal g, Cont next);

  bool run();
  bool backtrack();
  bool step(const Term& goal, std::size_t barrier);
  bool call_user(const Term& goal, const PredicateKey& key);
  bool try_clause(const Term& goal, const ClausePtr& clause, std::size_t barrier);
  std::size_t next_candidate(const Term& goal, const ClauseList& clauses, std::size_t from) const;
  bool handle_exception(const Term& ball);
  void pop_catch(std::uint64_t id);
  void cut_to(std::size_t height);
  void count_inference();

  Runtime& rt_;
  BindingStore& store_;
  BindingStore::Mark start_;
  Cont cont_;
  std::vector<ChoicePoint> cps_;
  bool started_ = false;
  bool done_ = false;
  bool resume_ = false;
  std::uint64_t catch_counter_ = 0;
};

} // namespace mdprolog
