#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdprolog/knowledge_base.hpp"
#include "mdprolog/machine.hpp"
#include "mdprolog/reader.hpp"

namespace mdprolog {

struct EngineOptions {
  bool load_prelude = true;
  /// Reads the prelude from this file instead of the built-in copy.
  std::optional<std::filesystem::path> prelude_path;
  bool trace_dispatch = false;
  /// Writes every generated signature and implementation clause to the output sink.
  bool dump_expansion = false;
  /// Inference budget per query; 0 is unlimited.
  std::uint64_t budget = 0;
  bool occurs_check = false;
};

/// Built-in library text consulted before anything else.
std::string_view boot_library_text();
/// Built-in prelude text.
std::string_view prelude_text();

class Engine;
class Transformer;

/// One running goal. Owns its bindings; solutions are produced lazily.
class Query {
public:
  Query(Query&&) noexcept;
  Query& operator=(Query&&) noexcept;
  ~Query();

  /// Advances to the next solution. Throws PrologError for uncaught
  /// exceptions, BudgetExhausted and Halt.
  bool next();

  /// Bindings of the named query variables, hiding `_`-prefixed names and
  /// variables that are still unbound.
  std::vector<std::pair<std::string, std::string>> bindings() const;

  /// `X = a,\nY = b`, or `true` when nothing is bound.
  std::string format_bindings(std::string_view separator = ",\n") const;

  /// The goal after query rewriting.
  Term goal() const { return goal_; }
  BindingStore& store() { return *store_; }

private:
  friend class Engine;
  Query(Engine& engine, std::string_view text);

  Engine* engine_;
  std::unique_ptr<BindingStore> store_;
  VarNames names_;
  Term goal_;
  std::unique_ptr<Machine> machine_;
};

/// Knowledge base plus the consult and query front end.
class Engine {
public:
  explicit Engine(EngineOptions options = {});
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Output sink for write/1 and friends. Null discards output.
  void set_output(std::ostream* out) { rt_.out = out; }
  /// Sink for warnings, syntax error reports and dispatch traces.
  void set_error(std::ostream* err) { rt_.err = err; }

  /// Consults a program file. Clauses and signatures from an earlier consult
  /// of the same file are replaced. Throws ConsultError.
  void consult_file(const std::filesystem::path& path);
  /// Consults program text under the given non-empty source name.
  void consult_text(std::string_view text, const std::string& name);

  /// Parses and prepares a goal. Throws SyntaxError and ConsultError.
  Query query(std::string_view text);

  /// Runs a goal to its first solution and reports whether there was one.
  bool run_once(std::string_view text);

  KnowledgeBase& kb() { return kb_; }
  Runtime& runtime() { return rt_; }
  const EngineOptions& options() const { return options_; }

private:
  friend class Query;
  void consult(std::string_view text, const std::string& name, bool library);
  void add_clause_item(Transformer& tr, const SourceItem& item, bool library,
                       std::vector<PredicateKey>& defined);
  void run_directive(Transformer& tr, BindingStore& store, const SourceItem& item);
  void warn(const std::string& message);

  EngineOptions options_;
  KnowledgeBase kb_;
  Runtime rt_;
};

} // namespace mdprolog
