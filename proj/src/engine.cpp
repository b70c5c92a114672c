#include "mdprolog/engine.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "mdprolog/render.hpp"
#include "mdprolog/transformer.hpp"

namespace mdprolog {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConsultError("cannot open file", SourceLocation{path.string(), 0});
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace

// ------------------------------------------------------------------ Query

Query::Query(Engine& engine, std::string_view text) : engine_(&engine), store_(std::make_unique<BindingStore>()) {
  Term parsed = parse_term(text, engine.kb_.operators(), *store_, &names_);
  Term g = store_->deref(parsed);
  if (g.is_compound(Symbol("?-"), 1)) g = g.arg(0);
  Transformer tr(engine.rt_, *store_);
  goal_ = tr.rewrite_goal(g, Term());
  engine.rt_.inferences = 0;
  machine_ = std::make_unique<Machine>(engine.rt_, *store_, goal_);
}

Query::Query(Query&&) noexcept = default;
Query& Query::operator=(Query&&) noexcept = default;
Query::~Query() = default;

bool Query::next() { return machine_->next(); }

std::vector<std::pair<std::string, std::string>> Query::bindings() const {
  // Unbound query variables print under their own names.
  std::unordered_map<VarId, std::string> var_names;
  for (const auto& [name, var] : names_) {
    Term v = store_->deref(var);
    if (v.is_var() && !var_names.count(v.var_id())) var_names[v.var_id()] = name;
  }
  RenderOptions options;
  options.var_names = &var_names;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, var] : names_) {
    if (!name.empty() && name[0] == '_') continue;
    Term v = store_->deref(var);
    if (v.is_var() && var_names[v.var_id()] == name) continue;
    out.emplace_back(name, render(v, engine_->kb_.operators(), store_.get(), options));
  }
  return out;
}

std::string Query::format_bindings(std::string_view separator) const {
  auto b = bindings();
  if (b.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += separator;
    out += b[i].first + " = " + b[i].second;
  }
  return out;
}

// ------------------------------------------------------------------ Engine

Engine::Engine(EngineOptions options) : options_(std::move(options)), rt_(kb_) {
  rt_.trace_dispatch = options_.trace_dispatch;
  rt_.occurs_check = options_.occurs_check;
  rt_.budget = options_.budget;
  consult(boot_library_text(), "<boot>", true);
  if (options_.load_prelude) {
    if (options_.prelude_path) {
      consult(read_file(*options_.prelude_path), options_.prelude_path->string(), true);
    } else {
      consult(prelude_text(), "<prelude>", true);
    }
  }
}

void Engine::warn(const std::string& message) {
  if (rt_.err) *rt_.err << "warning: " << message << "\n";
}

void Engine::consult_file(const std::filesystem::path& path) { consult(read_file(path), path.string(), false); }

void Engine::consult_text(std::string_view text, const std::string& name) {
  if (name.empty()) throw ConsultError("consulted text needs a source name", {});
  consult(text, name, false);
}

void Engine::consult(std::string_view text, const std::string& name, bool library) {
  kb_.remove_file(name);
  BindingStore store;
  Transformer tr(rt_, store);
  Reader reader(text, kb_.operators(), store, name);
  std::vector<PredicateKey> defined;
  std::vector<std::string> problems;

  for (;;) {
    std::optional<SourceItem> item;
    const BindingStore::Mark mark = store.mark();
    try {
      item = reader.next();
      if (!item) break;
      rt_.inferences = 0;
      if (item->kind == SourceItem::Kind::Directive) {
        run_directive(tr, store, *item);
      } else {
        add_clause_item(tr, *item, library, defined);
      }
    } catch (const SyntaxError& e) {
      problems.push_back(e.what());
      if (rt_.err) *rt_.err << "error: " << e.what() << "\n";
    } catch (const ConsultError& e) {
      problems.push_back(e.what());
      if (rt_.err) *rt_.err << "error: " << e.what() << "\n";
    }
    store.reset(mark);
  }

  if (library) {
    for (const PredicateKey& key : defined) kb_.mark_library(key);
  }
  if (!problems.empty()) {
    std::string message = std::to_string(problems.size()) + (problems.size() == 1 ? " error" : " errors") +
                          " while consulting; first: " + problems.front();
    throw ConsultError(message, SourceLocation{name, 0});
  }
}

void Engine::add_clause_item(Transformer& tr, const SourceItem& item, bool library,
                             std::vector<PredicateKey>& defined) {
  Expansion x = tr.expand(item.term, item.where, item.variables);
  if (x.signature) {
    const Signature& sig = *x.signature;
    if (!sig.anonymous && kb_.is_dynamic(sig.key)) {
      throw ConsultError("mdp rule for dynamic predicate " + to_string(sig.key), item.where);
    }
    kb_.add_clause(x.key, x.clause);
    kb_.add_signature(x.signature);
    if (options_.dump_expansion && rt_.out) {
      const OperatorTable& ops = kb_.operators();
      *rt_.out << render_signature(sig, ops) << ".\n" << render_clause(*x.clause, ops) << ".\n";
    }
    return;
  }
  if (Machine::is_control(x.key) || Machine::builtins().count(x.key)) {
    throw ConsultError("cannot redefine built-in predicate " + to_string(x.key), item.where);
  }
  if (kb_.is_library(x.key) && !library) kb_.release_library(x.key);
  // Hooks stay extensible: user clauses add to the prelude's instead of replacing them.
  const bool hook = x.key.arity == 3 && (x.key.name.name() == "hook_mdp_term" ||
                                         x.key.name.name() == "hook_context_rule_mdp_term");
  if (library && !hook && !kb_.is_defined(x.key)) defined.push_back(x.key);
  kb_.add_clause(x.key, x.clause);
}

void Engine::run_directive(Transformer& tr, BindingStore& store, const SourceItem& item) {
  Term goal = tr.rewrite_goal(item.term, Term());
  const std::string shown = render(goal, kb_.operators(), &store);
  try {
    Machine m(rt_, store, goal);
    if (!m.next()) warn(item.where.describe() + ": directive failed: " + shown);
  } catch (const PrologError& e) {
    warn(item.where.describe() + ": directive " + shown + " raised " + render(e.ball(), kb_.operators(), &store));
  } catch (const BudgetExhausted& e) {
    warn(item.where.describe() + ": directive " + shown + ": " + e.what());
  }
}

Query Engine::query(std::string_view text) { return Query(*this, text); }

bool Engine::run_once(std::string_view text) {
  Query q = query(text);
  return q.next();
}

} // namespace mdprolog
