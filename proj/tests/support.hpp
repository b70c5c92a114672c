#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mdprolog/engine.hpp"
#include "mdprolog/errors.hpp"
#include "mdprolog/render.hpp"

namespace mdprolog::testing {

inline std::filesystem::path source_dir() { return MDPROLOG_SOURCE_DIR; }
inline std::filesystem::path program(const std::string& name) { return source_dir() / "corpus" / "programs" / name; }

/// Engine with captured output and error sinks.
struct Session {
  explicit Session(EngineOptions options = {}) : engine(options) {
    engine.set_output(&out);
    engine.set_error(&err);
  }

  void load(const std::string& text) { engine.consult_text(text, "<test>"); }
  void load_program(const std::string& name) { engine.consult_file(program(name)); }

  /// Every solution as `X = a, Y = b` (or `true`), up to `limit`.
  std::vector<std::string> solutions(const std::string& goal, std::size_t limit = 10000) {
    Query q = engine.query(goal);
    std::vector<std::string> out_solutions;
    while (out_solutions.size() < limit && q.next()) out_solutions.push_back(q.format_bindings(", "));
    return out_solutions;
  }

  bool succeeds(const std::string& goal) { return !solutions(goal, 1).empty(); }

  /// Rendered ball of the uncaught exception, or empty when none was raised.
  std::string error_of(const std::string& goal) {
    Query q = engine.query(goal);
    try {
      while (q.next()) {
      }
    } catch (const PrologError& e) {
      return render(e.ball(), engine.kb().operators(), &q.store());
    }
    return {};
  }

  std::string output() {
    std::string s = out.str();
    out.str({});
    return s;
  }

  std::ostringstream out;
  std::ostringstream err;
  Engine engine;
};

using Solutions = std::vector<std::string>;

} // namespace mdprolog::testing
