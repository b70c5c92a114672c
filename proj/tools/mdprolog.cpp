#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <deque>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mdprolog/corpus.hpp"
#include "mdprolog/engine.hpp"
#include "mdprolog/render.hpp"

using namespace mdprolog;

namespace {

constexpr int kSuccess = 0;
constexpr int kFailure = 1;
constexpr int kError = 2;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string describe_ball(Engine& engine, const PrologError& e) {
  return "uncaught exception: " + render(e.ball(), engine.kb().operators());
}

/// Runs a goal given on the command line, printing every solution.
int run_goal(Engine& engine, const std::string& text) {
  try {
    Query q = engine.query(text);
    if (!q.next()) return kFailure;
    for (;;) {
      std::cout << q.format_bindings();
      if (!q.next()) {
        std::cout << ".\n";
        return kSuccess;
      }
      std::cout << " ;\n";
    }
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const ConsultError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const PrologError& e) {
    std::cout.flush();
    std::cerr << "error: " << describe_ball(engine, e) << "\n";
  } catch (const BudgetExhausted& e) {
    std::cout.flush();
    std::cerr << "error: " << e.what() << "\n";
  } catch (const Halt& h) {
    return h.code;
  }
  return kError;
}

/// Line source with one line of lookahead for piped `;` replies.
class Lines {
public:
  explicit Lines(std::istream& in) : in_(in) {}
  bool next(std::string& line) {
    if (!pending_.empty()) {
      line = std::move(pending_.front());
      pending_.pop_front();
      return true;
    }
    return static_cast<bool>(std::getline(in_, line));
  }
  void push_back(std::string line) { pending_.push_front(std::move(line)); }

private:
  std::istream& in_;
  std::deque<std::string> pending_;
};

/// Interactive top level. Returns the process exit code.
int repl(Engine& engine, std::istream& in, std::ostream& out, bool interactive) {
  Lines lines(in);
  std::string buffer;
  std::string line;
  auto prompt = [&](const char* p) {
    if (interactive) out << p << std::flush;
  };
  auto wants_more = [&]() {
    if (interactive) {
      out << " " << std::flush;
      std::string reply;
      return lines.next(reply) && trim(reply) == ";";
    }
    std::string peek;
    if (!lines.next(peek)) return false;
    if (trim(peek) == ";") return true;
    lines.push_back(std::move(peek));
    return false;
  };

  prompt("?- ");
  while (lines.next(line)) {
    buffer += line;
    buffer += "\n";
    std::string text = trim(buffer);
    if (text.empty()) {
      buffer.clear();
      prompt("?- ");
      continue;
    }
    if (text.back() != '.') {
      prompt("|    ");
      continue;
    }
    buffer.clear();
    try {
      Query q = engine.query(text);
      if (!q.next()) {
        out << "false.\n";
      } else {
        for (;;) {
          out << q.format_bindings();
          if (!wants_more()) {
            out << ".\n";
            break;
          }
          out << " ;\n";
          if (!q.next()) {
            out << "false.\n";
            break;
          }
        }
      }
    } catch (const SyntaxError& e) {
      out << "error: " << e.what() << "\n";
    } catch (const ConsultError& e) {
      out << "error: " << e.what() << "\n";
    } catch (const PrologError& e) {
      out << "error: " << describe_ball(engine, e) << "\n";
    } catch (const BudgetExhausted& e) {
      out << "error: " << e.what() << "\n";
    } catch (const Halt& h) {
      return h.code;
    }
    out.flush();
    prompt("?- ");
  }
  if (interactive) out << "\n";
  return kSuccess;
}

int run_tests(const std::string& dir) {
  std::vector<CorpusCase> cases;
  try {
    cases = load_cases(dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  std::vector<CaseReport> reports;
  for (const auto& c : cases) reports.push_back(run_case(c));
  std::cout << format_report(reports);
  bool ok = std::all_of(reports.begin(), reports.end(), [](const CaseReport& r) { return r.passed; });
  return ok ? kSuccess : kFailure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prolog with multidimensional predicates"};
  std::vector<std::string> files;
  std::string goal;
  bool no_prelude = false;
  std::string prelude;
  EngineOptions options;
  std::uint64_t budget = 0;

  app.add_option("files", files, "Program files to consult, in order");
  app.add_option("-g,--goal", goal, "Run this goal, print all solutions and exit");
  app.add_flag("--no-prelude", no_prelude, "Do not consult the built-in prelude");
  app.add_option("--prelude", prelude, "Consult this prelude file instead of the built-in one");
  app.add_flag("--trace-dispatch", options.trace_dispatch, "Report dispatch decisions on standard error");
  app.add_flag("--dump-expansion", options.dump_expansion, "Print generated signatures and implementation clauses");
  app.add_option("--budget", budget, "Inference budget per query")->check(CLI::PositiveNumber);
  app.add_flag("--occurs-check", options.occurs_check, "Unify with occurs check");

  std::string test_dir;
  CLI::App* test = app.add_subcommand("test", "Run corpus cases from a directory or JSON file");
  test->add_option("dir", test_dir, "Directory or file with cases")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kSuccess : kError;
  }

  if (test->parsed()) return run_tests(test_dir);

  options.load_prelude = !no_prelude;
  if (!prelude.empty()) options.prelude_path = prelude;
  options.budget = budget;

  try {
    Engine engine(options);
    engine.set_output(&std::cout);
    engine.set_error(&std::cerr);
    for (const auto& f : files) engine.consult_file(f);
    if (app.count("--goal")) return run_goal(engine, goal);
    return repl(engine, std::cin, std::cout, isatty(fileno(stdin)) != 0);
  } catch (const ConsultError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const Halt& h) {
    return h.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kError;
}
