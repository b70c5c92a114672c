#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdprolog/bindings.hpp"
#include "mdprolog/errors.hpp"
#include "mdprolog/operators.hpp"
#include "mdprolog/term.hpp"

namespace mdprolog {

enum class TokenKind { Atom, QuotedAtom, Var, Integer, Float, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  int line = 0;
  int column = 0;
  bool layout_before = false;  // whitespace or comment precedes the token

  bool is_punct(std::string_view p) const { return kind == TokenKind::Punct && text == p; }
};

/// Splits source text into tokens. `%` and `/* */` comments are skipped.
/// Throws SyntaxError on unterminated quotes/comments and malformed numbers.
std::vector<Token> tokenize(std::string_view text, const std::string& file = {});

/// Variables of one read term, by source name, in order of first appearance.
/// The anonymous variable `_` is not recorded.
using VarNames = std::vector<std::pair<std::string, Term>>;

struct SourceItem {
  enum class Kind { Directive, Clause };
  Kind kind = Kind::Clause;
  Term term;  // directive goal, or the clause term
  SourceLocation where;
  VarNames variables;
};

/// Reads clauses one at a time. The operator table is consulted per clause,
/// so op/3 directives executed between calls to next() affect later clauses.
class Reader {
public:
  Reader(std::string_view text, const OperatorTable& ops, BindingStore& store, std::string file = {});

  /// Next clause or directive; nullopt at end of input. On a syntax error the
  /// reader skips to the next end token before throwing, so reading can resume.
  std::optional<SourceItem> next();

  /// Reads a single term terminated by an end token or end of input.
  Term read_term(VarNames* names = nullptr);

  bool at_end() const;

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const OperatorTable& ops_;
  BindingStore& store_;
  std::string file_;
};

/// Parses one term. A trailing end token is optional.
Term parse_term(std::string_view text, const OperatorTable& ops, BindingStore& store, VarNames* names = nullptr);

/// Splits a program into source items. op/3 directives are applied to `ops`
/// as they are encountered.
std::vector<SourceItem> parse_program(std::string_view text, OperatorTable& ops, BindingStore& store,
                                      const std::string& file = {});

/// Applies a ground op(Priority, Type, NameOrNames) term to the table.
/// Throws PrologError for malformed arguments.
void apply_op_directive(OperatorTable& ops, const BindingStore& store, const Term& priority, const Term& type,
                        const Term& names);

} // namespace mdprolog
