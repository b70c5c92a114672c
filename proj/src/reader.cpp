#include "mdprolog/reader.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <limits>
#include <optional>

namespace mdprolog {

namespace {

bool is_symbol_char(char c) {
  switch (c) {
  case '+': case '-': case '*': case '/': case '\\': case '^': case '<': case '>': case '=':
  case '~': case ':': case '.': case '?': case '@': case '#': case '&': case '$':
    return true;
  default:
    return false;
  }
}

bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool is_layout(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
  Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool layout = skip_layout();
      if (pos_ >= text_.size()) break;
      Token tok;
      tok.layout_before = layout || out.empty();
      tok.line = line_;
      tok.column = column();
      lex_one(tok);
      out.push_back(std::move(tok));
    }
    return out;
  }

private:
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& message, int line, int col) const {
    throw SyntaxError(message, SourceLocation{file_, line}, col);
  }

  bool skip_layout() {
    bool skipped = false;
    while (pos_ < text_.size()) {
      char c = peek();
      if (is_layout(c)) {
        advance();
        skipped = true;
      } else if (c == '%') {
        while (pos_ < text_.size() && peek() != '\n') advance();
        skipped = true;
      } else if (c == '/' && peek(1) == '*') {
        int line = line_;
        int col = column();
        advance();
        advance();
        while (pos_ < text_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= text_.size()) fail("unterminated block comment", line, col);
        advance();
        advance();
        skipped = true;
      } else {
        break;
      }
    }
    return skipped;
  }

  void lex_one(Token& tok) {
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(tok);
    } else if (c == '_' || std::isupper(static_cast<unsigned char>(c))) {
      tok.kind = TokenKind::Var;
      while (pos_ < text_.size() && is_alnum(peek())) {
        tok.text += peek();
        advance();
      }
    } else if (std::isalpha(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80) {
      tok.kind = TokenKind::Atom;
      while (pos_ < text_.size() && is_alnum(peek())) {
        tok.text += peek();
        advance();
      }
    } else if (c == '\'' || c == '"' || c == '`') {
      tok.kind = TokenKind::QuotedAtom;
      tok.text = lex_quoted(c, tok.line, tok.column);
    } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' || c == '|') {
      tok.kind = TokenKind::Punct;
      tok.text = std::string(1, c);
      advance();
    } else if (c == '!' || c == ';') {
      tok.kind = TokenKind::Atom;
      tok.text = std::string(1, c);
      advance();
    } else if (c == '.' && (pos_ + 1 >= text_.size() || is_layout(peek(1)) || peek(1) == '%')) {
      tok.kind = TokenKind::End;
      tok.text = ".";
      advance();
    } else if (is_symbol_char(c)) {
      tok.kind = TokenKind::Atom;
      while (pos_ < text_.size() && is_symbol_char(peek())) {
        tok.text += peek();
        advance();
      }
    } else {
      fail(std::string("unexpected character '") + c + "'", line_, column());
    }
  }

  void lex_number(Token& tok) {
    int line = line_;
    int col = column();
    std::string digits;
    if (peek() == '0' && peek(1) == '\'') {
      // 0'c character code
      advance();
      advance();
      if (pos_ >= text_.size()) fail("incomplete character code", line, col);
      char ch = peek();
      if (ch == '\\') {
        advance();
        ch = escape_char(peek(), line, col);
      }
      advance();
      tok.kind = TokenKind::Integer;
      tok.int_value = static_cast<unsigned char>(ch);
      tok.text = std::to_string(tok.int_value);
      return;
    }
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'o' || peek(1) == 'b')) {
      int base = peek(1) == 'x' ? 16 : (peek(1) == 'o' ? 8 : 2);
      advance();
      advance();
      while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
      errno = 0;
      char* end = nullptr;
      auto v = std::strtoll(digits.c_str(), &end, base);
      if (digits.empty() || errno == ERANGE || *end != '\0') fail("malformed integer", line, col);
      tok.kind = TokenKind::Integer;
      tok.int_value = v;
      tok.text = std::to_string(v);
      return;
    }
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      digits += peek();
      advance();
    }
    bool is_float = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_float = true;
      digits += '.';
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_float = true;
      digits += peek();
      advance();
      if (peek() == '+' || peek() == '-') {
        digits += peek();
        advance();
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        digits += peek();
        advance();
      }
    }
    tok.text = digits;
    if (is_float) {
      tok.kind = TokenKind::Float;
      tok.float_value = std::strtod(digits.c_str(), nullptr);
    } else {
      errno = 0;
      auto v = std::strtoll(digits.c_str(), nullptr, 10);
      if (errno == ERANGE) fail("integer literal out of range: " + digits, line, col);
      tok.kind = TokenKind::Integer;
      tok.int_value = v;
    }
  }

  char escape_char(char e, int line, int col) const {
    switch (e) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'a': return '\a';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'v': return '\v';
    case '0': return '\0';
    case 'e': return '\x1b';
    case 's': return ' ';
    case '\\': return '\\';
    case '\'': return '\'';
    case '"': return '"';
    case '`': return '`';
    default: fail(std::string("unknown escape sequence \\") + e, line, col);
    }
  }

  std::string lex_quoted(char quote, int line, int col) {
    std::string out;
    advance();  // opening quote
    for (;;) {
      if (pos_ >= text_.size()) fail("unterminated quoted atom", line, col);
      char c = peek();
      if (c == quote) {
        if (peek(1) == quote) {
          out += quote;
          advance();
          advance();
          continue;
        }
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) fail("unterminated quoted atom", line, col);
        char e = peek();
        if (e == '\n') {  // line continuation
          advance();
          continue;
        }
        if (e == 'x') {
          advance();
          std::string hex;
          while (std::isxdigit(static_cast<unsigned char>(peek()))) {
            hex += peek();
            advance();
          }
          if (peek() == '\\') advance();
          out += static_cast<char>(std::strtol(hex.c_str(), nullptr, 16));
          continue;
        }
        out += escape_char(e, line_, column());
        advance();
        continue;
      }
      out += c;
      advance();
    }
  }

  std::string_view text_;
  const std::string& file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

bool is_term_end(const Token& t) {
  return t.kind == TokenKind::End ||
         (t.kind == TokenKind::Punct && (t.text == ")" || t.text == "," || t.text == "|" || t.text == "]" ||
                                         t.text == "}"));
}

/// Operator-precedence parser over the tokens of one clause.
class Parser {
public:
  Parser(const std::vector<Token>& tokens, std::size_t& pos, const OperatorTable& ops, BindingStore& store,
         const std::string& file)
      : tokens_(tokens), pos_(pos), ops_(ops), store_(store), file_(file) {}

  Term parse_clause_term() {
    auto [term, prec] = parse(1200);
    (void)prec;
    if (pos_ < tokens_.size()) {
      const Token& t = tokens_[pos_];
      if (t.kind != TokenKind::End) error(t, "operator expected, found '" + t.text + "' (priority clash)");
      ++pos_;
    }
    return term;
  }

  VarNames take_names() { return std::move(names_); }

private:
  const Token& peek(std::size_t ahead = 0) const {
    static const Token end_token{};
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : end_token;
  }

  const Token& take() {
    if (pos_ >= tokens_.size()) {
      const Token& last = tokens_.empty() ? peek() : tokens_.back();
      error(last, "unexpected end of input");
    }
    return tokens_[pos_++];
  }

  [[noreturn]] void error(const Token& at, const std::string& message) const {
    throw SyntaxError(message, SourceLocation{file_, at.line}, at.column);
  }

  void expect(std::string_view punct) {
    const Token& t = take();
    if (!t.is_punct(punct)) {
      error(t, "expected '" + std::string(punct) + "' but found '" + (t.kind == TokenKind::End ? "." : t.text) + "'");
    }
  }

  Term variable(const std::string& name) {
    if (name == "_") return store_.new_var();
    for (const auto& [n, v] : names_) {
      if (n == name) return v;
    }
    Term v = store_.new_var();
    names_.emplace_back(name, v);
    return v;
  }

  std::vector<Term> parse_arguments() {
    std::vector<Term> args;
    args.push_back(parse(999).first);
    while (peek().is_punct(",")) {
      ++pos_;
      args.push_back(parse(999).first);
    }
    expect(")");
    return args;
  }

  std::pair<Term, int> parse(int max) {
    auto [left, prec] = parse_primary(max);
    return parse_infix(std::move(left), prec, max);
  }

  /// Name of the infix/postfix operator candidate at the current position.
  std::optional<Symbol> operator_name(const Token& t) const {
    if (t.kind == TokenKind::Atom) return Symbol(t.text);
    if (t.is_punct(",")) return sym::comma();
    if (t.is_punct("|")) return Symbol("|");
    return std::nullopt;
  }

  std::pair<Term, int> parse_infix(Term left, int left_prec, int max) {
    for (;;) {
      auto name = operator_name(peek());
      if (!name) break;
      if (auto def = ops_.infix(*name); def && def->priority <= max && left_prec <= def->left_max()) {
        ++pos_;
        Term right = parse(def->right_max()).first;
        Symbol functor = *name == Symbol("|") ? sym::semicolon() : *name;
        left = Term::compound(functor, {std::move(left), std::move(right)});
        left_prec = def->priority;
        continue;
      }
      if (auto def = ops_.postfix(*name); def && def->priority <= max && left_prec <= def->left_max()) {
        ++pos_;
        left = Term::compound(*name, {std::move(left)});
        left_prec = def->priority;
        continue;
      }
      break;
    }
    return {std::move(left), left_prec};
  }

  std::pair<Term, int> parse_primary(int max) {
    const Token& tok = take();
    switch (tok.kind) {
    case TokenKind::Integer: return {Term::integer(tok.int_value), 0};
    case TokenKind::Float: return {Term::floating(tok.float_value), 0};
    case TokenKind::Var: return {variable(tok.text), 0};
    case TokenKind::End: error(tok, "unexpected end of clause");
    case TokenKind::Punct: return parse_punct(tok);
    case TokenKind::QuotedAtom:
      if (peek().is_punct("(") && !peek().layout_before) {
        ++pos_;
        return {Term::compound(Symbol(tok.text), parse_arguments()), 0};
      }
      return {Term::atom(tok.text), 0};
    case TokenKind::Atom: return parse_atom(tok, max);
    }
    error(tok, "unexpected token");
  }

  std::pair<Term, int> parse_punct(const Token& tok) {
    if (tok.text == "(") {
      Term inner = parse(1200).first;
      expect(")");
      return {inner, 0};
    }
    if (tok.text == "[") {
      if (peek().is_punct("]")) {
        ++pos_;
        return {Term::atom(sym::nil()), 0};
      }
      std::vector<Term> items;
      items.push_back(parse(999).first);
      while (peek().is_punct(",")) {
        ++pos_;
        items.push_back(parse(999).first);
      }
      Term tail;
      if (peek().is_punct("|")) {
        ++pos_;
        tail = parse(999).first;
      }
      expect("]");
      return {make_list(items, tail), 0};
    }
    if (tok.text == "{") {
      if (peek().is_punct("}")) {
        ++pos_;
        return {Term::atom(sym::curly()), 0};
      }
      Term inner = parse(1200).first;
      expect("}");
      return {Term::compound(sym::curly(), {inner}), 0};
    }
    error(tok, "unexpected '" + tok.text + "'");
  }

  bool starts_operand_after_prefix(const Token& next) const {
    if (is_term_end(next)) return false;
    if (next.kind == TokenKind::Atom) {
      Symbol s(next.text);
      // An infix operator right after a prefix operator means the prefix
      // operator is itself an operand, e.g. `- = x`.
      if (ops_.infix(s) && !ops_.prefix(s)) {
        const Token& after = peek(1);
        if (!(after.is_punct("(") && !after.layout_before)) return false;
      }
    }
    return true;
  }

  std::pair<Term, int> parse_atom(const Token& tok, int max) {
    Symbol name(tok.text);
    const Token& next = peek();
    if (next.is_punct("(") && !next.layout_before) {
      ++pos_;
      return {Term::compound(name, parse_arguments()), 0};
    }
    if (tok.text == "-" && !next.layout_before &&
        (next.kind == TokenKind::Integer || next.kind == TokenKind::Float)) {
      ++pos_;
      if (next.kind == TokenKind::Integer) return {Term::integer(-next.int_value), 0};
      return {Term::floating(-next.float_value), 0};
    }
    if (auto def = ops_.prefix(name); def && starts_operand_after_prefix(next)) {
      int priority = def->priority;
      int arg_max = def->left_max();
      if (priority > max) {
        priority = max;
        arg_max = std::min(arg_max, max);
      }
      Term operand = parse(arg_max).first;
      return {Term::compound(name, {std::move(operand)}), priority};
    }
    return {Term::atom(name), 0};
  }

  const std::vector<Token>& tokens_;
  std::size_t& pos_;
  const OperatorTable& ops_;
  BindingStore& store_;
  const std::string& file_;
  VarNames names_;
};

} // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file) {
  return Lexer(text, file).run();
}

Reader::Reader(std::string_view text, const OperatorTable& ops, BindingStore& store, std::string file)
    : tokens_(tokenize(text, file)), ops_(ops), store_(store), file_(std::move(file)) {}

bool Reader::at_end() const { return pos_ >= tokens_.size(); }

Term Reader::read_term(VarNames* names) {
  std::size_t start = pos_;
  try {
    Parser parser(tokens_, pos_, ops_, store_, file_);
    Term t = parser.parse_clause_term();
    if (names) *names = parser.take_names();
    return t;
  } catch (const SyntaxError&) {
    pos_ = start;
    while (pos_ < tokens_.size() && tokens_[pos_].kind != TokenKind::End) ++pos_;
    if (pos_ < tokens_.size()) ++pos_;
    throw;
  }
}

std::optional<SourceItem> Reader::next() {
  if (at_end()) return std::nullopt;
  SourceItem item;
  item.where = SourceLocation{file_, tokens_[pos_].line};
  Term t = read_term(&item.variables);
  if ((t.is_compound(sym::neck(), 1) || t.is_compound(Symbol("?-"), 1))) {
    item.kind = SourceItem::Kind::Directive;
    item.term = t.arg(0);
  } else {
    item.kind = SourceItem::Kind::Clause;
    item.term = t;
  }
  return item;
}

Term parse_term(std::string_view text, const OperatorTable& ops, BindingStore& store, VarNames* names) {
  Reader reader(text, ops, store);
  if (reader.at_end()) throw SyntaxError("empty input", SourceLocation{});
  Term t = reader.read_term(names);
  if (!reader.at_end()) throw SyntaxError("unexpected text after term", SourceLocation{});
  return t;
}

void apply_op_directive(OperatorTable& ops, const BindingStore& store, const Term& priority, const Term& type,
                        const Term& names) {
  Term p = store.deref(priority);
  Term ty = store.deref(type);
  Term n = store.deref(names);
  if (p.is_var() || ty.is_var() || n.is_var()) errors::instantiation();
  if (!p.is_integer()) errors::type("integer", p);
  if (p.int_value() < 0 || p.int_value() > 1200) errors::domain("operator_priority", p);
  if (!ty.is_atom()) errors::type("atom", ty);
  auto fixity = parse_fixity(ty.functor().name());
  if (!fixity) errors::domain("operator_specifier", ty);
  std::vector<Term> list;
  if (n.is_atom() && !n.is_nil()) {
    list.push_back(n);
  } else if (auto items = list_items(store, n)) {
    list = *items;
  } else {
    errors::type("list", n);
  }
  for (const auto& item : list) {
    Term a = store.deref(item);
    if (a.is_var()) errors::instantiation();
    if (!a.is_atom()) errors::type("atom", a);
    if (a.is_atom(sym::comma())) errors::permission("modify", "operator", a);
    ops.add(a.functor().name(), static_cast<int>(p.int_value()), *fixity);
  }
}

std::vector<SourceItem> parse_program(std::string_view text, OperatorTable& ops, BindingStore& store,
                                      const std::string& file) {
  std::vector<SourceItem> items;
  Reader reader(text, ops, store, file);
  while (auto item = reader.next()) {
    if (item->kind == SourceItem::Kind::Directive && item->term.is_compound(Symbol("op"), 3)) {
      const Term& d = item->term;
      apply_op_directive(ops, store, d.arg(0), d.arg(1), d.arg(2));
    }
    items.push_back(std::move(*item));
  }
  return items;
}

} // namespace mdprolog
