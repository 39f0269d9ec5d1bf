#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hj/chart.hpp"
#include "hj/expr.hpp"

namespace hj {

struct SourcePos {
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, SourcePos p, std::vector<std::string> expected = {});
  SourcePos pos;
  std::vector<std::string> expected;
};

enum class Tok {
  Ident,
  Number,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  Wedge,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Equals,
  Newline,
  End
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

std::string token_name(Tok t);
/// `#` comments are dropped; newlines are kept as tokens.
std::vector<Token> tokenize(std::string_view src);

struct Ast {
  enum class Kind { Number, Ident, Call, List, Neg, Add, Sub, Mul, Div, Pow, Wedge };
  Kind kind = Kind::Number;
  std::string text;
  std::vector<Ast> kids;
  int exponent = 0;
  SourcePos pos;
};

/// Recursive-descent expression parser over a token stream.
class ExprParser {
public:
  ExprParser(const std::vector<Token>& toks, std::size_t& cursor) : t_(toks), i_(cursor) {}
  Ast expression();

private:
  Ast term();
  Ast wedge();
  Ast unary();
  Ast power();
  Ast primary();
  const Token& peek() const { return t_[i_]; }
  const Token& take() { return t_[i_++]; }
  void expect(Tok k, const char* what);

  const std::vector<Token>& t_;
  std::size_t& i_;
};

/// Parse a full text as a single expression.
Ast parse_ast(std::string_view text);

/// Resolves identifiers that are not chart coordinates (parameters, named scalars).
using ScalarLookup = std::function<std::optional<Expr>(const std::string&)>;

Expr eval_scalar(const Ast& ast, const Chart& chart, const ScalarLookup& lookup);
/// Parse a scalar expression on a chart; `params` become symbolic constants.
Expr parse_expr(std::string_view text, const Chart& chart, const std::vector<std::string>& params = {});

} // namespace hj
