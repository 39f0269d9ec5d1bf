#include "hj/parse.hpp"

#include <algorithm>
#include <cctype>

namespace hj {

ParseError::ParseError(const std::string& msg, SourcePos p, std::vector<std::string> exp)
    : std::runtime_error(msg + " at line " + std::to_string(p.line) + ", column " + std::to_string(p.column)),
      pos(p), expected(std::move(exp)) {}

std::string token_name(Tok t) {
  switch (t) {
  case Tok::Ident:
    return "identifier";
  case Tok::Number:
    return "number";
  case Tok::Plus:
    return "'+'";
  case Tok::Minus:
    return "'-'";
  case Tok::Star:
    return "'*'";
  case Tok::Slash:
    return "'/'";
  case Tok::Caret:
    return "'^'";
  case Tok::Wedge:
    return "'/\\'";
  case Tok::LParen:
    return "'('";
  case Tok::RParen:
    return "')'";
  case Tok::LBracket:
    return "'['";
  case Tok::RBracket:
    return "']'";
  case Tok::LBrace:
    return "'{'";
  case Tok::RBrace:
    return "'}'";
  case Tok::Comma:
    return "','";
  case Tok::Equals:
    return "'='";
  case Tok::Newline:
    return "end of line";
  case Tok::End:
    return "end of input";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      out.push_back({Tok::Newline, "\n", pos});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    SourcePos start = pos;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '-' || src[j] == '\'')) {
        // a hyphen is part of an identifier only when followed by a letter (e.g. darboux-contact)
        if (src[j] == '-' && !(j + 1 < src.size() && std::isalpha(static_cast<unsigned char>(src[j + 1])) &&
                               j > i && std::isalpha(static_cast<unsigned char>(src[j - 1]))))
          break;
        ++j;
      }
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && (src[j] == '.' || src[j] == 'e'))
        if (j + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[j + 1])))
          throw ParseError("decimal literals are not exact; write a fraction", start, {"integer"});
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '\\') {
      out.push_back({Tok::Wedge, "/\\", start});
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
    case '+':
      k = Tok::Plus;
      break;
    case '-':
      k = Tok::Minus;
      break;
    case '*':
      k = Tok::Star;
      break;
    case '/':
      k = Tok::Slash;
      break;
    case '^':
      k = Tok::Caret;
      break;
    case '(':
      k = Tok::LParen;
      break;
    case ')':
      k = Tok::RParen;
      break;
    case '[':
      k = Tok::LBracket;
      break;
    case ']':
      k = Tok::RBracket;
      break;
    case '{':
      k = Tok::LBrace;
      break;
    case '}':
      k = Tok::RBrace;
      break;
    case ',':
      k = Tok::Comma;
      break;
    case '=':
      k = Tok::Equals;
      break;
    default:
      throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, std::string(1, c), start});
    advance(1);
  }
  out.push_back({Tok::End, "", pos});
  return out;
}

void ExprParser::expect(Tok k, const char* what) {
  if (peek().kind != k)
    throw ParseError(std::string("expected ") + what + ", found " + token_name(peek().kind), peek().pos,
                     {token_name(k)});
  take();
}

Ast ExprParser::expression() {
  Ast lhs = term();
  while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
    const Token& op = take();
    Ast n{op.kind == Tok::Plus ? Ast::Kind::Add : Ast::Kind::Sub};
    n.pos = op.pos;
    n.kids = {std::move(lhs), term()};
    lhs = std::move(n);
  }
  return lhs;
}

Ast ExprParser::term() {
  Ast lhs = wedge();
  while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
    const Token& op = take();
    Ast n{op.kind == Tok::Star ? Ast::Kind::Mul : Ast::Kind::Div};
    n.pos = op.pos;
    n.kids = {std::move(lhs), wedge()};
    lhs = std::move(n);
  }
  return lhs;
}

Ast ExprParser::wedge() {
  Ast lhs = unary();
  while (peek().kind == Tok::Wedge) {
    const Token& op = take();
    Ast n{Ast::Kind::Wedge};
    n.pos = op.pos;
    n.kids = {std::move(lhs), unary()};
    lhs = std::move(n);
  }
  return lhs;
}

Ast ExprParser::unary() {
  if (peek().kind == Tok::Minus) {
    const Token& op = take();
    Ast n{Ast::Kind::Neg};
    n.pos = op.pos;
    n.kids = {unary()};
    return n;
  }
  if (peek().kind == Tok::Plus) {
    take();
    return unary();
  }
  return power();
}

Ast ExprParser::power() {
  Ast base = primary();
  if (peek().kind != Tok::Caret) return base;
  const Token& op = take();
  bool paren = false;
  if (peek().kind == Tok::LParen) {
    take();
    paren = true;
  }
  bool neg = false;
  if (peek().kind == Tok::Minus) {
    take();
    neg = true;
  }
  if (peek().kind != Tok::Number)
    throw ParseError("exponent must be an integer", peek().pos, {"integer"});
  const Token& num = take();
  if (num.text.size() > 6) throw ParseError("exponent too large", num.pos);
  int e = std::stoi(num.text);
  if (paren) expect(Tok::RParen, "')'");
  Ast n{Ast::Kind::Pow};
  n.pos = op.pos;
  n.exponent = neg ? -e : e;
  n.kids = {std::move(base)};
  return n;
}

Ast ExprParser::primary() {
  const Token& tk = peek();
  switch (tk.kind) {
  case Tok::Number: {
    take();
    Ast n{Ast::Kind::Number};
    n.text = tk.text;
    n.pos = tk.pos;
    return n;
  }
  case Tok::Ident: {
    take();
    Ast n{Ast::Kind::Ident};
    n.text = tk.text;
    n.pos = tk.pos;
    if (peek().kind == Tok::LParen) {
      take();
      n.kind = Ast::Kind::Call;
      if (peek().kind != Tok::RParen) {
        n.kids.push_back(expression());
        while (peek().kind == Tok::Comma) {
          take();
          n.kids.push_back(expression());
        }
      }
      expect(Tok::RParen, "')'");
    }
    return n;
  }
  case Tok::LParen: {
    take();
    Ast inner = expression();
    expect(Tok::RParen, "')'");
    return inner;
  }
  case Tok::LBracket: {
    take();
    Ast n{Ast::Kind::List};
    n.pos = tk.pos;
    if (peek().kind != Tok::RBracket) {
      n.kids.push_back(expression());
      while (peek().kind == Tok::Comma) {
        take();
        n.kids.push_back(expression());
      }
    }
    expect(Tok::RBracket, "']'");
    return n;
  }
  default:
    throw ParseError("unexpected " + token_name(tk.kind), tk.pos, {"number", "identifier", "'('", "'['"});
  }
}

Ast parse_ast(std::string_view text) {
  auto toks = tokenize(text);
  toks.erase(std::remove_if(toks.begin(), toks.end(), [](const Token& t) { return t.kind == Tok::Newline; }),
             toks.end());
  std::size_t i = 0;
  ExprParser p(toks, i);
  Ast a = p.expression();
  if (toks[i].kind != Tok::End)
    throw ParseError("trailing input " + token_name(toks[i].kind), toks[i].pos, {"operator", "end of input"});
  return a;
}

Expr eval_scalar(const Ast& a, const Chart& chart, const ScalarLookup& lookup) {
  auto rec = [&](const Ast& x) { return eval_scalar(x, chart, lookup); };
  switch (a.kind) {
  case Ast::Kind::Number:
    return Expr(Rational(mpz_class(a.text)));
  case Ast::Kind::Ident: {
    int i = chart.index_of(a.text);
    if (i >= 0) return chart.coord(i);
    if (lookup)
      if (auto v = lookup(a.text)) return *v;
    throw ParseError("unknown identifier '" + a.text + "'", a.pos);
  }
  case Ast::Kind::Call: {
    if (a.text == "exp") {
      if (a.kids.size() != 1) throw ParseError("exp takes one argument", a.pos);
      return exp(rec(a.kids[0]));
    }
    if (a.text == "diff") {
      if (a.kids.size() < 2) throw ParseError("diff needs an expression and coordinates", a.pos);
      Expr e = rec(a.kids[0]);
      for (std::size_t k = 1; k < a.kids.size(); ++k) {
        const Ast& c = a.kids[k];
        int i = c.kind == Ast::Kind::Ident ? chart.index_of(c.text) : -1;
        if (i < 0) throw ParseError("diff variable must be a chart coordinate", c.pos, {"coordinate"});
        e = diff(e, i);
      }
      return e;
    }
    std::vector<int> args;
    std::vector<std::string> names;
    for (const auto& k : a.kids) {
      int i = k.kind == Ast::Kind::Ident ? chart.index_of(k.text) : -1;
      if (i < 0) throw ParseError("function arguments must be chart coordinates", k.pos, {"coordinate"});
      if (std::find(args.begin(), args.end(), i) != args.end())
        throw ParseError("repeated function argument", k.pos);
      args.push_back(i);
      names.push_back(k.text);
    }
    if (args.empty()) throw ParseError("function needs at least one argument", a.pos);
    return Expr::function(a.text, std::move(args), std::move(names));
  }
  case Ast::Kind::Neg:
    return -rec(a.kids[0]);
  case Ast::Kind::Add:
    return rec(a.kids[0]) + rec(a.kids[1]);
  case Ast::Kind::Sub:
    return rec(a.kids[0]) - rec(a.kids[1]);
  case Ast::Kind::Mul:
    return rec(a.kids[0]) * rec(a.kids[1]);
  case Ast::Kind::Div: {
    Expr d = rec(a.kids[1]);
    if (d.is_zero_node()) throw ParseError("division by zero", a.pos);
    return rec(a.kids[0]) / d;
  }
  case Ast::Kind::Pow: {
    Expr b = rec(a.kids[0]);
    if (b.is_zero_node() && a.exponent < 0) throw ParseError("division by zero", a.pos);
    return pow(b, a.exponent);
  }
  case Ast::Kind::Wedge:
    throw ParseError("wedge product in a scalar expression", a.pos, {"scalar"});
  case Ast::Kind::List:
    throw ParseError("list in a scalar expression", a.pos, {"scalar"});
  }
  throw ParseError("bad expression", a.pos);
}

Expr parse_expr(std::string_view text, const Chart& chart, const std::vector<std::string>& params) {
  Ast a = parse_ast(text);
  return eval_scalar(a, chart, [&](const std::string& id) -> std::optional<Expr> {
    if (std::find(params.begin(), params.end(), id) != params.end()) return Expr::param(id);
    return std::nullopt;
  });
}

} // namespace hj
