#include <algorithm>
#include <set>
#include <sstream>

#include "hj/cli.hpp"

namespace hj {

std::string obj_kind_name(ObjKind k) {
  switch (k) {
  case ObjKind::Scalar:
    return "scalar";
  case ObjKind::Form:
    return "form";
  case ObjKind::Vector:
    return "vector";
  case ObjKind::Bivector:
    return "bivector";
  case ObjKind::Operator:
    return "operator";
  case ObjKind::ExtOp:
    return "extop";
  case ObjKind::Contact:
    return "contact";
  case ObjKind::Lcs:
    return "lcs";
  case ObjKind::Jacobi:
    return "jacobi";
  }
  return "scalar";
}

bool operator==(const ModelObject& a, const ModelObject& b) {
  if (a.name != b.name || a.kind != b.kind || !a.chart || !b.chart || !(*a.chart == *b.chart)) return false;
  switch (a.kind) {
  case ObjKind::Scalar:
    return a.scalar == b.scalar;
  case ObjKind::Form:
  case ObjKind::Contact:
    return a.form == b.form;
  case ObjKind::Lcs:
    return a.form == b.form && a.form1 == b.form1;
  case ObjKind::Vector:
    return a.vector == b.vector;
  case ObjKind::Bivector:
    return a.bivector == b.bivector;
  case ObjKind::Jacobi:
    return a.bivector == b.bivector && a.vector == b.vector;
  case ObjKind::Operator:
    return a.op == b.op;
  case ObjKind::ExtOp:
    return a.ext == b.ext;
  }
  return false;
}

bool operator==(const DirectiveArg& a, const DirectiveArg& b) {
  if (a.kind != b.kind || a.text != b.text) return false;
  if (a.kind == DirectiveArg::Kind::Scalar) return a.scalar == b.scalar;
  if (a.kind == DirectiveArg::Kind::Vector) return a.vector == b.vector;
  return true;
}

bool operator==(const Directive& a, const Directive& b) {
  return a.name == b.name && a.chart && b.chart && *a.chart == *b.chart && a.args == b.args && a.expect == b.expect;
}

const ModelObject* Model::find(const std::string& name) const {
  for (const auto& o : objects)
    if (o.name == name) return &o;
  return nullptr;
}

bool operator==(const Model& a, const Model& b) {
  if (a.charts.size() != b.charts.size() || a.params != b.params || a.objects != b.objects ||
      a.directives != b.directives)
    return false;
  for (std::size_t i = 0; i < a.charts.size(); ++i)
    if (!(*a.charts[i] == *b.charts[i])) return false;
  return true;
}

namespace {

const std::set<std::string> kReserved = {"d",     "del", "exp",  "diff",  "by",    "on",     "wrt",     "abelian",
                                         "expect", "chart", "param", "check", "scalar", "form", "vector", "bivector",
                                         "operator", "extop", "contact", "lcs", "jacobi"};
const std::set<std::string> kKeywords = {"by", "on", "wrt", "abelian", "expect"};

/// Signatures: type slots (op, ext, scalar, vector, contact, lcs, jacobi, struct, jstruct, word:a|b),
/// a trailing `+` for one or more, literal keywords, `?=` for an optional trailing `= ...` section and
/// `?abelian` for an optional flag.
const std::vector<std::pair<std::string, std::string>> kDirectives = {
    {"haantjes", "op"},
    {"nijenhuis", "op"},
    {"commute", "op op"},
    {"algebra", "op+ ?abelian"},
    {"chain", "scalar by op+ ?= scalar+"},
    {"frobenius", "scalar by op+"},
    {"ext-haantjes", "ext"},
    {"ext-algebra", "ext+"},
    {"ejh", "ext on jstruct"},
    {"ext-chain", "scalar by ext+ ?= scalar+"},
    {"involution", "scalar by ext+ on jstruct"},
    {"jacobi", "jacobi"},
    {"jh", "op on jstruct"},
    {"poissonize", "jstruct"},
    {"bracket", "scalar scalar on struct ?= scalar"},
    {"hamiltonian", "scalar on struct ?= vector"},
    {"contact", "contact"},
    {"reeb", "contact ?= vector"},
    {"induced-jacobi", "struct"},
    {"dissipated", "scalar wrt scalar on contact"},
    {"contact-haantjes", "op on contact"},
    {"reeb-eigen", "op on contact"},
    {"kind", "op on contact ?= word:first|second|neither"},
    {"techain", "scalar by op+ on contact word:first|second"},
    {"contact-involution", "scalar by op+ on contact"},
    {"appendix", "word:F1|F2|F3 op+"},
    {"lcs", "lcs"},
    {"lcsh", "op on lcs"},
    {"eta-ke", "op on lcs"},
    {"lcs-involution", "scalar by op+ on lcs"},
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Val {
  enum class K { Scalar, Form, Multi } k = K::Scalar;
  Expr s;
  KForm f;
  KVector m;
};

class ModelParser {
public:
  explicit ModelParser(std::string_view text) : toks_(join_brackets(tokenize(text))) {}

  Model run() {
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Newline) {
        take();
        continue;
      }
      statement();
      if (peek().kind != Tok::Newline && peek().kind != Tok::End)
        throw ParseError("unexpected " + describe(peek()) + " at end of statement", peek().pos, {"end of line"});
    }
    return std::move(m_);
  }

private:
  /// Newlines inside brackets do not end a statement.
  static std::vector<Token> join_brackets(std::vector<Token> toks) {
    std::vector<Token> out;
    int depth = 0;
    for (auto& t : toks) {
      if (t.kind == Tok::LParen || t.kind == Tok::LBracket || t.kind == Tok::LBrace) ++depth;
      if ((t.kind == Tok::RParen || t.kind == Tok::RBracket || t.kind == Tok::RBrace) && depth > 0) --depth;
      if (t.kind == Tok::Newline && depth > 0) continue;
      out.push_back(std::move(t));
    }
    return out;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident) return "'" + t.text + "'";
    return token_name(t.kind);
  }

  const Token& peek() const { return toks_[i_]; }
  const Token& take() { return toks_[i_++]; }
  void expect(Tok k, const std::string& what) {
    if (peek().kind != k) throw ParseError("expected " + what + ", found " + describe(peek()), peek().pos, {what});
    take();
  }
  const Token& ident(const std::string& what) {
    if (peek().kind != Tok::Ident)
      throw ParseError("expected " + what + ", found " + describe(peek()), peek().pos, {what});
    return take();
  }
  Ast expr() {
    ExprParser p(toks_, i_);
    return p.expression();
  }

  void statement() {
    const Token& kw = ident("statement keyword");
    const std::string& k = kw.text;
    line_ = kw.pos.line;
    if (k == "chart") return chart_stmt();
    if (k == "param") return param_stmt();
    if (k == "check") return check_stmt(kw);
    static const std::map<std::string, ObjKind> kinds = {
        {"scalar", ObjKind::Scalar},     {"form", ObjKind::Form},       {"vector", ObjKind::Vector},
        {"bivector", ObjKind::Bivector}, {"operator", ObjKind::Operator}, {"extop", ObjKind::ExtOp},
        {"contact", ObjKind::Contact},   {"lcs", ObjKind::Lcs},         {"jacobi", ObjKind::Jacobi}};
    auto it = kinds.find(k);
    if (it == kinds.end())
      throw ParseError("unknown statement '" + k + "'", kw.pos,
                       {"chart", "param", "scalar", "form", "vector", "bivector", "operator", "extop", "contact",
                        "lcs", "jacobi", "check"});
    object_stmt(it->second, kw.pos);
  }

  void chart_stmt() {
    const Token& name = ident("chart name");
    for (const auto& c : m_.charts)
      if (c->name == name.text) throw ParseError("chart '" + name.text + "' already defined", name.pos);
    expect(Tok::LParen, "'('");
    std::vector<std::string> ids;
    while (true) {
      const Token& t = ident("coordinate name");
      if (kReserved.count(t.text) || t.text.find('-') != std::string::npos)
        throw ParseError("'" + t.text + "' cannot be a coordinate name", t.pos);
      if (std::find(ids.begin(), ids.end(), t.text) != ids.end())
        throw ParseError("repeated coordinate '" + t.text + "'", t.pos);
      ids.push_back(t.text);
      if (peek().kind == Tok::Comma) {
        take();
        continue;
      }
      break;
    }
    expect(Tok::RParen, "')'");
    ChartKind kind = ChartKind::Generic;
    int n = 0;
    if (peek().kind == Tok::Ident) {
      const Token& kt = take();
      static const std::map<std::string, ChartKind> names = {{"generic", ChartKind::Generic},
                                                             {"darboux-contact", ChartKind::DarbouxContact},
                                                             {"darboux-symplectic", ChartKind::DarbouxSymplectic},
                                                             {"lcs-local", ChartKind::LcsLocal}};
      auto it = names.find(kt.text);
      if (it == names.end())
        throw ParseError("unknown chart kind '" + kt.text + "'", kt.pos,
                         {"generic", "darboux-contact", "darboux-symplectic", "lcs-local"});
      kind = it->second;
      const int dim = static_cast<int>(ids.size());
      n = kind == ChartKind::DarbouxContact ? (dim - 1) / 2 : dim / 2;
      if (peek().kind == Tok::Number) {
        const Token& nt = take();
        if (nt.text.size() > 4) throw ParseError("chart size too large", nt.pos);
        n = std::stoi(nt.text);
      }
      const int want = kind == ChartKind::DarbouxContact ? 2 * n + 1 : kind == ChartKind::Generic ? dim : 2 * n;
      if (n < 1 && kind != ChartKind::Generic) throw ParseError("chart size must be positive", kt.pos);
      if (want != dim)
        throw ParseError("chart arity mismatch: " + kt.text + " " + std::to_string(n) + " needs " +
                             std::to_string(want) + " coordinates, got " + std::to_string(dim),
                         kt.pos);
    }
    for (const auto& id : ids)
      if (m_.find(id) || std::find(m_.params.begin(), m_.params.end(), id) != m_.params.end())
        throw ParseError("coordinate '" + id + "' clashes with an existing name", name.pos);
    chart_ = make_chart(name.text, ids, kind, n);
    m_.charts.push_back(chart_);
  }

  void param_stmt() {
    do {
      if (peek().kind == Tok::Comma) take();
      const Token& t = ident("parameter name");
      check_fresh(t, false);
      m_.params.push_back(t.text);
    } while (peek().kind == Tok::Ident || peek().kind == Tok::Comma);
  }

  void check_fresh(const Token& t, bool object) {
    if (kReserved.count(t.text) || t.text.find('-') != std::string::npos)
      throw ParseError("'" + t.text + "' is reserved", t.pos);
    if (m_.find(t.text)) throw ParseError("'" + t.text + "' already defined", t.pos);
    if (std::find(m_.params.begin(), m_.params.end(), t.text) != m_.params.end())
      throw ParseError("'" + t.text + "' already defined as a parameter", t.pos);
    for (const auto& c : m_.charts)
      if (c->index_of(t.text) >= 0 && (object ? c == chart_ : true))
        throw ParseError("'" + t.text + "' is a coordinate of chart " + c->name, t.pos);
  }

  const ChartPtr& need_chart(SourcePos p) const {
    if (!chart_) throw ParseError("no chart declared", p, {"chart"});
    return chart_;
  }

  void object_stmt(ObjKind kind, SourcePos at) {
    const ChartPtr& c = need_chart(at);
    const Token& name = ident("name");
    check_fresh(name, true);
    expect(Tok::Equals, "'='");
    ModelObject o;
    o.name = name.text;
    o.kind = kind;
    o.chart = c;
    o.line = line_;
    switch (kind) {
    case ObjKind::Scalar:
      o.scalar = scalar(expr());
      break;
    case ObjKind::Form:
      o.form = form(expr(), -1);
      break;
    case ObjKind::Contact:
      o.form = form(expr(), 1);
      if (c->dim() % 2 == 0) throw ParseError("contact structures need an odd-dimensional chart", name.pos);
      break;
    case ObjKind::Vector:
      o.vector = vector(expr());
      break;
    case ObjKind::Bivector:
      o.bivector = multi(expr(), 2);
      break;
    case ObjKind::Operator:
      o.op = op(expr());
      break;
    case ObjKind::ExtOp: {
      auto items = tuple(4, "(OPERATOR, VECTOR, FORM, SCALAR)");
      o.ext = ExtendedOperator::from(op(items[0]), vector(items[1]), form(items[2], 1), scalar(items[3]));
      break;
    }
    case ObjKind::Lcs: {
      auto items = tuple(2, "(FORM2, FORM1)");
      if (c->dim() % 2) throw ParseError("LCS structures need an even-dimensional chart", name.pos);
      o.form = form(items[0], 2);
      o.form1 = form(items[1], 1);
      break;
    }
    case ObjKind::Jacobi: {
      auto items = tuple(2, "(BIVECTOR, VECTOR)");
      o.bivector = multi(items[0], 2);
      o.vector = vector(items[1]);
      break;
    }
    }
    m_.objects.push_back(std::move(o));
  }

  std::vector<Ast> tuple(std::size_t n, const std::string& shape) {
    expect(Tok::LParen, "'(' starting " + shape);
    std::vector<Ast> out;
    while (true) {
      out.push_back(expr());
      if (peek().kind != Tok::Comma) break;
      take();
    }
    if (out.size() != n)
      throw ParseError("expected " + std::to_string(n) + " entries " + shape + ", got " + std::to_string(out.size()),
                       peek().pos);
    expect(Tok::RParen, "')'");
    return out;
  }

  // Typed evaluation.

  const ModelObject& object_on_chart(const Ast& a) const {
    const ModelObject* o = m_.find(a.text);
    if (!o) throw ParseError("unknown identifier '" + a.text + "'", a.pos);
    if (!same_chart(o->chart, chart_))
      throw ParseError("'" + a.text + "' lives on chart " + o->chart->name + ", not " + chart_->name, a.pos);
    return *o;
  }

  Val eval(const Ast& a) const {
    const Chart& c = *chart_;
    auto scalar_of = [&](const Ast& x) {
      Val v = eval(x);
      if (v.k != Val::K::Scalar) throw ParseError("expected a scalar expression", x.pos, {"scalar"});
      return v.s;
    };
    switch (a.kind) {
    case Ast::Kind::Number:
      return {Val::K::Scalar, Expr(Rational(mpz_class(a.text))), {}, {}};
    case Ast::Kind::Ident: {
      int i = c.index_of(a.text);
      if (i >= 0) return {Val::K::Scalar, c.coord(i), {}, {}};
      if (std::find(m_.params.begin(), m_.params.end(), a.text) != m_.params.end())
        return {Val::K::Scalar, Expr::param(a.text), {}, {}};
      const ModelObject& o = object_on_chart(a);
      switch (o.kind) {
      case ObjKind::Scalar:
        return {Val::K::Scalar, o.scalar, {}, {}};
      case ObjKind::Form:
        return {Val::K::Form, {}, o.form, {}};
      case ObjKind::Vector:
        return {Val::K::Multi, {}, {}, to_multivector(o.vector)};
      case ObjKind::Bivector:
        return {Val::K::Multi, {}, {}, o.bivector};
      default:
        throw ParseError("'" + a.text + "' is " + article(o.kind) + ", not usable in an expression", a.pos);
      }
    }
    case Ast::Kind::Call: {
      if (a.text == "d") {
        if (a.kids.size() != 1) throw ParseError("d takes one argument", a.pos);
        Val v = eval(a.kids[0]);
        if (v.k == Val::K::Scalar) return {Val::K::Form, {}, differential(chart_, v.s), {}};
        if (v.k == Val::K::Form) return {Val::K::Form, {}, exterior_derivative(v.f), {}};
        throw ParseError("d applies to scalars and forms", a.pos);
      }
      if (a.text == "del") {
        if (a.kids.size() != 1 || a.kids[0].kind != Ast::Kind::Ident || c.index_of(a.kids[0].text) < 0)
          throw ParseError("del takes one chart coordinate", a.pos, {"coordinate"});
        return {Val::K::Multi, {}, {}, to_multivector(VectorField::basis(chart_, c.index_of(a.kids[0].text)))};
      }
      if (a.text == "exp") {
        if (a.kids.size() != 1) throw ParseError("exp takes one argument", a.pos);
        return {Val::K::Scalar, exp(scalar_of(a.kids[0])), {}, {}};
      }
      if (a.text == "diff") {
        if (a.kids.size() < 2) throw ParseError("diff needs an expression and coordinates", a.pos);
        Expr e = scalar_of(a.kids[0]);
        for (std::size_t k = 1; k < a.kids.size(); ++k) {
          const Ast& x = a.kids[k];
          int i = x.kind == Ast::Kind::Ident ? c.index_of(x.text) : -1;
          if (i < 0) throw ParseError("diff variable must be a chart coordinate", x.pos, {"coordinate"});
          e = diff(e, i);
        }
        return {Val::K::Scalar, e, {}, {}};
      }
      if (m_.find(a.text)) throw ParseError("'" + a.text + "' is a named object, not a function", a.pos);
      std::vector<int> args;
      std::vector<std::string> names;
      for (const auto& k : a.kids) {
        int i = k.kind == Ast::Kind::Ident ? c.index_of(k.text) : -1;
        if (i < 0) throw ParseError("function arguments must be chart coordinates", k.pos, {"coordinate"});
        if (std::find(args.begin(), args.end(), i) != args.end())
          throw ParseError("repeated function argument", k.pos);
        args.push_back(i);
        names.push_back(k.text);
      }
      if (args.empty()) throw ParseError("function needs at least one argument", a.pos);
      return {Val::K::Scalar, Expr::function(a.text, std::move(args), std::move(names)), {}, {}};
    }
    case Ast::Kind::Neg: {
      Val v = eval(a.kids[0]);
      v.s = -v.s;
      v.f = -v.f;
      v.m = -v.m;
      return v;
    }
    case Ast::Kind::Add:
    case Ast::Kind::Sub: {
      Val x = eval(a.kids[0]), y = eval(a.kids[1]);
      bool sub = a.kind == Ast::Kind::Sub;
      if (x.k != y.k || (x.k == Val::K::Form && x.f.degree != y.f.degree) ||
          (x.k == Val::K::Multi && x.m.degree != y.m.degree))
        throw ParseError("cannot add terms of different type or degree", a.pos);
      if (x.k == Val::K::Scalar) return {x.k, sub ? x.s - y.s : x.s + y.s, {}, {}};
      if (x.k == Val::K::Form) return {x.k, {}, sub ? x.f - y.f : x.f + y.f, {}};
      return {x.k, {}, {}, sub ? x.m - y.m : x.m + y.m};
    }
    case Ast::Kind::Mul: {
      Val x = eval(a.kids[0]), y = eval(a.kids[1]);
      if (x.k != Val::K::Scalar && y.k != Val::K::Scalar)
        throw ParseError("use /\\ for products of forms or multivectors", a.pos, {"/\\"});
      if (x.k != Val::K::Scalar) std::swap(x, y);
      return scale(x.s, y);
    }
    case Ast::Kind::Div: {
      Val x = eval(a.kids[0]);
      Expr d = scalar_of(a.kids[1]);
      if (d.is_zero_node()) throw ParseError("division by zero", a.pos);
      if (x.k == Val::K::Scalar) return {x.k, x.s / d, {}, {}};
      return scale(Expr(1) / d, x);
    }
    case Ast::Kind::Pow: {
      Expr b = scalar_of(a.kids[0]);
      if (b.is_zero_node() && a.exponent < 0) throw ParseError("division by zero", a.pos);
      return {Val::K::Scalar, pow(b, a.exponent), {}, {}};
    }
    case Ast::Kind::Wedge: {
      Val x = eval(a.kids[0]), y = eval(a.kids[1]);
      if (x.k == Val::K::Scalar || y.k == Val::K::Scalar) {
        if (x.k != Val::K::Scalar) std::swap(x, y);
        return scale(x.s, y);
      }
      if (x.k != y.k) throw ParseError("cannot wedge a form with a multivector", a.pos);
      if (x.k == Val::K::Form) return {x.k, {}, wedge(x.f, y.f), {}};
      return {x.k, {}, {}, wedge(x.m, y.m)};
    }
    case Ast::Kind::List:
      throw ParseError("list where a scalar or tensor expression was expected", a.pos);
    }
    throw ParseError("bad expression", a.pos);
  }

  static Val scale(const Expr& s, Val v) {
    if (v.k == Val::K::Scalar) v.s = s * v.s;
    if (v.k == Val::K::Form) v.f = s * v.f;
    if (v.k == Val::K::Multi) v.m = s * v.m;
    return v;
  }

  static std::string article(ObjKind k) {
    std::string n = obj_kind_name(k);
    return (n[0] == 'o' || n[0] == 'e' ? "an " : "a ") + n;
  }

  Expr scalar(const Ast& a) const {
    Val v = eval(a);
    if (v.k != Val::K::Scalar) throw ParseError("expected a scalar expression", a.pos, {"scalar"});
    return v.s;
  }

  /// degree < 0 accepts any positive degree.
  KForm form(const Ast& a, int degree) const {
    if (a.kind == Ast::Kind::Number && a.text == "0") return zero_form(chart_, degree < 0 ? 1 : degree);
    Val v = eval(a);
    if (v.k != Val::K::Form) throw ParseError("expected a differential form", a.pos, {"form"});
    if (v.f.is_zero_node() && degree > 0) v.f.degree = degree;
    if (degree >= 0 && v.f.degree != degree)
      throw ParseError("expected a " + std::to_string(degree) + "-form, got a " + std::to_string(v.f.degree) +
                           "-form",
                       a.pos);
    return v.f;
  }

  KVector multi(const Ast& a, int degree) const {
    if (a.kind == Ast::Kind::Number && a.text == "0") return KVector(chart_, degree);
    Val v = eval(a);
    if (v.k != Val::K::Multi) throw ParseError("expected a multivector built from del(x)", a.pos, {"del"});
    if (v.m.is_zero_node()) v.m.degree = degree;
    if (v.m.degree != degree)
      throw ParseError("expected a " + std::to_string(degree) + "-vector, got a " + std::to_string(v.m.degree) +
                           "-vector",
                       a.pos);
    return v.m;
  }

  VectorField vector(const Ast& a) const {
    if (a.kind == Ast::Kind::Number && a.text == "0") return VectorField::zero(chart_);
    if (a.kind == Ast::Kind::List) {
      if (static_cast<int>(a.kids.size()) != chart_->dim())
        throw ParseError("chart arity mismatch: vector has " + std::to_string(a.kids.size()) +
                             " components, chart " + chart_->name + " has dimension " +
                             std::to_string(chart_->dim()),
                         a.pos);
      std::vector<Expr> comps;
      for (const auto& k : a.kids) comps.push_back(scalar(k));
      return VectorField::from(chart_, comps);
    }
    if (a.kind == Ast::Kind::Ident) {
      const ModelObject* o = m_.find(a.text);
      if (o && o->kind != ObjKind::Vector && o->kind != ObjKind::Bivector)
        throw ParseError("'" + a.text + "' is " + article(o->kind) + ", expected a vector", a.pos);
    }
    return to_vector_field(multi(a, 1));
  }

  Operator11 op(const Ast& a) const {
    if (a.kind == Ast::Kind::Ident) {
      const ModelObject& o = object_on_chart(a);
      if (o.kind != ObjKind::Operator)
        throw ParseError("'" + a.text + "' is " + article(o.kind) + ", expected an operator", a.pos, {"operator"});
      return o.op;
    }
    if (a.kind != Ast::Kind::List) throw ParseError("expected an operator matrix [[...], ...]", a.pos, {"'['"});
    const int dim = chart_->dim();
    std::vector<std::vector<Expr>> rows;
    std::size_t width = 0;
    for (const auto& r : a.kids) {
      if (r.kind != Ast::Kind::List) throw ParseError("operator rows must be lists", r.pos, {"'['"});
      if (rows.empty()) width = r.kids.size();
      if (r.kids.size() != width) throw ParseError("row length mismatch", r.pos);
      std::vector<Expr> row;
      for (const auto& e : r.kids) row.push_back(scalar(e));
      rows.push_back(std::move(row));
    }
    if (static_cast<int>(rows.size()) != dim || static_cast<int>(width) != dim)
      throw ParseError("chart arity mismatch: operator is " + std::to_string(rows.size()) + "x" +
                           std::to_string(width) + ", chart " + chart_->name + " has dimension " +
                           std::to_string(dim),
                       a.pos);
    return Operator11::from(chart_, rows);
  }

  // Directives.

  struct Item {
    bool keyword = false;
    std::string text;
    Ast ast;
    SourcePos pos;
  };

  void check_stmt(const Token& kw) {
    const Token& name = ident("directive name");
    auto sig = std::find_if(kDirectives.begin(), kDirectives.end(), [&](const auto& d) { return d.first == name.text; });
    if (sig == kDirectives.end()) throw ParseError("unknown directive '" + name.text + "'", name.pos, directive_names());
    std::vector<Item> items;
    while (peek().kind != Tok::Newline && peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Comma) {
        take();
        continue;
      }
      if (t.kind == Tok::Equals || (t.kind == Tok::Ident && kKeywords.count(t.text))) {
        items.push_back({true, t.text, {}, t.pos});
        take();
        continue;
      }
      SourcePos p = t.pos;
      items.push_back({false, {}, expr(), p});
    }
    Directive d;
    d.name = name.text;
    d.line = kw.pos.line;
    auto e = std::find_if(items.begin(), items.end(), [](const Item& it) { return it.keyword && it.text == "expect"; });
    if (e != items.end()) {
      if (e + 2 != items.end() || (e + 1)->keyword || (e + 1)->ast.kind != Ast::Kind::Ident)
        throw ParseError("'expect' must end the directive with pass, fail or unknown", e->pos,
                         {"pass", "fail", "unknown"});
      const std::string& w = (e + 1)->ast.text;
      if (w == "pass")
        d.expect = Verdict::Pass;
      else if (w == "fail")
        d.expect = Verdict::Fail;
      else if (w == "unknown")
        d.expect = Verdict::Unknown;
      else
        throw ParseError("expected pass, fail or unknown", (e + 1)->pos, {"pass", "fail", "unknown"});
      items.erase(e, items.end());
    }
    // The directive chart is the chart of the first named object it mentions.
    ChartPtr saved = chart_;
    for (const auto& it : items)
      if (!it.keyword && it.ast.kind == Ast::Kind::Ident)
        if (const ModelObject* o = m_.find(it.ast.text)) {
          chart_ = o->chart;
          break;
        }
    need_chart(kw.pos);
    d.chart = chart_;
    bind(split(sig->second, ' '), items, d, name.pos);
    chart_ = saved;
    m_.directives.push_back(std::move(d));
  }

  static std::vector<ObjKind> slot_kinds(const std::string& type) {
    if (type == "op") return {ObjKind::Operator};
    if (type == "ext") return {ObjKind::ExtOp};
    if (type == "contact") return {ObjKind::Contact};
    if (type == "lcs") return {ObjKind::Lcs};
    if (type == "jacobi") return {ObjKind::Jacobi};
    if (type == "jstruct") return {ObjKind::Jacobi, ObjKind::Contact, ObjKind::Lcs};
    if (type == "struct") return {ObjKind::Jacobi, ObjKind::Contact, ObjKind::Lcs};
    return {};
  }

  void bind(const std::vector<std::string>& pattern, const std::vector<Item>& items, Directive& d, SourcePos at) {
    std::size_t k = 0;
    auto at_pos = [&]() { return k < items.size() ? items[k].pos : at; };
    for (std::size_t pi = 0; pi < pattern.size(); ++pi) {
      std::string slot = pattern[pi];
      if (slot == "?=") {
        if (k < items.size() && items[k].keyword && items[k].text == "=") {
          d.args.push_back({DirectiveArg::Kind::Keyword, "=", {}, {}});
          ++k;
          continue;
        }
        break;
      }
      if (slot[0] == '?') {
        if (k < items.size() && items[k].keyword && items[k].text == slot.substr(1)) {
          d.args.push_back({DirectiveArg::Kind::Keyword, items[k].text, {}, {}});
          ++k;
        }
        continue;
      }
      if (slot == "by" || slot == "on" || slot == "wrt" || slot == "=") {
        if (k >= items.size() || !items[k].keyword || items[k].text != slot)
          throw ParseError("directive " + d.name + ": expected '" + slot + "'", at_pos(), {slot});
        d.args.push_back({DirectiveArg::Kind::Keyword, slot, {}, {}});
        ++k;
        continue;
      }
      bool many = slot.back() == '+';
      if (many) slot.pop_back();
      std::size_t first = k;
      while (k < items.size() && !items[k].keyword) {
        if (k > first && !many) break;
        d.args.push_back(bind_one(slot, items[k], d));
        ++k;
      }
      if (k == first) {
        std::string what = slot.rfind("word:", 0) == 0 ? slot.substr(5) : slot;
        throw ParseError("directive " + d.name + ": expected " + what, at_pos(), {what});
      }
    }
    if (k < items.size())
      throw ParseError("directive " + d.name + ": unexpected " + (items[k].keyword ? "'" + items[k].text + "'" : "argument"),
                       items[k].pos);
  }

  DirectiveArg bind_one(const std::string& slot, const Item& it, const Directive& d) const {
    const Ast& a = it.ast;
    if (slot.rfind("word:", 0) == 0) {
      auto words = split(slot.substr(5), '|');
      if (a.kind != Ast::Kind::Ident || std::find(words.begin(), words.end(), a.text) == words.end())
        throw ParseError("directive " + d.name + ": expected one of " + slot.substr(5), it.pos, words);
      return {DirectiveArg::Kind::Word, a.text, {}, {}};
    }
    if (slot == "scalar") {
      DirectiveArg r{DirectiveArg::Kind::Scalar, {}, scalar(a), {}};
      if (a.kind == Ast::Kind::Ident && m_.find(a.text)) r.text = a.text;
      return r;
    }
    if (slot == "vector") {
      if (a.kind == Ast::Kind::Ident && m_.find(a.text)) {
        const ModelObject& o = object_on_chart(a);
        if (o.kind != ObjKind::Vector) throw ParseError("'" + a.text + "' is " + article(o.kind) + ", expected a vector", a.pos);
        return {DirectiveArg::Kind::Ref, a.text, {}, {}};
      }
      return {DirectiveArg::Kind::Vector, {}, {}, vector(a)};
    }
    auto kinds = slot_kinds(slot);
    if (a.kind != Ast::Kind::Ident)
      throw ParseError("directive " + d.name + ": expected the name of " + (slot == "op" ? "an operator" : "a " + slot),
                       it.pos, {slot});
    const ModelObject& o = object_on_chart(a);
    if (std::find(kinds.begin(), kinds.end(), o.kind) == kinds.end())
      throw ParseError("'" + a.text + "' is " + article(o.kind) + ", directive " + d.name + " expects " + slot, a.pos,
                       {slot});
    return {DirectiveArg::Kind::Ref, a.text, {}, {}};
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int line_ = 0;
  ChartPtr chart_;
  Model m_;
};

// Canonical printing.

std::string paren_scalar(const Expr& e) {
  std::string s = to_string(e);
  if (s.find(' ') != std::string::npos || s[0] == '-') return "(" + s + ")";
  return s;
}

template <class Tag> std::string print_alternating(const Alternating<Tag>& a, const char* basis) {
  if (a.is_zero_node()) {
    // Keeps the degree visible so the zero tensor reparses as itself.
    std::string b;
    for (int i = 0; i < a.degree; ++i)
      b += (i ? "/\\" : "") + std::string(basis) + "(" + a.chart->coords[static_cast<std::size_t>(i)] + ")";
    return a.degree == 0 ? "0" : "0*" + b;
  }
  std::string out;
  for (const auto& [idx, v] : a.comp) {
    std::string b;
    for (int i : idx) b += (b.empty() ? "" : "/\\") + std::string(basis) + "(" + a.chart->coords[static_cast<std::size_t>(i)] + ")";
    std::string coef;
    bool neg = false;
    if (v == Expr(1)) {
    } else if (v == Expr(-1)) {
      neg = true;
    } else {
      std::string s = to_string(v);
      if (s.find(' ') != std::string::npos) {
        coef = "(" + s + ")*";
      } else if (s[0] == '-') {
        neg = true;
        coef = s.substr(1) + "*";
      } else {
        coef = s + "*";
      }
    }
    if (out.empty())
      out = (neg ? "-" : "") + coef + b;
    else
      out += (neg ? " - " : " + ") + coef + b;
  }
  return out;
}

std::string print_vector(const VectorField& x) {
  std::string out = "[";
  for (int i = 0; i < x.dim(); ++i) out += (i ? ", " : "") + to_string(x.comp(i));
  return out + "]";
}

std::string print_matrix(const ExprMatrix& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += i ? ",\n  [" : "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += (j ? ", " : "") + to_string(m(i, j));
    out += "]";
  }
  return out + "]";
}

std::string print_form(const KForm& f) { return print_alternating(f, "d"); }

} // namespace

std::vector<std::string> directive_names() {
  std::vector<std::string> out;
  for (const auto& [n, s] : kDirectives) out.push_back(n);
  return out;
}

Model parse_model(std::string_view text) { return ModelParser(text).run(); }

std::string format_model(const Model& m) {
  std::ostringstream out;
  std::size_t next_obj = 0, next_dir = 0;
  if (!m.params.empty()) {
    out << "param";
    for (const auto& p : m.params) out << ' ' << p;
    out << '\n';
  }
  for (const auto& c : m.charts) {
    if (out.tellp() > 0) out << '\n';
    out << "chart " << c->name << " (";
    for (std::size_t i = 0; i < c->coords.size(); ++i) out << (i ? ", " : "") << c->coords[i];
    out << ')';
    if (c->kind != ChartKind::Generic) out << ' ' << kind_name(c->kind) << ' ' << c->n;
    out << '\n';
    for (; next_obj < m.objects.size() && m.objects[next_obj].chart == c; ++next_obj) {
      const ModelObject& o = m.objects[next_obj];
      out << obj_kind_name(o.kind) << ' ' << o.name << " = ";
      switch (o.kind) {
      case ObjKind::Scalar:
        out << to_string(o.scalar);
        break;
      case ObjKind::Form:
      case ObjKind::Contact:
        out << print_form(o.form);
        break;
      case ObjKind::Vector:
        out << print_vector(o.vector);
        break;
      case ObjKind::Bivector:
        out << print_alternating(o.bivector, "del");
        break;
      case ObjKind::Operator:
        out << print_matrix(o.op.mat);
        break;
      case ObjKind::ExtOp:
        out << "(" << print_matrix(o.ext.k.mat) << ",\n  " << print_vector(o.ext.y) << ", " << print_form(o.ext.gamma)
            << ", " << to_string(o.ext.scalar) << ")";
        break;
      case ObjKind::Lcs:
        out << "(" << print_form(o.form) << ", " << print_form(o.form1) << ")";
        break;
      case ObjKind::Jacobi:
        out << "(" << print_alternating(o.bivector, "del") << ", " << print_vector(o.vector) << ")";
        break;
      }
      out << '\n';
    }
  }
  if (!m.directives.empty()) out << '\n';
  for (; next_dir < m.directives.size(); ++next_dir) {
    const Directive& d = m.directives[next_dir];
    out << "check " << d.name;
    bool after_eq = false, first_after = true;
    for (const auto& a : d.args) {
      switch (a.kind) {
      case DirectiveArg::Kind::Keyword:
        out << ' ' << a.text;
        after_eq = a.text == "=";
        first_after = true;
        continue;
      case DirectiveArg::Kind::Ref:
      case DirectiveArg::Kind::Word:
        out << (after_eq && !first_after ? ", " : " ") << a.text;
        break;
      case DirectiveArg::Kind::Scalar:
        out << (after_eq && !first_after ? ", " : " ") << (a.text.empty() ? paren_scalar(a.scalar) : a.text);
        break;
      case DirectiveArg::Kind::Vector:
        out << (after_eq && !first_after ? ", " : " ") << print_vector(a.vector);
        break;
      }
      first_after = false;
    }
    if (d.expect) out << " expect " << (*d.expect == Verdict::Pass ? "pass" : *d.expect == Verdict::Fail ? "fail" : "unknown");
    out << '\n';
  }
  return out.str();
}

} // namespace hj
