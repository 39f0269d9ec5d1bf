#include "hj/expr.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace hj {
namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_rational(const Rational& r) {
  std::size_t h = mpz_get_ui(r.get_num_mpz_t());
  h = mix(h, mpz_get_ui(r.get_den_mpz_t()));
  h = mix(h, static_cast<std::size_t>(mpz_sgn(r.get_num_mpz_t()) + 1));
  return h;
}

std::uint64_t coord_bit(int index) { return index >= 63 ? (1ULL << 63) : (1ULL << index); }

std::strong_ordering cmp_rational(const Rational& a, const Rational& b) {
  int c = cmp(a, b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::strong_ordering compare_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].atom != b[i].atom) {
      auto c = compare(*a[i].atom, *b[i].atom);
      if (c != 0) return c;
    }
    if (a[i].power != b[i].power) return a[i].power <=> b[i].power;
  }
  return a.size() <=> b.size();
}

bool factors_less(const Term& a, const Term& b) { return compare_factors(a.factors, b.factors) < 0; }

std::size_t hash_factors(const std::vector<Factor>& f) {
  std::size_t h = 0x51ed27;
  for (const auto& x : f) h = mix(mix(h, x.atom->hash), static_cast<std::size_t>(x.power));
  return h;
}

const std::shared_ptr<const detail::Poly>& zero_poly() {
  static const std::shared_ptr<const detail::Poly> z = std::make_shared<detail::Poly>();
  return z;
}

// Sort, merge equal monomials, drop zero coefficients.
Expr normalize(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), factors_less);
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && compare_factors(out.back().factors, t.factors) == 0) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && sgn(out.back().coeff) == 0) out.pop_back();
  return detail::Poly::build(std::move(out));
}

AtomPtr finish_atom(Atom a) {
  std::size_t h = mix(0xa70f, static_cast<std::size_t>(a.kind));
  switch (a.kind) {
  case AtomKind::Coord:
    h = mix(h, static_cast<std::size_t>(a.index));
    h = mix(h, std::hash<std::string>{}(a.name));
    a.mask = coord_bit(a.index);
    break;
  case AtomKind::Param:
    h = mix(h, std::hash<std::string>{}(a.name));
    break;
  case AtomKind::Function:
    h = mix(h, std::hash<std::string>{}(a.name));
    for (int i : a.args) {
      h = mix(h, static_cast<std::size_t>(i));
      a.mask |= coord_bit(i);
    }
    h = mix(h, 0xd1ff);
    for (int i : a.derivs) h = mix(h, static_cast<std::size_t>(i));
    break;
  case AtomKind::Exp:
  case AtomKind::InvSum:
    h = mix(h, a.inner.hash());
    a.mask = a.inner.poly().mask;
    break;
  }
  a.hash = h;
  return std::make_shared<const Atom>(std::move(a));
}

// Multiply factor lists. exp atoms are merged into a single exp of the summed argument.
std::vector<Factor> mul_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  std::vector<Factor> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size()) {
      out.push_back(a[i++]);
      continue;
    }
    if (i == a.size()) {
      out.push_back(b[j++]);
      continue;
    }
    const Atom& x = *a[i].atom;
    const Atom& y = *b[j].atom;
    if (x.kind == AtomKind::Exp && y.kind == AtomKind::Exp) {
      Expr arg = x.inner + y.inner;
      if (!arg.is_zero_node()) out.push_back({make_exp_atom(arg), 1});
      ++i;
      ++j;
      continue;
    }
    auto c = (a[i].atom == b[j].atom) ? std::strong_ordering::equal : compare(x, y);
    if (c < 0) {
      out.push_back(a[i++]);
    } else if (c > 0) {
      out.push_back(b[j++]);
    } else {
      int p = a[i].power + b[j].power;
      if (p != 0) out.push_back({a[i].atom, p});
      ++i;
      ++j;
    }
  }
  // a merged exp may land out of order relative to other exp-kind neighbours; there is at most one
  return out;
}

Expr term_expr(const Term& t) { return detail::Poly::build({t}); }

Expr mul_term(const Expr& e, const Term& t) {
  std::vector<Term> out;
  out.reserve(e.terms().size());
  for (const auto& s : e.terms()) out.push_back({mul_factors(s.factors, t.factors), s.coeff * t.coeff});
  return normalize(std::move(out));
}

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::string atom_string(const Atom& a) {
  switch (a.kind) {
  case AtomKind::Coord:
  case AtomKind::Param:
    return a.name;
  case AtomKind::Function: {
    std::string s = a.name + "(";
    for (std::size_t i = 0; i < a.arg_names.size(); ++i) s += (i ? "," : "") + a.arg_names[i];
    s += ")";
    if (a.derivs.empty()) return s;
    std::string d = "diff(" + s;
    for (int k : a.derivs) {
      auto it = std::find(a.args.begin(), a.args.end(), k);
      d += ", " + a.arg_names[static_cast<std::size_t>(it - a.args.begin())];
    }
    return d + ")";
  }
  case AtomKind::Exp:
    return "exp(" + to_string(a.inner) + ")";
  case AtomKind::InvSum:
    return "(" + to_string(a.inner) + ")";
  }
  return "?";
}

void collect_leaves(const Expr& e, std::vector<AtomPtr>& out) {
  for (const auto& t : e.terms())
    for (const auto& f : t.factors) {
      if (f.atom->kind == AtomKind::Exp || f.atom->kind == AtomKind::InvSum)
        collect_leaves(f.atom->inner, out);
      else
        out.push_back(f.atom);
    }
}

} // namespace

Expr detail::Poly::build(std::vector<Term> sorted_terms) {
  if (sorted_terms.empty()) return Expr(zero_poly());
  auto p = std::make_shared<Poly>();
  std::size_t h = 0x7e57;
  std::size_t nodes = 1;
  for (const auto& t : sorted_terms) {
    h = mix(mix(h, hash_factors(t.factors)), hash_rational(t.coeff));
    nodes += 1;
    for (const auto& f : t.factors) {
      nodes += 1;
      const Atom& a = *f.atom;
      p->mask |= a.mask;
      if (f.power < 0) p->negpow = true;
      switch (a.kind) {
      case AtomKind::Function:
        p->fn = true;
        break;
      case AtomKind::Exp:
        p->exp = true;
        p->fn = p->fn || a.inner.has_function();
        p->inv = p->inv || a.inner.has_inverse();
        nodes += a.inner.node_count();
        break;
      case AtomKind::InvSum:
        p->inv = true;
        p->exp = p->exp || a.inner.has_exp();
        p->fn = p->fn || a.inner.has_function();
        nodes += a.inner.node_count();
        break;
      default:
        break;
      }
    }
  }
  if (nodes > kNodeBudget)
    throw BudgetExceeded("expression exceeds node budget (" + std::to_string(nodes) + " nodes)");
  p->terms = std::move(sorted_terms);
  p->hash = h;
  p->nodes = nodes;
  return Expr(std::shared_ptr<const Poly>(std::move(p)));
}

Expr::Expr() : p_(zero_poly()) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(long v) : Expr(Rational(v)) {}
Expr::Expr(long long v) : Expr(Rational(std::to_string(v))) {}
Expr::Expr(const Rational& v) : p_(zero_poly()) {
  Rational c = v;
  c.canonicalize();
  if (sgn(c) != 0) *this = detail::Poly::build({Term{{}, c}});
}

Expr Expr::coord(int index, std::string name) {
  Atom a{AtomKind::Coord};
  a.index = index;
  a.name = std::move(name);
  return atom_expr(finish_atom(std::move(a)));
}

Expr Expr::param(std::string name) {
  Atom a{AtomKind::Param};
  a.name = std::move(name);
  return atom_expr(finish_atom(std::move(a)));
}

Expr Expr::function(std::string name, std::vector<int> args, std::vector<std::string> arg_names) {
  if (args.size() != arg_names.size()) throw std::invalid_argument("function argument names mismatch");
  Atom a{AtomKind::Function};
  a.name = std::move(name);
  a.args = std::move(args);
  a.arg_names = std::move(arg_names);
  return atom_expr(finish_atom(std::move(a)));
}

Expr Expr::from_terms(std::vector<Term> terms) {
  for (auto& t : terms) t.coeff.canonicalize();
  return normalize(std::move(terms));
}

bool Expr::is_zero_node() const { return p_->terms.empty(); }
bool Expr::is_const() const { return p_->terms.empty() || (p_->terms.size() == 1 && p_->terms[0].factors.empty()); }
std::optional<Rational> Expr::as_rational() const {
  if (p_->terms.empty()) return Rational(0);
  if (is_const()) return p_->terms[0].coeff;
  return std::nullopt;
}

NodeKind Expr::kind() const {
  const auto& ts = p_->terms;
  if (ts.empty() || (ts.size() == 1 && ts[0].factors.empty())) return NodeKind::Const;
  if (ts.size() > 1) return NodeKind::Sum;
  const Term& t = ts[0];
  if (t.factors.size() > 1 || t.coeff != 1) return NodeKind::Product;
  const Factor& f = t.factors[0];
  if (f.power != 1) return NodeKind::IntPow;
  switch (f.atom->kind) {
  case AtomKind::Coord:
    return NodeKind::Coord;
  case AtomKind::Param:
    return NodeKind::Param;
  case AtomKind::Function:
    return NodeKind::Function;
  case AtomKind::Exp:
    return NodeKind::Exp;
  case AtomKind::InvSum:
    return NodeKind::IntPow;
  }
  return NodeKind::Product;
}

const std::vector<Term>& Expr::terms() const { return p_->terms; }
std::size_t Expr::hash() const { return p_->hash; }
std::size_t Expr::node_count() const { return p_->nodes; }
bool Expr::has_exp() const { return p_->exp; }
bool Expr::has_inverse() const { return p_->inv; }
bool Expr::has_function() const { return p_->fn; }
bool Expr::is_polynomial() const { return !p_->exp && !p_->inv && !p_->negpow; }

Expr Expr::operator-() const {
  std::vector<Term> ts = p_->terms;
  for (auto& t : ts) t.coeff = -t.coeff;
  return detail::Poly::build(std::move(ts));
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero_node()) return b;
  if (b.is_zero_node()) return a;
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::vector<Term> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    auto c = compare_factors(x[i].factors, y[j].factors);
    if (c < 0) {
      out.push_back(x[i++]);
    } else if (c > 0) {
      out.push_back(y[j++]);
    } else {
      Rational s = x[i].coeff + y[j].coeff;
      if (sgn(s) != 0) out.push_back({x[i].factors, s});
      ++i;
      ++j;
    }
  }
  for (; i < x.size(); ++i) out.push_back(x[i]);
  for (; j < y.size(); ++j) out.push_back(y[j]);
  return detail::Poly::build(std::move(out));
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero_node() || b.is_zero_node()) return Expr();
  const auto& x = a.terms();
  const auto& y = b.terms();
  if (x.size() == 1 && x[0].factors.empty() && x[0].coeff == 1) return b;
  if (y.size() == 1 && y[0].factors.empty() && y[0].coeff == 1) return a;
  if (x.size() * y.size() > kNodeBudget)
    throw BudgetExceeded("product exceeds node budget");
  std::vector<Term> out;
  out.reserve(x.size() * y.size());
  for (const auto& s : x)
    for (const auto& t : y) out.push_back({mul_factors(s.factors, t.factors), s.coeff * t.coeff});
  return normalize(std::move(out));
}

Expr operator/(const Expr& a, const Expr& b) { return a * inverse(b); }

Expr& Expr::operator+=(const Expr& o) { return *this = *this + o; }
Expr& Expr::operator-=(const Expr& o) { return *this = *this - o; }
Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }
Expr& Expr::operator/=(const Expr& o) { return *this = *this / o; }

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (&a.poly() == &b.poly()) return std::strong_ordering::equal;
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto c = compare_factors(x[i].factors, y[i].factors);
    if (c != 0) return c;
    c = cmp_rational(x[i].coeff, y[i].coeff);
    if (c != 0) return c;
  }
  return x.size() <=> y.size();
}

bool operator==(const Expr& a, const Expr& b) {
  if (&a.poly() == &b.poly()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) { return compare(a, b); }

std::strong_ordering compare(const Atom& a, const Atom& b) {
  if (&a == &b) return std::strong_ordering::equal;
  if (a.kind != b.kind) return a.kind <=> b.kind;
  switch (a.kind) {
  case AtomKind::Coord:
    if (a.index != b.index) return a.index <=> b.index;
    return a.name <=> b.name;
  case AtomKind::Param:
    return a.name <=> b.name;
  case AtomKind::Function:
    if (auto c = a.name <=> b.name; c != 0) return c;
    if (auto c = a.args <=> b.args; c != 0) return c;
    return a.derivs <=> b.derivs;
  case AtomKind::Exp:
  case AtomKind::InvSum:
    return compare(a.inner, b.inner);
  }
  return std::strong_ordering::equal;
}

Expr atom_expr(AtomPtr a, int power) {
  if (a->kind == AtomKind::Exp && power != 1) return exp(a->inner * Expr(power));
  if (power == 0) return Expr(1);
  return detail::Poly::build({Term{{Factor{std::move(a), power}}, Rational(1)}});
}

AtomPtr make_exp_atom(const Expr& arg) {
  Atom a{AtomKind::Exp};
  a.inner = arg;
  return finish_atom(std::move(a));
}

AtomPtr make_inv_atom(const Expr& base) {
  Atom a{AtomKind::InvSum};
  a.inner = base;
  return finish_atom(std::move(a));
}

AtomPtr derivative_atom(const Atom& fn, int index) {
  Atom a = fn;
  a.derivs.insert(std::upper_bound(a.derivs.begin(), a.derivs.end(), index), index);
  return finish_atom(std::move(a));
}

Expr exp(const Expr& arg) {
  if (arg.is_zero_node()) return Expr(1);
  return atom_expr(make_exp_atom(arg));
}

namespace {

// Inverse of a single canonical term.
Expr invert_term(const Term& t) {
  Term r{{}, 1 / t.coeff};
  Expr extra(1);
  for (const auto& f : t.factors) {
    switch (f.atom->kind) {
    case AtomKind::Exp:
      extra *= exp(-f.atom->inner);
      break;
    case AtomKind::InvSum:
      extra *= pow(f.atom->inner, -f.power);
      break;
    default:
      r.factors.push_back({f.atom, -f.power});
    }
  }
  return term_expr(r) * extra;
}

} // namespace

Cleared clear_denominators(const Expr& e) {
  std::map<AtomPtr, int, std::function<bool(const AtomPtr&, const AtomPtr&)>> maxpow(
      [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) < 0; });
  for (const auto& t : e.terms())
    for (const auto& f : t.factors)
      if (f.atom->kind == AtomKind::InvSum) {
        int& m = maxpow[f.atom];
        m = std::max(m, -f.power);
      }
  Cleared out;
  if (maxpow.empty()) {
    out.numerator = e;
    return out;
  }
  std::vector<Expr> parts;
  for (const auto& t : e.terms()) {
    Term rest{{}, t.coeff};
    std::map<const Atom*, int> have;
    for (const auto& f : t.factors) {
      if (f.atom->kind == AtomKind::InvSum)
        have[f.atom.get()] = -f.power;
      else
        rest.factors.push_back(f);
    }
    Expr v = term_expr(rest);
    for (const auto& [atom, m] : maxpow) {
      int k = 0;
      for (const auto& [a2, p] : have)
        if (compare(*a2, *atom) == 0) k = p;
      if (m - k > 0) v *= pow(atom->inner, m - k);
    }
    parts.push_back(std::move(v));
  }
  Expr sum;
  for (auto& p : parts) sum += p;
  out.numerator = sum;
  for (const auto& [atom, m] : maxpow) out.denominators.push_back({atom->inner, m});
  return out;
}

Expr inverse(const Expr& e) {
  if (e.is_zero_node()) throw std::domain_error("division by zero");
  if (e.terms().size() == 1) return invert_term(e.terms()[0]);
  Cleared c = clear_denominators(e);
  Expr scale(1);
  for (const auto& [base, m] : c.denominators) scale *= pow(base, m);
  const Expr& n = c.numerator;
  if (n.is_zero_node()) throw std::domain_error("division by zero");
  if (n.terms().size() == 1) return scale * invert_term(n.terms()[0]);

  // extract monomial content: min power of every plain atom (absent counts as 0), and a shared exp
  std::vector<std::pair<AtomPtr, int>> minpow;
  for (const auto& t : n.terms())
    for (const auto& f : t.factors)
      if (f.atom->kind != AtomKind::Exp) {
        bool seen = false;
        for (auto& mp : minpow)
          if (compare(*mp.first, *f.atom) == 0) seen = true;
        if (!seen) minpow.push_back({f.atom, 0});
      }
  for (auto& [atom, m] : minpow) {
    bool first = true;
    for (const auto& t : n.terms()) {
      int p = 0;
      for (const auto& f : t.factors)
        if (compare(*f.atom, *atom) == 0) p = f.power;
      m = first ? p : std::min(m, p);
      first = false;
    }
  }
  bool all_exp = true;
  for (const auto& t : n.terms()) {
    bool has = false;
    for (const auto& f : t.factors) has = has || f.atom->kind == AtomKind::Exp;
    all_exp = all_exp && has;
  }
  Term g{{}, Rational(1)};
  for (const auto& [atom, m] : minpow)
    if (m != 0) g.factors.push_back({atom, m});
  std::sort(g.factors.begin(), g.factors.end(),
            [](const Factor& a, const Factor& b) { return compare(*a.atom, *b.atom) < 0; });
  Expr gexpr = term_expr(g);
  if (all_exp) {
    for (const auto& f : n.terms()[0].factors)
      if (f.atom->kind == AtomKind::Exp) gexpr *= atom_expr(f.atom);
  }
  Expr reduced = n * inverse(gexpr);
  Rational lead = reduced.terms()[0].coeff;
  Expr monic = reduced * Expr(Rational(1 / lead));
  if (monic.terms().size() == 1) return scale * inverse(gexpr) * invert_term(monic.terms()[0]) * Expr(Rational(1 / lead));
  return scale * inverse(gexpr) * Expr(Rational(1 / lead)) * atom_expr(make_inv_atom(monic), -1);
}

Expr pow(const Expr& base, int n) {
  if (n == 0) return Expr(1);
  if (n < 0) return pow(inverse(base), -n);
  if (base.is_zero_node()) return Expr();
  if (base.terms().size() == 1) {
    const Term& t = base.terms()[0];
    Rational c(1);
    for (int i = 0; i < n; ++i) c *= t.coeff;
    Term r{{}, c};
    Expr extra(1);
    for (const auto& f : t.factors) {
      if (f.atom->kind == AtomKind::Exp)
        extra *= exp(f.atom->inner * Expr(n));
      else
        r.factors.push_back({f.atom, f.power * n});
    }
    return term_expr(r) * extra;
  }
  Expr result(1), b = base;
  while (n > 0) {
    if (n & 1) result *= b;
    n >>= 1;
    if (n) b *= b;
  }
  return result;
}

bool depends_on(const Expr& e, int index) {
  std::uint64_t bit = coord_bit(index);
  return (e.poly().mask & bit) != 0;
}

Expr diff(const Expr& e, int index) {
  if (!depends_on(e, index)) return Expr();
  std::uint64_t bit = coord_bit(index);
  std::vector<Term> direct;
  Expr chained;
  for (const auto& t : e.terms()) {
    for (std::size_t k = 0; k < t.factors.size(); ++k) {
      const Factor& f = t.factors[k];
      const Atom& a = *f.atom;
      if (!(a.mask & bit)) continue;
      Term rest{{}, t.coeff};
      for (std::size_t m = 0; m < t.factors.size(); ++m)
        if (m != k) rest.factors.push_back(t.factors[m]);
      switch (a.kind) {
      case AtomKind::Coord: {
        if (a.index != index) break;
        Term r{rest.factors, rest.coeff * f.power};
        if (f.power != 1) {
          r.factors.push_back({f.atom, f.power - 1});
          std::sort(r.factors.begin(), r.factors.end(),
                    [](const Factor& x, const Factor& y) { return compare(*x.atom, *y.atom) < 0; });
        }
        direct.push_back(std::move(r));
        break;
      }
      case AtomKind::Param:
        break;
      case AtomKind::Function: {
        if (std::find(a.args.begin(), a.args.end(), index) == a.args.end()) break;
        Expr dpart = atom_expr(derivative_atom(a, index)) * Expr(f.power);
        if (f.power != 1) dpart *= atom_expr(f.atom, f.power - 1);
        chained += term_expr(rest) * dpart;
        break;
      }
      case AtomKind::Exp:
        chained += term_expr(rest) * atom_expr(f.atom) * diff(a.inner, index);
        break;
      case AtomKind::InvSum:
        chained += term_expr(rest) * Expr(f.power) * atom_expr(f.atom, f.power - 1) * diff(a.inner, index);
        break;
      }
    }
  }
  return normalize(std::move(direct)) + chained;
}

Expr substitute(const Expr& e, int index, const Expr& value) {
  if (!depends_on(e, index)) return e;
  Expr out;
  for (const auto& t : e.terms()) {
    Expr v(t.coeff);
    for (const auto& f : t.factors) {
      const Atom& a = *f.atom;
      switch (a.kind) {
      case AtomKind::Coord:
        v *= a.index == index ? pow(value, f.power) : atom_expr(f.atom, f.power);
        break;
      case AtomKind::Param:
        v *= atom_expr(f.atom, f.power);
        break;
      case AtomKind::Function:
        if (std::find(a.args.begin(), a.args.end(), index) != a.args.end())
          throw std::invalid_argument("cannot substitute into argument of abstract function " + a.name);
        v *= atom_expr(f.atom, f.power);
        break;
      case AtomKind::Exp:
        v *= exp(substitute(a.inner, index, value));
        break;
      case AtomKind::InvSum:
        v *= pow(substitute(a.inner, index, value), f.power);
        break;
      }
    }
    out += v;
  }
  return out;
}

Expr simplify(const Expr& e) {
  if (!e.has_inverse()) return e;
  Cleared c = clear_denominators(e);
  if (c.denominators.empty()) return e;
  Expr num = c.numerator;
  Expr den(1);
  for (const auto& [base, m] : c.denominators) {
    int left = m;
    if (!base.has_exp()) {
      while (left > 0) {
        auto q = exact_divide(num, base);
        if (!q) break;
        num = *q;
        --left;
      }
    }
    if (left > 0) den *= atom_expr(make_inv_atom(base), -left);
  }
  return num * den;
}

std::vector<AtomPtr> leaf_atoms(const Expr& e) {
  std::vector<AtomPtr> out;
  collect_leaves(e, out);
  std::sort(out.begin(), out.end(), [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) < 0; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) == 0; }),
            out.end());
  return out;
}

int max_coord_index(const Expr& e) {
  int m = -1;
  for (const auto& a : leaf_atoms(e)) {
    if (a->kind == AtomKind::Coord) m = std::max(m, a->index);
    if (a->kind == AtomKind::Function)
      for (int i : a->args) m = std::max(m, i);
  }
  return m;
}

std::string to_string(const Rational& r) { return rational_string(r); }

std::string to_string(const Expr& e) {
  if (e.is_zero_node()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : e.terms()) {
    bool neg = sgn(t.coeff) < 0;
    Rational mag = neg ? Rational(-t.coeff) : t.coeff;
    if (first)
      s += neg ? "-" : "";
    else
      s += neg ? " - " : " + ";
    first = false;
    std::string body;
    if (t.factors.empty() || mag != 1) body = rational_string(mag);
    for (const auto& f : t.factors) {
      if (!body.empty()) body += "*";
      body += atom_string(*f.atom);
      if (f.power != 1) body += "^" + std::to_string(f.power);
    }
    s += body;
  }
  return s;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

} // namespace hj
