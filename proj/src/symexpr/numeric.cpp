#include "hj/numeric.hpp"

#include <cmath>

namespace hj {
namespace {

std::optional<Rational> rpow(const Rational& b, int k) {
  if (k < 0) {
    if (sgn(b) == 0) return std::nullopt;
    return rpow(Rational(1 / b), -k);
  }
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= b;
  return r;
}

std::optional<Rational> atom_exact(const Atom& a, const Assignment<Rational>& v) {
  switch (a.kind) {
  case AtomKind::Exp:
    return std::nullopt;
  case AtomKind::InvSum:
    return eval_exact(a.inner, v);
  default:
    if (const Rational* x = v.get(a)) return *x;
    return std::nullopt;
  }
}

std::optional<double> atom_float(const Atom& a, const Assignment<double>& v) {
  switch (a.kind) {
  case AtomKind::Exp: {
    auto x = eval_float(a.inner, v);
    if (!x) return std::nullopt;
    return std::exp(*x);
  }
  case AtomKind::InvSum:
    return eval_float(a.inner, v);
  default:
    if (const double* x = v.get(a)) return *x;
    return std::nullopt;
  }
}

std::optional<double> term_float(const Term& t, const Assignment<double>& v) {
  double acc = t.coeff.get_d();
  for (const auto& f : t.factors) {
    auto x = atom_float(*f.atom, v);
    if (!x) return std::nullopt;
    if (f.power < 0 && *x == 0.0) return std::nullopt;
    acc *= std::pow(*x, f.power);
  }
  if (!std::isfinite(acc)) return std::nullopt;
  return acc;
}

} // namespace

std::optional<Rational> eval_exact(const Expr& e, const Assignment<Rational>& values) {
  Rational sum(0);
  for (const auto& t : e.terms()) {
    Rational acc = t.coeff;
    for (const auto& f : t.factors) {
      auto x = atom_exact(*f.atom, values);
      if (!x) return std::nullopt;
      auto p = rpow(*x, f.power);
      if (!p) return std::nullopt;
      acc *= *p;
    }
    sum += acc;
  }
  return sum;
}

std::optional<double> eval_float(const Expr& e, const Assignment<double>& values) {
  double sum = 0;
  for (const auto& t : e.terms()) {
    auto x = term_float(t, values);
    if (!x) return std::nullopt;
    sum += *x;
  }
  if (!std::isfinite(sum)) return std::nullopt;
  return sum;
}

std::optional<double> eval_scale(const Expr& e, const Assignment<double>& values) {
  double sum = 0;
  for (const auto& t : e.terms()) {
    auto x = term_float(t, values);
    if (!x) return std::nullopt;
    sum += std::fabs(*x);
  }
  return sum;
}

double eval_numeric(const Expr& e, const NumericEnv& env) {
  Assignment<double> values;
  for (const auto& a : leaf_atoms(e)) {
    switch (a->kind) {
    case AtomKind::Coord: {
      auto it = env.coords.find(a->name);
      if (it == env.coords.end()) throw UnboundAtom("unbound coordinate " + a->name);
      values.set(a, it->second);
      break;
    }
    case AtomKind::Param: {
      auto it = env.params.find(a->name);
      if (it == env.params.end()) throw UnboundAtom("unbound parameter " + a->name);
      values.set(a, it->second);
      break;
    }
    case AtomKind::Function: {
      auto it = env.functions.find(a->name);
      if (it == env.functions.end()) throw UnboundAtom("unbound function " + a->name);
      Expr inst = it->second;
      for (int k : a->derivs) inst = diff(inst, k);
      values.set(a, eval_numeric(inst, env));
      break;
    }
    default:
      break;
    }
  }
  auto v = eval_float(e, values);
  if (!v) throw std::domain_error("expression undefined at point");
  return *v;
}

std::vector<AtomPtr> leaf_atoms(const std::vector<Expr>& es) {
  std::vector<AtomPtr> out;
  for (const auto& e : es) {
    auto l = leaf_atoms(e);
    out.insert(out.end(), l.begin(), l.end());
  }
  std::sort(out.begin(), out.end(), [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) < 0; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) == 0; }),
            out.end());
  return out;
}

Assignment<double> random_assignment(const std::vector<AtomPtr>& leaves, SamplePoints& rng) {
  Assignment<double> v;
  for (const auto& a : leaves) v.set(a, rng.next_double());
  return v;
}

} // namespace hj
