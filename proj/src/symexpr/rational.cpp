#include <algorithm>
#include <map>

#include "hj/expr.hpp"

namespace hj {
namespace {

using Exponents = std::vector<int>;

struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const {
    long da = 0, db = 0;
    for (int x : a) da += x;
    for (int x : b) db += x;
    if (da != db) return da > db;
    return a > b;
  }
};

using SparsePoly = std::map<Exponents, Rational, GrlexGreater>;

struct Ring {
  std::vector<AtomPtr> vars;

  int index(const AtomPtr& a) const {
    auto it = std::lower_bound(vars.begin(), vars.end(), a,
                               [](const AtomPtr& x, const AtomPtr& y) { return compare(*x, *y) < 0; });
    return static_cast<int>(it - vars.begin());
  }

  SparsePoly lift(const Expr& e, const Exponents& shift) const {
    SparsePoly out;
    for (const auto& t : e.terms()) {
      Exponents ex = shift;
      for (const auto& f : t.factors) ex[static_cast<std::size_t>(index(f.atom))] += f.power;
      out[ex] += t.coeff;
    }
    return out;
  }

  Expr lower(const SparsePoly& p, const Exponents& unshift) const {
    std::vector<Term> terms;
    for (const auto& [ex, c] : p) {
      Term t{{}, c};
      for (std::size_t i = 0; i < vars.size(); ++i) {
        int k = ex[i] - unshift[i];
        if (k != 0) t.factors.push_back({vars[i], k});
      }
      terms.push_back(std::move(t));
    }
    return Expr::from_terms(std::move(terms));
  }
};

Exponents min_shift(const Expr& e, const Ring& r) {
  Exponents s(r.vars.size(), 0);
  for (const auto& t : e.terms())
    for (const auto& f : t.factors) {
      auto i = static_cast<std::size_t>(r.index(f.atom));
      s[i] = std::max(s[i], -f.power);
    }
  return s;
}

} // namespace

std::optional<Expr> exact_divide(const Expr& num, const Expr& den) {
  if (den.is_zero_node()) return std::nullopt;
  if (num.is_zero_node()) return Expr();
  Ring r;
  auto add_vars = [&](const Expr& e) {
    for (const auto& t : e.terms())
      for (const auto& f : t.factors) r.vars.push_back(f.atom);
  };
  add_vars(num);
  add_vars(den);
  auto less = [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) < 0; };
  std::sort(r.vars.begin(), r.vars.end(), less);
  r.vars.erase(std::unique(r.vars.begin(), r.vars.end(),
                           [](const AtomPtr& a, const AtomPtr& b) { return compare(*a, *b) == 0; }),
               r.vars.end());
  for (const auto& t : den.terms())
    for (const auto& f : t.factors)
      if (f.atom->kind == AtomKind::Exp) return std::nullopt;

  Exponents sd = min_shift(den, r);
  Exponents sn = min_shift(num, r);
  Exponents total(r.vars.size());
  for (std::size_t i = 0; i < total.size(); ++i) total[i] = sn[i] + sd[i];
  SparsePoly rem = r.lift(num, total);
  SparsePoly d = r.lift(den, sd);
  const auto& [dlead, dcoef] = *d.begin();
  SparsePoly quot;
  std::size_t steps = 0;
  while (!rem.empty()) {
    if (++steps > 200000) return std::nullopt;
    auto [rl, rc] = *rem.begin();
    Exponents q(rl.size());
    for (std::size_t i = 0; i < rl.size(); ++i) {
      q[i] = rl[i] - dlead[i];
      if (q[i] < 0) return std::nullopt;
    }
    Rational qc = rc / dcoef;
    quot[q] += qc;
    for (const auto& [ex, c] : d) {
      Exponents m(ex.size());
      for (std::size_t i = 0; i < ex.size(); ++i) m[i] = ex[i] + q[i];
      Rational& slot = rem[m];
      slot -= qc * c;
      if (sgn(slot) == 0) rem.erase(m);
    }
  }
  // quotient carries the numerator shift (the divisor's shift cancels in num*mu_d / den*mu_d)
  return r.lower(quot, sn);
}

} // namespace hj
