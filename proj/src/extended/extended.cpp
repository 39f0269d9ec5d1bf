#include "hj/extended.hpp"

#include <stdexcept>

namespace hj {

namespace {

std::vector<Expr> entries(const ExprMatrix& m) {
  std::vector<Expr> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

std::string slot(const Chart& c, int a) { return a < c.dim() ? c.coords[static_cast<std::size_t>(a)] : "1"; }

} // namespace

ExtendedOperator ExtendedOperator::identity(const ChartPtr& c) {
  return {Operator11::identity(c), VectorField::zero(c), zero_form(c, 1), Expr(1)};
}

ExtendedOperator ExtendedOperator::from_matrix(const ChartPtr& c, const ExprMatrix& m) {
  const int n = c->dim();
  if (m.rows() != n + 1 || m.cols() != n + 1) throw std::invalid_argument("extended operator needs an (n+1)x(n+1) matrix");
  ExtendedOperator r = identity(c);
  r.k.mat = m.topLeftCorner(n, n);
  r.y.comp = m.topRightCorner(n, 1);
  ExprVector g = m.bottomLeftCorner(1, n).transpose();
  r.gamma = one_form(c, g);
  r.scalar = m(n, n);
  return r;
}

ExtendedOperator ExtendedOperator::from(const Operator11& k, const VectorField& y, const KForm& gamma,
                                        const Expr& scalar) {
  require_same(k.chart, y.chart);
  require_same(k.chart, gamma.chart);
  if (gamma.degree != 1) throw std::invalid_argument("gamma must be a 1-form");
  return {k, y, gamma, scalar};
}

ExprMatrix ExtendedOperator::matrix() const {
  const int n = k.dim();
  ExprMatrix m = zero_matrix(n + 1, n + 1);
  m.topLeftCorner(n, n) = k.mat;
  m.topRightCorner(n, 1) = y.comp;
  m.bottomLeftCorner(1, n) = one_form_components(gamma).transpose();
  m(n, n) = scalar;
  return m;
}

bool operator==(const ExtendedOperator& a, const ExtendedOperator& b) { return a.matrix() == b.matrix(); }

ExprVector to_vector(const ExtPair& v) {
  const int n = v.x.dim();
  ExprVector r = zero_vector(n + 1);
  r.head(n) = v.x.comp;
  r(n) = v.f;
  return r;
}

ExtPair from_vector(const ChartPtr& c, const ExprVector& v) {
  const int n = c->dim();
  VectorField x = VectorField::zero(c);
  x.comp = v.head(n);
  return {x, v(n)};
}

std::vector<ExtPair> ext_generators(const ChartPtr& c) {
  std::vector<ExtPair> g;
  for (int i = 0; i < c->dim(); ++i) g.push_back({VectorField::basis(c, i), Expr(0)});
  g.push_back({VectorField::zero(c), Expr(1)});
  return g;
}

ExtPair ext_apply(const ExtendedOperator& k, const ExtPair& v) {
  require_same(k.chart(), v.x.chart);
  return {op_apply(k.k, v.x) + v.f * k.y, evaluate(k.gamma, v.x) + k.scalar * v.f};
}

ExtPair ext_bracket(const ExtPair& a, const ExtPair& b) {
  require_same(a.x.chart, b.x.chart);
  return {lie_bracket(a.x, b.x), a.x(b.f) - b.x(a.f)};
}

Expr ext_pairing(const ExtCoPair& a, const ExtPair& v) { return evaluate(a.alpha, v.x) + a.f * v.f; }

ExtCoPair ext_transpose_apply(const ExtendedOperator& k, const ExtCoPair& a) {
  require_same(k.chart(), a.alpha.chart);
  return {op_transpose_apply(k.k, a.alpha) + a.f * k.gamma, evaluate(a.alpha, k.y) + k.scalar * a.f};
}

ExtendedOperator ext_compose(const ExtendedOperator& a, const ExtendedOperator& b) {
  require_same(a.chart(), b.chart());
  const auto& c = a.chart();
  const int n = c->dim();
  // Y_i ⊗ γ_j
  Operator11 yg = Operator11::zero(c);
  ExprVector gb = one_form_components(b.gamma);
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      if (!a.y.comp(r).is_zero_node() && !gb(s).is_zero_node()) yg.mat(r, s) = a.y.comp(r) * gb(s);
  return {op_compose(a.k, b.k) + yg, op_apply(a.k, b.y) + b.scalar * a.y,
          op_transpose_apply(b.k, a.gamma) + a.scalar * b.gamma, evaluate(a.gamma, b.y) + a.scalar * b.scalar};
}

CheckReport check_ext_compose(const ExtendedOperator& a, const ExtendedOperator& b, const SampleOptions& opts) {
  Evidence ev(opts);
  ExtendedOperator ab = ext_compose(a, b);
  const auto& c = a.chart();
  auto gens = ext_generators(c);
  for (std::size_t g = 0; g < gens.size() && !ev.failed(); ++g) {
    ExtPair direct = ext_apply(a, ext_apply(b, gens[g]));
    ExtPair formula = ext_apply(ab, gens[g]);
    std::vector<Expr> diff_entries = components(direct.x - formula.x);
    diff_entries.push_back(direct.f - formula.f);
    ev.require_all_zero(diff_entries, "composition on e_" + slot(*c, static_cast<int>(g)));
  }
  return ev.finish("ext-compose", ev.failed() ? "composition formula disagrees" : "composition formula agrees");
}

VectorValued2Form ext_nijenhuis(const ExtendedOperator& k) { return torsion_table({k.chart(), true}, k.matrix()); }

VectorValued2Form ext_haantjes(const ExtendedOperator& k) {
  ExprMatrix m = k.matrix();
  return haantjes_from_torsion(torsion_table({k.chart(), true}, m), m);
}

CheckReport check_ext_haantjes(const ExtendedOperator& k, const SampleOptions& opts) {
  CheckReport r = check_haantjes_matrix({k.chart(), true}, k.matrix(), opts);
  r.check = "ext-haantjes";
  return r;
}

CheckReport check_ext_algebra(const ExtendedBasis& basis, const SampleOptions& opts) {
  std::vector<ExprMatrix> ms;
  for (const auto& k : basis.ops) {
    require_same(basis.chart, k.chart());
    ms.push_back(k.matrix());
  }
  CheckReport r = check_algebra_matrices({basis.chart, true}, ms, basis.abelian_required, "K", opts);
  r.check = "ext-algebra";
  return r;
}

ExtPair lambda_e_sharp(const JacobiStructure& j, const ExtCoPair& a) {
  require_same(j.chart, a.alpha.chart);
  return {lambda_sharp(j.lambda, a.alpha) + a.f * j.e, -evaluate(a.alpha, j.e)};
}

EjhReport check_ejh(const ExtendedOperator& k, const JacobiStructure& j, const SampleOptions& opts) {
  require_same(k.chart(), j.chart);
  const auto& c = j.chart;
  const int n = c->dim();
  EjhReport out;

  // operator route: both sides applied to the generating co-pairs (dx^a, 0) and (0, 1)
  {
    Evidence ev(opts);
    std::vector<ExtCoPair> cogens;
    for (int a = 0; a < n; ++a) cogens.push_back({coordinate_form(c, a), Expr(0)});
    cogens.push_back({zero_form(c, 1), Expr(1)});
    for (std::size_t g = 0; g < cogens.size() && !ev.failed(); ++g) {
      ExtPair lhs = ext_apply(k, lambda_e_sharp(j, cogens[g]));
      ExtPair rhs = lambda_e_sharp(j, ext_transpose_apply(k, cogens[g]));
      std::vector<Expr> d = components(lhs.x - rhs.x);
      d.push_back(lhs.f - rhs.f);
      std::string name = static_cast<int>(g) < n ? "d" + c->coords[g] : std::string("1");
      ev.require_all_zero(d, "(K o (L,E)# - (L,E)# o K^T)(" + name + ")");
    }
    out.operator_route = ev.finish("ejh-operator", ev.failed() ? "operator identity fails" : "operator identity holds");
  }

  // system route over coordinate coforms
  {
    Evidence ev(opts);
    std::vector<KForm> d;
    for (int a = 0; a < n; ++a) d.push_back(coordinate_form(c, a));
    auto kt = [&](const KForm& al) { return op_transpose_apply(k.k, al); };
    for (int a = 0; a < n && !ev.failed(); ++a)
      for (int b = a; b < n && !ev.failed(); ++b) {
        const KForm &al = d[static_cast<std::size_t>(a)], &be = d[static_cast<std::size_t>(b)];
        Expr r = evaluate(j.lambda, kt(al), be) + evaluate(al, k.y) * evaluate(be, j.e) - evaluate(j.lambda, al, kt(be)) +
                 evaluate(be, k.y) * evaluate(al, j.e);
        ev.require_zero(r, "system 1 (d" + c->coords[static_cast<std::size_t>(a)] + ",d" +
                               c->coords[static_cast<std::size_t>(b)] + ")");
      }
    for (int a = 0; a < n && !ev.failed(); ++a) {
      const KForm& al = d[static_cast<std::size_t>(a)];
      Expr r = evaluate(j.lambda, k.gamma, al) - evaluate(kt(al), j.e) + k.scalar * evaluate(al, j.e);
      ev.require_zero(r, "system 2 (d" + c->coords[static_cast<std::size_t>(a)] + ")");
    }
    if (!ev.failed()) ev.require_zero(evaluate(k.gamma, j.e), "system 3 gamma(E)");
    out.system_route = ev.finish("ejh-system", ev.failed() ? "system fails" : "system holds");
  }

  out.routes_agree = out.operator_route.verdict == out.system_route.verdict;
  Evidence ev(opts);
  ev.absorb(out.system_route, "system");
  ev.absorb(out.operator_route, "operator");
  if (!out.routes_agree) {
    CheckReport clash;
    clash.verdict = Verdict::Fail;
    clash.grade = Certainty::Unknown;
    clash.failed = "internal-consistency";
    clash.notes.push_back("operator route " + verdict_name(out.operator_route.verdict) + ", system route " +
                          verdict_name(out.system_route.verdict));
    ev.absorb(clash);
  }
  ev.value("routes_agree", out.routes_agree ? "true" : "false");
  out.report = ev.finish("ejh", ev.failed() ? "not EJH-compatible" : "EJH-compatible");
  return out;
}

ExtChainReport verify_ext_chain(const Expr& h, const ExtendedBasis& basis, const SampleOptions& opts) {
  ExtChainReport cr;
  cr.generator = h;
  const auto& c = basis.chart;
  Evidence ev(opts);
  KForm dh = differential(c, h);
  std::vector<KForm> lifted;
  auto u = extend_chart(*c, "u_");
  for (std::size_t i = 0; i < basis.ops.size(); ++i) {
    const auto& k = basis.ops[i];
    require_same(c, k.chart());
    std::string name = std::to_string(i + 1);
    Expr hi = k.y(h) + h * k.scalar;
    cr.potentials.push_back(hi);
    KForm expect = op_transpose_apply(k.k, dh) + h * k.gamma;
    std::vector<Expr> res = components(differential(c, hi) - expect);
    ZeroCertainty worst;
    worst.tag = Certainty::ProvenZero;
    for (const auto& e : res) {
      ZeroCertainty z = is_zero(e, opts);
      if (z.nonzero() || static_cast<int>(z.tag) > static_cast<int>(worst.tag)) worst = z;
      if (z.nonzero()) break;
    }
    cr.consistent.push_back(worst);
    ev.require_all_zero(res, "dH" + name + " - (K" + name + "^T dH + H gamma" + name + ")");
    ev.value("H" + name, to_string(hi));
    // (dH_i, H_i) as a 1-form on the chart extended by one slot
    ExprVector v = zero_vector(c->dim() + 1);
    v.head(c->dim()) = one_form_components(differential(c, hi));
    v(c->dim()) = hi;
    lifted.push_back(one_form(u, v));
  }
  cr.independence = forms_independent(lifted, opts);
  ev.value("independence", cr.independence.independent ? "independent (" + cr.independence.method + ")"
                                                        : "dependent (" + cr.independence.method + ")");
  cr.report = ev.finish("ext-chain", ev.failed() ? "not an extended Haantjes chain" : "extended Haantjes chain");
  return cr;
}

CheckReport thm_main_check(const Expr& h, const ExtendedBasis& basis, const JacobiStructure& j,
                           const SampleOptions& opts) {
  require_same(basis.chart, j.chart);
  Evidence ev(opts);
  std::string missing;
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i) {
    auto e = check_ejh(basis.ops[i], j, opts);
    if (!e.report.pass()) missing = "K" + std::to_string(i + 1) + " is not EJH-compatible (" + e.report.failed + ")";
  }
  for (std::size_t a = 0; a < basis.ops.size() && missing.empty(); ++a)
    for (std::size_t b = a + 1; b < basis.ops.size() && missing.empty(); ++b) {
      ExprMatrix ma = basis.ops[a].matrix(), mb = basis.ops[b].matrix();
      Evidence cm(opts);
      cm.require_all_zero(entries(mat_mul(ma, mb) - mat_mul(mb, ma)), "commutator");
      if (cm.verdict() != Verdict::Pass)
        missing = "K" + std::to_string(a + 1) + " and K" + std::to_string(b + 1) + " do not commute";
    }
  ExtChainReport chain;
  if (missing.empty()) {
    chain = verify_ext_chain(h, basis, opts);
    if (!chain.report.pass()) missing = "extended chain check did not pass (" + chain.report.failed + ")";
  }
  if (!missing.empty()) {
    ev.unknown("precondition", missing);
    return ev.finish("thm-main", "preconditions unmet");
  }
  const auto& hs = chain.potentials;
  VectorField xh = hamiltonian_vf(h, j);
  for (std::size_t i = 0; i < hs.size() && !ev.failed(); ++i) {
    std::string n = std::to_string(i + 1);
    ev.require_zero(jacobi_bracket(hs[i], h, j), "{H" + n + ",H}");
    ev.require_zero(xh(hs[i]) + hs[i] * j.e(h), "X_H(H" + n + ") + H" + n + " E H");
  }
  for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
    for (std::size_t b = a + 1; b < hs.size() && !ev.failed(); ++b)
      ev.require_zero(jacobi_bracket(hs[a], hs[b], j), "{H" + std::to_string(a + 1) + ",H" + std::to_string(b + 1) + "}");
  for (std::size_t a = 0; a < basis.ops.size() && !ev.failed(); ++a)
    for (std::size_t b = a + 1; b < basis.ops.size() && !ev.failed(); ++b) {
      const auto &ka = basis.ops[a], &kb = basis.ops[b];
      std::string s = std::to_string(a + 1), t = std::to_string(b + 1);
      ev.require_all_zero(components(op_apply(ka.k, op_apply(kb.k, j.e)) - op_apply(kb.k, op_apply(ka.k, j.e))),
                          "K" + s + "K" + t + "E - K" + t + "K" + s + "E");
      ev.require_zero(evaluate(ka.gamma, op_apply(kb.k, j.e)) - evaluate(kb.gamma, op_apply(ka.k, j.e)),
                      "gamma" + s + "(K" + t + "E) - gamma" + t + "(K" + s + "E)");
      ev.require_zero(evaluate(ka.gamma, kb.y) - evaluate(kb.gamma, ka.y), "gamma" + s + "(Y" + t + ") - gamma" + t + "(Y" + s + ")");
    }
  for (std::size_t i = 0; i < hs.size(); ++i) ev.value("H" + std::to_string(i + 1), to_string(hs[i]));
  ev.value("independence", chain.independence.independent ? "independent" : "dependent");
  return ev.finish("thm-main", ev.failed() ? "potentials are not dissipated quantities in involution"
                                           : "potentials are dissipated quantities in involution");
}

ActionAngleResult build_action_angle_basis(const ChartPtr& c, const std::vector<Expr>& h_list,
                                           const SampleOptions& opts, const ActionAngleOptions& aopts) {
  ActionAngleResult out;
  out.basis.chart = c;
  Evidence ev(opts);
  if (c->dim() % 2 == 0) throw std::invalid_argument("action-angle chart must have odd dimension");
  if (h_list.empty()) throw std::invalid_argument("action-angle builder needs a Hamiltonian");
  const int n = (c->dim() - 1) / 2;
  if (static_cast<int>(h_list.size()) > n + 1)
    throw std::invalid_argument("at most " + std::to_string(n) + " potentials besides H");
  auto angle = [&](int i) { return i; };
  auto action = [&](int i) { return n + i; };
  const int zi = 2 * n;
  for (std::size_t j = 0; j < h_list.size() && !ev.failed(); ++j) {
    for (int i = 0; i < n; ++i)
      if (depends_on(h_list[j], angle(i))) ev.fail("actions-only", "function " + std::to_string(j) + " depends on " + c->coords[static_cast<std::size_t>(angle(i))]);
    if (depends_on(h_list[j], zi)) ev.fail("actions-only", "function " + std::to_string(j) + " depends on " + c->coords[static_cast<std::size_t>(zi)]);
  }
  if (ev.failed()) {
    out.report = ev.finish("action-angle", "functions must depend on the action coordinates only");
    return out;
  }
  const Expr& h = h_list[0];
  Expr locus(1);
  for (int i = 0; i < n; ++i) {
    Expr nu = diff(h, action(i));
    out.frequencies.push_back(nu);
    ev.value("nu" + std::to_string(i + 1), to_string(nu));
    if (is_zero(nu, opts).proven_zero()) ev.fail("frequency nu" + std::to_string(i + 1), "frequency vanishes identically");
    locus *= nu;
  }
  ExprMatrix hess = zero_matrix(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hess(a, b) = diff(out.frequencies[static_cast<std::size_t>(a)], action(b));
  out.hessian_det = determinant(hess);
  ev.value("hessian_det", to_string(out.hessian_det));
  ZeroCertainty hz = is_zero(out.hessian_det, opts);
  if (!hz.nonzero()) {
    if (aopts.strict_nondegeneracy)
      ev.fail("nondegeneracy", "frequency Hessian is degenerate");
    else
      ev.note("frequency Hessian is degenerate; the system is not nondegenerate in these coordinates");
  }
  if (ev.failed()) {
    out.report = ev.finish("action-angle", "construction failed");
    return out;
  }
  if (!locus.is_const()) {
    out.singular_locus = locus;
    ev.note("construction is singular where " + to_string(locus) + " = 0");
  }

  out.basis.ops.push_back(ExtendedOperator::identity(c));
  for (std::size_t j = 1; j < h_list.size(); ++j) {
    const Expr& hj = h_list[j];
    ExtendedOperator k{Operator11::zero(c), VectorField::zero(c), zero_form(c, 1), Expr(0)};
    for (int i = 0; i < n; ++i) {
      Expr ratio = diff(hj, action(i)) / out.frequencies[static_cast<std::size_t>(i)];
      k.k.mat(angle(i), angle(i)) = ratio;
      k.k.mat(action(i), action(i)) = ratio;
    }
    const int jj = static_cast<int>(j) - 1;
    k.y.comp(action(jj)) = hj / out.frequencies[static_cast<std::size_t>(jj)];
    out.basis.ops.push_back(k);
  }
  out.basis.abelian_required = true;
  ev.absorb(check_ext_algebra(out.basis, opts), "algebra");
  auto chain = verify_ext_chain(h, out.basis, opts);
  ev.absorb(chain.report, "chain");
  for (std::size_t j = 0; j < h_list.size() && !ev.failed(); ++j)
    ev.require_zero(chain.potentials[j] - h_list[j], "potential H" + std::to_string(j));
  out.report = ev.finish("action-angle", ev.failed() ? "construction failed" : "abelian extended Haantjes algebra with chain");
  return out;
}

} // namespace hj
