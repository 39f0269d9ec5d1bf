#include "hj/lcs.hpp"

#include <stdexcept>

namespace hj {

namespace {

std::string idx(std::size_t i) { return std::to_string(i + 1); }

ExprVector simplified(ExprVector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = simplify(v(i));
  return v;
}

} // namespace

std::pair<KForm, KForm> lcs_local_forms(const ChartPtr& c, const Expr& l) {
  if (c->kind != ChartKind::LcsLocal && c->kind != ChartKind::DarbouxSymplectic)
    throw std::invalid_argument("LCS local forms need a (q, p) chart");
  KForm omega(c, 2);
  Expr el = exp(l);
  for (int i = 0; i < c->n; ++i) omega.add({c->q(i), c->p(i)}, el);
  return {omega, differential(c, l)};
}

LCSStructure validate_lcs(const KForm& omega, const KForm& eta, const SampleOptions& opts) {
  require_same(omega.chart, eta.chart);
  if (omega.degree != 2 || eta.degree != 1) throw std::invalid_argument("LCS structure needs a 2-form and a 1-form");
  const int dim = omega.dim();
  if (dim % 2) throw std::invalid_argument("LCS structures need an even-dimensional chart");
  LCSStructure s{omega.chart, omega, eta, {}, {}, {}};
  Evidence ev(opts);
  ev.require_all_zero(components(exterior_derivative(eta)), "d eta");
  if (!ev.failed())
    ev.require_all_zero(components(exterior_derivative(omega) - wedge(eta, omega)), "d Omega - eta ^ Omega");
  if (ev.failed()) {
    s.validity = ev.finish("lcs", "not a locally conformal symplectic pair");
    return s;
  }
  ExprMatrix w = antisymmetric_matrix(omega);
  Expr det = determinant(w);
  ev.value("det", to_string(det));
  if (!ev.require_nonzero(det, "det(Omega)")) {
    s.validity = ev.finish("lcs", "Omega is degenerate");
    return s;
  }
  s.flat = transpose(w);
  s.sharp = matrix_inverse(s.flat);
  ExprMatrix id = mat_mul(s.flat, s.sharp) - identity_matrix(dim);
  std::vector<Expr> ids;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) ids.push_back(simplify(id(i, j)));
  ev.require_all_zero(ids, "flat sharp - I");
  s.validity = ev.finish("lcs", ev.failed() ? "not a locally conformal symplectic pair"
                                            : "locally conformal symplectic pair");
  return s;
}

VectorField lcs_sharp(const LCSStructure& s, const KForm& alpha) {
  require_same(s.chart, alpha.chart);
  return {s.chart, simplified(mat_vec(s.sharp, one_form_components(alpha)))};
}

JacobiStructure induced_jacobi_from_lcs(const LCSStructure& s, const SampleOptions& opts, const std::optional<Expr>& l) {
  if (!s.valid()) throw std::invalid_argument("LCS structure did not validate");
  ExprMatrix w = antisymmetric_matrix(s.omega);
  ExprMatrix lm = mat_mul(transpose(s.sharp), mat_mul(w, s.sharp));
  const int dim = s.chart->dim();
  KVector lambda(s.chart, 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) lambda.add({i, j}, simplify(lm(i, j)));
  VectorField e = lcs_sharp(s, s.eta);
  JacobiStructure j = validate_jacobi(lambda, e, opts);
  Evidence ev(opts);
  ev.absorb(j.validity);
  if (l) {
    const Chart& ch = *s.chart;
    Expr em = exp(-*l);
    KVector expected(s.chart, 2);
    VectorField expected_e = VectorField::zero(s.chart);
    for (int i = 0; i < ch.n; ++i) {
      expected.add({ch.q(i), ch.p(i)}, em);
      expected_e.comp(ch.q(i)) = em * diff(*l, ch.p(i));
      expected_e.comp(ch.p(i)) = -em * diff(*l, ch.q(i));
    }
    std::vector<Expr> r = components(lambda - expected);
    for (const auto& c : components(e - expected_e)) r.push_back(simplify(c));
    ev.require_all_zero(r, "local display");
    ev.value("local_display", ev.failed() ? "mismatch" : "matches");
  }
  j.validity = ev.finish("induced-jacobi", ev.failed() ? "induced pair is not the expected Jacobi structure"
                                                        : "induced Jacobi structure");
  return j;
}

VectorField lcs_hamiltonian_vf(const Expr& f, const LCSStructure& s) {
  return lcs_sharp(s, differential(s.chart, f) - f * s.eta);
}

Expr lcs_bracket(const Expr& f, const Expr& g, const LCSStructure& s) {
  VectorField xg = lcs_hamiltonian_vf(g, s);
  return simplify(xg(f) - f * evaluate(s.eta, xg));
}

CheckReport check_lcsh(const Operator11& k, const LCSStructure& s, const SampleOptions& opts) {
  require_same(k.chart, s.chart);
  CheckReport r = check_omega_h_compatibility(k, s.omega, opts);
  r.check = "lcsh";
  r.summary = r.pass() ? "Omega(KX,Y) = Omega(X,KY)" : "K is not compatible with Omega";
  return r;
}

CheckReport eta_KE_check(const Operator11& k, const LCSStructure& s, const SampleOptions& opts) {
  require_same(k.chart, s.chart);
  Evidence ev(opts);
  VectorField e = lcs_sharp(s, s.eta);
  Expr v = simplify(evaluate(s.eta, op_apply(k, e)));
  ev.value("eta(KE)", to_string(v));
  ev.require_zero(v, "eta(KE)");
  return ev.finish("eta-ke", ev.failed() ? "eta(KE) != 0" : "eta(KE) = 0");
}

CheckReport lcs_involution_check(const Expr& h, const HaantjesBasis& basis, const LCSStructure& s,
                                 const SampleOptions& opts) {
  require_same(basis.chart, s.chart);
  Evidence ev(opts);
  ChainReport chain = verify_chain(h, basis, opts);
  std::string missing;
  if (!chain.report.pass()) missing = "chain check did not pass (" + chain.report.failed + ")";
  for (std::size_t i = 0; i < chain.potentials.size() && missing.empty(); ++i)
    if (!chain.potentials[i]) missing = "no potential for K" + idx(i) + "^T dH";
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i)
    if (!check_lcsh(basis.ops[i], s, opts).pass()) missing = "K" + idx(i) + " is not compatible with Omega";
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i)
    for (std::size_t k = i + 1; k < basis.ops.size() && missing.empty(); ++k)
      if (!check_commute(basis.ops[i], basis.ops[k], opts).pass())
        missing = "K" + idx(i) + " and K" + idx(k) + " do not commute";
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i) {
    if (!eta_KE_check(basis.ops[i], s, opts).pass()) missing = "eta(K" + idx(i) + " E) != 0";
    for (std::size_t k = 0; k < basis.ops.size() && missing.empty(); ++k)
      if (!eta_KE_check(op_compose(basis.ops[i], basis.ops[k]), s, opts).pass())
        missing = "eta(K" + idx(i) + "K" + idx(k) + " E) != 0";
  }
  if (!missing.empty()) {
    ev.unknown("precondition", missing);
    return ev.finish("lcs-involution", "preconditions unmet");
  }
  JacobiStructure j = induced_jacobi_from_lcs(s, opts);
  std::vector<Expr> hs;
  for (const auto& p : chain.potentials) hs.push_back(*p);
  std::vector<VectorField> xs;
  std::vector<Expr> eta_x;
  for (const auto& f : hs) {
    xs.push_back(lcs_hamiltonian_vf(f, s));
    eta_x.push_back(evaluate(s.eta, xs.back()));
  }
  VectorField xh = lcs_hamiltonian_vf(h, s);
  for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
    ev.require_zero(evaluate(s.eta, op_apply(basis.ops[a], xh)) - eta_x[a],
                    "eta(K" + idx(a) + " X_H) - eta(X_H" + idx(a) + ")");
  for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
    for (std::size_t b = a + 1; b < hs.size() && !ev.failed(); ++b) {
      std::string i = idx(a), k = idx(b);
      Expr br = lcs_bracket(hs[a], hs[b], s);
      ev.require_zero(br - (hs[b] * eta_x[a] - hs[a] * eta_x[b]),
                      "{H" + i + ",H" + k + "} - (H" + k + " eta(X_H" + i + ") - H" + i + " eta(X_H" + k + "))");
      ev.require_zero(jacobi_bracket(hs[a], hs[b], j) - (hs[a] * j.e(hs[b]) - hs[b] * j.e(hs[a])),
                      "{H" + i + ",H" + k + "} - (H" + i + " EH" + k + " - H" + k + " EH" + i + ")");
    }
  for (std::size_t a = 0; a < hs.size(); ++a) ev.value("H" + idx(a), to_string(hs[a]));
  return ev.finish("lcs-involution", ev.failed() ? "chain potentials violate the involution identity"
                                                 : "chain potentials satisfy the involution identity");
}

} // namespace hj
