#include "hj/contact.hpp"

#include <stdexcept>

namespace hj {

namespace {

const std::string& coord_name(const ChartPtr& c, int i) { return c->coords[static_cast<std::size_t>(i)]; }

std::string idx(std::size_t i) { return std::to_string(i + 1); }

std::string decided(const ZeroCertainty& z) {
  if (z.zero()) return "holds";
  if (z.nonzero()) return "fails";
  return "undecided";
}

bool darboux_form(const ContactStructure& c) {
  return c.chart->kind == ChartKind::DarbouxContact && c.theta == darboux_contact_form(c.chart);
}

ExprVector simplified(ExprVector v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = simplify(v(i));
  return v;
}

std::vector<Expr> operator_exprs(const Operator11& k) { return components(k); }

CheckReport dtheta_symmetry(const Operator11& k, const ContactStructure& c, const SampleOptions& opts) {
  ExprMatrix w = antisymmetric_matrix(c.d_theta);
  ExprMatrix r = mat_mul(w, k.mat) - mat_mul(transpose(k.mat), w);
  Evidence ev(opts);
  for (int a = 0; a < r.rows() && !ev.failed(); ++a)
    for (int b = a; b < r.cols() && !ev.failed(); ++b)
      ev.require_zero(r(a, b), "dtheta(K d" + coord_name(c.chart, a) + ", d" + coord_name(c.chart, b) + ") - dtheta(d" +
                                   coord_name(c.chart, a) + ", K d" + coord_name(c.chart, b) + ")");
  return ev.finish("dtheta-symmetry", ev.failed() ? "dtheta(KX,Y) != dtheta(X,KY)" : "dtheta(KX,Y) = dtheta(X,KY)");
}

std::vector<Expr> theta_all_fields_residual(const Operator11& k, const ContactStructure& c) {
  return components(wedge(op_transpose_apply(k, c.theta), c.theta));
}

Expr theta_hamiltonian_residual(const Operator11& k, const ContactStructure& c) {
  std::vector<Expr> all = operator_exprs(k);
  for (const auto& e : components(c.theta)) all.push_back(e);
  std::string fname = fresh_function_name("f", all);
  std::string gname = fresh_function_name(fname == "f" ? "g" : fname + "_g", all);
  Expr f = generic_function(*c.chart, fname), g = generic_function(*c.chart, gname);
  VectorField xf = contact_hamiltonian_vf(f, c), xg = contact_hamiltonian_vf(g, c);
  return evaluate(c.theta, op_apply(k, xf)) * evaluate(c.theta, xg) -
         evaluate(c.theta, xf) * evaluate(c.theta, op_apply(k, xg));
}

Expr theta_kf_residual(const Operator11& k, const Expr& f, const ContactStructure& c) {
  VectorField xf = contact_hamiltonian_vf(f, c);
  return evaluate(c.theta, op_apply(k, xf)) + f * evaluate(c.theta, op_apply(k, c.reeb));
}

Expr euler_momenta(const Expr& f, const Chart& c) {
  Expr s;
  for (int i = 0; i < c.n; ++i) s += c.coord(c.p(i)) * diff(f, c.p(i));
  return s;
}

/// Degree-0 test family: q^i, z, q^i z, p_i/p_j and one abstract function of (q, z).
std::vector<std::pair<std::string, Expr>> degree0_family(const Chart& c, const std::vector<Expr>& avoid) {
  std::vector<std::pair<std::string, Expr>> fam;
  Expr z = c.coord(c.z());
  for (int i = 0; i < c.n; ++i) {
    Expr q = c.coord(c.q(i));
    fam.emplace_back(to_string(q), q);
    fam.emplace_back(to_string(q * z), q * z);
  }
  fam.emplace_back(to_string(z), z);
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      if (i != j) {
        Expr r = c.coord(c.p(i)) / c.coord(c.p(j));
        fam.emplace_back(to_string(r), r);
      }
  std::vector<int> args;
  std::vector<std::string> names;
  for (int i = 0; i < c.n; ++i) {
    args.push_back(c.q(i));
    names.push_back(c.coords[static_cast<std::size_t>(c.q(i))]);
  }
  args.push_back(c.z());
  names.push_back(c.coords[static_cast<std::size_t>(c.z())]);
  std::string phi = fresh_function_name("phi", avoid);
  Expr f = Expr::function(phi, args, names);
  fam.emplace_back(to_string(f), f);
  return fam;
}

} // namespace

KForm darboux_contact_form(const ChartPtr& c) {
  if (c->kind != ChartKind::DarbouxContact) throw std::invalid_argument("Darboux contact chart required");
  KForm t(c, 1);
  t.add({c->z()}, Expr(1));
  for (int i = 0; i < c->n; ++i) t.add({c->q(i)}, -c->coord(c->p(i)));
  return t;
}

ContactStructure validate_contact(const KForm& theta, const SampleOptions& opts) {
  if (theta.degree != 1) throw std::invalid_argument("contact form must be a 1-form");
  const int dim = theta.dim();
  if (dim % 2 == 0) throw std::invalid_argument("contact structures need an odd-dimensional chart");
  ContactStructure c;
  c.chart = theta.chart;
  c.theta = theta;
  c.d_theta = exterior_derivative(theta);
  c.reeb = VectorField::zero(c.chart);
  Evidence ev(opts);

  KForm top = theta;
  for (int i = 0; i < c.n(); ++i) top = wedge(top, c.d_theta);
  IndexTuple all;
  for (int i = 0; i < dim; ++i) all.push_back(i);
  c.volume = top.get(all);
  ev.value("volume", to_string(c.volume));
  if (!ev.require_nonzero(c.volume, "theta^dtheta^n")) {
    c.validity = ev.finish("contact", "theta^dtheta^n vanishes");
    return c;
  }
  if (!c.volume.is_const()) ev.value("vanishing_locus", to_string(c.volume) + " = 0");

  ExprMatrix w = antisymmetric_matrix(c.d_theta);
  ExprVector t = one_form_components(theta);
  c.flat = zero_matrix(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) c.flat(j, i) = w(i, j) + t(i) * t(j);
  try {
    c.sharp = matrix_inverse(c.flat);
  } catch (const std::domain_error&) {
    ev.fail("flat", "flat map is singular");
    c.validity = ev.finish("contact", "flat map is not invertible");
    return c;
  }
  ExprMatrix id = mat_mul(c.flat, c.sharp) - identity_matrix(dim);
  std::vector<Expr> ids;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) ids.push_back(simplify(id(i, j)));
  ev.require_all_zero(ids, "flat sharp - I");

  c.reeb = VectorField{c.chart, simplified(mat_vec(c.sharp, t))};
  ev.require_zero(simplify(evaluate(theta, c.reeb) - Expr(1)), "i_R theta - 1");
  KForm ird = interior_product(c.reeb, c.d_theta);
  for (const auto& [k, v] : ird.comp)
    if (ev.require_zero(simplify(v), "(i_R dtheta)_" + coord_name(c.chart, k[0])).nonzero()) break;
  ev.value("R", to_string(c.reeb));
  c.validity = ev.finish("contact", ev.failed() ? "not a contact form" : "contact form");
  return c;
}

KForm contact_flat(const ContactStructure& c, const VectorField& x) {
  require_same(c.chart, x.chart);
  return one_form(c.chart, simplified(mat_vec(c.flat, x.comp)));
}

VectorField contact_sharp(const ContactStructure& c, const KForm& alpha) {
  require_same(c.chart, alpha.chart);
  return {c.chart, simplified(mat_vec(c.sharp, one_form_components(alpha)))};
}

JacobiStructure induced_jacobi_from_contact(const ContactStructure& c, const SampleOptions& opts) {
  if (!c.valid()) throw std::invalid_argument("contact structure did not validate");
  ExprMatrix w = antisymmetric_matrix(c.d_theta);
  ExprMatrix l = mat_mul(transpose(c.sharp), mat_mul(w, c.sharp));
  const int dim = c.chart->dim();
  KVector lambda(c.chart, 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) lambda.add({i, j}, simplify(l(i, j)));
  JacobiStructure j = validate_jacobi(lambda, c.reeb, opts);
  Evidence ev(opts);
  ev.absorb(j.validity);
  if (darboux_form(c)) {
    const Chart& ch = *c.chart;
    KVector expected(c.chart, 2);
    for (int i = 0; i < ch.n; ++i) {
      expected.add({ch.q(i), ch.p(i)}, Expr(1));
      expected.add({ch.z(), ch.p(i)}, ch.coord(ch.p(i)));
    }
    ev.require_all_zero(components(lambda - expected), "Lambda - (dq + p dz)^dp");
    ev.require_all_zero(components(c.reeb - VectorField::basis(c.chart, ch.z())), "E - dz");
    ev.value("darboux", ev.failed() ? "mismatch" : "matches");
  }
  j.validity = ev.finish("induced-jacobi", ev.failed() ? "induced pair is not the expected Jacobi structure"
                                                        : "induced Jacobi structure");
  return j;
}

VectorField contact_hamiltonian_vf(const Expr& f, const ContactStructure& c) {
  KForm alpha = differential(c.chart, f) - (c.reeb(f) + f) * c.theta;
  return contact_sharp(c, alpha);
}

CheckReport is_dissipated(const Expr& f, const Expr& h, const ContactStructure& c, const SampleOptions& opts) {
  Evidence ev(opts);
  VectorField xh = contact_hamiltonian_vf(h, c);
  Expr rate = xh(f);
  ev.value("X_H f", to_string(rate));
  ev.value("RH", to_string(c.reeb(h)));
  ev.require_zero(rate + f * c.reeb(h), "X_H f + f RH");
  return ev.finish("dissipated", ev.failed() ? "not dissipated at the rate of H" : "dissipated at the rate of H");
}

CheckReport check_contact_haantjes(const Operator11& k, const ContactStructure& c, const SampleOptions& opts,
                                   const ContactHaantjesOptions& copts) {
  require_same(k.chart, c.chart);
  Evidence ev(opts);
  ev.absorb(dtheta_symmetry(k, c, opts));

  std::vector<Expr> all_fields = theta_all_fields_residual(k, c);
  Expr ham = theta_hamiltonian_residual(k, c);
  if (copts.theta == ThetaCondition::AllFields) {
    if (!ev.failed()) ev.require_all_zero(all_fields, "K^T theta ^ theta");
    Evidence side(opts);
    ev.value("theta_hamiltonian", decided(side.require_zero(ham, "h")));
  } else {
    if (!ev.failed())
      ev.require_zero(ham, "theta(K X_f) theta(X_g) - theta(X_f) theta(K X_g)");
    Evidence side(opts);
    ev.value("theta_all_fields", side.require_all_zero(all_fields, "a") ? "holds" : "fails");
  }
  ev.value("K^T theta", to_string(op_transpose_apply(k, c.theta)));

  if (copts.sharp_condition && !ev.failed()) {
    ExprMatrix r = mat_mul(c.sharp, transpose(k.mat)) - mat_mul(k.mat, c.sharp);
    std::vector<Expr> es;
    for (int a = 0; a < r.rows(); ++a)
      for (int b = 0; b < r.cols(); ++b) es.push_back(simplify(r(a, b)));
    ev.require_all_zero(es, "sharp K^T - K sharp");
  }
  return ev.finish("contact-haantjes", ev.failed() ? "K is not compatible with the contact form"
                                                   : "K is compatible with the contact form");
}

ReebEigen reeb_eigen_check(const Operator11& k, const ContactStructure& c, const SampleOptions& opts) {
  require_same(k.chart, c.chart);
  Evidence ev(opts);
  VectorField kr = op_apply(k, c.reeb);
  ev.require_all_zero(components(wedge(to_multivector(kr), to_multivector(c.reeb))), "KR ^ R");
  ReebEigen out;
  out.g = simplify(evaluate(c.theta, kr));
  ev.value("g", to_string(out.g));
  out.report = ev.finish("reeb-eigen", ev.failed() ? "KR is not proportional to R" : "KR = g R");
  return out;
}

CheckReport theta_Kf_condition(const Operator11& k, const Expr& f, const ContactStructure& c,
                               const SampleOptions& opts) {
  require_same(k.chart, c.chart);
  Evidence ev(opts);
  ev.require_zero(theta_kf_residual(k, f, c), "theta(K X_f) + f theta(KR)");
  return ev.finish("theta-kf", ev.failed() ? "theta(K X_f) != -f theta(KR)" : "theta(K X_f) = -f theta(KR)");
}

CheckReport is_homogeneous_deg0_momenta(const Expr& f, const ChartPtr& c, const SampleOptions& opts) {
  if (c->kind != ChartKind::DarbouxContact) throw std::invalid_argument("Darboux contact chart required");
  Evidence ev(opts);
  Expr r = euler_momenta(f, *c);
  ev.value("euler", to_string(r));
  ev.require_zero(r, "sum p_i df/dp_i");
  return ev.finish("degree0-momenta", ev.failed() ? "not homogeneous of degree 0 in the momenta"
                                                  : "homogeneous of degree 0 in the momenta");
}

std::string kind_name(SpecialKind k) {
  switch (k) {
  case SpecialKind::First:
    return "first";
  case SpecialKind::Second:
    return "second";
  case SpecialKind::Neither:
    break;
  }
  return "neither";
}

KindReport classify_special_kind(const Operator11& k, const ContactStructure& c, const SampleOptions& opts) {
  require_same(k.chart, c.chart);
  if (!darboux_form(c)) throw std::invalid_argument("special kinds need the Darboux contact form");
  const Chart& ch = *c.chart;
  const int m = 2 * ch.n;
  KindReport out;
  Evidence ev(opts);
  ev.absorb(dtheta_symmetry(k, c, opts));
  for (int i = 0; i < m && !ev.failed(); ++i)
    ev.require_zero(k.mat(i, ch.z()), "K^{" + ch.coords[static_cast<std::size_t>(i)] + "}_z");
  for (int j = 0; j < m && !ev.failed(); ++j) {
    Expr r = k.mat(ch.z(), j);
    for (int i = 0; i < ch.n; ++i) r -= ch.coord(ch.p(i)) * k.mat(ch.q(i), j);
    ev.require_zero(r, "K^z_{" + ch.coords[static_cast<std::size_t>(j)] + "} - p_i K^{q_i}_{" +
                           ch.coords[static_cast<std::size_t>(j)] + "}");
  }
  if (ev.failed()) {
    out.report = ev.finish("special-kind", "structural conditions fail");
    out.report.values.emplace_back("kind", kind_name(out.kind));
    return out;
  }

  std::vector<Expr> avoid = operator_exprs(k);
  Expr f = generic_function(ch, fresh_function_name("f", avoid));
  Expr kzz = k.mat(ch.z(), ch.z());
  Expr tkf = evaluate(c.theta, op_apply(k, contact_hamiltonian_vf(f, c)));
  ev.require_zero(tkf - kzz * (euler_momenta(f, ch) - f), "theta(K X_f) - K^z_z (p df/dp - f)");
  ev.value("K^z_z", to_string(kzz));

  Evidence first(opts);
  first.require_zero(kzz, "K^z_z");
  if (!first.failed()) first.require_zero(tkf, "theta(K X_f)");
  if (first.verdict() == Verdict::Pass) {
    out.kind = SpecialKind::First;
    ev.absorb(first.finish("first", ""));
  } else {
    Evidence second(opts);
    for (const auto& [name, g] : degree0_family(ch, avoid)) {
      if (second.failed()) break;
      second.require_zero(theta_kf_residual(k, g, c), "theta(K X_f) + f theta(KR), f = " + name);
    }
    if (second.verdict() == Verdict::Pass) {
      out.kind = SpecialKind::Second;
      ev.absorb(second.finish("second", ""));
    } else {
      ev.absorb(second.finish("second", ""), "second");
    }
  }
  ev.value("kind", kind_name(out.kind));
  out.report = ev.finish("special-kind", "special contact-Haantjes operator of kind " + kind_name(out.kind));
  return out;
}

CheckReport techain_check(const Expr& h, const HaantjesBasis& basis, const ContactStructure& c, SpecialKind kind,
                          const SampleOptions& opts) {
  require_same(basis.chart, c.chart);
  if (kind == SpecialKind::Neither) throw std::invalid_argument("chain theorem needs a first or second kind");
  Evidence ev(opts);
  ChainReport chain = verify_chain(h, basis, opts);
  std::string missing;
  if (!chain.report.pass()) missing = "chain check did not pass (" + chain.report.failed + ")";
  for (std::size_t i = 0; i < chain.potentials.size() && missing.empty(); ++i)
    if (!chain.potentials[i]) missing = "no potential for K" + idx(i) + "^T dH";
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i) {
    SpecialKind got = classify_special_kind(basis.ops[i], c, opts).kind;
    bool ok = kind == SpecialKind::First ? got == SpecialKind::First : got != SpecialKind::Neither;
    if (!ok) missing = "K" + idx(i) + " is of kind " + kind_name(got) + ", not " + kind_name(kind);
  }
  if (kind == SpecialKind::Second && missing.empty()) {
    if (!is_homogeneous_deg0_momenta(h, c.chart, opts).pass()) missing = "H is not of degree 0 in the momenta";
    for (std::size_t i = 0; i < chain.potentials.size() && missing.empty(); ++i)
      if (!is_homogeneous_deg0_momenta(*chain.potentials[i], c.chart, opts).pass())
        missing = "H" + idx(i) + " is not of degree 0 in the momenta";
  }
  if (!missing.empty()) {
    ev.unknown("precondition", missing);
    return ev.finish("techain", "preconditions unmet");
  }
  JacobiStructure j = induced_jacobi_from_contact(c, opts);
  std::vector<Expr> hs;
  for (const auto& p : chain.potentials) hs.push_back(*p);
  const VectorField& r = c.reeb;
  Expr rh = r(h);
  if (kind == SpecialKind::First) {
    for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a) ev.require_zero(r(hs[a]), "R H" + idx(a));
    for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
      for (std::size_t b = a + 1; b < hs.size() && !ev.failed(); ++b)
        ev.require_zero(jacobi_bracket(hs[a], hs[b], j), "{H" + idx(a) + ",H" + idx(b) + "}");
    for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
      ev.require_zero(jacobi_bracket(hs[a], h, j) - hs[a] * rh, "{H" + idx(a) + ",H} - H" + idx(a) + " RH");
  } else {
    for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
      for (std::size_t b = a + 1; b < hs.size() && !ev.failed(); ++b)
        ev.require_zero(jacobi_bracket(hs[a], hs[b], j) - (hs[a] * r(hs[b]) - hs[b] * r(hs[a])),
                        "{H" + idx(a) + ",H" + idx(b) + "} - (H" + idx(a) + " RH" + idx(b) + " - H" + idx(b) +
                            " RH" + idx(a) + ")");
    for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a) {
      Expr br = jacobi_bracket(hs[a], h, j);
      ev.require_zero(br - (hs[a] * rh - h * r(hs[a])),
                      "{H" + idx(a) + ",H} - (H" + idx(a) + " RH - H RH" + idx(a) + ")");
      Evidence side(opts);
      ev.value("{H" + idx(a) + ",H} + H RH" + idx(a), decided(side.require_zero(br + h * r(hs[a]), "printed")));
    }
  }
  for (std::size_t a = 0; a < hs.size(); ++a) ev.value("H" + idx(a), to_string(hs[a]));
  return ev.finish("techain", ev.failed() ? "chain potentials violate the " + kind_name(kind) + "-kind identities"
                                          : "chain potentials satisfy the " + kind_name(kind) + "-kind identities");
}

CheckReport contact_involution_check(const Expr& h, const HaantjesBasis& basis, const ContactStructure& c,
                                     const SampleOptions& opts) {
  require_same(basis.chart, c.chart);
  Evidence ev(opts);
  ChainReport chain = verify_chain(h, basis, opts);
  std::string missing;
  if (!chain.report.pass()) missing = "chain check did not pass (" + chain.report.failed + ")";
  for (std::size_t i = 0; i < chain.potentials.size() && missing.empty(); ++i)
    if (!chain.potentials[i]) missing = "no potential for K" + idx(i) + "^T dH";
  std::vector<Expr> fs{h};
  if (missing.empty())
    for (const auto& p : chain.potentials) fs.push_back(*p);
  std::vector<std::pair<std::string, Operator11>> ops;
  for (std::size_t i = 0; i < basis.ops.size(); ++i) ops.emplace_back("K" + idx(i), basis.ops[i]);
  for (std::size_t i = 0; i < basis.ops.size(); ++i)
    for (std::size_t k = 0; k < basis.ops.size(); ++k)
      ops.emplace_back("K" + idx(i) + "K" + idx(k), op_compose(basis.ops[i], basis.ops[k]));
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i)
    if (!dtheta_symmetry(basis.ops[i], c, opts).pass()) missing = "K" + idx(i) + " is not dtheta-symmetric";
  for (const auto& [name, k] : ops) {
    for (std::size_t a = 0; a < fs.size() && missing.empty(); ++a)
      if (!is_zero(theta_kf_residual(k, fs[a], c), opts).zero())
        missing = "theta(" + name + " X_f) != -f theta(" + name + " R) for f = " + (a ? "H" + idx(a - 1) : "H");
    if (!missing.empty()) break;
  }
  if (!missing.empty()) {
    ev.unknown("precondition", missing);
    return ev.finish("contact-involution", "preconditions unmet");
  }
  JacobiStructure j = induced_jacobi_from_contact(c, opts);
  const VectorField& r = c.reeb;
  std::vector<Expr> hs(fs.begin() + 1, fs.end());
  for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
    for (std::size_t b = a + 1; b < hs.size() && !ev.failed(); ++b)
      ev.require_zero(jacobi_bracket(hs[a], hs[b], j) - (hs[a] * r(hs[b]) - hs[b] * r(hs[a])),
                      "{H" + idx(a) + ",H" + idx(b) + "} - (H" + idx(a) + " RH" + idx(b) + " - H" + idx(b) + " RH" +
                          idx(a) + ")");
  for (std::size_t a = 0; a < hs.size(); ++a) ev.value("H" + idx(a), to_string(hs[a]));
  return ev.finish("contact-involution", ev.failed() ? "chain potentials violate the involution identity"
                                                     : "chain potentials satisfy the involution identity");
}

std::string family_name(AppendixFamily f) {
  switch (f) {
  case AppendixFamily::F1:
    return "F1";
  case AppendixFamily::F2:
    return "F2";
  case AppendixFamily::F3:
    break;
  }
  return "F3";
}

Operator11 appendix_family(AppendixFamily family, const ChartPtr& c, const AppendixParams& p) {
  if (c->kind != ChartKind::DarbouxContact || c->n != 2)
    throw std::invalid_argument("appendix families live on the 5-dimensional Darboux contact chart");
  const Expr o;
  switch (family) {
  case AppendixFamily::F1:
    return Operator11::from(c, {{p.d, p.b, o, o, o},
                                {o, p.d, o, o, o},
                                {o, o, -p.d, o, o},
                                {o, o, -p.b, -p.d, o},
                                {o, o, o, o, p.kzz}});
  case AppendixFamily::F2:
    return Operator11::from(c, {{p.d, p.b, o, p.d, o},
                                {-p.b, p.d, -p.d, o, o},
                                {o, o, -p.d, p.b, o},
                                {o, o, -p.b, -p.d, o},
                                {o, o, o, o, p.kzz}});
  case AppendixFamily::F3:
    if (depends_on(p.qk1z, c->p(1))) throw std::invalid_argument("F3: qk1z must not depend on p_2");
    return Operator11::from(c, {{-p.d, o, o, o, o},
                                {o, p.d, o, o, o},
                                {o, o, p.d, o, o},
                                {o, o, o, -p.d, o},
                                {p.d * p.qk1z, p.qk2z, p.pk1z, o, p.d}});
  }
  throw std::invalid_argument("unknown family");
}

AppendixParams abstract_appendix_params(AppendixFamily family, const ChartPtr& c, const std::string& suffix) {
  AppendixParams p;
  p.d = generic_function(*c, "D" + suffix);
  if (family == AppendixFamily::F3) {
    std::vector<int> args{c->q(0), c->q(1), c->p(0), c->z()};
    std::vector<std::string> names;
    for (int a : args) names.push_back(c->coords[static_cast<std::size_t>(a)]);
    p.qk1z = Expr::function("k" + suffix, args, names);
    p.qk2z = generic_function(*c, "Kq2" + suffix);
    p.pk1z = generic_function(*c, "Kp1" + suffix);
  } else {
    p.b = generic_function(*c, "B" + suffix);
    p.kzz = generic_function(*c, "Kzz" + suffix);
  }
  return p;
}

Operator11 appendix_general_form(const ChartPtr& c, const GeneralFormParams& p) {
  if (c->kind != ChartKind::DarbouxContact || c->n != 2)
    throw std::invalid_argument("the general form lives on the 5-dimensional Darboux contact chart");
  const Expr o;
  return Operator11::from(c, {{p.a, p.b, o, p.e, o},
                              {p.c, p.d, -p.e, o, o},
                              {o, p.f, -p.a, -p.c, o},
                              {-p.f, o, -p.b, -p.d, o},
                              {p.qk1z, p.qk2z, p.pk1z, p.pk2z, p.kzz}});
}

CheckReport appendix_report(AppendixFamily family, const std::vector<Operator11>& instances,
                            const SampleOptions& opts) {
  Evidence ev(opts);
  for (std::size_t i = 0; i < instances.size(); ++i)
    ev.absorb(check_haantjes(instances[i], opts), family_name(family) + "[" + idx(i) + "]");
  bool abelian = true;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t j = i + 1; j < instances.size(); ++j) {
      CheckReport r = check_commute(instances[i], instances[j], opts);
      abelian = abelian && r.pass();
      ev.value("commute(" + idx(i) + "," + idx(j) + ")", r.pass() ? "yes" : verdict_name(r.verdict));
    }
  ev.value("abelian", abelian ? "yes" : "no");
  return ev.finish("appendix-" + family_name(family),
                   ev.failed() ? "family member is not Haantjes" : "every family member is Haantjes");
}

} // namespace hj
