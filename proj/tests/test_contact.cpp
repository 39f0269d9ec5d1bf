#include <doctest.h>

#include <random>

#include "hj/contact.hpp"

using namespace hj;

namespace {

SampleOptions opts() { return {11, 16, 1e-9}; }

ContactStructure darboux(int n) { return validate_contact(darboux_contact_form(darboux_contact_chart(n)), opts()); }

Expr random_poly(const ChartPtr& c, std::mt19937_64& rng) {
  Expr e;
  for (int t = 0; t < 3; ++t) {
    Expr m(static_cast<int>(rng() % 7) - 3);
    int deg = static_cast<int>(rng() % 3);
    for (int d = 0; d < deg; ++d) m *= c->coord(static_cast<int>(rng() % static_cast<unsigned>(c->dim())));
    e += m;
  }
  return e;
}

bool zero(const Expr& e) { return is_zero(e, opts()).proven_zero(); }

std::string value(const CheckReport& r, const std::string& key) {
  for (const auto& [k, v] : r.values)
    if (k == key) return v;
  return {};
}

/// Identity on (q, p) with the momentum coupling K^z_{q_i} = p_i and K^z_z = kzz.
Operator11 coupled_identity(const ChartPtr& c, const Expr& kzz) {
  Operator11 k = Operator11::zero(c);
  for (int i = 0; i < 2 * c->n; ++i) k.mat(i, i) = Expr(1);
  for (int i = 0; i < c->n; ++i) k.mat(c->z(), c->q(i)) = c->coord(c->p(i));
  k.mat(c->z(), c->z()) = kzz;
  return k;
}

} // namespace

TEST_CASE("validate_contact on Darboux and non-Darboux forms") {
  for (int n : {1, 2}) {
    ContactStructure c = darboux(n);
    REQUIRE(c.valid());
    CHECK(c.reeb == VectorField::basis(c.chart, c.chart->z()));
    ExprMatrix prod = mat_mul(c.flat, c.sharp);
    CHECK(prod == identity_matrix(c.chart->dim()));
    CHECK(mat_mul(c.sharp, c.flat) == identity_matrix(c.chart->dim()));
  }
  auto ch = darboux_contact_chart(1);
  ContactStructure dz = validate_contact(coordinate_form(ch, ch->z()), opts());
  CHECK_FALSE(dz.valid());
  CHECK(dz.validity.failed == "theta^dtheta^n");
  CHECK_THROWS_AS(validate_contact(coordinate_form(darboux_symplectic_chart(1), 0), opts()), std::invalid_argument);

  // θ = e^q (dz − p dq): dθ = e^q dq∧(dz + dp), so ι_R dθ = 0 forces R ∝ ∂z − ∂p and θ(R) = 1 fixes e^{−q}.
  Expr q = ch->coord(ch->q(0));
  KForm conformal = exp(q) * darboux_contact_form(ch);
  ContactStructure cc = validate_contact(conformal, opts());
  REQUIRE(cc.valid());
  CHECK(zero(cc.reeb.comp(ch->z()) - exp(-q)));
  CHECK(cc.reeb.comp(ch->q(0)).is_zero_node());
  CHECK(zero(cc.reeb.comp(ch->p(0)) + exp(-q)));
  CHECK_FALSE(value(cc.validity, "vanishing_locus").empty());
}

TEST_CASE("flat and sharp are inverse maps") {
  ContactStructure c = darboux(2);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    VectorField x = VectorField::zero(c.chart);
    for (int i = 0; i < c.chart->dim(); ++i) x.comp(i) = random_poly(c.chart, rng);
    VectorField back = contact_sharp(c, contact_flat(c, x));
    CHECK(back == x);
    // ♭X = ι_X dθ + θ(X) θ, evaluated directly.
    KForm direct = interior_product(x, c.d_theta) + evaluate(c.theta, x) * c.theta;
    CHECK(components(direct - contact_flat(c, x)).empty());
  }
}

TEST_CASE("induced Jacobi structure matches the Darboux display") {
  for (int n : {1, 2}) {
    ContactStructure c = darboux(n);
    JacobiStructure j = induced_jacobi_from_contact(c, opts());
    CHECK(j.valid());
    CHECK(value(j.validity, "darboux") == "matches");
    const Chart& ch = *c.chart;
    ExprMatrix l = j.matrix();
    for (int i = 0; i < n; ++i) {
      CHECK(l(ch.q(i), ch.p(i)) == Expr(1));
      CHECK(l(ch.z(), ch.p(i)) == ch.coord(ch.p(i)));
      CHECK(l(ch.q(i), ch.z()).is_zero_node());
    }
    CHECK(j.e == VectorField::basis(c.chart, ch.z()));
  }
}

TEST_CASE("contact Hamiltonian vector fields") {
  ContactStructure c = darboux(1);
  const Chart& ch = *c.chart;
  Expr q = ch.coord(0), p = ch.coord(1), z = ch.coord(2);
  VectorField xh = contact_hamiltonian_vf(p - z, c);
  CHECK(xh == VectorField::from(c.chart, {Expr(1), p, z}));
  CHECK(contact_hamiltonian_vf(Expr(1), c) == Expr(-1) * c.reeb);
  Expr h = p - z;
  CHECK(zero(xh(h) + h * c.reeb(h)));
  CHECK(c.reeb(h) == Expr(-1));

  JacobiStructure j = induced_jacobi_from_contact(c, opts());
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    ContactStructure cc = t % 2 ? darboux(2) : c;
    JacobiStructure jj = t % 2 ? induced_jacobi_from_contact(cc, opts()) : j;
    Expr f = random_poly(cc.chart, rng), g = random_poly(cc.chart, rng);
    VectorField xf = contact_hamiltonian_vf(f, cc);
    // defining equations
    CHECK(zero(evaluate(cc.theta, xf) + f));
    KForm lhs = interior_product(xf, cc.d_theta);
    KForm rhs = differential(cc.chart, f) - cc.reeb(f) * cc.theta;
    CHECK(components(lhs - rhs).empty());
    // evolution law X_f g = {g, f} − g Rf
    CHECK(zero(xf(g) - (jacobi_bracket(g, f, jj) - g * cc.reeb(f))));
    CHECK(xf == hamiltonian_vf(f, jj));
  }
}

TEST_CASE("dissipated quantities") {
  ContactStructure c = darboux(1);
  Expr q = c.chart->coord(0), p = c.chart->coord(1), z = c.chart->coord(2);
  Expr h = p - z;
  CHECK(is_dissipated(h, h, c, opts()).pass());
  CHECK(is_dissipated(p, h, c, opts()).pass());
  CheckReport r = is_dissipated(q, h, c, opts());
  CHECK(r.verdict == Verdict::Fail);
  CHECK(value(r, "X_H f") == "1");
  std::mt19937_64 rng(9);
  for (int t = 0; t < 5; ++t) {
    Expr hh = random_poly(c.chart, rng);
    CHECK(is_dissipated(hh, hh, c, opts()).pass());
  }
}

TEST_CASE("contact-Haantjes compatibility") {
  ContactStructure c = darboux(1);
  auto ch = c.chart;
  CHECK(check_contact_haantjes(Operator11::identity(ch), c, opts(), {ThetaCondition::AllFields, true}).pass());
  CHECK(check_contact_haantjes(Operator11::identity(ch), c, opts(), {ThetaCondition::HamiltonianFields, true}).pass());

  Operator11 qp = Operator11::zero(ch);
  qp.mat(ch->q(0), ch->p(0)) = Expr(1);
  CheckReport r = check_contact_haantjes(qp, c, opts());
  CHECK(r.verdict == Verdict::Fail);
  CHECK(r.failed.rfind("dtheta(", 0) == 0);

  // Coupled identity with K^z_z = 0: dθ-symmetric, K^Tθ = 0.
  Operator11 first = coupled_identity(ch, Expr());
  CHECK(check_contact_haantjes(first, c, opts(), {ThetaCondition::AllFields, false}).pass());
  // K^z_z = 2: K^Tθ = 2 dz is not proportional to θ, while the Hamiltonian-field form also fails for
  // generic f, g (θ(K X_f) = 2(p f_p − f)).
  Operator11 second = coupled_identity(ch, Expr(2));
  CheckReport rs = check_contact_haantjes(second, c, opts());
  CHECK(rs.verdict == Verdict::Fail);
  CHECK(rs.failed == "K^T theta ^ theta");
  CHECK(value(rs, "theta_hamiltonian") == "fails");
  // ♭K = K^T♭ follows from dθ-symmetry once K^Tθ = 0
  CHECK(check_contact_haantjes(first, c, opts(), {ThetaCondition::AllFields, true}).pass());
  CheckReport sharp = check_contact_haantjes(second, c, opts(), {ThetaCondition::HamiltonianFields, true});
  CHECK(sharp.verdict == Verdict::Fail);
  CHECK(sharp.failed == "theta(K X_f) theta(X_g) - theta(X_f) theta(K X_g)");
}

TEST_CASE("Reeb eigenvector and theta condition") {
  ContactStructure c = darboux(1);
  auto ch = c.chart;
  ReebEigen id = reeb_eigen_check(Operator11::identity(ch), c, opts());
  CHECK(id.report.pass());
  CHECK(id.g == Expr(1));
  Operator11 bad = Operator11::identity(ch);
  bad.mat(ch->q(0), ch->z()) = Expr(1);
  CHECK(reeb_eigen_check(bad, c, opts()).report.verdict == Verdict::Fail);

  ContactStructure c5 = darboux(2);
  auto ch5 = c5.chart;
  AppendixParams p1 = abstract_appendix_params(AppendixFamily::F1, ch5, "");
  ReebEigen e1 = reeb_eigen_check(appendix_family(AppendixFamily::F1, ch5, p1), c5, opts());
  CHECK(e1.report.pass());
  CHECK(e1.g == p1.kzz);
  AppendixParams p3 = abstract_appendix_params(AppendixFamily::F3, ch5, "");
  ReebEigen e3 = reeb_eigen_check(appendix_family(AppendixFamily::F3, ch5, p3), c5, opts());
  CHECK(e3.report.pass());
  CHECK(e3.g == p3.d);

  Expr q = ch->coord(0), p = ch->coord(1), z = ch->coord(2);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t)
    CHECK(theta_Kf_condition(Operator11::identity(ch), random_poly(ch, rng), c, opts()).pass());
  Operator11 first = coupled_identity(ch, Expr());
  for (int t = 0; t < 5; ++t) {
    Expr f = random_poly(ch, rng);
    CHECK(theta_Kf_condition(first, f, c, opts()).pass());
    CHECK(zero(evaluate(c.theta, op_apply(first, contact_hamiltonian_vf(f, c)))));
  }
  Operator11 second = coupled_identity(ch, Expr(2));
  CHECK(theta_Kf_condition(second, q, c, opts()).pass());
  CHECK(theta_Kf_condition(second, q * z + z, c, opts()).pass());
  CHECK(theta_Kf_condition(second, p, c, opts()).verdict == Verdict::Fail);
}

TEST_CASE("homogeneity in the momenta") {
  auto ch = darboux_contact_chart(2);
  Expr q1 = ch->coord(ch->q(0)), p1 = ch->coord(ch->p(0)), p2 = ch->coord(ch->p(1));
  CHECK(is_homogeneous_deg0_momenta(q1, ch, opts()).pass());
  CHECK(is_homogeneous_deg0_momenta(p1 / p2, ch, opts()).pass());
  CheckReport r = is_homogeneous_deg0_momenta(p1, ch, opts());
  CHECK(r.verdict == Verdict::Fail);
  CHECK(value(r, "euler") == to_string(p1));
  CHECK_THROWS_AS(is_homogeneous_deg0_momenta(q1, darboux_symplectic_chart(1), opts()), std::invalid_argument);
}

TEST_CASE("special kind classification") {
  ContactStructure c = darboux(1);
  auto ch = c.chart;
  CHECK(classify_special_kind(coupled_identity(ch, Expr()), c, opts()).kind == SpecialKind::First);
  KindReport second = classify_special_kind(coupled_identity(ch, Expr(2)), c, opts());
  CHECK(second.kind == SpecialKind::Second);
  CHECK(second.report.pass());
  Operator11 zz = Operator11::zero(ch);
  zz.mat(ch->z(), ch->z()) = Expr(1);
  CHECK(classify_special_kind(zz, c, opts()).kind == SpecialKind::Second);
  Operator11 qp = Operator11::zero(ch);
  qp.mat(ch->q(0), ch->p(0)) = Expr(1);
  KindReport none = classify_special_kind(qp, c, opts());
  CHECK(none.kind == SpecialKind::Neither);
  CHECK(none.report.verdict == Verdict::Fail);
  // identity misses the momentum coupling
  CHECK(classify_special_kind(Operator11::identity(ch), c, opts()).kind == SpecialKind::Neither);

  ContactStructure c2 = darboux(2);
  auto ch2 = c2.chart;
  Operator11 k2 = Operator11::diagonal(ch2, {Expr(1), Expr(2), Expr(1), Expr(2), Expr()});
  k2.mat(ch2->z(), ch2->q(0)) = ch2->coord(ch2->p(0));
  k2.mat(ch2->z(), ch2->q(1)) = Expr(2) * ch2->coord(ch2->p(1));
  CHECK(classify_special_kind(k2, c2, opts()).kind == SpecialKind::First);
  Operator11 conformal = Operator11::identity(ch);
  CHECK_THROWS_AS(classify_special_kind(conformal, validate_contact(exp(ch->coord(0)) * c.theta, opts()), opts()),
                  std::invalid_argument);
}

TEST_CASE("contact chain theorem, first kind") {
  ContactStructure c = darboux(1);
  auto ch = c.chart;
  Expr q = ch->coord(0);
  HaantjesBasis b1{ch, {coupled_identity(ch, Expr())}, false};
  CheckReport r = techain_check(q, b1, c, SpecialKind::First, opts());
  CHECK(r.pass());
  CHECK(r.grade == Certainty::ProvenZero);
  CHECK(value(r, "H1") == "q");

  ContactStructure c2 = darboux(2);
  auto ch2 = c2.chart;
  Expr q1 = ch2->coord(0), q2 = ch2->coord(1), p1 = ch2->coord(2), p2 = ch2->coord(3);
  Operator11 k2 = Operator11::diagonal(ch2, {Expr(1), Expr(2), Expr(1), Expr(2), Expr()});
  k2.mat(ch2->z(), ch2->q(0)) = p1;
  k2.mat(ch2->z(), ch2->q(1)) = Expr(2) * p2;
  Expr h = p1 * p1 / 2 + p2 * p2 / 2 + q1 * q1 + q2 * q2 * q2;
  HaantjesBasis b2{ch2, {coupled_identity(ch2, Expr()), k2}, false};
  CheckReport r2 = techain_check(h, b2, c2, SpecialKind::First, opts());
  CHECK(r2.pass());
  CHECK(value(r2, "H2") == to_string(p1 * p1 / 2 + p2 * p2 + q1 * q1 + Expr(2) * q2 * q2 * q2));

  HaantjesBasis ident{ch, {Operator11::identity(ch)}, false};
  CheckReport u = techain_check(ch->coord(1) - ch->coord(2), ident, c, SpecialKind::First, opts());
  CHECK(u.verdict == Verdict::Unknown);
  CHECK(u.failed == "precondition");
  CHECK_THROWS_AS(techain_check(q, b1, c, SpecialKind::Neither, opts()), std::invalid_argument);
}

TEST_CASE("contact chain theorem, second kind") {
  ContactStructure c = darboux(2);
  auto ch = c.chart;
  Expr q1 = ch->coord(0), z = ch->coord(4);
  Operator11 two = Operator11::zero(ch), zed = Operator11::zero(ch);
  two.mat(ch->z(), ch->z()) = Expr(2);
  zed.mat(ch->z(), ch->z()) = z;
  Expr h = z + q1;
  CheckReport r = techain_check(h, HaantjesBasis{ch, {two}, false}, c, SpecialKind::Second, opts());
  INFO(r.failed, " ", (r.notes.empty() ? std::string() : r.notes[0]));
  CHECK(r.pass());
  CHECK(value(r, "H1") == to_string(Expr(2) * z));
  // {H1, H} = H1 RH − H RH1 = −2 q1, which is not −H RH1 = −2(z + q1)
  CHECK(value(r, "{H1,H} + H RH1") == "fails");
  CheckReport rz = techain_check(h, HaantjesBasis{ch, {zed}, false}, c, SpecialKind::Second, opts());
  CHECK(rz.pass());
  CHECK(value(rz, "H1") == to_string(z * z / 2));
  // potentials of both operators are functions of z alone, so the pair is not independent
  CHECK(techain_check(h, HaantjesBasis{ch, {two, zed}, false}, c, SpecialKind::Second, opts()).verdict ==
        Verdict::Unknown);

  ContactStructure c1 = darboux(1);
  auto ch1 = c1.chart;
  Operator11 zz = Operator11::zero(ch1);
  zz.mat(ch1->z(), ch1->z()) = ch1->coord(2);
  HaantjesBasis b1{ch1, {zz}, false};
  CHECK(techain_check(ch1->coord(2), b1, c1, SpecialKind::Second, opts()).pass());
  // degree-1 generator is rejected at the preconditions
  CheckReport u = techain_check(ch1->coord(1) + ch1->coord(2), b1, c1, SpecialKind::Second, opts());
  CHECK(u.verdict == Verdict::Unknown);
  // second-kind operators do not qualify for the first-kind statement
  CHECK(techain_check(ch1->coord(2), b1, c1, SpecialKind::First, opts()).verdict == Verdict::Unknown);
}

TEST_CASE("involution identity under the theta hypothesis") {
  ContactStructure c = darboux(2);
  auto ch = c.chart;
  Expr q1 = ch->coord(0), q2 = ch->coord(1), z = ch->coord(4);
  Operator11 two = Operator11::zero(ch), zed = Operator11::zero(ch);
  two.mat(ch->z(), ch->z()) = Expr(2);
  zed.mat(ch->z(), ch->z()) = z;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 6; ++t) {
    Expr h = z + Expr(static_cast<int>(rng() % 5) + 1) * q1 + q2 * q1;
    HaantjesBasis b{ch, {Operator11::identity(ch), t % 2 ? two : zed}, false};
    CheckReport r = contact_involution_check(h, b, c, opts());
    CHECK_FALSE(value(r, "H2").empty());
    INFO(r.failed, " ", (r.notes.empty() ? std::string() : r.notes[0]));
    CHECK(r.pass());
  }
  Expr p1 = ch->coord(2);
  HaantjesBasis bad{ch, {two}, false};
  CHECK(contact_involution_check(z + p1, bad, c, opts()).verdict == Verdict::Unknown);
}

TEST_CASE("appendix families") {
  auto ch = darboux_contact_chart(2);
  ContactStructure c = validate_contact(darboux_contact_form(ch), opts());
  Expr q1 = ch->coord(0), q2 = ch->coord(1), p1 = ch->coord(2), p2 = ch->coord(3), z = ch->coord(4);

  AppendixParams a{z, q1 * q2, p1, {}, {}, {}};
  Operator11 f1 = appendix_family(AppendixFamily::F1, ch, a);
  CHECK(f1.mat(0, 1) == q1 * q2);
  CHECK(f1.mat(3, 2) == -(q1 * q2));
  CHECK(check_haantjes(f1, opts()).pass());
  AppendixParams b{p2, exp(z), Expr(1), {}, {}, {}};
  Operator11 f2 = appendix_family(AppendixFamily::F2, ch, b);
  CHECK(f2.mat(0, 3) == p2);
  CHECK(f2.mat(1, 2) == -p2);
  CHECK(check_haantjes(f2, opts()).pass());

  for (auto fam : {AppendixFamily::F1, AppendixFamily::F2}) {
    Operator11 x = appendix_family(fam, ch, abstract_appendix_params(fam, ch, "1"));
    Operator11 y = appendix_family(fam, ch, abstract_appendix_params(fam, ch, "2"));
    CheckReport r = appendix_report(fam, {x, y}, opts());
    CHECK(r.pass());
    CHECK(value(r, "abelian") == "yes");
  }
  AppendixParams s = abstract_appendix_params(AppendixFamily::F3, ch, "1");
  AppendixParams t = s;
  t.qk1z = Expr::function("k2", {0, 1, 2, 4}, {"q1", "q2", "p1", "z"});
  Operator11 x3 = appendix_family(AppendixFamily::F3, ch, s), y3 = appendix_family(AppendixFamily::F3, ch, t);
  CheckReport r3 = appendix_report(AppendixFamily::F3, {x3, y3}, opts());
  CHECK(r3.pass());
  CHECK(value(r3, "abelian") == "no");
  AppendixParams u = s;
  u.qk2z = generic_function(*ch, "other");
  CHECK(check_commute(x3, appendix_family(AppendixFamily::F3, ch, u), opts()).pass());

  AppendixParams bad = s;
  bad.qk1z = p2;
  CHECK_THROWS_AS(appendix_family(AppendixFamily::F3, ch, bad), std::invalid_argument);
  CHECK_THROWS_AS(appendix_family(AppendixFamily::F1, darboux_contact_chart(1), a), std::invalid_argument);

  // The momentum block of the printed families is −Q^T, so dθ-symmetry needs the q-block to vanish.
  CheckReport sym = check_contact_haantjes(f1, c, opts());
  CHECK(sym.verdict == Verdict::Fail);
  CHECK(sym.failed.rfind("dtheta(", 0) == 0);
}

TEST_CASE("appendix general form") {
  auto ch = darboux_contact_chart(2);
  ContactStructure c = validate_contact(darboux_contact_form(ch), opts());
  auto fn = [&](const std::string& n) { return generic_function(*ch, n); };
  GeneralFormParams g{fn("A"), fn("B"), fn("C"), fn("D"), fn("E"), fn("F"),
                      fn("Q1"), fn("Q2"), fn("P1"), fn("P2"), fn("Z")};
  Operator11 k = appendix_general_form(ch, g);
  // tensor-notation readback
  CHECK(k.mat(ch->q(0), ch->p(1)) == g.e);
  CHECK(k.mat(ch->q(1), ch->p(0)) == -g.e);
  CHECK(k.mat(ch->p(1), ch->p(0)) == -g.b);
  CHECK(k.mat(ch->p(0), ch->p(1)) == -g.c);
  CHECK(k.mat(ch->p(0), ch->q(1)) == g.f);
  CHECK(k.mat(ch->p(1), ch->q(0)) == -g.f);
  CHECK(check_contact_haantjes(k, c, opts()).verdict == Verdict::Fail);

  GeneralFormParams off = g;
  off.a = off.b = off.c = off.d = Expr();
  CHECK(check_contact_haantjes(appendix_general_form(ch, off), c, opts(), {ThetaCondition::HamiltonianFields, false})
            .failed.rfind("dtheta(", 0) != 0);

  // every family member sits in the general form
  AppendixParams a = abstract_appendix_params(AppendixFamily::F2, ch, "");
  GeneralFormParams as{a.d, a.b, -a.b, a.d, a.d, Expr(), Expr(), Expr(), Expr(), Expr(), a.kzz};
  CHECK(appendix_general_form(ch, as) == appendix_family(AppendixFamily::F2, ch, a));
}
