#include <doctest.h>

#include <random>

#include "hj/lcs.hpp"

using namespace hj;

namespace {

SampleOptions opts() { return {13, 16, 1e-9}; }

LCSStructure local(const ChartPtr& c, const Expr& l) {
  auto [omega, eta] = lcs_local_forms(c, l);
  return validate_lcs(omega, eta, opts());
}

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

} // namespace

TEST_CASE("validate_lcs") {
  auto c1 = lcs_chart(1);
  Expr q = c1->coord(0);
  LCSStructure a = local(c1, q);
  CHECK(a.valid());
  CHECK(mat_mul(a.flat, a.sharp) == identity_matrix(2));
  CHECK(local(c1, Expr()).valid());

  auto c2 = lcs_chart(2);
  KForm omega = lcs_local_forms(c2, Expr()).first;
  LCSStructure bad = validate_lcs(omega, coordinate_form(c2, c2->p(0)), opts());
  CHECK(bad.validity.verdict == Verdict::Fail);
  CHECK(bad.validity.failed == "d Omega - eta ^ Omega");
  // closed η but dΩ ≠ η∧Ω
  LCSStructure wrong = validate_lcs(lcs_local_forms(c2, c2->coord(0)).first, Expr(2) * coordinate_form(c2, 0), opts());
  CHECK(wrong.validity.verdict == Verdict::Fail);
  KForm eta_open(c2, 1);
  eta_open.add({0}, c2->coord(1));
  CHECK(validate_lcs(omega, eta_open, opts()).validity.failed == "d eta");
  CHECK(local(c2, c2->coord(0) * c2->coord(3) + c2->coord(1)).valid());
  CHECK_THROWS_AS(validate_lcs(KForm(darboux_contact_chart(1), 2), KForm(darboux_contact_chart(1), 1), opts()),
                  std::invalid_argument);
  KForm degenerate(c2, 2);
  degenerate.add({0, 2}, Expr(1));
  CHECK(validate_lcs(degenerate, KForm(c2, 1), opts()).validity.failed == "det(Omega)");
}

TEST_CASE("induced Jacobi structure of an LCS pair") {
  auto c1 = lcs_chart(1);
  Expr q = c1->coord(0);
  JacobiStructure j0 = induced_jacobi_from_lcs(local(c1, Expr()), opts(), Expr());
  CHECK(j0.valid());
  CHECK(j0.matrix()(0, 1) == Expr(1));
  CHECK(j0.e.is_zero_node());
  JacobiStructure jq = induced_jacobi_from_lcs(local(c1, q), opts(), q);
  CHECK(jq.valid());
  CHECK(value(jq.validity, "local_display") == "matches");
  CHECK(zero(jq.matrix()(0, 1) - exp(-q)));
  CHECK(jq.e.comp(0).is_zero_node());
  CHECK(zero(jq.e.comp(1) + exp(-q)));
  auto c2 = lcs_chart(2);
  Expr l = c2->coord(0) + c2->coord(3) * c2->coord(1);
  JacobiStructure j2 = induced_jacobi_from_lcs(local(c2, l), opts(), l);
  CHECK(j2.valid());
  CHECK(value(j2.validity, "local_display") == "matches");
}

TEST_CASE("LCS Hamiltonian dynamics and the bracket triangle") {
  std::mt19937_64 rng(8);
  CHECK(lcs_hamiltonian_vf(Expr(1), local(lcs_chart(1), Expr())).is_zero_node());
  for (int n : {1, 2}) {
    auto c = lcs_chart(n);
    for (const Expr& l : {Expr(), c->coord(0), c->coord(0) + c->coord(n)}) {
      LCSStructure s = local(c, l);
      REQUIRE(s.valid());
      JacobiStructure j = induced_jacobi_from_lcs(s, opts());
      for (int t = 0; t < 4; ++t) {
        Expr f = random_poly(c, rng), g = random_poly(c, rng);
        VectorField xf = lcs_hamiltonian_vf(f, s), xg = lcs_hamiltonian_vf(g, s);
        // ι_{X_f}Ω = df − fη
        KForm lhs = interior_product(xf, s.omega);
        std::vector<Expr> res;
        for (const auto& e : components(lhs - (differential(c, f) - f * s.eta))) res.push_back(simplify(e));
        for (const auto& e : res) CHECK(zero(e));
        Expr b = lcs_bracket(f, g, s);
        CHECK(zero(b + lcs_bracket(g, f, s)));
        CHECK(zero(b - evaluate(s.omega, xf, xg)));
        CHECK(zero(b - jacobi_bracket(f, g, j)));
        CHECK(zero(evaluate(s.eta, xf) + j.e(f)));
        // Ḣ = X_H H = H η(X_H)
        CHECK(zero(xf(f) - f * evaluate(s.eta, xf)));
      }
    }
  }
}

TEST_CASE("LCSH compatibility and eta(KE)") {
  auto c2 = lcs_chart(2);
  LCSStructure s = local(c2, c2->coord(0) + c2->coord(3));
  Expr lam = generic_function(*c2, "lambda"), mu = generic_function(*c2, "mu");
  CHECK(check_lcsh(Operator11::identity(c2), s, opts()).pass());
  CHECK(check_lcsh(Operator11::diagonal(c2, {lam, lam, lam, lam}), s, opts()).pass());
  // chart order (q1, q2, p1, p2): pairs (q1,p1) and (q2,p2)
  CHECK(check_lcsh(Operator11::diagonal(c2, {lam, mu, lam, mu}), s, opts()).pass());
  CHECK(check_lcsh(Operator11::diagonal(c2, {lam, lam, mu, mu}), s, opts()).verdict == Verdict::Fail);

  CHECK(eta_KE_check(Operator11::identity(c2), s, opts()).pass());
  CHECK(eta_KE_check(Operator11::diagonal(c2, {lam, mu, lam, mu}), s, opts()).pass());
  // Ω(E, KE) = 0 for any Ω-symmetric K; a non-compatible K breaks it
  // K = ∂p2⊗dq2 with E = e^{−l}(∂q2 − ∂p1): η(KE) = e^{−l}
  Operator11 k = Operator11::zero(c2);
  k.mat(c2->p(1), c2->q(1)) = Expr(1);
  CHECK(check_lcsh(k, s, opts()).verdict == Verdict::Fail);
  CheckReport r = eta_KE_check(k, s, opts());
  CHECK(r.verdict == Verdict::Fail);
}

TEST_CASE("LCS involution identity") {
  auto c2 = lcs_chart(2);
  Expr q1 = c2->coord(0), q2 = c2->coord(1), p1 = c2->coord(2), p2 = c2->coord(3);
  Operator11 k = Operator11::diagonal(c2, {Expr(1), Expr(2), Expr(1), Expr(2)});
  Expr f1 = p1 * p1 / 2 + q1 * q1, f2 = p2 * p2 / 2 + q2 * q2 * q2;
  Expr h = f1 + f2;
  for (const Expr& l : {Expr(), q1 + p1, q1 * p1}) {
    LCSStructure s = local(c2, l);
    CheckReport r = lcs_involution_check(h, HaantjesBasis{c2, {Operator11::identity(c2), k}, true}, s, opts());
    INFO(r.failed, " ", (r.notes.empty() ? std::string() : r.notes[0]));
    CHECK(r.pass());
    CHECK(r.grade == Certainty::ProvenZero);
    CHECK(value(r, "H2") == to_string(f1 + Expr(2) * f2));
  }

  auto c1 = lcs_chart(1);
  Expr q = c1->coord(0), p = c1->coord(1);
  LCSStructure s1 = local(c1, q);
  Expr h1 = p * p / 2 + q * q;
  CheckReport single = lcs_involution_check(h1, HaantjesBasis{c1, {Operator11::diagonal(c1, {h1, h1})}, false}, s1,
                                            opts());
  CHECK(single.pass());
  CHECK(value(single, "H1") == to_string(h1 * h1 / 2));

  Operator11 bad = Operator11::zero(c2);
  bad.mat(c2->q(0), c2->p(1)) = Expr(1);
  CheckReport u = lcs_involution_check(h, HaantjesBasis{c2, {bad}, false}, local(c2, q1 + p1), opts());
  CHECK(u.verdict == Verdict::Unknown);
  CHECK(u.failed == "precondition");
}
