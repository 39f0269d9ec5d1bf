#include <doctest.h>

#include <random>

#include "hj/haantjes.hpp"

using namespace hj;

namespace {

SampleOptions opts() { return {42, 16, 1e-9}; }

Operator11 random_operator(const ChartPtr& c, std::mt19937_64& rng) {
  auto k = Operator11::zero(c);
  for (int i = 0; i < c->dim(); ++i)
    for (int j = 0; j < c->dim(); ++j) {
      Expr e(static_cast<int>(rng() % 5) - 2);
      if (rng() % 2) e += c->coord(static_cast<int>(rng() % static_cast<unsigned>(c->dim())));
      if (rng() % 3 == 0) e *= c->coord(static_cast<int>(rng() % static_cast<unsigned>(c->dim())));
      k.mat(i, j) = e;
    }
  return k;
}

Operator11 abstract_diagonal(const ChartPtr& c) {
  std::vector<Expr> d;
  for (int i = 0; i < c->dim(); ++i) d.push_back(generic_function(*c, "lambda" + std::to_string(i + 1)));
  return Operator11::diagonal(c, d);
}

} // namespace

TEST_CASE("Nijenhuis torsion examples") {
  auto c = make_chart("XY", {"x", "y"});
  Expr x = c->coord(0);
  CHECK(nijenhuis_torsion(Operator11::identity(c)).is_zero_node());
  auto k = Operator11::diagonal(c, {Expr(1), x});
  auto tau = nijenhuis_torsion(k);
  // hand expansion: τ(∂x,∂y) = ∂y − K∂y = (1 − x)∂y
  CHECK(tau.at(0, 1)(0).is_zero_node());
  CHECK(tau.at(0, 1)(1) == Expr(1) - x);
  CHECK(tau.at(1, 0)(1) == x - Expr(1));
  auto f = generic_function(*c, "f");
  CHECK(nijenhuis_torsion(f * Operator11::identity(c)).is_zero_node());
}

TEST_CASE("Haantjes torsion examples") {
  auto c = make_chart("XY", {"x", "y"});
  CHECK(haantjes_torsion(Operator11::identity(c)).is_zero_node());
  CHECK(haantjes_torsion(Operator11::diagonal(c, {Expr(1), c->coord(0)})).is_zero_node());
  CHECK(!check_nijenhuis(Operator11::diagonal(c, {Expr(1), c->coord(0)}), opts()).pass());
  for (int n = 2; n <= 5; ++n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    auto ch = make_chart("D", names);
    auto r = check_haantjes(abstract_diagonal(ch), opts());
    CHECK(r.pass());
    CHECK(r.grade == Certainty::ProvenZero);
  }
}

TEST_CASE("a non-Haantjes operator is refuted with a witness") {
  auto c = make_chart("X", {"x", "y", "w"});
  Expr x = c->coord(0), y = c->coord(1);
  // a Jordan-like block with coordinate-dependent coupling
  auto k = Operator11::from(c, {{Expr(0), Expr(1), Expr(0)}, {Expr(0), Expr(0), y}, {x, Expr(0), Expr(0)}});
  auto r = check_haantjes(k, opts());
  CHECK(r.verdict == Verdict::Fail);
  CHECK(r.witness.has_value());
}

TEST_CASE("property: torsions are antisymmetric and tensorial") {
  auto c = make_chart("X", {"a", "b", "e"});
  std::mt19937_64 rng(3);
  Algebroid alg{c, false};
  Expr f = generic_function(*c, "f");
  for (int t = 0; t < 10; ++t) {
    auto k = random_operator(c, rng);
    auto tau = torsion_table(alg, k.mat);
    auto h = haantjes_from_torsion(tau, k.mat);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(is_zero_node(tau.at(i, j) + tau.at(j, i)));
        CHECK(is_zero_node(h.at(i, j) + h.at(j, i)));
        ExprVector lhs = torsion_literal(alg, k.mat, f * alg.basis(i), alg.basis(j));
        CHECK(is_zero_node(lhs - f * tau.at(i, j)));
      }
  }
}

TEST_CASE("Haantjes algebra checks") {
  auto c = darboux_symplectic_chart(2);
  Expr l1 = Expr::function("lambda1", {0, 1, 2, 3}, c->coords);
  Expr l2 = Expr::function("lambda2", {0, 1, 2, 3}, c->coords);
  HaantjesBasis b{c, {Operator11::identity(c), Operator11::diagonal(c, {l1, l1, l2, l2})}, true};
  auto r = check_haantjes_algebra(b, opts());
  CHECK(r.pass());
  CHECK(r.grade == Certainty::ProvenZero);
  bool abelian = false;
  for (const auto& [k, v] : r.values)
    if (k == "abelian") abelian = v == "true";
  CHECK(abelian);

  auto xy = make_chart("XY", {"x", "y"});
  auto n = Operator11::from(xy, {{Expr(0), Expr(1)}, {Expr(0), Expr(0)}});
  auto d = Operator11::diagonal(xy, {Expr(1), Expr(2)});
  CHECK(!check_commute(n, d, opts()).pass());
  HaantjesBasis nb{xy, {n, d}, true};
  CHECK(check_haantjes_algebra(nb, opts()).verdict == Verdict::Fail);
}

TEST_CASE("fresh names avoid collisions") {
  auto c = make_chart("XY", {"x", "y"});
  std::vector<Expr> es{generic_function(*c, "f"), generic_function(*c, "f_1")};
  CHECK(fresh_function_name("f", es) == "f_2");
  CHECK(fresh_function_name("g", es) == "g");
}

TEST_CASE("chains") {
  auto c = darboux_symplectic_chart(1);
  Expr q = c->coord(0), p = c->coord(1);
  SUBCASE("identity") {
    HaantjesBasis b{c, {Operator11::identity(c)}, false};
    auto cr = verify_chain(q * q * p + p, b, opts());
    CHECK(cr.report.pass());
    REQUIRE(cr.potentials[0]);
    CHECK(*cr.potentials[0] == q * q * p + p);
  }
  SUBCASE("diagonal with radial potential") {
    HaantjesBasis b{c, {Operator11::diagonal(c, {q, p})}, false};
    auto cr = verify_chain(q + p, b, opts());
    CHECK(cr.report.pass());
    REQUIRE(cr.potentials[0]);
    CHECK(*cr.potentials[0] == Rational(1, 2) * q * q + Rational(1, 2) * p * p);
    CHECK(cr.frobenius.pass());
  }
  SUBCASE("non-closed form") {
    HaantjesBasis b{c, {Operator11::diagonal(c, {p, Expr(1)})}, false};
    auto cr = verify_chain(q + p, b, opts());
    CHECK(cr.report.verdict == Verdict::Fail);
    CHECK(cr.closed[0].nonzero());
    CHECK(!cr.potentials[0]);
  }
  SUBCASE("dependent forms") {
    HaantjesBasis b{c, {Operator11::identity(c), Expr(2) * Operator11::identity(c)}, false};
    auto cr = verify_chain(q + p, b, opts());
    CHECK(cr.report.verdict == Verdict::Fail);
    CHECK(!cr.independence.independent);
  }
}

TEST_CASE("Frobenius tests") {
  auto r3 = make_chart("R3", {"x", "y", "w"});
  Expr x = r3->coord(0), y = r3->coord(1);
  CHECK(frobenius_codistribution({differential(r3, x * y + exp(y))}, opts()).pass());
  CHECK(frobenius_distribution({VectorField::basis(r3, 0), VectorField::basis(r3, 1)}, opts()).pass());

  auto c = darboux_contact_chart(1);
  Expr p = c->coord(1);
  auto kernel = std::vector<VectorField>{VectorField::basis(c, 1), VectorField::basis(c, 0) + p * VectorField::basis(c, 2)};
  auto r = frobenius_distribution(kernel, opts());
  CHECK(r.verdict == Verdict::Fail);

  // θ itself spans a non-integrable codistribution (θ∧dθ ≠ 0)
  KForm theta = coordinate_form(c, 2) - p * coordinate_form(c, 0);
  CHECK(frobenius_codistribution({theta}, opts()).verdict == Verdict::Fail);
  // repeated forms are flagged, not fatal
  auto dup = frobenius_codistribution({differential(r3, x), differential(r3, x)}, opts());
  CHECK(dup.pass());
  CHECK(!dup.notes.empty());
}

TEST_CASE("invariance condition") {
  auto c = make_chart("X2", {"x1", "x2"});
  auto dx1 = coordinate_form(c, 0), dx2 = coordinate_form(c, 1);
  CHECK(invariance_check(Operator11::identity(c), {dx1 + dx2}, opts()).pass());
  auto d = Operator11::diagonal(c, {generic_function(*c, "l1"), generic_function(*c, "l2")});
  CHECK(invariance_check(d, {dx1}, opts()).pass());
  auto n = Operator11::from(c, {{Expr(0), Expr(1)}, {Expr(0), Expr(0)}});
  // K^T dx2 = 0, K^T dx1 = dx2
  CHECK(invariance_check(n, {dx2}, opts()).pass());
  CHECK(invariance_check(n, {dx1}, opts()).verdict == Verdict::Fail);
}

TEST_CASE("spectral reports") {
  auto c = darboux_symplectic_chart(2);
  Expr q1 = c->coord(0), p1 = c->coord(2);
  auto k = Operator11::diagonal(c, {q1, q1, p1, p1});
  std::vector<std::map<std::string, double>> pts{{{"q1", 0.3}, {"q2", 1.0}, {"p1", -1.7}, {"p2", 2.0}},
                                                 {{"q1", 2.5}, {"q2", 0.1}, {"p1", 0.7}, {"p2", -1.0}}};
  auto rep = spectral_report(k, pts, opts());
  CHECK(rep.all_even);
  CHECK(rep.report.pass());
  REQUIRE(rep.points[0].clusters.size() == 2);
  CHECK(rep.points[0].clusters[0].algebraic == 2);
  CHECK(rep.points[0].clusters[1].algebraic == 2);

  auto x3 = make_chart("X3", {"a", "b", "e"});
  auto odd = spectral_report(Operator11::diagonal(x3, {Expr(1), Expr(2), Expr(3)}), {{{"a", 0}, {"b", 0}, {"e", 0}}},
                             opts());
  CHECK(!odd.all_even);
  CHECK(odd.report.verdict == Verdict::Fail);

  auto id = spectral_report(Operator11::identity(x3), {{{"a", 1}, {"b", 2}, {"e", 3}}}, opts());
  REQUIRE(id.points[0].clusters.size() == 1);
  CHECK(id.points[0].clusters[0].algebraic == 3);
  CHECK(id.points[0].clusters[0].geometric == 3);
  CHECK(id.points[0].clusters[0].riesz_index == 1);

  auto xy = make_chart("XY", {"x", "y"});
  auto jordan = spectral_report(Operator11::from(xy, {{Expr(1), Expr(1)}, {Expr(0), Expr(1)}}), {{{"x", 0}, {"y", 0}}},
                                opts());
  REQUIRE(jordan.points[0].clusters.size() == 1);
  CHECK(jordan.points[0].clusters[0].algebraic == 2);
  CHECK(jordan.points[0].clusters[0].geometric == 1);
  CHECK(jordan.points[0].clusters[0].riesz_index == 2);

  auto missing = spectral_report(k, {{{"q1", 1.0}}}, opts());
  CHECK(!missing.points[0].ok);
  CHECK(missing.report.verdict == Verdict::Unknown);
}
