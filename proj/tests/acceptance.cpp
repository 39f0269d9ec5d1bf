// Acceptance run: one line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hj/cli.hpp"
#include "hj/contact.hpp"
#include "hj/extended.hpp"
#include "hj/haantjes.hpp"
#include "hj/jacobi.hpp"
#include "hj/lcs.hpp"
#include "hj/numeric.hpp"

using namespace hj;

namespace {

SampleOptions opts() { return {7, 16, 1e-9}; }

/// Collects the failures of one criterion.
struct Tally {
  int checks = 0;
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok) failures.push_back(what);
  }
  void proven(const CheckReport& r, const std::string& what) {
    expect(r.pass() && r.grade == Certainty::ProvenZero,
           what + " [" + verdict_name(r.verdict) + ", " + certainty_name(r.grade) + ", " + r.failed + "]");
  }
  void zero(const Expr& e, const std::string& what) {
    expect(is_zero(e, opts()).proven_zero(), what + " = " + to_string(e));
  }
};

std::string value_of(const CheckReport& r, const std::string& key) {
  for (const auto& [k, v] : r.values)
    if (k == key) return v;
  return {};
}

Expr small_poly(const ChartPtr& c, std::mt19937_64& rng) {
  Expr e(static_cast<int>(rng() % 5) - 2);
  auto coord = [&] { return c->coord(static_cast<int>(rng() % static_cast<unsigned>(c->dim()))); };
  if (rng() % 2) e += Expr(static_cast<int>(rng() % 3) + 1) * coord();
  if (rng() % 3 == 0) e *= coord();
  return e;
}

Expr random_poly(const ChartPtr& c, std::mt19937_64& rng, int terms, int max_deg) {
  Expr e;
  for (int t = 0; t < terms; ++t) {
    Expr m(static_cast<int>(rng() % 7) - 3);
    int deg = static_cast<int>(rng() % static_cast<unsigned>(max_deg + 1));
    for (int d = 0; d < deg; ++d) m *= c->coord(static_cast<int>(rng() % static_cast<unsigned>(c->dim())));
    e += m;
  }
  return e;
}

/// Identity on (q, p) with K^z_{q_i} = p_i and K^z_z = kzz.
Operator11 coupled_identity(const ChartPtr& c, const Expr& kzz) {
  Operator11 k = Operator11::zero(c);
  for (int i = 0; i < 2 * c->n; ++i) k.mat(i, i) = Expr(1);
  for (int i = 0; i < c->n; ++i) k.mat(c->z(), c->q(i)) = c->coord(c->p(i));
  k.mat(c->z(), c->z()) = kzz;
  return k;
}

/// (diag(1, 1, 0), p ∂p, 0, 0) on the n = 1 Darboux chart.
ExtendedOperator momentum_projection(const ChartPtr& c) {
  return ExtendedOperator::from(Operator11::diagonal(c, {Expr(1), Expr(1), Expr(0)}),
                                VectorField::from(c, {Expr(0), c->coord(1), Expr(0)}), zero_form(c, 1), Expr(0));
}

// 1 -------------------------------------------------------------------------

void diagonal_vanishing(Tally& t) {
  for (int n = 2; n <= 5; ++n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    auto c = make_chart("R" + std::to_string(n), names);
    std::vector<Expr> d;
    for (int i = 0; i < n; ++i) d.push_back(generic_function(*c, "l" + std::to_string(i + 1)));
    auto h = haantjes_torsion(Operator11::diagonal(c, d));
    for (const Expr& e : h.components())
      t.expect(is_zero(e, opts()).proven_zero(), "dim " + std::to_string(n) + " component " + to_string(e));
  }
}

// 2 -------------------------------------------------------------------------

void appendix_reproduction(Tally& t) {
  auto ch = darboux_contact_chart(2);
  for (auto fam : {AppendixFamily::F1, AppendixFamily::F2, AppendixFamily::F3}) {
    auto k = appendix_family(fam, ch, abstract_appendix_params(fam, ch, "a"));
    t.proven(check_haantjes(k, opts()), family_name(fam) + " haantjes");
  }

  AppendixParams p = abstract_appendix_params(AppendixFamily::F1, ch, "a");
  const Expr& d = p.d;
  const Expr& b = p.b;
  Expr o;
  auto f1 = Operator11::from(ch, {{d, b, o, o, o}, {o, d, o, o, o}, {o, o, -d, o, o}, {o, o, -b, -d, o},
                                  {o, o, o, o, p.kzz}});
  t.expect(appendix_family(AppendixFamily::F1, ch, p) == f1, "F1 matrix");
  AppendixParams p2 = abstract_appendix_params(AppendixFamily::F2, ch, "a");
  auto f2 = Operator11::from(ch, {{p2.d, p2.b, o, p2.d, o}, {-p2.b, p2.d, -p2.d, o, o}, {o, o, -p2.d, p2.b, o},
                                  {o, o, -p2.b, -p2.d, o}, {o, o, o, o, p2.kzz}});
  t.expect(appendix_family(AppendixFamily::F2, ch, p2) == f2, "F2 matrix");

  for (auto fam : {AppendixFamily::F1, AppendixFamily::F2}) {
    auto x = appendix_family(fam, ch, abstract_appendix_params(fam, ch, "1"));
    auto y = appendix_family(fam, ch, abstract_appendix_params(fam, ch, "2"));
    CheckReport r = appendix_report(fam, {x, y}, opts());
    t.proven(r, family_name(fam) + " report");
    t.expect(value_of(r, "abelian") == "yes", family_name(fam) + " abelian");
    t.proven(check_commute(x, y, opts()), family_name(fam) + " commute");
  }

  AppendixParams s = abstract_appendix_params(AppendixFamily::F3, ch, "1");
  AppendixParams u = s;
  u.qk1z = Expr::function("kk", {0, 1, 2, 4}, {"q1", "q2", "p1", "z"});
  auto x3 = appendix_family(AppendixFamily::F3, ch, s);
  auto y3 = appendix_family(AppendixFamily::F3, ch, u);
  t.proven(check_haantjes(y3, opts()), "F3 second instance haantjes");
  CheckReport c3 = check_commute(x3, y3, opts());
  t.expect(c3.verdict == Verdict::Fail && c3.grade == Certainty::ProvenNonzero, "F3 instances commute");
  t.expect(value_of(appendix_report(AppendixFamily::F3, {x3, y3}, opts()), "abelian") == "no", "F3 abelian flag");
}

// 3 -------------------------------------------------------------------------

void worked_example(Tally& t) {
  auto c = darboux_contact_chart(1);
  ContactStructure cs = validate_contact(darboux_contact_form(c), opts());
  t.expect(cs.valid(), "contact structure");
  Expr p = c->coord(1), z = c->coord(2);
  Expr h = p - z;
  t.expect(cs.reeb == VectorField::basis(c, 2), "Reeb field " + to_string(cs.reeb));
  VectorField xh = contact_hamiltonian_vf(h, cs);
  t.expect(xh == VectorField::from(c, {Expr(1), p, z}), "X_H " + to_string(xh));

  ExtendedBasis basis{c, {ExtendedOperator::identity(c), momentum_projection(c)}, true};
  ExtChainReport chain = verify_ext_chain(h, basis, opts());
  t.proven(chain.report, "extended chain");
  t.expect(chain.potentials.size() == 2 && chain.potentials[0] == h && chain.potentials[1] == p, "potentials");
  for (const Expr& hi : chain.potentials) {
    t.proven(is_dissipated(hi, h, cs, opts()), "dissipation of " + to_string(hi));
    // X_H H_i = −H_i RH
    t.zero(xh(hi) + hi * cs.reeb(h), "rate for " + to_string(hi));
  }
  JacobiStructure j = induced_jacobi_from_contact(cs, opts());
  t.expect(j.valid(), "induced Jacobi structure");
  Expr br = jacobi_bracket(h, p, j);
  t.expect(br.is_zero_node(), "{H1, H2} = " + to_string(br));
}

// 4 -------------------------------------------------------------------------

void theorem_instances(Tally& t) {
  struct Instance {
    std::string name;
    Expr h;
    ExtendedBasis basis;
    JacobiStructure j;
  };
  std::vector<Instance> inst;

  auto c1 = darboux_contact_chart(1);
  JacobiStructure j1 = induced_jacobi_from_contact(validate_contact(darboux_contact_form(c1), opts()), opts());
  Expr p = c1->coord(1), z = c1->coord(2);
  inst.push_back({"p - z", p - z, {c1, {ExtendedOperator::identity(c1), momentum_projection(c1)}, true}, j1});
  inst.push_back({"p^2 + z", p * p + z, {c1, {ExtendedOperator::identity(c1)}, true}, j1});

  auto c2 = darboux_contact_chart(2);
  JacobiStructure j2 = induced_jacobi_from_contact(validate_contact(darboux_contact_form(c2), opts()), opts());
  Expr p1 = c2->coord(2), p2 = c2->coord(3), z2 = c2->coord(4);
  // (diag(1,1,1,1,0), p1 ∂p1 + p2 ∂p2, 0, 0) takes p1 + p2 − z to p1 + p2
  ExtendedOperator proj2 = ExtendedOperator::from(
      Operator11::diagonal(c2, {Expr(1), Expr(1), Expr(1), Expr(1), Expr(0)}),
      VectorField::from(c2, {Expr(0), Expr(0), p1, p2, Expr(0)}), zero_form(c2, 1), Expr(0));
  inst.push_back({"p1 + p2 - z", p1 + p2 - z2, {c2, {ExtendedOperator::identity(c2), proj2}, true}, j2});

  Expr jj = c1->coord(1);
  auto aa1 = build_action_angle_basis(c1, {jj, Expr(3) * jj}, opts());
  t.proven(aa1.report, "action-angle n=1 builder");
  inst.push_back({"action-angle n=1", jj, aa1.basis, j1});

  Expr ja = c2->coord(2), jb = c2->coord(3);
  auto aa2 = build_action_angle_basis(c2, {ja + Expr(2) * jb, ja, Expr(3) * jb}, opts());
  t.proven(aa2.report, "action-angle n=2 builder");
  inst.push_back({"action-angle n=2", ja + Expr(2) * jb, aa2.basis, j2});

  auto aa3 = build_action_angle_basis(c2, {Expr(2) * ja - jb, Expr(5) * ja}, opts());
  t.proven(aa3.report, "action-angle n=2 partial builder");
  inst.push_back({"action-angle n=2 partial", Expr(2) * ja - jb, aa3.basis, j2});

  for (const Instance& in : inst) {
    t.proven(thm_main_check(in.h, in.basis, in.j, opts()), in.name);
    ExtChainReport chain = verify_ext_chain(in.h, in.basis, opts());
    t.proven(chain.report, in.name + " chain");
    VectorField xh = hamiltonian_vf(in.h, in.j);
    for (std::size_t a = 0; a < chain.potentials.size(); ++a) {
      const Expr& ha = chain.potentials[a];
      t.zero(jacobi_bracket(ha, in.h, in.j), in.name + " {H_i, H}");
      t.zero(xh(ha) + ha * in.j.e(in.h), in.name + " dissipation");
      for (std::size_t b = a + 1; b < chain.potentials.size(); ++b)
        t.zero(jacobi_bracket(ha, chain.potentials[b], in.j), in.name + " {H_i, H_j}");
    }
  }
  t.expect(inst.size() >= 5, "instance count");
}

// 5 -------------------------------------------------------------------------

void dual_routes(Tally& t) {
  auto c = darboux_contact_chart(1);
  JacobiStructure j = induced_jacobi_from_contact(validate_contact(darboux_contact_form(c), opts()), opts());
  std::mt19937_64 rng(2024);
  int pass = 0, fail = 0;
  for (int i = 0; i < 50; ++i) {
    ExtendedOperator k;
    if (i % 4 == 0) {
      // f·Id + a·P is compatible for every function f and constant a
      ExtendedOperator id = ExtendedOperator::identity(c), pr = momentum_projection(c);
      Expr f = small_poly(c, rng), a(static_cast<int>(rng() % 5) - 2);
      k = ExtendedOperator::from_matrix(c, f * id.matrix() + a * pr.matrix());
    } else {
      ExprMatrix m = zero_matrix(4, 4);
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
          if (rng() % 2) m(r, s) = small_poly(c, rng);
      k = ExtendedOperator::from_matrix(c, m);
    }
    EjhReport r = check_ejh(k, j, opts());
    t.expect(r.routes_agree, "disagreement on operator " + std::to_string(i));
    t.expect(r.operator_route.verdict == r.system_route.verdict, "route verdicts differ on " + std::to_string(i));
    if (r.report.pass()) ++pass;
    if (r.report.verdict == Verdict::Fail) ++fail;
  }
  t.note = std::to_string(pass) + " compatible, " + std::to_string(fail) + " incompatible";
  t.expect(pass > 0 && fail > 0, "corpus lacks passing or failing operators");
}

// 6 -------------------------------------------------------------------------

void sn_calibration(Tally& t) {
  std::mt19937_64 rng(66);
  for (int n = 1; n <= 2; ++n) {
    auto c = darboux_contact_chart(n);
    JacobiStructure j = induced_jacobi_from_contact(validate_contact(darboux_contact_form(c), opts()), opts());
    t.proven(j.validity, "Jacobi identities n=" + std::to_string(n));
    KVector e = to_multivector(j.e);
    KVector ll = schouten_bracket(j.lambda, j.lambda) - Expr(2) * wedge(e, j.lambda);
    for (const Expr& x : components(ll)) t.zero(x, "[L,L] - 2 E^L");
    for (const Expr& x : components(schouten_bracket(j.lambda, e))) t.zero(x, "[L,E]");

    std::vector<std::pair<Expr, Expr>> pairs;
    for (int i = 0; i < 10; ++i) pairs.emplace_back(random_poly(c, rng, 3, 2), random_poly(c, rng, 3, 2));
    Poissonization pz = poissonize(j, pairs, opts());
    t.proven(pz.report, "poissonize n=" + std::to_string(n));
    for (const Expr& x : components(schouten_bracket(pz.p, pz.p))) t.zero(x, "[P,P]");
    Expr et = exp(pz.chart->coord(pz.t_index));
    for (const auto& [f, g] : pairs) {
      Expr lhs = evaluate(pz.p, differential(pz.chart, et * f), differential(pz.chart, et * g));
      t.zero(simplify(lhs - et * jacobi_bracket(f, g, j)), "lifted bracket");
    }
  }
}

// 7 -------------------------------------------------------------------------

using Mat = std::vector<std::vector<double>>;

Mat eval_matrix(const Operator11& k, const std::vector<double>& x) {
  NumericEnv env;
  for (int i = 0; i < k.chart->dim(); ++i) env.coords[k.chart->coords[static_cast<std::size_t>(i)]] = x[static_cast<std::size_t>(i)];
  const int n = k.dim();
  Mat m(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = eval_numeric(k.mat(i, j), env);
  return m;
}

/// tau[a][i][j] and h[a][i][j] from central differences of the operator entries.
struct Torsions {
  std::vector<Mat> tau, h;
};

Torsions finite_difference_torsions(const Operator11& k, const std::vector<double>& x, double step) {
  const auto n = static_cast<std::size_t>(k.dim());
  Mat K = eval_matrix(k, x);
  // dK[b][a][j] = ∂_b K^a_j
  std::vector<Mat> dK(n);
  for (std::size_t b = 0; b < n; ++b) {
    auto xp = x, xm = x;
    xp[b] += step;
    xm[b] -= step;
    Mat kp = eval_matrix(k, xp), km = eval_matrix(k, xm);
    dK[b] = Mat(n, std::vector<double>(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t j = 0; j < n; ++j) dK[b][a][j] = (kp[a][j] - km[a][j]) / (2 * step);
  }
  auto cube = [n] { return std::vector<Mat>(n, Mat(n, std::vector<double>(n, 0.0))); };
  Torsions out{cube(), cube()};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t b = 0; b < n; ++b) s += K[b][i] * dK[b][a][j] - K[b][j] * dK[b][a][i];
        for (std::size_t c = 0; c < n; ++c) s -= K[a][c] * (dK[i][c][j] - dK[j][c][i]);
        out.tau[a][i][j] = s;
      }
  Mat K2(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) K2[a][b] += K[a][c] * K[c][b];
  const auto& tau = out.tau;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t b = 0; b < n; ++b) s += K2[a][b] * tau[b][i][j];
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t c = 0; c < n; ++c) s += tau[a][b][c] * K[b][i] * K[c][j];
        for (std::size_t b = 0; b < n; ++b) {
          double inner = 0;
          for (std::size_t c = 0; c < n; ++c) inner += tau[b][c][j] * K[c][i] + tau[b][i][c] * K[c][j];
          s -= K[a][b] * inner;
        }
        out.h[a][i][j] = s;
      }
  return out;
}

Operator11 corpus_operator(const ChartPtr& c, std::mt19937_64& rng) {
  const int n = c->dim();
  Operator11 k = Operator11::zero(c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (rng() % 3 == 0) continue;
      Expr e = random_poly(c, rng, 2, 2);
      if (rng() % 4 == 0) e += exp(c->coord(static_cast<int>(rng() % static_cast<unsigned>(n))) / Expr(2));
      k.mat(i, j) = e;
    }
  return k;
}

void numeric_cross_check(Tally& t) {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  const double step = 1e-5;
  double worst = 0;
  for (int m = 0; m < 20; ++m) {
    const int n = 2 + m % 3;
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    auto c = make_chart("R", names);
    Operator11 k = corpus_operator(c, rng);
    auto tau = nijenhuis_torsion(k);
    auto hh = haantjes_torsion(k);
    for (int pt = 0; pt < 10; ++pt) {
      std::vector<double> x(static_cast<std::size_t>(n));
      NumericEnv env;
      for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = coord(rng);
        env.coords[names[static_cast<std::size_t>(i)]] = x[static_cast<std::size_t>(i)];
      }
      Torsions fd = finite_difference_torsions(k, x, step);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int a = 0; a < n; ++a) {
            const auto ua = static_cast<std::size_t>(a), ui = static_cast<std::size_t>(i),
                       uj = static_cast<std::size_t>(j);
            double st = eval_numeric(tau.at(i, j)(a), env);
            double sh = eval_numeric(hh.at(i, j)(a), env);
            double et = std::abs(st - fd.tau[ua][ui][uj]) / std::max({1.0, std::abs(st), std::abs(fd.tau[ua][ui][uj])});
            double eh = std::abs(sh - fd.h[ua][ui][uj]) / std::max({1.0, std::abs(sh), std::abs(fd.h[ua][ui][uj])});
            worst = std::max({worst, et, eh});
          }
    }
  }
  std::ostringstream s;
  s << "worst relative error " << worst;
  t.note = s.str();
  t.expect(worst < 1e-5, s.str());
}

// 8 -------------------------------------------------------------------------

void frobenius_link(Tally& t) {
  std::mt19937_64 rng(88);
  int certified = 0;
  for (int i = 0; i < 40; ++i) {
    const int n = 2 + i % 3;
    std::vector<std::string> names;
    for (int a = 0; a < n; ++a) names.push_back("x" + std::to_string(a + 1));
    auto c = make_chart("R", names);
    // separable H with diagonal operators whose entries depend on their own coordinate pass; mixed ones mostly fail
    Expr h;
    for (int a = 0; a < n; ++a) {
      Expr x = c->coord(a);
      h += Expr(static_cast<int>(rng() % 3) + 1) * x + Expr(static_cast<int>(rng() % 3)) * x * x;
    }
    if (i % 4 == 3) h += c->coord(0) * c->coord(1);
    std::vector<Operator11> ops{Operator11::identity(c)};
    std::vector<Expr> d;
    for (int a = 0; a < n; ++a) {
      Expr x = c->coord(a);
      d.push_back(Expr(static_cast<int>(rng() % 4) + 1) + (rng() % 2 ? x : Expr()));
    }
    if (i % 5 == 4) d[0] += c->coord(n - 1);
    ops.push_back(Operator11::diagonal(c, d));
    ChainReport cr = verify_chain(h, HaantjesBasis{c, ops, false}, opts());
    if (!cr.report.pass()) continue;
    ++certified;
    t.proven(frobenius_codistribution(cr.forms, opts()), "codistribution of chain " + std::to_string(i));
    t.expect(cr.frobenius.pass(), "chain report Frobenius " + std::to_string(i));
  }
  t.note = std::to_string(certified) + " certified chains";
  t.expect(certified >= 10, "only " + std::to_string(certified) + " certified chains");

  auto c = darboux_contact_chart(1);
  Expr p = c->coord(1);
  CheckReport r = frobenius_distribution({VectorField::basis(c, 0) + p * VectorField::basis(c, 2), VectorField::basis(c, 1)},
                                         opts());
  t.expect(r.verdict == Verdict::Fail, "contact kernel distribution integrable");
}

// 9 -------------------------------------------------------------------------

void contact_lcs_instances(Tally& t) {
  ContactStructure c1 = validate_contact(darboux_contact_form(darboux_contact_chart(1)), opts());
  auto ch1 = c1.chart;
  t.proven(techain_check(ch1->coord(0), HaantjesBasis{ch1, {coupled_identity(ch1, Expr())}, false}, c1,
                         SpecialKind::First, opts()),
           "first kind n=1");

  ContactStructure c2 = validate_contact(darboux_contact_form(darboux_contact_chart(2)), opts());
  auto ch2 = c2.chart;
  Expr q1 = ch2->coord(0), q2 = ch2->coord(1), p1 = ch2->coord(2), p2 = ch2->coord(3), z = ch2->coord(4);
  Operator11 k2 = Operator11::diagonal(ch2, {Expr(1), Expr(2), Expr(1), Expr(2), Expr()});
  k2.mat(ch2->z(), ch2->q(0)) = p1;
  k2.mat(ch2->z(), ch2->q(1)) = Expr(2) * p2;
  Expr h = p1 * p1 / 2 + p2 * p2 / 2 + q1 * q1 + q2 * q2 * q2;
  HaantjesBasis first2{ch2, {coupled_identity(ch2, Expr()), k2}, false};
  t.expect(classify_special_kind(k2, c2, opts()).kind == SpecialKind::First, "k2 classified first kind");
  t.proven(techain_check(h, first2, c2, SpecialKind::First, opts()), "first kind n=2");

  Operator11 two = Operator11::zero(ch2), zed = Operator11::zero(ch2);
  two.mat(ch2->z(), ch2->z()) = Expr(2);
  zed.mat(ch2->z(), ch2->z()) = z;
  t.expect(classify_special_kind(two, c2, opts()).kind == SpecialKind::Second, "2 dz classified second kind");
  t.proven(techain_check(z + q1, HaantjesBasis{ch2, {two}, false}, c2, SpecialKind::Second, opts()),
           "second kind, constant");
  t.proven(techain_check(z + q1, HaantjesBasis{ch2, {zed}, false}, c2, SpecialKind::Second, opts()),
           "second kind, z");

  auto lc = lcs_chart(2);
  Expr lq1 = lc->coord(0), lq2 = lc->coord(1), lp1 = lc->coord(2), lp2 = lc->coord(3);
  Operator11 kd = Operator11::diagonal(lc, {Expr(1), Expr(2), Expr(1), Expr(2)});
  Expr lh = lp1 * lp1 / 2 + lq1 * lq1 + lp2 * lp2 / 2 + lq2 * lq2 * lq2;
  for (const Expr& l : {lq1 + lp1, lq1 * lp1}) {
    auto [omega, eta] = lcs_local_forms(lc, l);
    LCSStructure s = validate_lcs(omega, eta, opts());
    t.proven(lcs_involution_check(lh, HaantjesBasis{lc, {Operator11::identity(lc), kd}, true}, s, opts()),
             "LCSH l = " + to_string(l));
  }

  auto [omega, eta] = lcs_local_forms(lc, lq1 + lp2);
  LCSStructure s = validate_lcs(omega, eta, opts());
  Operator11 broken = Operator11::zero(lc);
  broken.mat(lc->p(1), lc->q(1)) = Expr(1);
  t.expect(eta_KE_check(broken, s, opts()).verdict == Verdict::Fail, "eta(KE) of the broken operator");
  CheckReport u = lcs_involution_check(lh, HaantjesBasis{lc, {broken}, false}, s, opts());
  t.expect(u.verdict == Verdict::Unknown && u.failed == "precondition", "broken instance not rejected");
}

// 10 ------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void golden_reports(Tally& t) {
  std::vector<std::filesystem::path> models;
  for (const auto& e : std::filesystem::directory_iterator("models"))
    if (e.path().extension() == ".hj") models.push_back(e.path());
  std::sort(models.begin(), models.end());
  t.expect(models.size() >= 3, "bundled models missing");
  for (const auto& path : models) {
    std::string name = path.filename().string();
    Model m = parse_model(slurp(path));
    std::vector<std::string> runs;
    for (int jobs : {1, 0, 1}) {
      RunOptions ro;
      ro.sample = {1, 16, 1e-9};
      ro.jobs = jobs;
      RunReport r = run_checks(m, ro);
      t.expect(r.exit_code() == 0, name + " exit code");
      runs.push_back(report_json(r, name, false));
    }
    t.expect(runs[0] == runs[1] && runs[1] == runs[2], name + " not stable across runs");
    auto golden = std::filesystem::path("tests/golden") / path.filename().replace_extension(".json");
    t.expect(std::filesystem::exists(golden) && slurp(golden) == runs[0], name + " differs from " + golden.string());
  }
}

} // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    std::function<void(Tally&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "diagonal operators have vanishing Haantjes torsion", diagonal_vanishing},
      {2, "appendix families", appendix_reproduction},
      {3, "worked example H = p - z", worked_example},
      {4, "dissipated quantities in involution", theorem_instances},
      {5, "EJH routes agree", dual_routes},
      {6, "Schouten calibration and Poissonization", sn_calibration},
      {7, "torsions against finite differences", numeric_cross_check},
      {8, "certified chains are Frobenius integrable", frobenius_link},
      {9, "contact-Haantjes and LCSH instances", contact_lcs_instances},
      {10, "bundled models match golden reports", golden_reports},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Tally t;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(t);
    } catch (const std::exception& e) {
      t.failures.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = t.failures.empty();
    if (!ok) ++failed;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << " - " << c.title << " (" << t.checks
         << " checks, " << secs << " s)";
    if (!t.note.empty()) line << "; " << t.note;
    if (!ok) line << " first failure: " << t.failures.front();
    std::cout << line.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
