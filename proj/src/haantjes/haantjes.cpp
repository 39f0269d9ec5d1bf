#include "hj/haantjes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "hj/numeric.hpp"

namespace hj {

// ---- algebroid ----

ExprVector Algebroid::bracket(const ExprVector& u, const ExprVector& v) const {
  int n = chart->dim();
  ExprVector r = zero_vector(rank());
  auto directional = [&](const ExprVector& x, const Expr& f) {
    Expr s;
    if (f.is_zero_node()) return s;
    for (int j = 0; j < n; ++j)
      if (!x(j).is_zero_node()) s += x(j) * diff(f, j);
    return s;
  };
  for (int i = 0; i < n; ++i) r(i) = directional(u, v(i)) - directional(v, u(i));
  if (extended) r(n) = directional(u, v(n)) - directional(v, u(n));
  return r;
}

ExprVector Algebroid::basis(int a) const {
  ExprVector e = zero_vector(rank());
  e(a) = Expr(1);
  return e;
}

// ---- vector-valued 2-forms ----

ExprVector VectorValued2Form::eval(const ExprVector& u, const ExprVector& v) const {
  ExprVector r = zero_vector(rank);
  for (int c = 0; c < rank; ++c)
    for (int d = c + 1; d < rank; ++d) {
      Expr w = u(c) * v(d) - u(d) * v(c);
      if (w.is_zero_node()) continue;
      const ExprVector& t = at(c, d);
      for (int i = 0; i < rank; ++i)
        if (!t(i).is_zero_node()) r(i) += w * t(i);
    }
  return r;
}

std::vector<Expr> VectorValued2Form::components() const {
  std::vector<Expr> out;
  for (int a = 0; a < rank; ++a)
    for (int b = a + 1; b < rank; ++b)
      for (int i = 0; i < rank; ++i) out.push_back(at(a, b)(i));
  return out;
}

bool VectorValued2Form::is_zero_node() const {
  for (const auto& e : components())
    if (!e.is_zero_node()) return false;
  return true;
}

namespace {

VectorValued2Form empty_table(const ChartPtr& c, int rank) {
  VectorValued2Form t;
  t.chart = c;
  t.rank = rank;
  t.table.assign(static_cast<std::size_t>(rank * rank), zero_vector(rank));
  return t;
}

std::string slot_name(const Chart& c, int a) {
  return a < c.dim() ? c.coords[static_cast<std::size_t>(a)] : std::string("1");
}

void require_table_zero(Evidence& ev, const VectorValued2Form& t, const std::string& name) {
  for (int a = 0; a < t.rank; ++a)
    for (int b = a + 1; b < t.rank; ++b)
      for (int i = 0; i < t.rank; ++i) {
        const Expr& e = t.at(a, b)(i);
        if (e.is_zero_node()) continue;
        std::string label = name + "(e_" + slot_name(*t.chart, a) + ", e_" + slot_name(*t.chart, b) + ")^" +
                            slot_name(*t.chart, i);
        if (ev.require_zero(e, label).nonzero()) return;
      }
}

} // namespace

VectorValued2Form torsion_table(const Algebroid& alg, const ExprMatrix& m) {
  int r = alg.rank();
  auto t = empty_table(alg.chart, r);
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) {
      ExprVector ma = m.col(a), mb = m.col(b);
      ExprVector v = alg.bracket(ma, mb) - mat_vec(m, alg.bracket(ma, alg.basis(b))) -
                     mat_vec(m, alg.bracket(alg.basis(a), mb));
      t.table[static_cast<std::size_t>(a * r + b)] = v;
      t.table[static_cast<std::size_t>(b * r + a)] = -v;
    }
  return t;
}

VectorValued2Form haantjes_from_torsion(const VectorValued2Form& tau, const ExprMatrix& m) {
  int r = tau.rank;
  auto h = empty_table(tau.chart, r);
  ExprMatrix m2 = mat_mul(m, m);
  for (int a = 0; a < r; ++a)
    for (int b = a + 1; b < r; ++b) {
      ExprVector ea = zero_vector(r), eb = zero_vector(r);
      ea(a) = Expr(1);
      eb(b) = Expr(1);
      ExprVector ma = m.col(a), mb = m.col(b);
      ExprVector v = mat_vec(m2, tau.at(a, b)) + tau.eval(ma, mb) - mat_vec(m, tau.eval(ea, mb) + tau.eval(ma, eb));
      h.table[static_cast<std::size_t>(a * r + b)] = v;
      h.table[static_cast<std::size_t>(b * r + a)] = -v;
    }
  return h;
}

ExprVector torsion_literal(const Algebroid& alg, const ExprMatrix& m, const ExprVector& x, const ExprVector& y) {
  ExprVector mx = mat_vec(m, x), my = mat_vec(m, y);
  return alg.bracket(mx, my) - mat_vec(m, alg.bracket(mx, y)) - mat_vec(m, alg.bracket(x, my)) +
         mat_vec(mat_mul(m, m), alg.bracket(x, y));
}

VectorValued2Form nijenhuis_torsion(const Operator11& k) { return torsion_table({k.chart, false}, k.mat); }

VectorValued2Form haantjes_torsion(const Operator11& k) {
  return haantjes_from_torsion(nijenhuis_torsion(k), k.mat);
}

CheckReport check_haantjes(const Operator11& k, const SampleOptions& opts) {
  Evidence ev(opts);
  require_table_zero(ev, haantjes_torsion(k), "H");
  return ev.finish("haantjes", ev.failed() ? "Haantjes torsion does not vanish" : "Haantjes torsion vanishes");
}

CheckReport check_nijenhuis(const Operator11& k, const SampleOptions& opts) {
  Evidence ev(opts);
  require_table_zero(ev, nijenhuis_torsion(k), "tau");
  return ev.finish("nijenhuis", ev.failed() ? "Nijenhuis torsion does not vanish" : "Nijenhuis torsion vanishes");
}

// ---- algebras ----

std::string fresh_function_name(const std::string& base, const std::vector<Expr>& exprs) {
  std::set<std::string> used;
  for (const auto& a : leaf_atoms(exprs))
    if (a->kind == AtomKind::Function || a->kind == AtomKind::Param) used.insert(a->name);
  if (!used.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string name = base + "_" + std::to_string(i);
    if (!used.count(name)) return name;
  }
}

Expr generic_function(const Chart& c, const std::string& name) {
  std::vector<int> args;
  for (int i = 0; i < c.dim(); ++i) args.push_back(i);
  return Expr::function(name, args, c.coords);
}

CheckReport check_commute(const Operator11& a, const Operator11& b, const SampleOptions& opts) {
  Evidence ev(opts);
  ev.require_all_zero(components(op_compose(a, b) - op_compose(b, a)), "K1 K2 - K2 K1");
  return ev.finish("commute", ev.failed() ? "operators do not commute" : "operators commute");
}

namespace {

ExprMatrix scaled(const Expr& f, const ExprMatrix& m) {
  ExprMatrix r = m;
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j)
      if (!r(i, j).is_zero_node()) r(i, j) = f * r(i, j);
  return r;
}

std::vector<Expr> entries(const ExprMatrix& m) {
  std::vector<Expr> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

} // namespace

CheckReport check_haantjes_matrix(const Algebroid& alg, const ExprMatrix& m, const SampleOptions& opts) {
  Evidence ev(opts);
  require_table_zero(ev, haantjes_from_torsion(torsion_table(alg, m), m), "H");
  return ev.finish("haantjes", ev.failed() ? "Haantjes torsion does not vanish" : "Haantjes torsion vanishes");
}

CheckReport check_algebra_matrices(const Algebroid& alg, const std::vector<ExprMatrix>& ms, bool abelian_required,
                                   const std::string& sym, const SampleOptions& opts) {
  Evidence ev(opts);
  if (ms.empty()) {
    ev.fail("basis", "empty basis");
    return ev.finish("algebra", "empty basis");
  }
  std::vector<Expr> all;
  for (const auto& m : ms) {
    auto c = entries(m);
    all.insert(all.end(), c.begin(), c.end());
  }
  auto name = [&](std::size_t i) { return sym + std::to_string(i + 1); };
  for (std::size_t i = 0; i < ms.size() && !ev.failed(); ++i) ev.absorb(check_haantjes_matrix(alg, ms[i], opts), name(i));

  std::string fname = fresh_function_name("f", all);
  std::string gname = fresh_function_name("g", all);
  if (gname == fname) gname = fresh_function_name(fname + "_g", all);
  Expr f = generic_function(*alg.chart, fname), g = generic_function(*alg.chart, gname);
  for (std::size_t i = 0; i < ms.size() && !ev.failed(); ++i)
    for (std::size_t j = i + 1; j < ms.size() && !ev.failed(); ++j) {
      ExprMatrix comb = scaled(f, ms[i]) + scaled(g, ms[j]);
      ev.absorb(check_haantjes_matrix(alg, comb, opts), "module(" + name(i) + "," + name(j) + ")");
    }
  for (std::size_t i = 0; i < ms.size() && !ev.failed(); ++i)
    for (std::size_t j = 0; j < ms.size() && !ev.failed(); ++j)
      ev.absorb(check_haantjes_matrix(alg, mat_mul(ms[i], ms[j]), opts), "ring(" + name(i) + name(j) + ")");
  bool abelian = true;
  for (std::size_t i = 0; i < ms.size() && abelian; ++i)
    for (std::size_t j = i + 1; j < ms.size() && abelian; ++j) {
      Evidence c(opts);
      c.require_all_zero(entries(mat_mul(ms[i], ms[j]) - mat_mul(ms[j], ms[i])),
                         name(i) + " " + name(j) + " - " + name(j) + " " + name(i));
      if (c.verdict() != Verdict::Pass) {
        abelian = false;
        if (abelian_required) ev.absorb(c.finish("commute", ""), "commute(" + name(i) + "," + name(j) + ")");
      }
    }
  ev.value("abelian", abelian ? "true" : "false");
  std::string summary = ev.failed() ? "not a Haantjes algebra" : "Haantjes algebra";
  if (!ev.failed()) summary += abelian ? " (abelian)" : " (not abelian)";
  return ev.finish("algebra", summary);
}

CheckReport check_haantjes_algebra(const HaantjesBasis& basis, const SampleOptions& opts) {
  std::vector<ExprMatrix> ms;
  for (const auto& k : basis.ops) {
    require_same(basis.chart, k.chart);
    ms.push_back(k.mat);
  }
  if (ms.empty()) {
    Evidence ev(opts);
    ev.fail("basis", "empty basis");
    return ev.finish("algebra", "empty basis");
  }
  return check_algebra_matrices({basis.chart, false}, ms, basis.abelian_required, "K", opts);
}

// ---- independence ----

namespace {

template <class Tag>
Alternating<Tag> wedge_all(const std::vector<Alternating<Tag>>& xs, const ChartPtr& c) {
  Alternating<Tag> w(c, 0);
  w.add({}, Expr(1));
  for (const auto& x : xs) w = wedge(w, x);
  return w;
}

int numeric_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  double tol = 1e-9 * std::max(1.0, s(0));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

IndependenceResult independence_from(const std::vector<Expr>& wedge_components,
                                     const std::vector<std::vector<Expr>>& rows, const SampleOptions& opts) {
  IndependenceResult r;
  bool undecided = false;
  for (const auto& e : wedge_components) {
    ZeroCertainty z = is_zero(e, opts);
    if (z.nonzero()) {
      r.wedge_zero = Certainty::ProvenNonzero;
      r.independent = true;
      r.method = "symbolic";
      std::size_t nonzero = 0;
      for (const auto& w : wedge_components)
        if (!w.is_zero_node()) ++nonzero;
      if (nonzero == 1) r.locus = e;
      return r;
    }
    if (!z.proven_zero()) undecided = true;
  }
  if (!undecided) {
    r.wedge_zero = Certainty::ProvenZero;
    r.independent = false;
    r.method = "symbolic";
    return r;
  }
  // numeric rank at seeded sample points
  std::vector<Expr> flat;
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  auto leaves = leaf_atoms(flat);
  SamplePoints rng(opts.seed);
  bool evaluated = false;
  for (int s = 0; s < opts.samples; ++s) {
    auto v = random_assignment(leaves, rng);
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
    bool ok = true;
    for (std::size_t i = 0; i < rows.size() && ok; ++i)
      for (std::size_t j = 0; j < rows[i].size() && ok; ++j) {
        auto x = eval_float(rows[i][j], v);
        if (!x) ok = false;
        else m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *x;
      }
    if (!ok) continue;
    evaluated = true;
    if (numeric_rank(m) == static_cast<int>(rows.size())) {
      r.wedge_zero = Certainty::ProvenNonzero;
      r.independent = true;
      r.method = "numeric";
      return r;
    }
  }
  r.wedge_zero = evaluated ? Certainty::ProbablyZero : Certainty::Unknown;
  r.independent = false;
  r.method = evaluated ? "numeric" : "undecided";
  return r;
}

} // namespace

IndependenceResult forms_independent(const std::vector<KForm>& forms, const SampleOptions& opts) {
  IndependenceResult r;
  if (forms.empty()) {
    r.independent = true;
    r.wedge_zero = Certainty::ProvenNonzero;
    r.method = "symbolic";
    return r;
  }
  auto c = forms[0].chart;
  std::vector<std::vector<Expr>> rows;
  for (const auto& f : forms) {
    require_same(c, f.chart);
    auto v = one_form_components(f);
    rows.emplace_back(v.data(), v.data() + v.size());
  }
  return independence_from(components(wedge_all(forms, c)), rows, opts);
}

IndependenceResult fields_independent(const std::vector<VectorField>& fields, const SampleOptions& opts) {
  IndependenceResult r;
  if (fields.empty()) {
    r.independent = true;
    r.wedge_zero = Certainty::ProvenNonzero;
    r.method = "symbolic";
    return r;
  }
  auto c = fields[0].chart;
  std::vector<KVector> vs;
  std::vector<std::vector<Expr>> rows;
  for (const auto& f : fields) {
    require_same(c, f.chart);
    vs.push_back(to_multivector(f));
    rows.push_back(components(f));
  }
  return independence_from(components(wedge_all(vs, c)), rows, opts);
}

// ---- chains ----

std::vector<KForm> chain_codistribution(const Expr& h, const HaantjesBasis& basis) {
  KForm dh = differential(basis.chart, h);
  std::vector<KForm> out;
  for (const auto& k : basis.ops) out.push_back(op_transpose_apply(k, dh));
  return out;
}

std::optional<Expr> radial_potential(const KForm& alpha) {
  if (alpha.degree != 1) return std::nullopt;
  Expr h;
  for (const auto& [idx, e] : alpha.comp) {
    if (!e.is_polynomial() || e.has_function()) return std::nullopt;
    Expr xj = alpha.chart->coord(idx[0]);
    for (const auto& t : e.terms()) {
      int deg = 0;
      for (const auto& f : t.factors)
        if (f.atom->kind == AtomKind::Coord) deg += f.power;
      Rational c = t.coeff / (deg + 1);
      h += Expr::from_terms({Term{t.factors, c}}) * xj;
    }
  }
  return h;
}

namespace {

ZeroCertainty all_zero(const std::vector<Expr>& es, const SampleOptions& opts) {
  ZeroCertainty worst;
  worst.tag = Certainty::ProvenZero;
  for (const auto& e : es) {
    ZeroCertainty z = is_zero(e, opts);
    if (z.nonzero()) return z;
    if (static_cast<int>(z.tag) > static_cast<int>(worst.tag)) worst = z;
  }
  return worst;
}

template <class Tag> std::vector<std::size_t> independent_subset(const std::vector<Alternating<Tag>>& xs,
                                                                 const ChartPtr& c, const SampleOptions& opts) {
  std::vector<std::size_t> keep;
  Alternating<Tag> w(c, 0);
  w.add({}, Expr(1));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto next = wedge(w, xs[i]);
    if (all_zero(components(next), opts).proven_zero()) continue;
    keep.push_back(i);
    w = next;
  }
  return keep;
}

} // namespace

ChainReport verify_chain(const Expr& h, const HaantjesBasis& basis, const SampleOptions& opts) {
  ChainReport cr;
  cr.generator = h;
  cr.forms = chain_codistribution(h, basis);
  Evidence ev(opts);
  for (std::size_t i = 0; i < cr.forms.size(); ++i) {
    std::string name = "K" + std::to_string(i + 1);
    KForm d = exterior_derivative(cr.forms[i]);
    ZeroCertainty z = all_zero(components(d), opts);
    cr.closed.push_back(z);
    std::optional<Expr> pot;
    if (z.proven_zero()) {
      pot = radial_potential(cr.forms[i]);
      if (pot && !(differential(basis.chart, *pot) == cr.forms[i])) pot.reset();
    }
    cr.potentials.push_back(pot);
    ev.require_all_zero(components(d), "d(" + name + "^T dH)");
    ev.value(name + "^T dH", to_string(cr.forms[i]));
    if (pot) ev.value("H" + std::to_string(i + 1), to_string(*pot));
  }
  cr.independence = forms_independent(cr.forms, opts);
  ev.value("independence", cr.independence.independent ? "independent (" + cr.independence.method + ")"
                                                        : "dependent (" + cr.independence.method + ")");
  if (cr.independence.locus) ev.note("chain forms degenerate where " + to_string(*cr.independence.locus) + " = 0");
  if (!cr.independence.independent) {
    if (cr.independence.wedge_zero == Certainty::Unknown)
      ev.unknown("independence", "rank undecided");
    else
      ev.fail("independence", "chain forms are linearly dependent");
  }
  cr.frobenius = frobenius_codistribution(cr.forms, opts);
  cr.report = ev.finish("chain", ev.failed() ? "not a Haantjes chain" : "Haantjes chain");
  return cr;
}

// ---- Frobenius and invariance ----

CheckReport frobenius_codistribution(const std::vector<KForm>& forms, const SampleOptions& opts) {
  Evidence ev(opts);
  if (forms.empty()) return ev.finish("frobenius-codistribution", "empty codistribution");
  auto c = forms[0].chart;
  auto keep = independent_subset(forms, c, opts);
  if (keep.size() < forms.size())
    ev.note("rank-deficient input: using " + std::to_string(keep.size()) + " of " + std::to_string(forms.size()) +
            " forms");
  std::vector<KForm> sub;
  for (auto i : keep) sub.push_back(forms[i]);
  KForm vol = wedge_all(sub, c);
  for (std::size_t i = 0; i < sub.size() && !ev.failed(); ++i)
    ev.require_all_zero(components(wedge(exterior_derivative(sub[i]), vol)),
                        "d(alpha" + std::to_string(keep[i] + 1) + ")^alpha1^...^alpham");
  ev.value("rank", std::to_string(sub.size()));
  return ev.finish("frobenius-codistribution",
                   ev.failed() ? "codistribution is not integrable" : "codistribution is Frobenius-integrable");
}

CheckReport frobenius_distribution(const std::vector<VectorField>& fields, const SampleOptions& opts) {
  Evidence ev(opts);
  if (fields.empty()) return ev.finish("frobenius-distribution", "empty distribution");
  auto c = fields[0].chart;
  std::vector<KVector> vs;
  for (const auto& f : fields) vs.push_back(to_multivector(f));
  auto keep = independent_subset(vs, c, opts);
  if (keep.size() < fields.size())
    ev.note("rank-deficient input: using " + std::to_string(keep.size()) + " of " + std::to_string(fields.size()) +
            " fields");
  std::vector<KVector> sub;
  for (auto i : keep) sub.push_back(vs[i]);
  KVector vol = wedge_all(sub, c);
  for (std::size_t a = 0; a < keep.size() && !ev.failed(); ++a)
    for (std::size_t b = a + 1; b < keep.size() && !ev.failed(); ++b) {
      auto br = lie_bracket(fields[keep[a]], fields[keep[b]]);
      std::string label = "[X" + std::to_string(keep[a] + 1) + ",X" + std::to_string(keep[b] + 1) + "] in span";
      if (ev.require_all_zero(components(wedge(to_multivector(br), vol)), label) == false)
        ev.value("escaping bracket", to_string(br));
    }
  ev.value("rank", std::to_string(sub.size()));
  return ev.finish("frobenius-distribution",
                   ev.failed() ? "distribution is not integrable" : "distribution is Frobenius-integrable");
}

CheckReport invariance_check(const Operator11& k, const std::vector<KForm>& forms, const SampleOptions& opts) {
  Evidence ev(opts);
  if (forms.empty()) return ev.finish("invariance", "empty codistribution");
  auto c = forms[0].chart;
  require_same(k.chart, c);
  auto keep = independent_subset(forms, c, opts);
  std::vector<KForm> sub;
  for (auto i : keep) sub.push_back(forms[i]);
  KForm vol = wedge_all(sub, c);
  for (std::size_t i = 0; i < forms.size() && !ev.failed(); ++i)
    ev.require_all_zero(components(wedge(op_transpose_apply(k, forms[i]), vol)),
                        "K^T alpha" + std::to_string(i + 1) + " in span");
  return ev.finish("invariance", ev.failed() ? "codistribution is not K^T-invariant" : "codistribution is K^T-invariant");
}

// ---- spectra ----

namespace {

using CMatrix = Eigen::MatrixXcd;

int complex_rank(const CMatrix& m, double scale) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  double tol = 1e-7 * std::max(1.0, scale);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

// Nullities of (A − λI)^k, k = 1..n.
std::vector<int> nullities(const Eigen::MatrixXd& a, std::complex<double> lambda) {
  int n = static_cast<int>(a.rows());
  CMatrix b = a.cast<std::complex<double>>() - lambda * CMatrix::Identity(n, n);
  CMatrix p = CMatrix::Identity(n, n);
  double scale = std::max(1.0, a.norm());
  std::vector<int> out;
  for (int k = 1; k <= n; ++k) {
    p = p * b;
    out.push_back(n - complex_rank(p, std::pow(scale, k)));
  }
  return out;
}

} // namespace

SpectralReport spectral_report(const Operator11& k, const std::vector<std::map<std::string, double>>& points,
                               const SampleOptions& opts) {
  SpectralReport rep;
  Evidence ev(opts);
  int n = k.dim();
  auto entries = components(k);
  auto leaves = leaf_atoms(entries);
  SamplePoints rng(opts.seed);
  Assignment<double> abstract = random_assignment(leaves, rng);
  rep.all_even = true;
  int good = 0;
  for (const auto& pt : points) {
    SpectralPoint sp;
    sp.point = pt;
    Assignment<double> v = abstract;
    bool missing = false;
    for (const auto& a : leaves)
      if (a->kind == AtomKind::Coord) {
        auto it = pt.find(a->name);
        if (it == pt.end()) missing = true;
        else v.set(a, it->second);
      }
    Eigen::MatrixXd m(n, n);
    bool ok = !missing;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j) {
        auto x = eval_float(k.mat(i, j), v);
        if (!x) ok = false;
        else m(i, j) = *x;
      }
    if (!ok) {
      sp.error = missing ? "point does not bind every coordinate" : "operator undefined at point";
      rep.points.push_back(sp);
      continue;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) {
      sp.error = "eigenvalue computation failed";
      rep.points.push_back(sp);
      continue;
    }
    std::vector<std::complex<double>> ev_list(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(ev_list.begin(), ev_list.end(), [](auto a, auto b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    // cluster at relative 1e-8
    std::vector<std::vector<std::complex<double>>> groups;
    for (auto l : ev_list) {
      bool placed = false;
      for (auto& g : groups)
        if (std::abs(g[0] - l) <= 1e-8 * std::max(1.0, std::abs(l))) {
          g.push_back(l);
          placed = true;
          break;
        }
      if (!placed) groups.push_back({l});
    }
    // merge clusters split by defective (Jordan) structure
    std::vector<bool> dead(groups.size(), false);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (dead[g]) continue;
      std::complex<double> mean = 0;
      for (auto l : groups[g]) mean += l;
      mean /= static_cast<double>(groups[g].size());
      int gen = nullities(m, mean).back();
      while (static_cast<int>(groups[g].size()) < gen) {
        std::size_t best = groups.size();
        double dist = 1e300;
        for (std::size_t h = 0; h < groups.size(); ++h)
          if (h != g && !dead[h] && std::abs(groups[h][0] - mean) < dist) {
            dist = std::abs(groups[h][0] - mean);
            best = h;
          }
        if (best == groups.size()) break;
        groups[g].insert(groups[g].end(), groups[best].begin(), groups[best].end());
        dead[best] = true;
      }
    }
    sp.all_even = true;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (dead[g]) continue;
      std::complex<double> mean = 0;
      for (auto l : groups[g]) mean += l;
      mean /= static_cast<double>(groups[g].size());
      auto nul = nullities(m, mean);
      SpectralCluster c;
      c.re = mean.real();
      c.im = mean.imag();
      c.algebraic = static_cast<int>(groups[g].size());
      c.geometric = nul[0];
      c.riesz_index = n;
      for (int j = 0; j < n; ++j)
        if (nul[static_cast<std::size_t>(j)] == nul.back()) {
          c.riesz_index = j + 1;
          break;
        }
      if (c.algebraic % 2 != 0) sp.all_even = false;
      sp.clusters.push_back(c);
    }
    sp.ok = true;
    ++good;
    if (!sp.all_even) rep.all_even = false;
    rep.points.push_back(sp);
  }
  if (good == 0) {
    rep.all_even = false;
    ev.unknown("spectrum", "no point could be evaluated");
  }
  ev.value("evaluated points", std::to_string(good) + "/" + std::to_string(points.size()));
  ev.value("even multiplicities", rep.all_even ? "true" : "false");
  if (good > 0 && !rep.all_even) ev.fail("even multiplicities", "odd multiplicity: not omega-H compatible");
  rep.report = ev.finish("spectral", rep.all_even ? "all multiplicities even" : "odd multiplicities present");
  return rep;
}

} // namespace hj
