#include "hj/jacobi.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "hj/numeric.hpp"

namespace hj {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

Witness numeric_witness(const Assignment<double>& at, double value) {
  Witness w;
  for (const auto& [a, v] : at.slots())
    if (a->kind == AtomKind::Coord) w.point.emplace_back(a->name, fmt_double(v));
  w.value = fmt_double(value);
  return w;
}

std::vector<Expr> matrix_entries(const ExprMatrix& m) {
  std::vector<Expr> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

bool is_identity(const Operator11& k) { return k.mat == identity_matrix(k.dim()); }

} // namespace

JacobiStructure validate_jacobi(const KVector& lambda, const VectorField& e, const SampleOptions& opts) {
  require_same(lambda.chart, e.chart);
  if (lambda.degree != 2) throw std::invalid_argument("Jacobi structure needs a bivector");
  JacobiStructure j{lambda.chart, lambda, e, {}};
  Evidence ev(opts);
  KVector ev_ = to_multivector(e);
  KVector ll = schouten_bracket(lambda, lambda);
  KVector lhs = ll - Expr(2) * wedge(ev_, lambda);
  for (const auto& [idx, c] : lhs.comp) {
    std::string label = "([L,L] - 2E^L)^{";
    for (std::size_t k = 0; k < idx.size(); ++k) label += (k ? "," : "") + j.chart->coords[static_cast<std::size_t>(idx[k])];
    if (ev.require_zero(c, label + "}").nonzero()) break;
  }
  if (!ev.failed()) {
    KVector le = schouten_bracket(lambda, ev_);
    for (const auto& [idx, c] : le.comp) {
      std::string label = "[L,E]^{";
      for (std::size_t k = 0; k < idx.size(); ++k) label += (k ? "," : "") + j.chart->coords[static_cast<std::size_t>(idx[k])];
      if (ev.require_zero(c, label + "}").nonzero()) break;
    }
  }
  j.validity = ev.finish("jacobi", ev.failed() ? "not a Jacobi structure" : "Jacobi structure");
  return j;
}

Expr jacobi_bracket(const Expr& f, const Expr& g, const JacobiStructure& j) {
  KForm df = differential(j.chart, f), dg = differential(j.chart, g);
  return evaluate(j.lambda, df, dg) + f * j.e(g) - g * j.e(f);
}

VectorField hamiltonian_vf(const Expr& f, const JacobiStructure& j) {
  const int n = j.chart->dim();
  ExprMatrix l = j.matrix();
  VectorField x = VectorField::zero(j.chart);
  for (int i = 0; i < n; ++i) {
    Expr s;
    for (int k = 0; k < n; ++k)
      if (!l(i, k).is_zero_node()) s += l(i, k) * diff(f, k);
    x.comp(i) = s - f * j.e.comp(i);
  }
  return x;
}

VectorField lambda_sharp(const KVector& lambda, const KForm& alpha) {
  require_same(lambda.chart, alpha.chart);
  const int n = lambda.dim();
  ExprMatrix l = antisymmetric_matrix(lambda);
  VectorField x = VectorField::zero(lambda.chart);
  for (int i = 0; i < n; ++i) {
    Expr s;
    for (int k = 0; k < n; ++k) {
      Expr a = alpha.get({k});
      if (!l(k, i).is_zero_node() && !a.is_zero_node()) s += l(k, i) * a;
    }
    x.comp(i) = s;
  }
  return x;
}

CheckReport check_jh_compatibility(const Operator11& k, const JacobiStructure& j, const SampleOptions& opts) {
  require_same(k.chart, j.chart);
  ExprMatrix l = j.matrix();
  ExprMatrix r = mat_mul(k.mat, l) - mat_mul(l, transpose(k.mat));
  Evidence ev(opts);
  for (int a = 0; a < r.rows() && !ev.failed(); ++a)
    for (int b = a; b < r.cols() && !ev.failed(); ++b)
      ev.require_zero(r(a, b), "(K L - L K^T)(" + j.chart->coords[static_cast<std::size_t>(a)] + "," +
                                   j.chart->coords[static_cast<std::size_t>(b)] + ")");
  return ev.finish("jh-compatibility", ev.failed() ? "K is not compatible with the bivector" : "K L = L K^T");
}

CheckReport check_omega_h_compatibility(const Operator11& k, const KForm& omega, const SampleOptions& opts) {
  require_same(k.chart, omega.chart);
  if (omega.degree != 2) throw std::invalid_argument("compatibility needs a 2-form");
  ExprMatrix w = antisymmetric_matrix(omega);
  ExprMatrix r = mat_mul(w, k.mat) - mat_mul(transpose(k.mat), w);
  Evidence ev(opts);
  for (int a = 0; a < r.rows() && !ev.failed(); ++a)
    for (int b = a; b < r.cols() && !ev.failed(); ++b)
      ev.require_zero(r(a, b), "(W K - K^T W)(" + k.chart->coords[static_cast<std::size_t>(a)] + "," +
                                   k.chart->coords[static_cast<std::size_t>(b)] + ")");
  return ev.finish("omega-h-compatibility", ev.failed() ? "K is not compatible with the 2-form" : "W K = K^T W");
}

CheckReport check_nondegenerate(const KForm& omega, const SampleOptions& opts) {
  Evidence ev(opts);
  Expr det = determinant(antisymmetric_matrix(omega));
  ev.require_nonzero(det, "det(omega)");
  ev.value("det", to_string(det));
  return ev.finish("nondegenerate", ev.verdict() == Verdict::Pass ? "2-form is nondegenerate" : "2-form is degenerate");
}

CheckReport proposition_involutivity_check(const Expr& h, const HaantjesBasis& basis, const JacobiStructure& j,
                                           const SampleOptions& opts) {
  require_same(basis.chart, j.chart);
  Evidence ev(opts);
  ChainReport chain = verify_chain(h, basis, opts);
  std::string missing;
  if (!chain.report.pass())
    missing = "chain check did not pass (" + chain.report.failed + ")";
  for (std::size_t i = 0; i < chain.potentials.size() && missing.empty(); ++i)
    if (!chain.potentials[i]) missing = "no potential for K" + std::to_string(i + 1) + "^T dH";
  for (std::size_t i = 0; i < basis.ops.size() && missing.empty(); ++i)
    if (!check_jh_compatibility(basis.ops[i], j, opts).pass()) missing = "K" + std::to_string(i + 1) + " is not JH-compatible";
  if (!missing.empty()) {
    ev.unknown("precondition", missing);
    return ev.finish("involutivity", "preconditions unmet");
  }
  std::vector<Expr> hs;
  for (const auto& p : chain.potentials) hs.push_back(*p);
  for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a)
    for (std::size_t b = a + 1; b < hs.size() && !ev.failed(); ++b) {
      Expr r = jacobi_bracket(hs[a], hs[b], j) - (hs[a] * j.e(hs[b]) - hs[b] * j.e(hs[a]));
      ev.require_zero(r, "{H" + std::to_string(a + 1) + ",H" + std::to_string(b + 1) + "} - (H" + std::to_string(a + 1) +
                             " E H" + std::to_string(b + 1) + " - H" + std::to_string(b + 1) + " E H" +
                             std::to_string(a + 1) + ")");
    }
  bool has_identity = false;
  for (const auto& k : basis.ops) has_identity = has_identity || is_identity(k);
  if (has_identity) {
    VectorField xh = hamiltonian_vf(h, j);
    for (std::size_t a = 0; a < hs.size() && !ev.failed(); ++a) {
      std::string i = std::to_string(a + 1);
      ev.require_zero(jacobi_bracket(hs[a], h, j) - (hs[a] * j.e(h) - h * j.e(hs[a])),
                      "{H" + i + ",H} - (H" + i + " E H - H E H" + i + ")");
      ev.require_zero(xh(hs[a]) + h * j.e(hs[a]), "X_H(H" + i + ") + H E H" + i);
    }
  } else {
    ev.note("H is not a chain potential; the evolution identity was not checked");
  }
  for (std::size_t a = 0; a < hs.size(); ++a) ev.value("H" + std::to_string(a + 1), to_string(hs[a]));
  return ev.finish("involutivity", ev.failed() ? "chain potentials violate the involutivity identity"
                                               : "chain potentials satisfy the involutivity identity");
}

std::vector<Assignment<double>> sample_level_set(const Chart& chart, const std::vector<Expr>& fs,
                                                 const std::vector<Expr>& others, const SampleOptions& opts,
                                                 int starts) {
  (void)chart;
  const std::size_t m = fs.size();
  std::vector<Expr> all(fs);
  std::vector<AtomPtr> vars;
  for (const auto& a : leaf_atoms(fs))
    if (a->kind == AtomKind::Coord) vars.push_back(a);
  std::vector<std::vector<Expr>> jac(m);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& v : vars) {
      jac[i].push_back(diff(fs[i], v->index));
      all.push_back(jac[i].back());
    }
  all.insert(all.end(), others.begin(), others.end());
  auto leaves = leaf_atoms(all);
  SamplePoints rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Assignment<double>> found;
  for (int s = 0; s < starts; ++s) {
    Assignment<double> at = random_assignment(leaves, rng);
    if (m == 0) {
      found.push_back(at);
      continue;
    }
    Eigen::VectorXd x(static_cast<Eigen::Index>(vars.size()));
    for (std::size_t k = 0; k < vars.size(); ++k) x(static_cast<Eigen::Index>(k)) = *at.get(*vars[k]);
    bool ok = false;
    for (int it = 0; it < 80; ++it) {
      for (std::size_t k = 0; k < vars.size(); ++k) at.set(vars[k], x(static_cast<Eigen::Index>(k)));
      Eigen::VectorXd r(static_cast<Eigen::Index>(m));
      Eigen::MatrixXd jm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(vars.size()));
      bool finite = true;
      for (std::size_t i = 0; i < m && finite; ++i) {
        auto v = eval_float(fs[i], at);
        if (!v) finite = false;
        else r(static_cast<Eigen::Index>(i)) = *v;
        for (std::size_t k = 0; k < vars.size() && finite; ++k) {
          auto d = eval_float(jac[i][k], at);
          if (!d) finite = false;
          else jm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = *d;
        }
      }
      if (!finite) break;
      if (r.cwiseAbs().maxCoeff() < 1e-10) {
        ok = true;
        break;
      }
      if (vars.empty()) break;
      Eigen::BDCSVD<Eigen::MatrixXd> svd(jm, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::VectorXd step = svd.solve(r);
      if (!step.allFinite()) break;
      x -= step;
      if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e8) break;
    }
    if (ok) found.push_back(at);
  }
  return found;
}

CheckReport particular_integral_check(const ParticularIntegralWitness& w, const Expr& h, const JacobiStructure& j,
                                      const SampleOptions& opts) {
  const auto& fs = w.functions;
  const std::size_t k = fs.size();
  Evidence ev(opts);
  std::vector<Expr> brackets;
  for (const auto& f : fs) brackets.push_back(jacobi_bracket(f, h, j));
  std::vector<Expr> residuals = brackets;
  if (w.coefficients) {
    if (static_cast<std::size_t>(w.coefficients->rows()) != k || static_cast<std::size_t>(w.coefficients->cols()) != k)
      throw std::invalid_argument("coefficient matrix must be " + std::to_string(k) + "x" + std::to_string(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t l = 0; l < k; ++l)
        residuals[i] -= (*w.coefficients)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) * fs[l];
  }
  std::vector<Expr> inv;
  std::vector<std::string> inv_labels;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) {
      inv.push_back(jacobi_bracket(fs[a], fs[b], j));
      inv_labels.push_back("{f" + std::to_string(a + 1) + ",f" + std::to_string(b + 1) + "}");
    }

  bool sampled = w.mode == ResidualMode::SampledOnMf;
  std::vector<Assignment<double>> pts;
  auto sample = [&] {
    if (pts.empty()) {
      std::vector<Expr> others(brackets);
      others.insert(others.end(), inv.begin(), inv.end());
      pts = sample_level_set(*j.chart, fs, others, opts);
    }
  };
  // returns 1 when |e| < tol at all M_f points, 0 on a violation, -1 when undecided
  auto check_on_mf = [&](const Expr& e, std::optional<Witness>& wit) {
    bool any = false;
    for (const auto& at : pts) {
      auto v = eval_float(e, at);
      if (!v) continue;
      any = true;
      double scale = std::max(1.0, eval_scale(e, at).value_or(1.0));
      if (std::abs(*v) > 1e-7 * scale) {
        wit = numeric_witness(at, *v);
        return 0;
      }
    }
    return any ? 1 : -1;
  };

  bool probable = false;
  if (!sampled) {
    for (std::size_t i = 0; i < k && !ev.failed(); ++i)
      ev.require_zero(residuals[i], "{f" + std::to_string(i + 1) + ",H} - sum_j a^" + std::to_string(i + 1) + "_j f_j");
  } else {
    for (std::size_t i = 0; i < k && !ev.failed(); ++i) {
      std::string label = "{f" + std::to_string(i + 1) + ",H} on M_f";
      if (is_zero(residuals[i], opts).proven_zero()) continue;
      sample();
      if (pts.empty()) {
        ev.unknown(label, "no points of M_f found");
        break;
      }
      std::optional<Witness> wit;
      int r = check_on_mf(brackets[i], wit);
      if (r == 0) {
        CheckReport sub;
        sub.verdict = Verdict::Fail;
        sub.grade = Certainty::ProvenNonzero;
        sub.failed = label;
        sub.witness = wit;
        ev.absorb(sub);
      } else if (r < 0) {
        ev.unknown(label, "bracket could not be evaluated on M_f");
      } else {
        probable = true;
      }
    }
    ev.value("mf_points", std::to_string(pts.size()));
  }

  // particular involution: exact when every pair bracket vanishes identically, sampled otherwise
  std::string involution = "yes";
  for (std::size_t p = 0; p < inv.size(); ++p) {
    auto z = is_zero(inv[p], opts);
    if (z.proven_zero()) continue;
    sample();
    std::optional<Witness> wit;
    int r = pts.empty() ? -1 : check_on_mf(inv[p], wit);
    if (r == 0) {
      involution = "no (" + inv_labels[p] + ")";
      break;
    }
    if (r < 0) involution = "unknown";
    else if (involution == "yes") involution = "probably";
  }
  ev.value("particular_involution", involution);

  // conservation is distinct from vanishing brackets: X_H f = {f,H} - f EH
  VectorField xh = hamiltonian_vf(h, j);
  for (std::size_t i = 0; i < k; ++i) {
    auto z = is_zero(xh(fs[i]), opts);
    ev.value("X_H(f" + std::to_string(i + 1) + ")", z.proven_zero() ? "0" : to_string(xh(fs[i])));
    ev.value("f" + std::to_string(i + 1) + "_conserved",
             z.zero() ? "yes" : z.nonzero() ? "no (dissipated)" : "unknown");
  }
  CheckReport r = ev.finish("particular-integrals", ev.failed() ? "not particular integrals" : "particular integrals");
  if (r.pass() && probable && r.grade == Certainty::ProvenZero) r.grade = Certainty::ProbablyZero;
  return r;
}

KVector rehome(const KVector& a, const ChartPtr& target) {
  if (target->dim() < a.dim()) throw ChartMismatch();
  for (int i = 0; i < a.dim(); ++i)
    if (a.chart->coords[static_cast<std::size_t>(i)] != target->coords[static_cast<std::size_t>(i)]) throw ChartMismatch();
  KVector r(target, a.degree);
  r.comp = a.comp;
  return r;
}

Poissonization poissonize(const JacobiStructure& j, const std::vector<std::pair<Expr, Expr>>& pairs,
                          const SampleOptions& opts) {
  std::string t = "t";
  while (j.chart->index_of(t) >= 0) t += "_";
  Poissonization pz;
  pz.chart = extend_chart(*j.chart, t);
  pz.t_index = j.chart->dim();
  Expr tt = pz.chart->coord(pz.t_index);
  KVector lam = rehome(j.lambda, pz.chart);
  KVector e = rehome(to_multivector(j.e), pz.chart);
  KVector dt = to_multivector(VectorField::basis(pz.chart, pz.t_index));
  pz.p = exp(-tt) * (lam + wedge(dt, e));

  Evidence ev(opts);
  ev.require_all_zero(components(schouten_bracket(pz.p, pz.p)), "[P,P]");
  for (std::size_t i = 0; i < pairs.size() && !ev.failed(); ++i) {
    const auto& [f, g] = pairs[i];
    Expr lhs = jacobi_bracket(f, g, j);
    KForm df = differential(pz.chart, exp(tt) * f), dg = differential(pz.chart, exp(tt) * g);
    Expr rhs = substitute(exp(tt) * evaluate(pz.p, df, dg), pz.t_index, Expr(0));
    ev.require_zero(lhs - rhs, "bracket relation on pair " + std::to_string(i + 1));
  }
  ev.value("t", t);
  ev.value("P", to_string(pz.p));
  pz.report = ev.finish("poissonization", ev.failed() ? "Poissonization failed" : "Poissonization is Poisson");
  return pz;
}

CheckReport poisson_lift_report(const Operator11& k, const Poissonization& pz, const SampleOptions& opts) {
  const int n = k.dim();
  if (pz.chart->dim() != n + 1) throw ChartMismatch();
  Operator11 lift = Operator11::identity(pz.chart);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) lift.mat(a, b) = k.mat(a, b);
  ExprMatrix l = antisymmetric_matrix(pz.p);
  ExprMatrix r = mat_mul(lift.mat, l) - mat_mul(l, transpose(lift.mat));
  Evidence ev(opts);
  ev.require_all_zero(matrix_entries(r), "(K~ P - P K~^T)");
  return ev.finish("poisson-lift", ev.failed() ? "trivial lift is not compatible" : "trivial lift is compatible");
}

} // namespace hj
