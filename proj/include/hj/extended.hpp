#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hj/haantjes.hpp"
#include "hj/jacobi.hpp"

namespace hj {

/// 𝒦(X, f) = (KX + fY, γ(X) + kf).
struct ExtendedOperator {
  Operator11 k;
  VectorField y;
  KForm gamma;
  Expr scalar;

  static ExtendedOperator identity(const ChartPtr& c);
  /// From the block matrix [[K, Y], [γ, k]].
  static ExtendedOperator from_matrix(const ChartPtr& c, const ExprMatrix& m);
  static ExtendedOperator from(const Operator11& k, const VectorField& y, const KForm& gamma, const Expr& scalar);
  const ChartPtr& chart() const { return k.chart; }
  ExprMatrix matrix() const;
};

bool operator==(const ExtendedOperator& a, const ExtendedOperator& b);

struct ExtPair {
  VectorField x;
  Expr f;
};

struct ExtCoPair {
  KForm alpha;
  Expr f;
};

struct ExtendedBasis {
  ChartPtr chart;
  std::vector<ExtendedOperator> ops;
  bool abelian_required = true;
};

ExtPair ext_apply(const ExtendedOperator& k, const ExtPair& v);
/// [(X,f),(Z,h)] = ([X,Z], X(h) − Z(f)).
ExtPair ext_bracket(const ExtPair& a, const ExtPair& b);
/// (α,f)(X,h) = α(X) + fh.
Expr ext_pairing(const ExtCoPair& a, const ExtPair& v);
/// 𝒦^T(α,f) = (K^Tα + fγ, α(Y) + kf).
ExtCoPair ext_transpose_apply(const ExtendedOperator& k, const ExtCoPair& a);
/// Component formula (K_iK_j + Y_i⊗γ_j, K_iY_j + k_jY_i, K_j^Tγ_i + k_iγ_j, γ_i(Y_j) + k_ik_j).
ExtendedOperator ext_compose(const ExtendedOperator& a, const ExtendedOperator& b);
/// Component formula against ext_apply(a, ext_apply(b, ·)) on the generators.
CheckReport check_ext_compose(const ExtendedOperator& a, const ExtendedOperator& b, const SampleOptions& opts);

/// Generators (∂_1, 0), ..., (∂_n, 0), (0, 1).
std::vector<ExtPair> ext_generators(const ChartPtr& c);
ExprVector to_vector(const ExtPair& v);
ExtPair from_vector(const ChartPtr& c, const ExprVector& v);

VectorValued2Form ext_nijenhuis(const ExtendedOperator& k);
VectorValued2Form ext_haantjes(const ExtendedOperator& k);
CheckReport check_ext_haantjes(const ExtendedOperator& k, const SampleOptions& opts);
CheckReport check_ext_algebra(const ExtendedBasis& basis, const SampleOptions& opts);

/// (Λ,E)♯(α, f) = (Λ♯α + fE, −α(E)).
ExtPair lambda_e_sharp(const JacobiStructure& j, const ExtCoPair& a);

struct EjhReport {
  CheckReport operator_route;
  CheckReport system_route;
  bool routes_agree = true;
  CheckReport report;
};

/// 𝒦∘(Λ,E)♯ = (Λ,E)♯∘𝒦^T, certified as an operator identity and, independently, as the three-equation system.
EjhReport check_ejh(const ExtendedOperator& k, const JacobiStructure& j, const SampleOptions& opts);

struct ExtChainReport {
  Expr generator;
  std::vector<Expr> potentials;
  std::vector<ZeroCertainty> consistent;
  IndependenceResult independence;
  CheckReport report;
};

/// H_i = Y_iH + Hk_i, then dH_i = K_i^T dH + Hγ_i.
ExtChainReport verify_ext_chain(const Expr& h, const ExtendedBasis& basis, const SampleOptions& opts);

/// Potentials of an extended chain over an EJH structure are dissipated quantities in involution.
CheckReport thm_main_check(const Expr& h, const ExtendedBasis& basis, const JacobiStructure& j,
                           const SampleOptions& opts);

struct ActionAngleOptions {
  /// Treat a degenerate frequency Hessian as an error instead of a note.
  bool strict_nondegeneracy = false;
};

struct ActionAngleResult {
  ExtendedBasis basis;
  std::vector<Expr> frequencies;
  Expr hessian_det;
  /// Product of the frequencies; the construction is singular where it vanishes.
  std::optional<Expr> singular_locus;
  CheckReport report;
};

/// Diagonal extended operators for H = h_list[0] and potentials h_list[1..] on a chart (φ^1..φ^n, J_1..J_n, Z).
ActionAngleResult build_action_angle_basis(const ChartPtr& c, const std::vector<Expr>& h_list,
                                           const SampleOptions& opts, const ActionAngleOptions& aopts = {});

} // namespace hj
