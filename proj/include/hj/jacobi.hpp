#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hj/geometry.hpp"
#include "hj/haantjes.hpp"
#include "hj/numeric.hpp"
#include "hj/report.hpp"

namespace hj {

struct JacobiStructure {
  ChartPtr chart;
  KVector lambda;
  VectorField e;
  CheckReport validity;

  bool valid() const { return validity.pass(); }
  /// L(i, j) = Λ(dx^i, dx^j).
  ExprMatrix matrix() const { return antisymmetric_matrix(lambda); }
};

/// Certifies [Λ,Λ] = 2E∧Λ and [Λ,E] = 0.
JacobiStructure validate_jacobi(const KVector& lambda, const VectorField& e, const SampleOptions& opts);

/// {f,g} = Λ(df,dg) + f Eg − g Ef.
Expr jacobi_bracket(const Expr& f, const Expr& g, const JacobiStructure& j);
/// X_f g = Λ(dg, df) − f Eg, so that {g,f} = X_f g + g Ef.
VectorField hamiltonian_vf(const Expr& f, const JacobiStructure& j);
/// Λ♯(α)^i = Σ_j Λ^{ji} α_j.
VectorField lambda_sharp(const KVector& lambda, const KForm& alpha);

/// K Λ = Λ K^T as K L − L K^T = 0.
CheckReport check_jh_compatibility(const Operator11& k, const JacobiStructure& j, const SampleOptions& opts);
/// ω(KX, Y) = ω(X, KY) as W K − K^T W = 0 with W_ij = ω(∂_i, ∂_j).
CheckReport check_omega_h_compatibility(const Operator11& k, const KForm& omega, const SampleOptions& opts);
/// Requires ω nondegenerate (det W ≠ 0).
CheckReport check_nondegenerate(const KForm& omega, const SampleOptions& opts);

/// {H_i, H_j} = H_i EH_j − H_j EH_i for the chain potentials of H.
CheckReport proposition_involutivity_check(const Expr& h, const HaantjesBasis& basis, const JacobiStructure& j,
                                           const SampleOptions& opts);

enum class ResidualMode { SymbolicCoefficients, SampledOnMf };

struct ParticularIntegralWitness {
  std::vector<Expr> functions;
  std::optional<ExprMatrix> coefficients;
  ResidualMode mode = ResidualMode::SampledOnMf;
};

/// Points with every f_i ≈ 0 found by Gauss-Newton from seeded starts.
std::vector<Assignment<double>> sample_level_set(const Chart& chart, const std::vector<Expr>& fs,
                                                 const std::vector<Expr>& others, const SampleOptions& opts,
                                                 int starts = 32);

CheckReport particular_integral_check(const ParticularIntegralWitness& w, const Expr& h, const JacobiStructure& j,
                                      const SampleOptions& opts);

struct Poissonization {
  ChartPtr chart;
  int t_index = 0;
  KVector p;
  CheckReport report;
};

/// Re-homes an expression-valued tensor onto a chart extending its own.
KVector rehome(const KVector& a, const ChartPtr& target);
/// P̃ = e^{−t}(Λ + ∂t∧E) with [P̃,P̃] = 0 certified and the bracket relation checked on `pairs`
/// using the lift f̃ = e^t f.
Poissonization poissonize(const JacobiStructure& j, const std::vector<std::pair<Expr, Expr>>& pairs,
                          const SampleOptions& opts);
/// Whether K ⊕ (1) satisfies K̃ P̃ = P̃ K̃^T (reported, never asserted).
CheckReport poisson_lift_report(const Operator11& k, const Poissonization& pz, const SampleOptions& opts);

} // namespace hj
