#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hj/geometry.hpp"
#include "hj/haantjes.hpp"
#include "hj/jacobi.hpp"
#include "hj/report.hpp"

namespace hj {

struct ContactStructure {
  ChartPtr chart;
  KForm theta;
  KForm d_theta;
  /// (♭X)_j = Σ_i flat(j, i) X^i with ♭(X) = ι_X dθ + θ(X) θ.
  ExprMatrix flat;
  ExprMatrix sharp;
  VectorField reeb;
  /// Coefficient of θ∧(dθ)^n on dx^1∧...∧dx^{2n+1}.
  Expr volume;
  CheckReport validity;

  bool valid() const { return validity.pass(); }
  int n() const { return (chart->dim() - 1) / 2; }
};

/// θ = dz − Σ p_i dq^i on a Darboux contact chart.
KForm darboux_contact_form(const ChartPtr& c);

/// Certifies θ∧(dθ)^n ≠ 0, inverts ♭ exactly and certifies ι_Rθ = 1, ι_R dθ = 0.
ContactStructure validate_contact(const KForm& theta, const SampleOptions& opts);

KForm contact_flat(const ContactStructure& c, const VectorField& x);
VectorField contact_sharp(const ContactStructure& c, const KForm& alpha);

/// Λ(α, β) = dθ(♯α, ♯β), E = ♯θ. On a Darboux chart with the Darboux form the result is
/// compared against Λ = (∂q^i + p_i ∂z)∧∂p_i, E = ∂z.
JacobiStructure induced_jacobi_from_contact(const ContactStructure& c, const SampleOptions& opts);

/// ι_Xθ = −f, ι_X dθ = df − (Rf) θ.
VectorField contact_hamiltonian_vf(const Expr& f, const ContactStructure& c);

/// X_H f + f RH = 0.
CheckReport is_dissipated(const Expr& f, const Expr& h, const ContactStructure& c, const SampleOptions& opts);

enum class ThetaCondition {
  /// θ(KX)θ(Y) = θ(X)θ(KY) for all fields, decided as K^Tθ∧θ = 0.
  AllFields,
  /// θ(KX_f)θ(X_g) = θ(X_f)θ(KX_g) for abstract f, g.
  HamiltonianFields
};

struct ContactHaantjesOptions {
  ThetaCondition theta = ThetaCondition::AllFields;
  /// Also require ♯K^T = K♯.
  bool sharp_condition = false;
};

/// dθ(KX, Y) = dθ(X, KY) together with the selected θ-condition; the other θ-condition is reported as a value.
CheckReport check_contact_haantjes(const Operator11& k, const ContactStructure& c, const SampleOptions& opts,
                                   const ContactHaantjesOptions& copts = {});

struct ReebEigen {
  Expr g;
  CheckReport report;
};

/// KR∧R = 0 and g = θ(KR).
ReebEigen reeb_eigen_check(const Operator11& k, const ContactStructure& c, const SampleOptions& opts);

/// θ(KX_f) + f θ(KR) = 0.
CheckReport theta_Kf_condition(const Operator11& k, const Expr& f, const ContactStructure& c,
                               const SampleOptions& opts);

/// Σ_i p_i ∂f/∂p_i = 0 on a Darboux contact chart.
CheckReport is_homogeneous_deg0_momenta(const Expr& f, const ChartPtr& c, const SampleOptions& opts);

enum class SpecialKind { First, Second, Neither };
std::string kind_name(SpecialKind k);

struct KindReport {
  SpecialKind kind = SpecialKind::Neither;
  CheckReport report;
};

/// Structural conditions K^i_z = 0 and K^z_j = p_i K^{q_i}_j (j ≠ z), dθ-symmetry, then the defining
/// θ-identities: on an abstract f for the first kind, on a degree-0 test family for the second.
KindReport classify_special_kind(const Operator11& k, const ContactStructure& c, const SampleOptions& opts);

/// Bracket identities for the chain potentials of H under the contact-induced Jacobi bracket.
/// First kind: RH_i = 0, {H_i, H_j} = 0, {H_i, H} = H_i RH.
/// Second kind (H and H_i of degree 0 in the momenta): {H_i, H_j} = H_i RH_j − H_j RH_i,
/// {H_i, H} = H_i RH − H RH_i.
CheckReport techain_check(const Expr& h, const HaantjesBasis& basis, const ContactStructure& c, SpecialKind kind,
                          const SampleOptions& opts);

/// {H_i, H_j} = H_i RH_j − H_j RH_i whenever θ(K X_f) = −f θ(KR) holds for f = H and every potential.
CheckReport contact_involution_check(const Expr& h, const HaantjesBasis& basis, const ContactStructure& c,
                                     const SampleOptions& opts);

enum class AppendixFamily { F1, F2, F3 };
std::string family_name(AppendixFamily f);

/// Arbitrary functions of the appendix families on the chart (q^1, q^2, p_1, p_2, z).
/// F1, F2 use d, b, kzz; F3 uses d, qk1z (lower-case: K^z_{q1} = d·qk1z), qk2z, pk1z.
struct AppendixParams {
  Expr d, b, kzz;
  Expr qk1z, qk2z, pk1z;
};

Operator11 appendix_family(AppendixFamily family, const ChartPtr& c, const AppendixParams& p);

/// Abstract functions of every coordinate, named with `suffix`; F3's qk1z omits p_2.
AppendixParams abstract_appendix_params(AppendixFamily family, const ChartPtr& c, const std::string& suffix);

struct GeneralFormParams {
  Expr a, b, c, d, e, f;
  Expr qk1z, qk2z, pk1z, pk2z, kzz;
};

Operator11 appendix_general_form(const ChartPtr& c, const GeneralFormParams& p);

/// Haantjes torsion of every instance; pairwise commutation reported per pair.
CheckReport appendix_report(AppendixFamily family, const std::vector<Operator11>& instances,
                            const SampleOptions& opts);

} // namespace hj
