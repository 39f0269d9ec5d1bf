#pragma once

#include <optional>
#include <utility>

#include "hj/geometry.hpp"
#include "hj/haantjes.hpp"
#include "hj/jacobi.hpp"
#include "hj/report.hpp"

namespace hj {

struct LCSStructure {
  ChartPtr chart;
  KForm omega;
  KForm eta;
  /// (♭X)_j = Σ_i flat(j, i) X^i with ♭(X) = ι_X Ω.
  ExprMatrix flat;
  ExprMatrix sharp;
  CheckReport validity;

  bool valid() const { return validity.pass(); }
};

/// Ω = e^l Σ dq^i∧dp_i and η = dl on an LCS chart (q^1..q^n, p_1..p_n).
std::pair<KForm, KForm> lcs_local_forms(const ChartPtr& c, const Expr& l);

/// Certifies dη = 0, dΩ − η∧Ω = 0 and det Ω ≠ 0, then inverts ♭ exactly.
LCSStructure validate_lcs(const KForm& omega, const KForm& eta, const SampleOptions& opts);

VectorField lcs_sharp(const LCSStructure& s, const KForm& alpha);

/// Λ(α, β) = Ω(♯α, ♯β), E = ♯η; compared against the local display when `l` is given.
JacobiStructure induced_jacobi_from_lcs(const LCSStructure& s, const SampleOptions& opts,
                                        const std::optional<Expr>& l = std::nullopt);

/// ι_{X_f} Ω = df − f η.
VectorField lcs_hamiltonian_vf(const Expr& f, const LCSStructure& s);
/// {f, g} = X_g f − f η(X_g).
Expr lcs_bracket(const Expr& f, const Expr& g, const LCSStructure& s);

/// Ω(KX, Y) = Ω(X, KY).
CheckReport check_lcsh(const Operator11& k, const LCSStructure& s, const SampleOptions& opts);

/// η(KE) = 0.
CheckReport eta_KE_check(const Operator11& k, const LCSStructure& s, const SampleOptions& opts);

/// Under η(KE) = 0 for the algebra: η(K_i X_H) = η(X_{H_i}) and
/// {H_i, H_j} = H_j η(X_{H_i}) − H_i η(X_{H_j}) = H_i EH_j − H_j EH_i.
CheckReport lcs_involution_check(const Expr& h, const HaantjesBasis& basis, const LCSStructure& s,
                                 const SampleOptions& opts);

} // namespace hj
