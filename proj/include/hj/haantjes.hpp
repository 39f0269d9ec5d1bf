#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hj/geometry.hpp"
#include "hj/report.hpp"

namespace hj {

/// Sections of T M (rank n) or of T M × R (rank n+1) with their bracket.
struct Algebroid {
  ChartPtr chart;
  bool extended = false;

  int rank() const { return chart->dim() + (extended ? 1 : 0); }
  /// [X, Z] on T M; ([X, Z], X(h) − Z(f)) on T M × R.
  ExprVector bracket(const ExprVector& u, const ExprVector& v) const;
  ExprVector basis(int a) const;
};

/// Vector-valued 2-form on the frame of an algebroid, stored as the full antisymmetric table.
struct VectorValued2Form {
  ChartPtr chart;
  int rank = 0;
  std::vector<ExprVector> table;

  const ExprVector& at(int a, int b) const { return table[static_cast<std::size_t>(a * rank + b)]; }
  /// Value on arbitrary sections by bilinearity.
  ExprVector eval(const ExprVector& u, const ExprVector& v) const;
  /// Components on sorted pairs a < b.
  std::vector<Expr> components() const;
  bool is_zero_node() const;
};

/// Nijenhuis torsion of M on the algebroid frame, straight from the definition.
VectorValued2Form torsion_table(const Algebroid& alg, const ExprMatrix& m);
/// Haantjes torsion assembled from a torsion table.
VectorValued2Form haantjes_from_torsion(const VectorValued2Form& tau, const ExprMatrix& m);
/// Torsion on arbitrary sections, computed literally (no bilinearity shortcut).
ExprVector torsion_literal(const Algebroid& alg, const ExprMatrix& m, const ExprVector& x, const ExprVector& y);

VectorValued2Form nijenhuis_torsion(const Operator11& k);
VectorValued2Form haantjes_torsion(const Operator11& k);
CheckReport check_haantjes(const Operator11& k, const SampleOptions& opts);
CheckReport check_nijenhuis(const Operator11& k, const SampleOptions& opts);

struct HaantjesBasis {
  ChartPtr chart;
  std::vector<Operator11> ops;
  bool abelian_required = false;
};

/// Function name not used by any function atom in `exprs`.
std::string fresh_function_name(const std::string& base, const std::vector<Expr>& exprs);
/// Abstract function of every chart coordinate.
Expr generic_function(const Chart& c, const std::string& name);

/// Haantjes torsion of a frame matrix on an algebroid.
CheckReport check_haantjes_matrix(const Algebroid& alg, const ExprMatrix& m, const SampleOptions& opts);
/// Generators Haantjes, module closure (fresh f, g), ring closure over all ordered products, commutativity.
CheckReport check_algebra_matrices(const Algebroid& alg, const std::vector<ExprMatrix>& ms, bool abelian_required,
                                   const std::string& sym, const SampleOptions& opts);
CheckReport check_haantjes_algebra(const HaantjesBasis& basis, const SampleOptions& opts);
/// K1 K2 − K2 K1 = 0.
CheckReport check_commute(const Operator11& a, const Operator11& b, const SampleOptions& opts);

struct IndependenceResult {
  Certainty wedge_zero = Certainty::Unknown;
  bool independent = false;
  /// "symbolic", "numeric" or "undecided".
  std::string method;
  /// Nonzero wedge component whose zero set is the degeneracy locus, when the wedge has a single one.
  std::optional<Expr> locus;
};

/// Generic linear independence of 1-forms via α1∧...∧αm, numeric rank fallback.
IndependenceResult forms_independent(const std::vector<KForm>& forms, const SampleOptions& opts);
/// Generic linear independence of vector fields.
IndependenceResult fields_independent(const std::vector<VectorField>& fields, const SampleOptions& opts);

struct ChainReport {
  Expr generator;
  std::vector<KForm> forms;
  std::vector<ZeroCertainty> closed;
  std::vector<std::optional<Expr>> potentials;
  IndependenceResult independence;
  CheckReport frobenius;
  CheckReport report;
};

std::vector<KForm> chain_codistribution(const Expr& h, const HaantjesBasis& basis);
/// Exact radial potential of a closed polynomial 1-form (star-shaped chart); nullopt otherwise.
std::optional<Expr> radial_potential(const KForm& alpha);
ChainReport verify_chain(const Expr& h, const HaantjesBasis& basis, const SampleOptions& opts);

CheckReport frobenius_codistribution(const std::vector<KForm>& forms, const SampleOptions& opts);
CheckReport frobenius_distribution(const std::vector<VectorField>& fields, const SampleOptions& opts);
CheckReport invariance_check(const Operator11& k, const std::vector<KForm>& forms, const SampleOptions& opts);

struct SpectralCluster {
  double re = 0;
  double im = 0;
  int algebraic = 0;
  int geometric = 0;
  int riesz_index = 0;
};

struct SpectralPoint {
  std::map<std::string, double> point;
  bool ok = false;
  std::string error;
  std::vector<SpectralCluster> clusters;
  bool all_even = false;
};

struct SpectralReport {
  std::vector<SpectralPoint> points;
  bool all_even = false;
  CheckReport report;
};

/// Numeric eigen-structure at chart points; abstract symbols get seeded random values.
SpectralReport spectral_report(const Operator11& k, const std::vector<std::map<std::string, double>>& points,
                               const SampleOptions& opts);

} // namespace hj
