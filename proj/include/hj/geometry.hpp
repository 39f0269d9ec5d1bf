#pragma once

#include <Eigen/Core>

#include <map>
#include <vector>

#include "hj/chart.hpp"
#include "hj/expr.hpp"

namespace Eigen {
template <> struct NumTraits<hj::Expr> {
  using Real = hj::Expr;
  using NonInteger = hj::Expr;
  using Literal = hj::Expr;
  using Nested = hj::Expr;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 3,
    MulCost = 3
  };
  static Real epsilon() { return Real(0); }
  static Real dummy_precision() { return Real(0); }
  static int digits10() { return 0; }
};
} // namespace Eigen

namespace hj {

using ExprVector = Eigen::Matrix<Expr, Eigen::Dynamic, 1>;
using ExprMatrix = Eigen::Matrix<Expr, Eigen::Dynamic, Eigen::Dynamic>;

ExprVector zero_vector(int n);
ExprMatrix zero_matrix(int rows, int cols);
ExprMatrix identity_matrix(int n);
ExprMatrix mat_mul(const ExprMatrix& a, const ExprMatrix& b);
ExprVector mat_vec(const ExprMatrix& a, const ExprVector& v);
ExprMatrix transpose(const ExprMatrix& a);
Expr dot(const ExprVector& a, const ExprVector& b);
bool is_zero_node(const ExprMatrix& m);
/// Determinant by Laplace expansion over column subsets.
Expr determinant(const ExprMatrix& m);
/// Exact inverse via the adjugate; throws std::domain_error when the determinant is the zero node.
ExprMatrix matrix_inverse(const ExprMatrix& m);

struct VectorField {
  ChartPtr chart;
  ExprVector comp;

  static VectorField zero(const ChartPtr& c);
  /// Coordinate field ∂_i.
  static VectorField basis(const ChartPtr& c, int i);
  static VectorField from(const ChartPtr& c, std::vector<Expr> comps);
  int dim() const { return static_cast<int>(comp.size()); }
  /// Directional derivative X(f).
  Expr operator()(const Expr& f) const;
  bool is_zero_node() const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& a);
bool operator==(const VectorField& a, const VectorField& b);

using IndexTuple = std::vector<int>;

/// Sign of the permutation sorting `idx`, 0 if an index repeats; `idx` is sorted in place.
int sort_sign(IndexTuple& idx);

/// Alternating tensor with components on strictly increasing index tuples.
template <class Tag> struct Alternating {
  ChartPtr chart;
  int degree = 0;
  std::map<IndexTuple, Expr> comp;

  Alternating() = default;
  Alternating(ChartPtr c, int k) : chart(std::move(c)), degree(k) {}

  /// Component on an arbitrary tuple (antisymmetric extension).
  Expr get(IndexTuple idx) const {
    int s = sort_sign(idx);
    if (s == 0) return Expr();
    auto it = comp.find(idx);
    if (it == comp.end()) return Expr();
    return s > 0 ? it->second : -it->second;
  }
  /// Adds v to the component on `idx` (any order).
  void add(IndexTuple idx, const Expr& v) {
    int s = sort_sign(idx);
    if (s == 0 || v.is_zero_node()) return;
    auto& slot = comp[idx];
    slot += s > 0 ? v : -v;
    if (slot.is_zero_node()) comp.erase(idx);
  }
  void set(IndexTuple idx, const Expr& v) {
    int s = sort_sign(idx);
    if (s == 0) return;
    comp.erase(idx);
    add(idx, s > 0 ? v : -v);
  }
  bool is_zero_node() const { return comp.empty(); }
  int dim() const { return chart ? chart->dim() : 0; }

  friend Alternating operator+(Alternating a, const Alternating& b) {
    for (const auto& [k, v] : b.comp) a.add(k, v);
    return a;
  }
  friend Alternating operator-(const Alternating& a) {
    Alternating r(a.chart, a.degree);
    for (const auto& [k, v] : a.comp) r.comp[k] = -v;
    return r;
  }
  friend Alternating operator-(const Alternating& a, const Alternating& b) { return a + (-b); }
  friend Alternating operator*(const Expr& f, const Alternating& a) {
    Alternating r(a.chart, a.degree);
    for (const auto& [k, v] : a.comp) r.add(k, f * v);
    return r;
  }
  friend bool operator==(const Alternating& a, const Alternating& b) {
    return a.degree == b.degree && a.comp == b.comp;
  }
};

struct FormTag {};
struct MultivectorTag {};
using KForm = Alternating<FormTag>;
using KVector = Alternating<MultivectorTag>;

/// (1,1)-tensor; mat(i, j) = K^i_j, row = output component, column = input component.
struct Operator11 {
  ChartPtr chart;
  ExprMatrix mat;

  static Operator11 identity(const ChartPtr& c);
  static Operator11 zero(const ChartPtr& c);
  static Operator11 diagonal(const ChartPtr& c, const std::vector<Expr>& d);
  static Operator11 from(const ChartPtr& c, const std::vector<std::vector<Expr>>& rows);
  int dim() const { return static_cast<int>(mat.rows()); }
};

Operator11 operator+(const Operator11& a, const Operator11& b);
Operator11 operator-(const Operator11& a, const Operator11& b);
Operator11 operator*(const Expr& f, const Operator11& a);
bool operator==(const Operator11& a, const Operator11& b);

// Constructors and conversions.
KForm zero_form(const ChartPtr& c, int k);
KForm scalar_form(const ChartPtr& c, const Expr& f);
KForm coordinate_form(const ChartPtr& c, int i);
KForm one_form(const ChartPtr& c, const ExprVector& comps);
ExprVector one_form_components(const KForm& a);
KForm differential(const ChartPtr& c, const Expr& f);
KVector to_multivector(const VectorField& x);
VectorField to_vector_field(const KVector& a);
/// Full antisymmetric matrix of a bivector / 2-form.
ExprMatrix antisymmetric_matrix(const KVector& a);
ExprMatrix antisymmetric_matrix(const KForm& a);
/// Bivector Λ(α, β) = Σ Λ^{ij} α_i β_j.
Expr evaluate(const KVector& lambda, const KForm& alpha, const KForm& beta);
/// 2-form ω(X, Y).
Expr evaluate(const KForm& omega, const VectorField& x, const VectorField& y);
/// 1-form α(X).
Expr evaluate(const KForm& alpha, const VectorField& x);

// Calculus.
VectorField lie_bracket(const VectorField& x, const VectorField& y);
KForm exterior_derivative(const KForm& w);
KForm interior_product(const VectorField& x, const KForm& w);
KForm wedge(const KForm& a, const KForm& b);
KVector wedge(const KVector& a, const KVector& b);
/// Schouten-Nijenhuis bracket; on 1-vectors the Lie bracket, [A,B] = (-1)^(ab) [B,A].
KVector schouten_bracket(const KVector& a, const KVector& b);
Expr lie_derivative(const VectorField& x, const Expr& f);
KForm lie_derivative(const VectorField& x, const KForm& w);
KVector lie_derivative(const VectorField& x, const KVector& t);

// Operators.
VectorField op_apply(const Operator11& k, const VectorField& x);
Operator11 op_transpose(const Operator11& k);
/// K^T acting on a 1-form: (K^T α)_j = Σ_i K^i_j α_i.
KForm op_transpose_apply(const Operator11& k, const KForm& alpha);
Operator11 op_compose(const Operator11& a, const Operator11& b);
Operator11 op_power(const Operator11& a, int n);

/// Every component (vector/matrix entries or tensor components) as a flat list.
std::vector<Expr> components(const VectorField& x);
std::vector<Expr> components(const Operator11& k);
template <class Tag> std::vector<Expr> components(const Alternating<Tag>& a) {
  std::vector<Expr> out;
  for (const auto& [k, v] : a.comp) out.push_back(v);
  return out;
}

std::string to_string(const VectorField& x);
std::string to_string(const KForm& a);
std::string to_string(const KVector& a);
std::string to_string(const Operator11& k);

} // namespace hj
