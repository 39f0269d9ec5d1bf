#include "hj/geometry.hpp"

#include <algorithm>
#include <sstream>

namespace hj {

ExprVector zero_vector(int n) { return ExprVector::Constant(n, Expr()); }
ExprMatrix zero_matrix(int rows, int cols) { return ExprMatrix::Constant(rows, cols, Expr()); }

ExprMatrix identity_matrix(int n) {
  ExprMatrix m = zero_matrix(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Expr(1);
  return m;
}

ExprMatrix mat_mul(const ExprMatrix& a, const ExprMatrix& b) {
  ExprMatrix r = zero_matrix(static_cast<int>(a.rows()), static_cast<int>(b.cols()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      if (a(i, k).is_zero_node()) continue;
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        if (!b(k, j).is_zero_node()) r(i, j) += a(i, k) * b(k, j);
    }
  return r;
}

ExprVector mat_vec(const ExprMatrix& a, const ExprVector& v) {
  ExprVector r = zero_vector(static_cast<int>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      if (!a(i, k).is_zero_node() && !v(k).is_zero_node()) r(i) += a(i, k) * v(k);
  return r;
}

ExprMatrix transpose(const ExprMatrix& a) { return a.transpose(); }

Expr dot(const ExprVector& a, const ExprVector& b) {
  Expr s;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (!a(i).is_zero_node() && !b(i).is_zero_node()) s += a(i) * b(i);
  return s;
}

bool is_zero_node(const ExprMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero_node()) return false;
  return true;
}

Expr determinant(const ExprMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
  if (n == 0) return Expr(1);
  if (n > 20) throw std::invalid_argument("determinant too large");
  // minor[mask] = det of the leading popcount(mask) rows restricted to the columns in mask
  std::vector<Expr> minor(std::size_t{1} << n);
  minor[0] = Expr(1);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    int row = __builtin_popcount(mask) - 1;
    Expr s;
    int sign = 1;
    for (int c = n - 1; c >= 0; --c) {
      if (!(mask & (1u << c))) continue;
      // sign from the number of chosen columns after c
      const Expr& sub = minor[mask & ~(1u << c)];
      if (!m(row, c).is_zero_node() && !sub.is_zero_node()) s += sign > 0 ? m(row, c) * sub : -(m(row, c) * sub);
      sign = -sign;
    }
    minor[mask] = s;
  }
  return minor[(1u << n) - 1];
}

ExprMatrix matrix_inverse(const ExprMatrix& m) {
  const int n = static_cast<int>(m.rows());
  Expr det = determinant(m);
  if (det.is_zero_node()) throw std::domain_error("singular matrix");
  ExprMatrix inv = zero_matrix(n, n);
  ExprMatrix sub(n - 1, n - 1);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      for (int i = 0, si = 0; i < n; ++i) {
        if (i == r) continue;
        for (int j = 0, sj = 0; j < n; ++j) {
          if (j == c) continue;
          sub(si, sj++) = m(i, j);
        }
        ++si;
      }
      Expr cof = determinant(sub);
      if ((r + c) % 2) cof = -cof;
      if (cof.is_zero_node()) continue;
      auto q = exact_divide(cof, det);
      inv(c, r) = q ? *q : simplify(cof / det);
    }
  return inv;
}

int sort_sign(IndexTuple& idx) {
  int sign = 1;
  for (std::size_t i = 1; i < idx.size(); ++i)
    for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  return sign;
}

// ---- vector fields ----

VectorField VectorField::zero(const ChartPtr& c) { return {c, zero_vector(c->dim())}; }

VectorField VectorField::basis(const ChartPtr& c, int i) {
  auto v = zero(c);
  v.comp(i) = Expr(1);
  return v;
}

VectorField VectorField::from(const ChartPtr& c, std::vector<Expr> comps) {
  if (static_cast<int>(comps.size()) != c->dim()) throw std::invalid_argument("vector field component count");
  auto v = zero(c);
  for (int i = 0; i < c->dim(); ++i) v.comp(i) = comps[static_cast<std::size_t>(i)];
  return v;
}

Expr VectorField::operator()(const Expr& f) const {
  Expr s;
  for (int i = 0; i < dim(); ++i)
    if (!comp(i).is_zero_node()) s += comp(i) * diff(f, i);
  return s;
}

bool VectorField::is_zero_node() const {
  for (int i = 0; i < dim(); ++i)
    if (!comp(i).is_zero_node()) return false;
  return true;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same(a.chart, b.chart);
  return {a.chart, a.comp + b.comp};
}
VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same(a.chart, b.chart);
  return {a.chart, a.comp - b.comp};
}
VectorField operator*(const Expr& f, const VectorField& a) {
  VectorField r = a;
  for (int i = 0; i < a.dim(); ++i) r.comp(i) = f * a.comp(i);
  return r;
}
bool operator==(const VectorField& a, const VectorField& b) { return same_chart(a.chart, b.chart) && a.comp == b.comp; }

// ---- operators ----

Operator11 Operator11::identity(const ChartPtr& c) { return {c, identity_matrix(c->dim())}; }
Operator11 Operator11::zero(const ChartPtr& c) { return {c, zero_matrix(c->dim(), c->dim())}; }

Operator11 Operator11::diagonal(const ChartPtr& c, const std::vector<Expr>& d) {
  if (static_cast<int>(d.size()) != c->dim()) throw std::invalid_argument("diagonal length");
  auto k = zero(c);
  for (int i = 0; i < c->dim(); ++i) k.mat(i, i) = d[static_cast<std::size_t>(i)];
  return k;
}

Operator11 Operator11::from(const ChartPtr& c, const std::vector<std::vector<Expr>>& rows) {
  int n = c->dim();
  if (static_cast<int>(rows.size()) != n) throw std::invalid_argument("operator matrix must be dim x dim");
  auto k = zero(c);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw std::invalid_argument("operator matrix must be dim x dim");
    for (int j = 0; j < n; ++j) k.mat(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return k;
}

Operator11 operator+(const Operator11& a, const Operator11& b) {
  require_same(a.chart, b.chart);
  return {a.chart, a.mat + b.mat};
}
Operator11 operator-(const Operator11& a, const Operator11& b) {
  require_same(a.chart, b.chart);
  return {a.chart, a.mat - b.mat};
}
Operator11 operator*(const Expr& f, const Operator11& a) {
  Operator11 r = a;
  for (Eigen::Index i = 0; i < r.mat.size(); ++i) r.mat.data()[i] = f * a.mat.data()[i];
  return r;
}
bool operator==(const Operator11& a, const Operator11& b) { return same_chart(a.chart, b.chart) && a.mat == b.mat; }

VectorField op_apply(const Operator11& k, const VectorField& x) {
  require_same(k.chart, x.chart);
  return {x.chart, mat_vec(k.mat, x.comp)};
}

Operator11 op_transpose(const Operator11& k) { return {k.chart, transpose(k.mat)}; }

KForm op_transpose_apply(const Operator11& k, const KForm& alpha) {
  require_same(k.chart, alpha.chart);
  if (alpha.degree != 1) throw std::invalid_argument("transpose acts on 1-forms");
  return one_form(alpha.chart, mat_vec(transpose(k.mat), one_form_components(alpha)));
}

Operator11 op_compose(const Operator11& a, const Operator11& b) {
  require_same(a.chart, b.chart);
  return {a.chart, mat_mul(a.mat, b.mat)};
}

Operator11 op_power(const Operator11& a, int n) {
  Operator11 r = Operator11::identity(a.chart);
  for (int i = 0; i < n; ++i) r = op_compose(r, a);
  return r;
}

// ---- forms and multivectors ----

KForm zero_form(const ChartPtr& c, int k) { return KForm(c, k); }

KForm scalar_form(const ChartPtr& c, const Expr& f) {
  KForm r(c, 0);
  r.add({}, f);
  return r;
}

KForm coordinate_form(const ChartPtr& c, int i) {
  KForm r(c, 1);
  r.add({i}, Expr(1));
  return r;
}

KForm one_form(const ChartPtr& c, const ExprVector& comps) {
  KForm r(c, 1);
  for (int i = 0; i < comps.size(); ++i) r.add({i}, comps(i));
  return r;
}

ExprVector one_form_components(const KForm& a) {
  if (a.degree != 1) throw std::invalid_argument("expected a 1-form");
  ExprVector v = zero_vector(a.dim());
  for (const auto& [k, e] : a.comp) v(k[0]) = e;
  return v;
}

KForm differential(const ChartPtr& c, const Expr& f) {
  KForm r(c, 1);
  for (int i = 0; i < c->dim(); ++i) r.add({i}, diff(f, i));
  return r;
}

KVector to_multivector(const VectorField& x) {
  KVector r(x.chart, 1);
  for (int i = 0; i < x.dim(); ++i) r.add({i}, x.comp(i));
  return r;
}

VectorField to_vector_field(const KVector& a) {
  if (a.degree != 1) throw std::invalid_argument("expected a 1-vector");
  auto v = VectorField::zero(a.chart);
  for (const auto& [k, e] : a.comp) v.comp(k[0]) = e;
  return v;
}

namespace {
template <class Tag> ExprMatrix full_matrix(const Alternating<Tag>& a) {
  if (a.degree != 2) throw std::invalid_argument("expected degree 2");
  ExprMatrix m = zero_matrix(a.dim(), a.dim());
  for (const auto& [k, e] : a.comp) {
    m(k[0], k[1]) = e;
    m(k[1], k[0]) = -e;
  }
  return m;
}

// Sorted concatenation of I and J; returns its sign, 0 when they overlap.
int merge_sign(const IndexTuple& a, const IndexTuple& b, IndexTuple& out) {
  out = a;
  out.insert(out.end(), b.begin(), b.end());
  return sort_sign(out);
}

template <class Tag> Alternating<Tag> wedge_impl(const Alternating<Tag>& a, const Alternating<Tag>& b) {
  require_same(a.chart, b.chart);
  Alternating<Tag> r(a.chart, a.degree + b.degree);
  if (r.degree > a.dim()) return r;
  IndexTuple idx;
  for (const auto& [ka, va] : a.comp)
    for (const auto& [kb, vb] : b.comp) {
      int s = merge_sign(ka, kb, idx);
      if (s == 0) continue;
      r.add(idx, s > 0 ? va * vb : -(va * vb));
    }
  return r;
}

// Right derivative ∂/∂ξ_i of the monomial ξ_I (sign from moving ξ_i to the right end).
int right_derivative(const IndexTuple& idx, int i, IndexTuple& out) {
  auto it = std::find(idx.begin(), idx.end(), i);
  if (it == idx.end()) return 0;
  auto pos = it - idx.begin();
  out = idx;
  out.erase(out.begin() + pos);
  return ((static_cast<long>(idx.size()) - 1 - pos) % 2 == 0) ? 1 : -1;
}

// Σ_i (A ←∂ξ_i)(∂_i B)
KVector half_bracket(const KVector& a, const KVector& b, int degree) {
  KVector r(a.chart, degree);
  int n = a.dim();
  IndexTuple da, prod;
  for (int i = 0; i < n; ++i) {
    for (const auto& [ka, va] : a.comp) {
      int s1 = right_derivative(ka, i, da);
      if (s1 == 0) continue;
      for (const auto& [kb, vb] : b.comp) {
        Expr dvb = diff(vb, i);
        if (dvb.is_zero_node()) continue;
        int s2 = merge_sign(da, kb, prod);
        if (s2 == 0) continue;
        Expr term = va * dvb;
        r.add(prod, s1 * s2 > 0 ? term : -term);
      }
    }
  }
  return r;
}
} // namespace

ExprMatrix antisymmetric_matrix(const KVector& a) { return full_matrix(a); }
ExprMatrix antisymmetric_matrix(const KForm& a) { return full_matrix(a); }

Expr evaluate(const KVector& lambda, const KForm& alpha, const KForm& beta) {
  require_same(lambda.chart, alpha.chart);
  require_same(lambda.chart, beta.chart);
  if (lambda.degree != 2 || alpha.degree != 1 || beta.degree != 1)
    throw std::invalid_argument("bivector evaluation needs two 1-forms");
  Expr s;
  for (const auto& [k, e] : lambda.comp)
    s += e * (alpha.get({k[0]}) * beta.get({k[1]}) - alpha.get({k[1]}) * beta.get({k[0]}));
  return s;
}

Expr evaluate(const KForm& omega, const VectorField& x, const VectorField& y) {
  require_same(omega.chart, x.chart);
  require_same(omega.chart, y.chart);
  if (omega.degree != 2) throw std::invalid_argument("expected a 2-form");
  Expr s;
  for (const auto& [k, e] : omega.comp)
    s += e * (x.comp(k[0]) * y.comp(k[1]) - x.comp(k[1]) * y.comp(k[0]));
  return s;
}

Expr evaluate(const KForm& alpha, const VectorField& x) {
  require_same(alpha.chart, x.chart);
  if (alpha.degree != 1) throw std::invalid_argument("expected a 1-form");
  Expr s;
  for (const auto& [k, e] : alpha.comp) s += e * x.comp(k[0]);
  return s;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same(x.chart, y.chart);
  auto r = VectorField::zero(x.chart);
  for (int i = 0; i < x.dim(); ++i) r.comp(i) = x(y.comp(i)) - y(x.comp(i));
  return r;
}

KForm exterior_derivative(const KForm& w) {
  KForm r(w.chart, w.degree + 1);
  if (r.degree > w.dim()) return r;
  for (const auto& [k, e] : w.comp)
    for (int i = 0; i < w.dim(); ++i) {
      Expr d = diff(e, i);
      if (d.is_zero_node()) continue;
      IndexTuple idx{i};
      idx.insert(idx.end(), k.begin(), k.end());
      r.add(idx, d);
    }
  return r;
}

KForm interior_product(const VectorField& x, const KForm& w) {
  require_same(x.chart, w.chart);
  if (w.degree == 0) return KForm(w.chart, 0);
  KForm r(w.chart, w.degree - 1);
  for (const auto& [k, e] : w.comp)
    for (std::size_t m = 0; m < k.size(); ++m) {
      const Expr& xi = x.comp(k[m]);
      if (xi.is_zero_node()) continue;
      IndexTuple rest = k;
      rest.erase(rest.begin() + static_cast<long>(m));
      r.add(rest, m % 2 == 0 ? xi * e : -(xi * e));
    }
  return r;
}

KForm wedge(const KForm& a, const KForm& b) { return wedge_impl(a, b); }
KVector wedge(const KVector& a, const KVector& b) { return wedge_impl(a, b); }

KVector schouten_bracket(const KVector& a, const KVector& b) {
  require_same(a.chart, b.chart);
  int deg = a.degree + b.degree - 1;
  if (deg < 0 || deg > a.dim()) return KVector(a.chart, std::max(deg, 0));
  KVector ab = half_bracket(a, b, deg);
  KVector ba = half_bracket(b, a, deg);
  bool odd = ((a.degree - 1) * (b.degree - 1)) % 2 != 0;
  KVector r = odd ? ab + ba : ab - ba;
  // overall (−1)^(a−1): the convention in which [Λ,Λ] = 2E∧Λ for Jacobi pairs
  return a.degree % 2 == 0 ? -r : r;
}

Expr lie_derivative(const VectorField& x, const Expr& f) { return x(f); }

KForm lie_derivative(const VectorField& x, const KForm& w) {
  require_same(x.chart, w.chart);
  KForm a = interior_product(x, exterior_derivative(w));
  if (w.degree == 0) return a;
  return a + exterior_derivative(interior_product(x, w));
}

KVector lie_derivative(const VectorField& x, const KVector& t) { return schouten_bracket(to_multivector(x), t); }

std::vector<Expr> components(const VectorField& x) {
  return std::vector<Expr>(x.comp.data(), x.comp.data() + x.comp.size());
}

std::vector<Expr> components(const Operator11& k) {
  std::vector<Expr> out;
  for (int i = 0; i < k.dim(); ++i)
    for (int j = 0; j < k.dim(); ++j) out.push_back(k.mat(i, j));
  return out;
}

// ---- printing ----

namespace {
std::string coefficient_prefix(const Expr& e) {
  std::string s = to_string(e);
  if (s == "1") return "";
  if (e.terms().size() > 1) return "(" + s + ")*";
  return s + "*";
}

template <class Tag> std::string alt_string(const Alternating<Tag>& a, bool form) {
  if (a.comp.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, e] : a.comp) {
    if (k.empty()) {
      os << to_string(e);
      continue;
    }
    bool neg = e.terms().size() == 1 && sgn(e.terms()[0].coeff) < 0;
    if (!first) os << (neg ? " - " : " + ");
    else if (neg) os << "-";
    first = false;
    os << coefficient_prefix(neg ? -e : e);
    for (std::size_t m = 0; m < k.size(); ++m) {
      if (m) os << "/\\";
      const std::string& name = a.chart->coords[static_cast<std::size_t>(k[m])];
      os << (form ? "d(" + name + ")" : "del(" + name + ")");
    }
  }
  return os.str();
}
} // namespace

std::string to_string(const VectorField& x) { return alt_string(to_multivector(x), false); }
std::string to_string(const KForm& a) { return alt_string(a, true); }
std::string to_string(const KVector& a) { return alt_string(a, false); }

std::string to_string(const Operator11& k) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < k.dim(); ++i) {
    if (i) os << ", ";
    os << "[";
    for (int j = 0; j < k.dim(); ++j) {
      if (j) os << ", ";
      os << to_string(k.mat(i, j));
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

} // namespace hj
