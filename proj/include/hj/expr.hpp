#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hj {

using Rational = mpq_class;

/// Raised when an operation would produce a canonical form above the node budget.
class BudgetExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNodeBudget = 1'000'000;

struct Atom;
using AtomPtr = std::shared_ptr<const Atom>;

struct Factor {
  AtomPtr atom;
  int power = 1;
};

/// coeff * prod(atom^power); factors sorted by atom order, powers nonzero.
struct Term {
  std::vector<Factor> factors;
  Rational coeff;
};

namespace detail {
struct Poly;
}

/// Public shape of a canonical expression.
enum class NodeKind { Const, Coord, Param, Function, Sum, Product, IntPow, Exp };

/// Exact scalar expression in canonical Laurent-polynomial form over atoms.
///
/// Atoms are coordinates, named parameters, abstract function jets, exp(u)
/// and inverted sums. Every value is canonical on construction, so
/// structural equality is semantic equality on the polynomial layer.
class Expr {
public:
  Expr();
  Expr(int v);
  Expr(long v);
  Expr(long long v);
  Expr(const Rational& v);

  static Expr coord(int index, std::string name);
  static Expr param(std::string name);
  /// Abstract function `name` of the listed chart coordinates.
  static Expr function(std::string name, std::vector<int> args, std::vector<std::string> arg_names);
  static Expr from_terms(std::vector<Term> terms);

  bool is_zero_node() const;
  bool is_const() const;
  std::optional<Rational> as_rational() const;
  NodeKind kind() const;
  const std::vector<Term>& terms() const;
  std::size_t hash() const;
  std::size_t node_count() const;
  bool has_exp() const;
  bool has_inverse() const;
  bool has_function() const;
  /// True when no negative powers, exp or inverted sums occur.
  bool is_polynomial() const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator/=(const Expr& o);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

  const detail::Poly& poly() const { return *p_; }

private:
  explicit Expr(std::shared_ptr<const detail::Poly> p) : p_(std::move(p)) {}
  std::shared_ptr<const detail::Poly> p_;
  friend struct detail::Poly;
};

enum class AtomKind : std::uint8_t { Coord, Param, Function, Exp, InvSum };

struct Atom {
  AtomKind kind;
  int index = -1;                     // Coord
  std::string name;                   // Coord, Param, Function
  std::vector<int> args;              // Function: chart indices
  std::vector<std::string> arg_names; // Function: printing
  std::vector<int> derivs;            // Function: sorted partial multi-index
  Expr inner;                         // Exp argument / InvSum base
  std::size_t hash = 0;
  std::uint64_t mask = 0;             // coordinate dependence, bit 63 = index >= 63
};

std::strong_ordering compare(const Atom& a, const Atom& b);
std::strong_ordering compare(const Expr& a, const Expr& b);

Expr pow(const Expr& base, int n);
Expr exp(const Expr& arg);
Expr inverse(const Expr& e);
Expr diff(const Expr& e, int index);
/// Replace coordinate `index` by `value` everywhere (functions must not depend on it).
Expr substitute(const Expr& e, int index, const Expr& value);
/// Removes common sum factors between numerator and inverted sums.
Expr simplify(const Expr& e);

/// Direct constructors for atoms as expressions.
Expr atom_expr(AtomPtr a, int power = 1);
AtomPtr make_exp_atom(const Expr& arg);
AtomPtr make_inv_atom(const Expr& base);
AtomPtr derivative_atom(const Atom& fn, int index);

/// e multiplied by every inverted sum at its largest power, expanded.
struct Cleared {
  Expr numerator;
  std::vector<std::pair<Expr, int>> denominators;
};
Cleared clear_denominators(const Expr& e);
/// Exact multivariate division over the atoms; nullopt when den does not divide num.
std::optional<Expr> exact_divide(const Expr& num, const Expr& den);

std::string to_string(const Expr& e);
std::string to_string(const Rational& r);
std::ostream& operator<<(std::ostream& os, const Expr& e);

/// Sorted, de-duplicated leaf atoms (coords, params, function jets), recursing into exp and inverted sums.
std::vector<AtomPtr> leaf_atoms(const Expr& e);
/// Largest coordinate index referenced, or -1.
int max_coord_index(const Expr& e);
bool depends_on(const Expr& e, int index);

namespace detail {

struct Poly {
  std::vector<Term> terms;
  std::size_t hash = 0;
  std::size_t nodes = 1;
  bool exp = false;
  bool inv = false;
  bool fn = false;
  bool negpow = false;
  std::uint64_t mask = 0;

  static Expr build(std::vector<Term> sorted_terms);
};

} // namespace detail
} // namespace hj

template <> struct std::hash<hj::Expr> {
  std::size_t operator()(const hj::Expr& e) const noexcept { return e.hash(); }
};
