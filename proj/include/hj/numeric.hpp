#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hj/expr.hpp"
#include "hj/zero.hpp"

namespace hj {

class UnboundAtom : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Values for leaf atoms (coordinates, parameters, function jets), looked up structurally.
template <class T> class Assignment {
public:
  void set(AtomPtr a, T v) {
    auto it = find(*a);
    if (it != slots_.end() && compare(*it->first, *a) == 0)
      it->second = std::move(v);
    else
      slots_.insert(it, {std::move(a), std::move(v)});
  }
  const T* get(const Atom& a) const {
    auto it = const_cast<Assignment*>(this)->find(a);
    if (it != slots_.end() && compare(*it->first, a) == 0) return &it->second;
    return nullptr;
  }
  const std::vector<std::pair<AtomPtr, T>>& slots() const { return slots_; }

private:
  typename std::vector<std::pair<AtomPtr, T>>::iterator find(const Atom& a) {
    return std::lower_bound(slots_.begin(), slots_.end(), a,
                            [](const std::pair<AtomPtr, T>& s, const Atom& x) { return compare(*s.first, x) < 0; });
  }
  std::vector<std::pair<AtomPtr, T>> slots_;
};

/// Exact value; nullopt if exp occurs, an inverted sum vanishes, or an atom is unbound.
std::optional<Rational> eval_exact(const Expr& e, const Assignment<Rational>& values);
/// Floating value; nullopt if non-finite, an inverted sum vanishes, or an atom is unbound.
std::optional<double> eval_float(const Expr& e, const Assignment<double>& values);
/// Sum of absolute term values at the top level (scale for relative tolerances).
std::optional<double> eval_scale(const Expr& e, const Assignment<double>& values);

struct NumericEnv {
  std::map<std::string, double> coords;
  std::map<std::string, double> params;
  /// Concrete instantiations of abstract functions on the same chart.
  std::map<std::string, Expr> functions;
};

/// IEEE double value at a point; throws UnboundAtom for missing bindings.
double eval_numeric(const Expr& e, const NumericEnv& env);

/// Leaf atoms of several expressions, sorted and de-duplicated.
std::vector<AtomPtr> leaf_atoms(const std::vector<Expr>& es);
/// Seeded random values for the given leaves.
Assignment<double> random_assignment(const std::vector<AtomPtr>& leaves, SamplePoints& rng);

} // namespace hj
