#include "hj/zero.hpp"

#include <cmath>
#include <sstream>

#include "hj/numeric.hpp"

namespace hj {

SamplePoints::SamplePoints(std::uint64_t seed) : gen_(seed) {}

Rational SamplePoints::next_rational() {
  long k = static_cast<long>(gen_() % 41) - 20;
  Rational r(k, 7);
  r.canonicalize();
  return r;
}

std::string certainty_name(Certainty c) {
  switch (c) {
  case Certainty::ProvenZero:
    return "ProvenZero";
  case Certainty::ProbablyZero:
    return "ProbablyZero";
  case Certainty::Unknown:
    return "Unknown";
  case Certainty::ProvenNonzero:
    return "ProvenNonzero";
  }
  return "Unknown";
}

namespace {

std::string atom_text(const AtomPtr& a) { return to_string(atom_expr(a)); }

std::string double_text(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Exact witness search for exp-free expressions.
std::optional<Witness> exact_witness(const Expr& e, const std::vector<AtomPtr>& leaves, const SampleOptions& o) {
  SamplePoints rng(o.seed);
  int attempts = std::max(4 * o.samples, 16);
  for (int s = 0; s < attempts; ++s) {
    Assignment<Rational> v;
    Witness w;
    for (const auto& a : leaves) {
      Rational x = rng.next_rational();
      v.set(a, x);
      w.point.push_back({atom_text(a), to_string(x)});
    }
    auto val = eval_exact(e, v);
    if (val && sgn(*val) != 0) {
      w.value = to_string(*val);
      return w;
    }
  }
  return std::nullopt;
}

} // namespace

ZeroCertainty is_zero(const Expr& e, const SampleOptions& o) {
  ZeroCertainty r;
  r.samples = o.samples;
  r.tol = o.tol;
  if (e.is_zero_node()) {
    r.tag = Certainty::ProvenZero;
    return r;
  }
  Expr numerator;
  try {
    numerator = clear_denominators(e).numerator;
  } catch (const BudgetExceeded& ex) {
    r.tag = Certainty::Unknown;
    r.reason = ex.what();
    return r;
  }
  if (numerator.is_zero_node()) {
    r.tag = Certainty::ProvenZero;
    return r;
  }
  auto leaves = leaf_atoms(e);
  if (!numerator.has_exp()) {
    // a nonzero polynomial in independent atoms: nonzero as a function
    r.tag = Certainty::ProvenNonzero;
    r.witness = exact_witness(e, leaves, o);
    if (!r.witness) r.reason = "nonzero canonical numerator; no defined sample point found";
    return r;
  }
  SamplePoints rng(o.seed);
  int defined = 0;
  for (int s = 0; s < o.samples; ++s) {
    Assignment<double> v;
    Witness w;
    for (const auto& a : leaves) {
      Rational x = rng.next_rational();
      v.set(a, x.get_d());
      w.point.push_back({atom_text(a), to_string(x)});
    }
    auto val = eval_float(e, v);
    auto scale = eval_scale(e, v);
    if (!val || !scale) continue;
    ++defined;
    if (std::fabs(*val) > o.tol * std::max(1.0, *scale)) {
      w.value = double_text(*val);
      r.tag = Certainty::ProvenNonzero;
      r.witness = std::move(w);
      return r;
    }
  }
  if (defined == 0) {
    r.tag = Certainty::Unknown;
    r.reason = "undefined at every sample point";
    return r;
  }
  r.tag = Certainty::ProbablyZero;
  r.samples = defined;
  return r;
}

} // namespace hj
