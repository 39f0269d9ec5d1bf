#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hj/expr.hpp"

namespace hj {

struct SampleOptions {
  std::uint64_t seed = 0;
  int samples = 16;
  double tol = 1e-9;
};

/// Ordered by strength of a "zero" claim; ProvenNonzero is the refutation.
enum class Certainty { ProvenZero, ProbablyZero, Unknown, ProvenNonzero };

struct Witness {
  std::vector<std::pair<std::string, std::string>> point;
  std::string value;
};

struct ZeroCertainty {
  Certainty tag = Certainty::Unknown;
  std::optional<Witness> witness;
  int samples = 0;
  double tol = 0;
  std::string reason;

  bool zero() const { return tag == Certainty::ProvenZero || tag == Certainty::ProbablyZero; }
  bool proven_zero() const { return tag == Certainty::ProvenZero; }
  bool nonzero() const { return tag == Certainty::ProvenNonzero; }
};

ZeroCertainty is_zero(const Expr& e, const SampleOptions& opts = {});
std::string certainty_name(Certainty c);

/// Deterministic draw of k/7 with k uniform in [-20, 20].
class SamplePoints {
public:
  explicit SamplePoints(std::uint64_t seed);
  Rational next_rational();
  double next_double() { return next_rational().get_d(); }

private:
  std::mt19937_64 gen_;
};

} // namespace hj
