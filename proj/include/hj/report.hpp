#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hj/expr.hpp"
#include "hj/zero.hpp"

namespace hj {

enum class Verdict { Pass, Fail, Unknown };
std::string verdict_name(Verdict v);

/// Outcome of a verification.
struct CheckReport {
  std::string check;
  Verdict verdict = Verdict::Unknown;
  /// Weakest zero-test certainty behind a pass; the refuting certainty behind a fail.
  Certainty grade = Certainty::ProvenZero;
  std::string summary;
  /// Label of the identity that failed (or could not be decided).
  std::string failed;
  std::optional<Witness> witness;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::string> notes;

  bool pass() const { return verdict == Verdict::Pass; }
};

/// Accumulates zero tests for one check and turns them into a CheckReport.
class Evidence {
public:
  explicit Evidence(SampleOptions opts) : opts_(opts) {}

  /// Requires e = 0; returns the certainty obtained.
  ZeroCertainty require_zero(const Expr& e, const std::string& label);
  /// Requires every entry to vanish; stops at the first refutation.
  bool require_all_zero(const std::vector<Expr>& es, const std::string& label);
  /// Requires e ≠ 0.
  bool require_nonzero(const Expr& e, const std::string& label);
  /// Requires at least one entry to be nonzero.
  bool require_some_nonzero(const std::vector<Expr>& es, const std::string& label);
  void fail(const std::string& label, const std::string& reason = {});
  void unknown(const std::string& label, const std::string& reason = {});
  void note(std::string n) { notes_.push_back(std::move(n)); }
  void value(std::string key, std::string v) { values_.emplace_back(std::move(key), std::move(v)); }
  /// Folds another report into this one (verdict and grade combine; values are prefixed).
  void absorb(const CheckReport& r, const std::string& prefix = {});

  bool failed() const { return verdict_ == Verdict::Fail; }
  Verdict verdict() const { return verdict_; }
  const SampleOptions& options() const { return opts_; }

  CheckReport finish(std::string check, std::string summary) const;

private:
  void weaken(Certainty c);

  SampleOptions opts_;
  Verdict verdict_ = Verdict::Pass;
  Certainty grade_ = Certainty::ProvenZero;
  std::string failed_;
  std::optional<Witness> witness_;
  std::vector<std::pair<std::string, std::string>> values_;
  std::vector<std::string> notes_;
};

} // namespace hj
