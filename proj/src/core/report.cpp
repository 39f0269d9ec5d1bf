#include "hj/report.hpp"

namespace hj {

std::string verdict_name(Verdict v) {
  switch (v) {
  case Verdict::Pass:
    return "pass";
  case Verdict::Fail:
    return "fail";
  case Verdict::Unknown:
    return "unknown";
  }
  return "unknown";
}

void Evidence::weaken(Certainty c) {
  if (verdict_ == Verdict::Fail) return;
  if (static_cast<int>(c) > static_cast<int>(grade_)) grade_ = c;
}

ZeroCertainty Evidence::require_zero(const Expr& e, const std::string& label) {
  ZeroCertainty z = is_zero(e, opts_);
  switch (z.tag) {
  case Certainty::ProvenZero:
  case Certainty::ProbablyZero:
    weaken(z.tag);
    break;
  case Certainty::Unknown:
    unknown(label, z.reason);
    break;
  case Certainty::ProvenNonzero:
    if (verdict_ != Verdict::Fail) {
      verdict_ = Verdict::Fail;
      grade_ = Certainty::ProvenNonzero;
      failed_ = label;
      witness_ = z.witness;
    }
    break;
  }
  return z;
}

bool Evidence::require_all_zero(const std::vector<Expr>& es, const std::string& label) {
  for (const auto& e : es)
    if (require_zero(e, label).nonzero()) return false;
  return true;
}

bool Evidence::require_nonzero(const Expr& e, const std::string& label) {
  ZeroCertainty z = is_zero(e, opts_);
  if (z.nonzero()) return true;
  if (z.proven_zero())
    fail(label, "expected a nonzero quantity, found 0");
  else
    unknown(label, "nonvanishing could not be established");
  return false;
}

bool Evidence::require_some_nonzero(const std::vector<Expr>& es, const std::string& label) {
  bool undecided = false;
  for (const auto& e : es) {
    ZeroCertainty z = is_zero(e, opts_);
    if (z.nonzero()) return true;
    if (!z.proven_zero()) undecided = true;
  }
  if (undecided)
    unknown(label, "nonvanishing could not be established");
  else
    fail(label, "expected a nonzero quantity, found 0");
  return false;
}

void Evidence::fail(const std::string& label, const std::string& reason) {
  if (verdict_ == Verdict::Fail) return;
  verdict_ = Verdict::Fail;
  grade_ = Certainty::ProvenNonzero;
  failed_ = label;
  if (!reason.empty()) notes_.push_back(label + ": " + reason);
}

void Evidence::unknown(const std::string& label, const std::string& reason) {
  if (verdict_ == Verdict::Fail) return;
  if (verdict_ == Verdict::Pass) failed_ = label;
  verdict_ = Verdict::Unknown;
  grade_ = Certainty::Unknown;
  if (!reason.empty()) notes_.push_back(label + ": " + reason);
}

void Evidence::absorb(const CheckReport& r, const std::string& prefix) {
  std::string p = prefix.empty() ? std::string() : prefix + ".";
  for (const auto& [k, v] : r.values) values_.emplace_back(p + k, v);
  for (const auto& n : r.notes) notes_.push_back(p + n);
  switch (r.verdict) {
  case Verdict::Pass:
    weaken(r.grade);
    break;
  case Verdict::Unknown:
    unknown(p + r.failed);
    break;
  case Verdict::Fail:
    if (verdict_ != Verdict::Fail) {
      verdict_ = Verdict::Fail;
      grade_ = r.grade;
      failed_ = p + r.failed;
      witness_ = r.witness;
    }
    break;
  }
}

CheckReport Evidence::finish(std::string check, std::string summary) const {
  CheckReport r;
  r.check = std::move(check);
  r.verdict = verdict_;
  r.grade = grade_;
  r.summary = std::move(summary);
  r.failed = failed_;
  r.witness = witness_;
  r.values = values_;
  r.notes = notes_;
  return r;
}

} // namespace hj
