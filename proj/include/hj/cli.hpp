#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hj/contact.hpp"
#include "hj/extended.hpp"
#include "hj/lcs.hpp"
#include "hj/parse.hpp"
#include "hj/report.hpp"

namespace hj {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ObjKind { Scalar, Form, Vector, Bivector, Operator, ExtOp, Contact, Lcs, Jacobi };
std::string obj_kind_name(ObjKind k);

/// A named object of a model. Only the fields matching `kind` are meaningful.
struct ModelObject {
  std::string name;
  ObjKind kind = ObjKind::Scalar;
  ChartPtr chart;
  int line = 0;
  Expr scalar;
  /// Form, or θ of a contact structure, or Ω of an LCS pair.
  KForm form;
  /// η of an LCS pair.
  KForm form1;
  /// Vector, or E of a Jacobi pair.
  VectorField vector;
  /// Bivector, or Λ of a Jacobi pair.
  KVector bivector;
  Operator11 op;
  ExtendedOperator ext;
};

bool operator==(const ModelObject& a, const ModelObject& b);

/// One resolved directive argument.
struct DirectiveArg {
  enum class Kind { Keyword, Ref, Word, Scalar, Vector };
  Kind kind = Kind::Keyword;
  std::string text;
  Expr scalar;
  VectorField vector;

  friend bool operator==(const DirectiveArg& a, const DirectiveArg& b);
};

struct Directive {
  std::string name;
  int line = 0;
  ChartPtr chart;
  std::vector<DirectiveArg> args;
  /// Verdict the directive is expected to produce (default pass).
  std::optional<Verdict> expect;

  friend bool operator==(const Directive& a, const Directive& b);
};

struct Model {
  std::vector<ChartPtr> charts;
  std::vector<std::string> params;
  std::vector<ModelObject> objects;
  std::vector<Directive> directives;

  const ModelObject* find(const std::string& name) const;
};

bool operator==(const Model& a, const Model& b);

/// Parses the model language; throws ParseError with line/column on failure.
Model parse_model(std::string_view text);
/// Canonical pretty-print; parse_model(format_model(m)) == m.
std::string format_model(const Model& m);

/// Names of the supported check directives.
std::vector<std::string> directive_names();

struct RunOptions {
  SampleOptions sample;
  bool fail_fast = false;
  /// Worker threads; 0 means hardware concurrency.
  int jobs = 0;
};

struct DirectiveResult {
  std::string directive;
  int line = 0;
  /// pass, fail or unknown after applying the directive's expectation.
  Verdict status = Verdict::Unknown;
  CheckReport report;
  /// Two independent routes disagreed.
  bool inconsistent = false;
  double millis = 0;
};

struct RunReport {
  SampleOptions sample;
  std::vector<DirectiveResult> results;
  double total_millis = 0;

  bool any_fail() const;
  bool any_inconsistent() const;
  /// 0 pass, 1 some directive failed, 3 internal inconsistency.
  int exit_code() const;
};

/// Executes the directives on a worker pool; results keep directive order.
RunReport run_checks(const Model& m, const RunOptions& opts);

/// Ordered JSON; the "timing" section is omitted when `timing` is false.
std::string report_json(const RunReport& r, const std::string& model_name, bool timing);
/// Fixed-width table for the terminal.
std::string report_table(const RunReport& r, bool timing);

} // namespace hj
