#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hj/cli.hpp"

namespace hj {

namespace {

/// Validated structures shared by all directives.
struct Prepared {
  std::map<std::string, std::shared_ptr<ContactStructure>> contact;
  std::map<std::string, std::shared_ptr<LCSStructure>> lcs;
  /// Jacobi pair of every jacobi object and of every valid contact or LCS structure.
  std::map<std::string, std::shared_ptr<JacobiStructure>> jacobi;
  std::map<std::string, std::string> errors;
};

Prepared prepare(const Model& m, const SampleOptions& opts) {
  Prepared p;
  for (const auto& o : m.objects) {
    try {
      if (o.kind == ObjKind::Contact) {
        auto c = std::make_shared<ContactStructure>(validate_contact(o.form, opts));
        p.contact[o.name] = c;
        if (c->valid()) p.jacobi[o.name] = std::make_shared<JacobiStructure>(induced_jacobi_from_contact(*c, opts));
      } else if (o.kind == ObjKind::Lcs) {
        auto s = std::make_shared<LCSStructure>(validate_lcs(o.form, o.form1, opts));
        p.lcs[o.name] = s;
        if (s->valid()) p.jacobi[o.name] = std::make_shared<JacobiStructure>(induced_jacobi_from_lcs(*s, opts));
      } else if (o.kind == ObjKind::Jacobi) {
        p.jacobi[o.name] = std::make_shared<JacobiStructure>(validate_jacobi(o.bivector, o.vector, opts));
      }
    } catch (const std::exception& e) {
      p.errors[o.name] = e.what();
    }
  }
  return p;
}

/// Thrown when a directive depends on a structure that did not validate.
struct InvalidStructure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Directive arguments grouped by the keyword that precedes them.
struct Args {
  std::map<std::string, std::vector<const DirectiveArg*>> sec;
  std::vector<std::string> flags;

  explicit Args(const Directive& d) {
    std::string cur;
    for (const auto& a : d.args) {
      if (a.kind == DirectiveArg::Kind::Keyword) {
        if (a.text == "abelian")
          flags.push_back(a.text);
        else
          cur = a.text;
        sec[cur];
        continue;
      }
      sec[cur].push_back(&a);
    }
  }
  bool has(const std::string& k) const { return sec.count(k) > 0; }
  const std::vector<const DirectiveArg*>& at(const std::string& k) const {
    static const std::vector<const DirectiveArg*> none;
    auto it = sec.find(k);
    return it == sec.end() ? none : it->second;
  }
};

class Runner {
public:
  Runner(const Model& m, const Prepared& p, const SampleOptions& opts) : m_(m), p_(p), opts_(opts) {}

  CheckReport execute(const Directive& d, bool& inconsistent) const {
    Args a(d);
    const auto& pos = a.at("");
    const std::string& n = d.name;
    if (n == "haantjes") return check_haantjes(op(pos[0]), opts_);
    if (n == "nijenhuis") return check_nijenhuis(op(pos[0]), opts_);
    if (n == "commute") return check_commute(op(pos[0]), op(pos[1]), opts_);
    if (n == "algebra") {
      HaantjesBasis b{d.chart, ops(pos), !a.flags.empty()};
      return check_haantjes_algebra(b, opts_);
    }
    if (n == "chain") {
      ChainReport cr = verify_chain(scalar(pos[0]), HaantjesBasis{d.chart, ops(a.at("by")), false}, opts_);
      return expect_potentials(cr.report, cr.potentials, a);
    }
    if (n == "frobenius")
      return verify_chain(scalar(pos[0]), HaantjesBasis{d.chart, ops(a.at("by")), false}, opts_).frobenius;
    if (n == "ext-haantjes") return check_ext_haantjes(ext(pos[0]), opts_);
    if (n == "ext-algebra") return check_ext_algebra(ExtendedBasis{d.chart, exts(pos), true}, opts_);
    if (n == "ejh") {
      EjhReport r = check_ejh(ext(pos[0]), jacobi(a.at("on")[0]), opts_);
      inconsistent = !r.routes_agree;
      return r.report;
    }
    if (n == "ext-chain") {
      ExtChainReport cr = verify_ext_chain(scalar(pos[0]), ExtendedBasis{d.chart, exts(a.at("by")), true}, opts_);
      std::vector<std::optional<Expr>> pots(cr.potentials.begin(), cr.potentials.end());
      return expect_potentials(cr.report, pots, a);
    }
    if (n == "involution")
      return thm_main_check(scalar(pos[0]), ExtendedBasis{d.chart, exts(a.at("by")), true}, jacobi(a.at("on")[0]),
                            opts_);
    if (n == "jacobi") return jacobi(pos[0]).validity;
    if (n == "jh") return check_jh_compatibility(op(pos[0]), jacobi(a.at("on")[0]), opts_);
    if (n == "poissonize") return poissonize_report(jacobi(pos[0]));
    if (n == "bracket") return bracket(scalar(pos[0]), scalar(pos[1]), a.at("on")[0]->text, a);
    if (n == "hamiltonian") return hamiltonian(scalar(pos[0]), a.at("on")[0]->text, a);
    if (n == "contact") return contact(pos[0], false).validity;
    if (n == "reeb") {
      const ContactStructure& c = contact(pos[0]);
      Evidence ev(opts_);
      ev.absorb(c.validity);
      if (a.has("=")) compare_field(ev, c.reeb, vector(a.at("=")[0]), "R - expected");
      return ev.finish("reeb", ev.failed() ? "Reeb field differs from the expected field" : "Reeb field");
    }
    if (n == "induced-jacobi") return jacobi(pos[0]).validity;
    if (n == "dissipated") return is_dissipated(scalar(pos[0]), scalar(a.at("wrt")[0]), contact(a.at("on")[0]), opts_);
    if (n == "contact-haantjes") return check_contact_haantjes(op(pos[0]), contact(a.at("on")[0]), opts_);
    if (n == "reeb-eigen") return reeb_eigen_check(op(pos[0]), contact(a.at("on")[0]), opts_).report;
    if (n == "kind") {
      KindReport k = classify_special_kind(op(pos[0]), contact(a.at("on")[0]), opts_);
      if (!a.has("=")) return k.report;
      // The classification itself is the outcome; its decisive identity stays in `failed`.
      CheckReport r = k.report;
      r.check = "kind";
      r.values.emplace_back("expected", a.at("=")[0]->text);
      if (kind_name(k.kind) == a.at("=")[0]->text) {
        r.verdict = Verdict::Pass;
        r.summary = "classified as " + kind_name(k.kind) + " kind";
      } else {
        if (r.verdict == Verdict::Pass) r.failed = "kind";
        r.verdict = Verdict::Fail;
        r.summary = "classified as " + kind_name(k.kind) + " kind, expected " + a.at("=")[0]->text;
      }
      return r;
    }
    if (n == "techain") {
      const auto& on = a.at("on");
      SpecialKind kind = on[1]->text == "first" ? SpecialKind::First : SpecialKind::Second;
      return techain_check(scalar(pos[0]), HaantjesBasis{d.chart, ops(a.at("by")), false}, contact(on[0]), kind,
                           opts_);
    }
    if (n == "contact-involution")
      return contact_involution_check(scalar(pos[0]), HaantjesBasis{d.chart, ops(a.at("by")), false},
                                      contact(a.at("on")[0]), opts_);
    if (n == "appendix") {
      const std::string& f = pos[0]->text;
      AppendixFamily fam = f == "F1" ? AppendixFamily::F1 : f == "F2" ? AppendixFamily::F2 : AppendixFamily::F3;
      std::vector<const DirectiveArg*> rest(pos.begin() + 1, pos.end());
      return appendix_report(fam, ops(rest), opts_);
    }
    if (n == "lcs") return lcs(pos[0], false).validity;
    if (n == "lcsh") return check_lcsh(op(pos[0]), lcs(a.at("on")[0]), opts_);
    if (n == "eta-ke") return eta_KE_check(op(pos[0]), lcs(a.at("on")[0]), opts_);
    if (n == "lcs-involution")
      return lcs_involution_check(scalar(pos[0]), HaantjesBasis{d.chart, ops(a.at("by")), false},
                                  lcs(a.at("on")[0]), opts_);
    throw std::logic_error("no handler for directive " + n);
  }

private:
  const ModelObject& obj(const DirectiveArg* a) const {
    const ModelObject* o = m_.find(a->text);
    if (!o) throw std::logic_error("unresolved name " + a->text);
    return *o;
  }
  Expr scalar(const DirectiveArg* a) const { return a->scalar; }
  Operator11 op(const DirectiveArg* a) const { return obj(a).op; }
  ExtendedOperator ext(const DirectiveArg* a) const { return obj(a).ext; }
  VectorField vector(const DirectiveArg* a) const {
    return a->kind == DirectiveArg::Kind::Vector ? a->vector : obj(a).vector;
  }
  std::vector<Operator11> ops(const std::vector<const DirectiveArg*>& as) const {
    std::vector<Operator11> out;
    for (const auto* a : as) out.push_back(op(a));
    return out;
  }
  std::vector<ExtendedOperator> exts(const std::vector<const DirectiveArg*>& as) const {
    std::vector<ExtendedOperator> out;
    for (const auto* a : as) out.push_back(ext(a));
    return out;
  }

  void structure_error(const std::string& name, const std::string& what) const {
    auto e = p_.errors.find(name);
    if (e != p_.errors.end()) throw InvalidStructure(what + " '" + name + "': " + e->second);
    throw InvalidStructure(what + " '" + name + "' did not validate");
  }

  const ContactStructure& contact(const DirectiveArg* a, bool require_valid = true) const {
    auto it = p_.contact.find(a->text);
    if (it == p_.contact.end() || (require_valid && !it->second->valid())) structure_error(a->text, "contact structure");
    return *it->second;
  }
  const LCSStructure& lcs(const DirectiveArg* a, bool require_valid = true) const {
    auto it = p_.lcs.find(a->text);
    if (it == p_.lcs.end() || (require_valid && !it->second->valid())) structure_error(a->text, "LCS structure");
    return *it->second;
  }
  const JacobiStructure& jacobi(const DirectiveArg* a) const {
    auto it = p_.jacobi.find(a->text);
    if (it == p_.jacobi.end()) structure_error(a->text, "structure");
    if (obj(a).kind != ObjKind::Jacobi && !it->second->valid()) structure_error(a->text, "induced Jacobi structure");
    return *it->second;
  }

  CheckReport expect_potentials(const CheckReport& base, const std::vector<std::optional<Expr>>& pots,
                                const Args& a) const {
    if (!a.has("=")) return base;
    Evidence ev(opts_);
    ev.absorb(base);
    const auto& want = a.at("=");
    if (want.size() != pots.size()) {
      ev.fail("potential count", std::to_string(pots.size()) + " potentials, " + std::to_string(want.size()) +
                                     " expected");
    } else {
      for (std::size_t i = 0; i < pots.size() && !ev.failed(); ++i) {
        std::string label = "H" + std::to_string(i + 1) + " - expected";
        if (!pots[i])
          ev.fail(label, "no potential");
        else
          ev.require_zero(*pots[i] - want[i]->scalar, label);
      }
    }
    return ev.finish(base.check, ev.failed() ? "potentials differ from the expected list" : base.summary);
  }

  void compare_field(Evidence& ev, const VectorField& got, const VectorField& want, const std::string& label) const {
    std::vector<Expr> r;
    for (const auto& e : components(got - want)) r.push_back(simplify(e));
    ev.require_all_zero(r, label);
  }

  CheckReport bracket(const Expr& f, const Expr& g, const std::string& s, const Args& a) const {
    const ModelObject& o = *m_.find(s);
    DirectiveArg ref{DirectiveArg::Kind::Ref, s, {}, {}};
    Expr b = o.kind == ObjKind::Lcs ? lcs_bracket(f, g, lcs(&ref)) : simplify(jacobi_bracket(f, g, jacobi(&ref)));
    Evidence ev(opts_);
    ev.value("bracket", to_string(b));
    Expr want = a.has("=") ? a.at("=")[0]->scalar : Expr();
    ev.require_zero(b - want, "{f,g} - expected");
    return ev.finish("bracket", ev.failed() ? "bracket differs from the expected value" : "bracket as expected");
  }

  CheckReport hamiltonian(const Expr& f, const std::string& s, const Args& a) const {
    const ModelObject& o = *m_.find(s);
    DirectiveArg ref{DirectiveArg::Kind::Ref, s, {}, {}};
    VectorField x = o.kind == ObjKind::Contact ? contact_hamiltonian_vf(f, contact(&ref))
                    : o.kind == ObjKind::Lcs   ? lcs_hamiltonian_vf(f, lcs(&ref))
                                               : hamiltonian_vf(f, jacobi(&ref));
    Evidence ev(opts_);
    ev.value("X_f", to_string(x));
    if (a.has("=")) compare_field(ev, x, vector(a.at("=")[0]), "X_f - expected");
    return ev.finish("hamiltonian", ev.failed() ? "Hamiltonian field differs from the expected field"
                                                : "Hamiltonian vector field");
  }

  CheckReport poissonize_report(const JacobiStructure& j) const {
    std::vector<std::pair<Expr, Expr>> pairs;
    const Chart& c = *j.chart;
    for (int i = 0; i < c.dim(); ++i)
      for (int k = i + 1; k < c.dim(); ++k) pairs.emplace_back(c.coord(i), c.coord(k) * c.coord(i) + c.coord(k));
    return poissonize(j, pairs, opts_).report;
  }

  const Model& m_;
  const Prepared& p_;
  SampleOptions opts_;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string directive_text(const Directive& d) {
  Model one;
  one.directives.push_back(d);
  std::string s = format_model(one);
  s = s.substr(s.find("check ") + 6);
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

DirectiveResult run_one(const Directive& d, const Runner& r) {
  DirectiveResult out;
  out.directive = directive_text(d);
  out.line = d.line;
  auto t0 = std::chrono::steady_clock::now();
  try {
    out.report = r.execute(d, out.inconsistent);
  } catch (const InvalidStructure& e) {
    Evidence ev({});
    ev.fail("structure", e.what());
    out.report = ev.finish(d.name, e.what());
  } catch (const std::exception& e) {
    Evidence ev({});
    ev.unknown("error", e.what());
    out.report = ev.finish(d.name, std::string("could not be evaluated: ") + e.what());
  }
  out.millis = ms_since(t0);
  Verdict observed = out.report.verdict;
  if (d.expect)
    out.status = observed == *d.expect ? Verdict::Pass : Verdict::Fail;
  else
    out.status = observed;
  if (out.inconsistent) out.status = Verdict::Fail;
  return out;
}

} // namespace

bool RunReport::any_fail() const {
  return std::any_of(results.begin(), results.end(), [](const auto& r) { return r.status == Verdict::Fail; });
}

bool RunReport::any_inconsistent() const {
  return std::any_of(results.begin(), results.end(), [](const auto& r) { return r.inconsistent; });
}

int RunReport::exit_code() const {
  if (any_inconsistent()) return 3;
  return any_fail() ? 1 : 0;
}

RunReport run_checks(const Model& m, const RunOptions& opts) {
  RunReport rep;
  rep.sample = opts.sample;
  auto t0 = std::chrono::steady_clock::now();
  Prepared p = prepare(m, opts.sample);
  Runner runner(m, p, opts.sample);
  const std::size_t n = m.directives.size();
  rep.results.resize(n);
  if (opts.fail_fast) {
    bool stop = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (stop) {
        DirectiveResult& r = rep.results[i];
        r.directive = directive_text(m.directives[i]);
        r.line = m.directives[i].line;
        Evidence ev({});
        ev.unknown("skipped", "an earlier directive failed");
        r.report = ev.finish(m.directives[i].name, "skipped after a failure");
        r.status = Verdict::Unknown;
        continue;
      }
      rep.results[i] = run_one(m.directives[i], runner);
      stop = rep.results[i].status == Verdict::Fail;
    }
  } else {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t workers = std::min<std::size_t>(n, opts.jobs > 0 ? static_cast<std::size_t>(opts.jobs) : hw);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (std::size_t i = next++; i < n; i = next++) rep.results[i] = run_one(m.directives[i], runner);
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  rep.total_millis = ms_since(t0);
  return rep;
}

std::string report_json(const RunReport& r, const std::string& model_name, bool timing) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = "haantjes";
  j["version"] = kToolVersion;
  j["model"] = model_name;
  char tol[32];
  std::snprintf(tol, sizeof tol, "%.3g", r.sample.tol);
  j["settings"] = {{"seed", r.sample.seed}, {"samples", r.sample.samples}, {"tol", tol}};
  int counts[3] = {0, 0, 0};
  for (const auto& d : r.results) ++counts[static_cast<int>(d.status)];
  j["summary"] = {{"directives", r.results.size()},
                  {"pass", counts[0]},
                  {"fail", counts[1]},
                  {"unknown", counts[2]},
                  {"exit_code", r.exit_code()}};
  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const DirectiveResult& d = r.results[i];
    ordered_json e;
    e["index"] = i + 1;
    e["line"] = d.line;
    e["directive"] = d.directive;
    e["status"] = verdict_name(d.status);
    e["verdict"] = verdict_name(d.report.verdict);
    e["check"] = d.report.check;
    e["grade"] = certainty_name(d.report.grade);
    e["summary"] = d.report.summary;
    e["failed"] = d.report.failed;
    if (d.report.witness) {
      ordered_json pt = ordered_json::object();
      for (const auto& [k, v] : d.report.witness->point) pt[k] = v;
      e["witness"] = {{"point", pt}, {"value", d.report.witness->value}};
    } else {
      e["witness"] = nullptr;
    }
    ordered_json vals = ordered_json::object();
    for (const auto& [k, v] : d.report.values) {
      std::string key = k;
      for (int dup = 2; vals.contains(key); ++dup) key = k + "#" + std::to_string(dup);
      vals[key] = v;
    }
    e["values"] = vals;
    e["notes"] = d.report.notes;
    if (d.inconsistent) e["inconsistent"] = true;
    list.push_back(e);
  }
  j["directives"] = list;
  if (timing) {
    ordered_json t;
    t["total_ms"] = r.total_millis;
    ordered_json per = ordered_json::array();
    for (const auto& d : r.results) per.push_back(d.millis);
    t["directives_ms"] = per;
    j["timing"] = t;
  }
  return j.dump(2) + "\n";
}

std::string report_table(const RunReport& r, bool timing) {
  std::size_t w = 9;
  for (const auto& d : r.results) w = std::max(w, std::min<std::size_t>(d.directive.size(), 56));
  std::ostringstream out;
  char buf[64];
  auto cell = [](std::string s, std::size_t width) {
    if (s.size() > width) s = s.substr(0, width - 3) + "...";
    s.resize(width, ' ');
    return s;
  };
  out << cell("#", 4) << cell("directive", w + 2) << cell("status", 9) << cell("grade", 15);
  if (timing) out << cell("ms", 10);
  out << "summary\n";
  for (std::size_t i = 0; i < r.results.size(); ++i) {
    const DirectiveResult& d = r.results[i];
    out << cell(std::to_string(i + 1), 4) << cell(d.directive, w + 2) << cell(verdict_name(d.status), 9)
        << cell(certainty_name(d.report.grade), 15);
    if (timing) {
      std::snprintf(buf, sizeof buf, "%.1f", d.millis);
      out << cell(buf, 10);
    }
    out << d.report.summary;
    if (!d.report.failed.empty() && d.status != Verdict::Pass) out << " [" << d.report.failed << "]";
    out << '\n';
  }
  int counts[3] = {0, 0, 0};
  for (const auto& d : r.results) ++counts[static_cast<int>(d.status)];
  out << counts[0] << " pass, " << counts[1] << " fail, " << counts[2] << " unknown";
  if (r.any_inconsistent()) out << ", internal inconsistency";
  out << '\n';
  return out.str();
}

} // namespace hj
