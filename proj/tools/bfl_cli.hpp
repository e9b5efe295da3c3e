#pragma once

// Command-line front end. Kept in a header so the test suite can drive the
// commands in-process with captured streams.
//
// Exit codes:
//   check     0 holds, 1 does not hold
//   allsat    0 on success
//   cex       0 vector already satisfies, 1 revised vector printed,
//             3 formula unsatisfiable (no counterexample)
//   dot       0 on success
//   validate  0 well formed, 1 violations reported
//   any       2 usage, parse or validation error

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bfl/bfl.hpp"

namespace bfl::cli {

enum ExitCode : int {
  kHolds = 0,
  kFails = 1,
  kUsage = 2,
  kNoCounterexample = 3,
};

struct QueryRequest {
  std::string tree_path;
  std::string formula_text;
  std::vector<std::string> vector_spec;  // "name=0|1" items, possibly comma-joined
  ScopeMode scope = ScopeMode::Support;
  bool json = false;
  bool expand = false;
  bool strict_vector = false;
  bool bdd = false;  // dot: render the formula's BDD instead of the tree
};

using nlohmann::ordered_json;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline FaultTree load_tree(const QueryRequest& req) {
  if (req.tree_path.empty()) throw PreconditionError("--ft is required");
  return parse_fault_tree(read_file(req.tree_path));
}

inline FormulaPtr load_formula(const QueryRequest& req, const FaultTree& ft) {
  if (req.formula_text.empty()) throw PreconditionError("-f/--formula is required");
  return parse_formula(req.formula_text, ft);
}

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

/// Parses `name=0|1` items. Unlisted basic events default to 0 with a
/// warning, or are an error under --strict-vector.
inline StatusVector parse_vector(const QueryRequest& req, const FaultTree& ft, std::ostream& err) {
  std::vector<std::pair<std::string, bool>> values;
  std::set<std::string> seen;
  for (const auto& chunk : req.vector_spec) {
    std::stringstream ss(chunk);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string::npos) throw PreconditionError("vector entry '" + item + "' is not name=0|1");
      std::string name = trim(item.substr(0, eq));
      std::string bit = trim(item.substr(eq + 1));
      if (name.size() >= 2 && name.front() == '"' && name.back() == '"')
        name = name.substr(1, name.size() - 2);
      if (bit != "0" && bit != "1") throw PreconditionError("vector entry '" + item + "' is not name=0|1");
      if (!ft.contains(name)) throw UnknownElement(name);
      if (!ft.is_basic_event(name)) throw PreconditionError("'" + name + "' is not a basic event");
      if (!seen.insert(name).second) throw PreconditionError("'" + name + "' given twice in the vector");
      values.emplace_back(name, bit == "1");
    }
  }
  std::vector<std::string> missing;
  for (const auto& be : ft.basic_events())
    if (!seen.count(be)) missing.push_back(be);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    if (req.strict_vector) throw PreconditionError("vector does not set: " + list);
    err << "warning: unspecified basic events default to 0: " << list << "\n";
  }
  return StatusVector::from_names(ft, values);
}

inline std::string braces(const std::vector<std::string>& names) {
  std::string s = "{";
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
  return s + "}";
}

inline ordered_json envelope(const QueryRequest& req) {
  ordered_json j;
  j["formula"] = req.formula_text;
  j["scope"] = to_string(req.scope);
  j["tree"] = req.tree_path;
  j["version"] = kVersion;
  return j;
}

inline ordered_json vector_json(const FaultTree& ft, const StatusVector& v) {
  ordered_json j = ordered_json::object();
  for (std::size_t i = 0; i < v.size(); ++i) j[ft.basic_events()[i]] = v[i] ? 1 : 0;
  return j;
}

}  // namespace detail

inline int cmd_check(const QueryRequest& req, std::ostream& out, std::ostream& err) {
  FaultTree ft = detail::load_tree(req);
  FormulaPtr chi = detail::load_formula(req, ft);
  StatusVector b(ft.basic_event_count());
  if (layer_of(*chi) == Layer::One) {
    if (req.vector_spec.empty())
      throw PreconditionError("a status vector (-v) is required for first-layer formulas");
    b = detail::parse_vector(req, ft, err);
  }
  Session s(ft);
  Verdict v = evaluate(s, b, *chi, req.scope);
  if (req.json) {
    ordered_json j;
    j["verdict"] = v.holds;
    j["layer"] = v.layer == Layer::One ? 1 : 2;
    j.update(detail::envelope(req));
    out << j.dump(2) << "\n";
  } else {
    out << (v.holds ? "holds" : "does not hold") << "\n";
  }
  return v.holds ? kHolds : kFails;
}

inline int cmd_allsat(const QueryRequest& req, std::ostream& out, std::ostream& /*err*/) {
  FaultTree ft = detail::load_tree(req);
  FormulaPtr chi = detail::load_formula(req, ft);
  Session s(ft);
  ResultSet rs = enumerate_satisfying(s, *chi, req.scope);
  auto sets = rs.render(ft);

  if (req.expand) {
    auto vectors = rs.expand(ft);
    if (req.json) {
      ordered_json j;
      j["vectors"] = ordered_json::array();
      for (const auto& v : vectors) j["vectors"].push_back(detail::vector_json(ft, v));
      j["count"] = vectors.size();
      j.update(detail::envelope(req));
      out << j.dump(2) << "\n";
    } else {
      for (const auto& v : vectors)
        out << v.to_string() << "  failed: " << detail::braces(v.failed(ft)) << "\n";
      out << vectors.size() << " vector(s)\n";
    }
    return kHolds;
  }

  if (req.json) {
    ordered_json j;
    j["sets"] = ordered_json::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
      ordered_json e;
      e["failed"] = sets[i].failed;
      e["operational"] = sets[i].operational;
      e["dont_care"] = sets[i].dont_care;
      ordered_json cube = ordered_json::object();
      for (const auto& l : rs.cubes[i].literals)
        cube[ft.basic_events()[l.var.basic_event()]] = l.value ? 1 : 0;
      e["cube"] = cube;
      j["sets"].push_back(e);
    }
    j["count"] = sets.size();
    j.update(detail::envelope(req));
    out << j.dump(2) << "\n";
  } else {
    for (const auto& r : sets) {
      out << "failed: " << detail::braces(r.failed) << "  operational: " << detail::braces(r.operational);
      if (!r.dont_care.empty()) out << "  dont-care: " << detail::braces(r.dont_care);
      out << "\n";
    }
    out << sets.size() << " set(s)\n";
  }
  return kHolds;
}

inline int cmd_cex(const QueryRequest& req, std::ostream& out, std::ostream& err) {
  FaultTree ft = detail::load_tree(req);
  FormulaPtr chi = detail::load_formula(req, ft);
  if (layer_of(*chi) != Layer::One)
    throw PreconditionError("counterexamples need a first-layer formula");
  if (req.vector_spec.empty()) throw PreconditionError("a status vector (-v) is required");
  StatusVector b = detail::parse_vector(req, ft, err);
  Session s(ft);

  ordered_json j;
  int code;
  if (evaluate(s, b, *chi, req.scope).holds) {
    j["status"] = "already_satisfies";
    j["counterexample"] = nullptr;
    if (!req.json) out << "the vector already satisfies the formula\n";
    code = kHolds;
  } else if (auto cex = counterexample(s, b, *chi, req.scope)) {
    j["status"] = "revised";
    j["counterexample"] = {{"revised", detail::vector_json(ft, cex->revised)},
                           {"flipped", cex->flipped}};
    if (!req.json) {
      out << "revised: " << cex->revised.to_string() << "\n";
      out << "flipped: " << detail::braces(cex->flipped) << "\n";
      out << "failed:  " << detail::braces(cex->revised.failed(ft)) << "\n";
    }
    code = kFails;
  } else {
    j["status"] = "unsatisfiable";
    j["counterexample"] = nullptr;
    if (!req.json) out << "no counterexample exists: the formula is unsatisfiable\n";
    code = kNoCounterexample;
  }
  if (req.json) {
    j.update(detail::envelope(req));
    out << j.dump(2) << "\n";
  }
  return code;
}

inline int cmd_dot(const QueryRequest& req, std::ostream& out, std::ostream& err) {
  FaultTree ft = detail::load_tree(req);
  if (req.bdd) {
    FormulaPtr chi = detail::load_formula(req, ft);
    Session s(ft);
    BddRef bdd = s.compile_predicate(desugar(*chi, ft), req.scope);
    out << s.manager().to_dot(bdd, [&](VarId v) {
      return s.name_of(v) + (v.is_primed() ? "'" : "");
    });
    return kHolds;
  }
  std::optional<StatusVector> b;
  if (!req.vector_spec.empty()) b = detail::parse_vector(req, ft, err);
  out << fault_tree_to_dot(ft, b);
  return kHolds;
}

inline int cmd_validate(const QueryRequest& req, std::ostream& out, std::ostream& /*err*/) {
  if (req.tree_path.empty()) throw PreconditionError("--ft is required");
  FaultTree ft = parse_fault_tree_unchecked(detail::read_file(req.tree_path));
  ValidationReport report = validate(ft);
  if (req.json) {
    ordered_json j;
    j["valid"] = report.ok();
    j["violations"] = ordered_json::array();
    for (const auto& v : report.violations)
      j["violations"].push_back({{"element", v.element}, {"message", v.message}});
    j["basic_events"] = ft.basic_events();
    j["tree"] = req.tree_path;
    j["version"] = kVersion;
    out << j.dump(2) << "\n";
  } else if (report.ok()) {
    out << "ok: " << ft.gates().size() << " gate(s), " << ft.basic_event_count()
        << " basic event(s)\n";
  } else {
    out << report.to_string();
  }
  return report.ok() ? kHolds : kFails;
}

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model checking of static fault trees with a Boolean logic over BDDs", "bfl"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  QueryRequest req;
  std::string scope = "support";

  auto common = [&](CLI::App* sub, bool formula, bool vector) {
    sub->add_option("--ft", req.tree_path, "Fault tree file")->required();
    if (formula) sub->add_option("-f,--formula", req.formula_text, "Formula");
    if (vector) {
      sub->add_option("-v,--vector", req.vector_spec, "Status vector as name=0|1,...");
      sub->add_flag("--strict-vector", req.strict_vector, "Every basic event must be set");
    }
    sub->add_option("--scope", scope, "Minimality scope of MCS/MPS")
        ->check(CLI::IsMember({"support", "global"}));
    sub->add_flag("--json", req.json, "Machine-readable output");
  };

  auto* check = app.add_subcommand("check", "Check a formula, on a status vector for first-layer formulas");
  common(check, true, true);
  auto* allsat = app.add_subcommand("allsat", "Enumerate all satisfying status vectors");
  common(allsat, true, false);
  allsat->add_flag("--expand", req.expand, "Multiply out don't-cares into full vectors");
  auto* cex = app.add_subcommand("cex", "Revise a failing status vector into a counterexample");
  common(cex, true, true);
  auto* dot = app.add_subcommand("dot", "Graphviz rendering of the tree or of a formula's BDD");
  common(dot, true, true);
  dot->add_flag("--bdd", req.bdd, "Render the BDD of -f instead of the tree");
  auto* val = app.add_subcommand("validate", "Check well-formedness of a fault tree");
  common(val, false, false);

  std::vector<std::string> argv_store{"bfl"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }
  req.scope = scope == "global" ? ScopeMode::Global : ScopeMode::Support;

  try {
    if (check->parsed()) return cmd_check(req, out, err);
    if (allsat->parsed()) return cmd_allsat(req, out, err);
    if (cex->parsed()) return cmd_cex(req, out, err);
    if (dot->parsed()) return cmd_dot(req, out, err);
    if (val->parsed()) return cmd_validate(req, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace bfl::cli
