#pragma once

// Static fault trees: data model, textual format, well-formedness checks and
// the structure function.
//
// File format (line based, `#` comments, `;` terminated statements):
//
//   toplevel <name>;
//   <name> = and(<name>, <name>, ...);
//   <name> = or(<name>, ...);
//   <name> = vot(<k>; <name>, ...);       # at least k of the children
//   <name> = vot(<k>/<N>; <name>, ...);   # N, if given, must equal the child count
//
// Names are identifiers or double-quoted strings ("CP/R"). A name that is only
// ever used as a child is a basic event. Basic events are numbered in order of
// first textual occurrence; that order fixes status-vector indices and the BDD
// variable order. VOT children may repeat and are then counted with
// multiplicity.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bfl/detail/lexer.hpp"
#include "bfl/error.hpp"

namespace bfl {

enum class ElementKind { Basic, Gate };
enum class GateType { And, Or, Vot };

struct ElementDef {
  ElementKind kind = ElementKind::Basic;
  GateType gate = GateType::Or;
  std::size_t threshold = 0;  // k of VOT(k/N); N is children.size()
  std::vector<std::string> children;

  bool is_basic() const { return kind == ElementKind::Basic; }
  bool operator==(const ElementDef&) const = default;

  static ElementDef basic() { return {}; }
  static ElementDef make_gate(GateType type, std::vector<std::string> children,
                              std::size_t threshold = 0) {
    ElementDef d;
    d.kind = ElementKind::Gate;
    d.gate = type;
    d.children = std::move(children);
    d.threshold = threshold;
    return d;
  }
};

inline std::string gate_label(const ElementDef& d) {
  switch (d.gate) {
    case GateType::And: return "AND";
    case GateType::Or: return "OR";
    case GateType::Vot:
      return "VOT(" + std::to_string(d.threshold) + "/" + std::to_string(d.children.size()) + ")";
  }
  return "?";
}

/// Immutable fault tree. Gates keep their definition order, basic events their
/// first-occurrence order; both orders are part of the value.
class FaultTree {
 public:
  FaultTree() = default;

  /// Builds a tree from gate definitions in source order. Every child name
  /// that is not itself a gate becomes a basic event. No well-formedness
  /// check is made here; see validate().
  FaultTree(std::string top, std::vector<std::pair<std::string, ElementDef>> gates)
      : top_(std::move(top)) {
    for (auto& [name, def] : gates) {
      gate_order_.push_back(name);
      elements_.emplace(name, def);
    }
    for (const auto& name : gate_order_) {
      for (const auto& child : elements_.at(name).children) {
        if (elements_.count(child)) continue;
        elements_.emplace(child, ElementDef::basic());
        be_order_.push_back(child);
      }
    }
    for (std::size_t i = 0; i < be_order_.size(); ++i) be_index_.emplace(be_order_[i], i);
  }

  const std::string& top() const { return top_; }
  const std::vector<std::string>& basic_events() const { return be_order_; }
  const std::vector<std::string>& gates() const { return gate_order_; }
  const std::map<std::string, ElementDef>& elements() const { return elements_; }
  std::size_t basic_event_count() const { return be_order_.size(); }

  bool contains(std::string_view name) const { return elements_.count(std::string(name)) != 0; }

  const ElementDef& element(std::string_view name) const {
    auto it = elements_.find(std::string(name));
    if (it == elements_.end()) throw UnknownElement(std::string(name));
    return it->second;
  }

  bool is_basic_event(std::string_view name) const {
    auto it = elements_.find(std::string(name));
    return it != elements_.end() && it->second.is_basic();
  }

  /// Position of a basic event in the canonical order.
  std::optional<std::size_t> basic_event_index(std::string_view name) const {
    auto it = be_index_.find(std::string(name));
    if (it == be_index_.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const FaultTree& o) const {
    return top_ == o.top_ && elements_ == o.elements_ && be_order_ == o.be_order_ &&
           gate_order_ == o.gate_order_;
  }

 private:
  std::string top_;
  std::map<std::string, ElementDef> elements_;
  std::vector<std::string> be_order_;
  std::vector<std::string> gate_order_;
  std::unordered_map<std::string, std::size_t> be_index_;
};

/// Canonical basic-event order (status-vector index and BDD variable order).
inline const std::vector<std::string>& basic_event_order(const FaultTree& ft) {
  return ft.basic_events();
}

// ---------------------------------------------------------------------------
// Status vectors

/// Total failed(1)/operational(0) assignment to the basic events of one tree,
/// indexed by canonical order.
class StatusVector {
 public:
  StatusVector() = default;
  explicit StatusVector(std::size_t n, bool value = false) : bits_(n, value) {}
  explicit StatusVector(std::vector<bool> bits) : bits_(std::move(bits)) {}

  /// Bit i of `mask` becomes entry i.
  static StatusVector from_mask(std::size_t n, std::uint64_t mask) {
    StatusVector v(n);
    for (std::size_t i = 0; i < n; ++i) v.bits_[i] = (mask >> i) & 1u;
    return v;
  }

  /// Builds a vector from named failed/operational values; unnamed basic
  /// events take `fill`.
  static StatusVector from_names(const FaultTree& ft,
                                 const std::vector<std::pair<std::string, bool>>& values,
                                 bool fill = false) {
    StatusVector v(ft.basic_event_count(), fill);
    for (const auto& [name, bit] : values) {
      auto idx = ft.basic_event_index(name);
      if (!idx) {
        if (ft.contains(name))
          throw PreconditionError("'" + name + "' is not a basic event");
        throw UnknownElement(name);
      }
      v.bits_[*idx] = bit;
    }
    return v;
  }

  std::uint64_t to_mask() const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < bits_.size() && i < 64; ++i)
      if (bits_[i]) m |= std::uint64_t{1} << i;
    return m;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, bool value) { bits_.at(i) = value; }
  const std::vector<bool>& bits() const { return bits_; }

  bool operator==(const StatusVector&) const = default;
  auto operator<=>(const StatusVector& o) const { return bits_ <=> o.bits_; }

  /// "(0, 1, 0)", the tuple notation used for status vectors.
  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (i) s += ", ";
      s += bits_[i] ? '1' : '0';
    }
    return s + ")";
  }

  /// Names of failed basic events, in canonical order.
  std::vector<std::string> failed(const FaultTree& ft) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(ft.basic_events()[i]);
    return out;
  }

 private:
  std::vector<bool> bits_;
};

inline void check_vector(const FaultTree& ft, const StatusVector& b) {
  if (b.size() != ft.basic_event_count())
    throw PreconditionError("status vector has " + std::to_string(b.size()) +
                            " entries but the tree has " +
                            std::to_string(ft.basic_event_count()) + " basic events");
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  UndefinedTop,
  TopIsBasicEvent,
  EmptyGate,
  BadVotBounds,
  Cycle,
  Orphan,
};

struct Violation {
  ViolationKind kind;
  std::string element;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind, std::string_view element) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) {
      return v.kind == kind && v.element == element;
    });
  }
  std::string to_string() const {
    std::string s;
    for (const auto& v : violations) s += v.element + ": " + v.message + "\n";
    return s;
  }
};

/// Thrown by parse_fault_tree() when the parsed tree is not well formed.
class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error("ill-formed fault tree:\n" + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Checks the well-formedness conditions: the top is a gate, gates have
/// children, VOT bounds hold, the child graph is acyclic and every element is
/// reachable from the top along child edges.
inline ValidationReport validate(const FaultTree& ft) {
  ValidationReport report;
  auto add = [&](ViolationKind k, const std::string& e, std::string msg) {
    report.violations.push_back({k, e, std::move(msg)});
  };

  if (!ft.contains(ft.top())) {
    add(ViolationKind::UndefinedTop, ft.top(), "toplevel names an undefined gate");
  } else if (ft.element(ft.top()).is_basic()) {
    add(ViolationKind::TopIsBasicEvent, ft.top(), "toplevel must be a gate, not a basic event");
  }

  for (const auto& name : ft.gates()) {
    const auto& d = ft.element(name);
    if (d.children.empty()) add(ViolationKind::EmptyGate, name, "gate has no children");
    if (d.gate == GateType::Vot) {
      std::size_t n = d.children.size();
      if (n < 2 || d.threshold < 1 || d.threshold > n)
        add(ViolationKind::BadVotBounds, name,
            "VOT(" + std::to_string(d.threshold) + "/" + std::to_string(n) +
                ") needs N >= 2 and 1 <= k <= N");
    }
  }

  // Iterative three-colour DFS; each back edge reports the gate it closes on.
  enum Colour : std::uint8_t { White, Grey, Black };
  std::map<std::string, Colour> colour;
  std::set<std::string> on_cycle;
  for (const auto& root : ft.gates()) {
    if (colour[root] != White) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
    colour[root] = Grey;
    while (!stack.empty()) {
      auto& [name, next_child] = stack.back();
      const auto& children = ft.element(name).children;
      if (next_child == children.size()) {
        colour[name] = Black;
        stack.pop_back();
        continue;
      }
      const std::string& child = children[next_child++];
      if (ft.element(child).is_basic()) continue;
      if (colour[child] == Grey) {
        if (on_cycle.insert(child).second)
          add(ViolationKind::Cycle, child, "gate lies on a cycle of child references");
      } else if (colour[child] == White) {
        colour[child] = Grey;
        stack.emplace_back(child, 0);
      }
    }
  }

  if (ft.contains(ft.top())) {
    std::set<std::string> seen{ft.top()};
    std::vector<std::string> work{ft.top()};
    while (!work.empty()) {
      std::string name = work.back();
      work.pop_back();
      for (const auto& c : ft.element(name).children)
        if (seen.insert(c).second) work.push_back(c);
    }
    for (const auto& name : ft.gates())
      if (!seen.count(name)) add(ViolationKind::Orphan, name, "not reachable from the top");
    for (const auto& name : ft.basic_events())
      if (!seen.count(name)) add(ViolationKind::Orphan, name, "not reachable from the top");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Text format

/// Parses the tree syntax without checking well-formedness. Syntax errors,
/// duplicate gate definitions, malformed VOT headers and a missing or repeated
/// toplevel statement are still reported as ParseError.
inline FaultTree parse_fault_tree_unchecked(std::string_view text) {
  detail::TokenStream ts(detail::tokenize(text));
  std::optional<std::string> top;
  std::vector<std::pair<std::string, ElementDef>> gates;
  std::set<std::string> defined;

  auto expect_name = [&](const char* what) -> std::string {
    const auto& t = ts.peek();
    if (t.kind != detail::TokenKind::Identifier && t.kind != detail::TokenKind::Quoted)
      ts.fail(std::string("expected ") + what);
    return ts.next().text;
  };
  auto expect_number = [&](const char* what) -> std::size_t {
    const auto& t = ts.peek();
    if (t.kind != detail::TokenKind::Number) ts.fail(std::string("expected ") + what);
    return std::stoul(ts.next().text);
  };

  while (!ts.at_end()) {
    const detail::Token start = ts.peek();
    if (start.kind == detail::TokenKind::Identifier && start.text == "toplevel" &&
        !ts.is_punct("=", 1)) {
      ts.next();
      if (top) throw ParseError(start.line, start.column, "more than one toplevel statement");
      top = expect_name("toplevel name");
      ts.expect(";");
      continue;
    }

    std::string name = expect_name("gate name or 'toplevel'");
    ts.expect("=");
    const detail::Token kw = ts.peek();
    if (kw.kind != detail::TokenKind::Identifier) ts.fail("expected gate type and, or or vot");
    std::string type = kw.text;
    std::transform(type.begin(), type.end(), type.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    ts.next();

    ElementDef def;
    def.kind = ElementKind::Gate;
    std::optional<std::size_t> declared_n;
    if (type == "and") {
      def.gate = GateType::And;
    } else if (type == "or") {
      def.gate = GateType::Or;
    } else if (type == "vot") {
      def.gate = GateType::Vot;
    } else {
      throw ParseError(kw.line, kw.column, "unknown gate type '" + kw.text + "'");
    }

    ts.expect("(");
    if (def.gate == GateType::Vot) {
      def.threshold = expect_number("VOT threshold k");
      if (ts.accept("/")) declared_n = expect_number("VOT arity N");
      ts.expect(";");
    }
    if (!ts.is_punct(")")) {
      def.children.push_back(expect_name("child name"));
      while (ts.accept(",")) def.children.push_back(expect_name("child name"));
    }
    ts.expect(")");
    ts.expect(";");

    if (def.gate == GateType::Vot) {
      std::size_t n = def.children.size();
      if (declared_n && *declared_n != n)
        throw ParseError(kw.line, kw.column,
                         "VOT arity mismatch: declared N=" + std::to_string(*declared_n) +
                             " but " + std::to_string(n) + " children given");
      if (n < 2 || def.threshold < 1 || def.threshold > n)
        throw ParseError(kw.line, kw.column,
                         "VOT(" + std::to_string(def.threshold) + "/" + std::to_string(n) +
                             ") needs N >= 2 and 1 <= k <= N");
    }
    if (!defined.insert(name).second)
      throw ParseError(start.line, start.column, "duplicate definition of gate '" + name + "'");
    gates.emplace_back(std::move(name), std::move(def));
  }

  if (!top) {
    const auto& t = ts.peek();
    throw ParseError(t.line, t.column, "missing toplevel statement");
  }
  return FaultTree(*top, std::move(gates));
}

/// Parses and validates; throws ValidationError listing every violation.
inline FaultTree parse_fault_tree(std::string_view text) {
  FaultTree ft = parse_fault_tree_unchecked(text);
  auto report = validate(ft);
  if (!report.ok()) throw ValidationError(std::move(report));
  return ft;
}

/// Writes the tree in the text format. Gates keep their definition order, so
/// parsing the output reproduces the same value.
inline std::string serialize(const FaultTree& ft) {
  std::ostringstream os;
  os << "toplevel " << detail::quote_if_needed(ft.top()) << ";\n";
  for (const auto& name : ft.gates()) {
    const auto& d = ft.element(name);
    os << detail::quote_if_needed(name) << " = ";
    switch (d.gate) {
      case GateType::And: os << "and("; break;
      case GateType::Or: os << "or("; break;
      case GateType::Vot: os << "vot(" << d.threshold << "; "; break;
    }
    for (std::size_t i = 0; i < d.children.size(); ++i) {
      if (i) os << ", ";
      os << detail::quote_if_needed(d.children[i]);
    }
    os << ");\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Structure function

namespace detail {
inline bool eval_structure_rec(const FaultTree& ft, const StatusVector& b,
                               const std::string& e, std::map<std::string, bool>& memo) {
  if (auto idx = ft.basic_event_index(e)) return b[*idx];
  if (auto it = memo.find(e); it != memo.end()) return it->second;
  const auto& d = ft.element(e);
  bool value = false;
  switch (d.gate) {
    case GateType::Or:
      value = std::any_of(d.children.begin(), d.children.end(),
                          [&](const std::string& c) { return eval_structure_rec(ft, b, c, memo); });
      break;
    case GateType::And:
      value = std::all_of(d.children.begin(), d.children.end(),
                          [&](const std::string& c) { return eval_structure_rec(ft, b, c, memo); });
      break;
    case GateType::Vot: {
      std::size_t failed = 0;
      for (const auto& c : d.children) failed += eval_structure_rec(ft, b, c, memo) ? 1 : 0;
      value = failed >= d.threshold;
      break;
    }
  }
  memo.emplace(e, value);
  return value;
}
}  // namespace detail

/// Status of element `e` under `b`: b_i for a basic event, disjunction for OR,
/// conjunction for AND, and "at least k children failed" for VOT(k/N).
inline bool eval_structure(const FaultTree& ft, const StatusVector& b, std::string_view e) {
  check_vector(ft, b);
  if (!ft.contains(e)) throw UnknownElement(std::string(e));
  std::map<std::string, bool> memo;
  return detail::eval_structure_rec(ft, b, std::string(e), memo);
}

}  // namespace bfl
