#pragma once

// Abstract syntax, concrete grammar and sugar expansion of the fault-tree
// logic.
//
// Grammar, loosest to tightest binding:
//
//   formula   := 'exists' formula | 'forall' formula | iff
//   iff       := implies (('<=>' | '!=') implies)*
//   implies   := or ('=>' implies)?                 right associative
//   or        := and ('|' and)*
//   and       := unary ('&' unary)*
//   unary     := '!' unary | postfix
//   postfix   := primary evidence*
//   evidence  := '[' subst (',' subst)* ']'
//   subst     := name ':=' (0|1) | 'others' ':=' (0|1)
//   primary   := name | 'true' | 'false' | '(' formula ')' | 'MCS' '(' formula ')'
//              | 'MPS' '(' formula ')' | 'IDP' '(' formula ',' formula ')'
//              | 'SUP' '(' name ')' | 'VOT' '(' cmp k ';' formula (',' formula)* ')'
//   cmp       := '<' | '<=' | '=' | '>=' | '>'
//
// exists, forall, IDP and SUP form the second layer: they may only appear at
// the root and their operands are first-layer formulas.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bfl/detail/lexer.hpp"
#include "bfl/error.hpp"
#include "bfl/fault_tree.hpp"

namespace bfl {

enum class Op {
  Const,  // produced by desugaring only
  Atom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Neq,
  Evidence,
  Mcs,
  Mps,
  Vot,
  Exists,
  Forall,
  Idp,
  Sup,
};

enum class Cmp { Lt, Le, Eq, Ge, Gt };
enum class Layer { One, Two };

struct Substitution {
  std::string target;
  bool value = false;
  bool operator==(const Substitution&) const = default;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op = Op::Const;
  bool value = false;                 // Const
  std::string name;                   // Atom, Sup
  std::vector<FormulaPtr> args;       // operands
  std::vector<Substitution> evidence;  // Evidence
  std::optional<bool> others;         // Evidence: value for every unlisted basic event
  Cmp cmp = Cmp::Ge;                  // Vot
  std::size_t k = 0;                  // Vot
};

// Node constructors.
namespace f {
inline FormulaPtr make(Formula node) { return std::make_shared<const Formula>(std::move(node)); }
inline FormulaPtr constant(bool v) { Formula n; n.op = Op::Const; n.value = v; return make(std::move(n)); }
inline FormulaPtr atom(std::string name) { Formula n; n.op = Op::Atom; n.name = std::move(name); return make(std::move(n)); }
inline FormulaPtr unary(Op op, FormulaPtr a) { Formula n; n.op = op; n.args = {std::move(a)}; return make(std::move(n)); }
inline FormulaPtr binary(Op op, FormulaPtr a, FormulaPtr b) { Formula n; n.op = op; n.args = {std::move(a), std::move(b)}; return make(std::move(n)); }
inline FormulaPtr negation(FormulaPtr a) { return unary(Op::Not, std::move(a)); }
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) { return binary(Op::And, std::move(a), std::move(b)); }
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) { return binary(Op::Or, std::move(a), std::move(b)); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) { return binary(Op::Implies, std::move(a), std::move(b)); }
inline FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return binary(Op::Iff, std::move(a), std::move(b)); }
inline FormulaPtr neq(FormulaPtr a, FormulaPtr b) { return binary(Op::Neq, std::move(a), std::move(b)); }
inline FormulaPtr mcs(FormulaPtr a) { return unary(Op::Mcs, std::move(a)); }
inline FormulaPtr mps(FormulaPtr a) { return unary(Op::Mps, std::move(a)); }
inline FormulaPtr exists(FormulaPtr a) { return unary(Op::Exists, std::move(a)); }
inline FormulaPtr forall(FormulaPtr a) { return unary(Op::Forall, std::move(a)); }
inline FormulaPtr idp(FormulaPtr a, FormulaPtr b) { return binary(Op::Idp, std::move(a), std::move(b)); }
inline FormulaPtr sup(std::string name) { Formula n; n.op = Op::Sup; n.name = std::move(name); return make(std::move(n)); }
inline FormulaPtr evidence(FormulaPtr a, std::vector<Substitution> subs,
                           std::optional<bool> others = std::nullopt) {
  Formula n;
  n.op = Op::Evidence;
  n.args = {std::move(a)};
  n.evidence = std::move(subs);
  n.others = others;
  return make(std::move(n));
}
inline FormulaPtr vot(Cmp cmp, std::size_t k, std::vector<FormulaPtr> operands) {
  Formula n;
  n.op = Op::Vot;
  n.cmp = cmp;
  n.k = k;
  n.args = std::move(operands);
  return make(std::move(n));
}
}  // namespace f

inline bool is_layer_two(Op op) {
  return op == Op::Exists || op == Op::Forall || op == Op::Idp || op == Op::Sup;
}

inline Layer layer_of(const Formula& f) { return is_layer_two(f.op) ? Layer::Two : Layer::One; }

/// True if the formula mentions MCS or MPS anywhere.
inline bool mentions_cut_operators(const Formula& f) {
  if (f.op == Op::Mcs || f.op == Op::Mps) return true;
  for (const auto& a : f.args)
    if (mentions_cut_operators(*a)) return true;
  return false;
}

/// Structural equality (shared subterms compare by value).
inline bool same_formula(const Formula& a, const Formula& b) {
  if (&a == &b) return true;
  if (a.op != b.op || a.value != b.value || a.name != b.name || a.evidence != b.evidence ||
      a.others != b.others || a.cmp != b.cmp || a.k != b.k || a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_formula(*a.args[i], *b.args[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline const std::set<std::string, std::less<>>& formula_keywords() {
  static const std::set<std::string, std::less<>> kw = {"MCS", "MPS", "IDP", "SUP",
                                                       "VOT", "exists", "forall", "others",
                                                       "true", "false"};
  return kw;
}

inline std::string print_name(std::string_view name) {
  if (formula_keywords().count(name)) return "\"" + std::string(name) + "\"";
  return quote_if_needed(name);
}

inline const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Eq: return "=";
    case Cmp::Ge: return ">=";
    case Cmp::Gt: return ">";
  }
  return "?";
}

// Binding strength: higher binds tighter.
inline int precedence(Op op) {
  switch (op) {
    case Op::Exists:
    case Op::Forall: return 0;
    case Op::Iff:
    case Op::Neq: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Not: return 5;
    case Op::Evidence: return 6;
    default: return 7;
  }
}

inline std::string print(const Formula& f);

inline std::string print_at(const Formula& f, int min_prec) {
  std::string s = print(f);
  return precedence(f.op) < min_prec ? "(" + s + ")" : s;
}

inline std::string print(const Formula& f) {
  switch (f.op) {
    case Op::Const: return f.value ? "true" : "false";
    case Op::Atom: return print_name(f.name);
    case Op::Not: return "!" + print_at(*f.args[0], 5);
    case Op::And: return print_at(*f.args[0], 4) + " & " + print_at(*f.args[1], 5);
    case Op::Or: return print_at(*f.args[0], 3) + " | " + print_at(*f.args[1], 4);
    case Op::Implies: return print_at(*f.args[0], 3) + " => " + print_at(*f.args[1], 2);
    case Op::Iff: return print_at(*f.args[0], 2) + " <=> " + print_at(*f.args[1], 2);
    case Op::Neq: return print_at(*f.args[0], 2) + " != " + print_at(*f.args[1], 2);
    case Op::Evidence: {
      std::string s = print_at(*f.args[0], 6) + "[";
      bool first = true;
      for (const auto& sub : f.evidence) {
        if (!first) s += ", ";
        first = false;
        s += print_name(sub.target) + ":=" + (sub.value ? "1" : "0");
      }
      if (f.others) {
        if (!first) s += ", ";
        s += std::string("others:=") + (*f.others ? "1" : "0");
      }
      return s + "]";
    }
    case Op::Mcs: return "MCS(" + print(*f.args[0]) + ")";
    case Op::Mps: return "MPS(" + print(*f.args[0]) + ")";
    case Op::Vot: {
      std::string s = std::string("VOT(") + cmp_text(f.cmp) + std::to_string(f.k) + "; ";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) s += ", ";
        s += print(*f.args[i]);
      }
      return s + ")";
    }
    case Op::Exists: return "exists " + print_at(*f.args[0], 1);
    case Op::Forall: return "forall " + print_at(*f.args[0], 1);
    case Op::Idp: return "IDP(" + print(*f.args[0]) + ", " + print(*f.args[1]) + ")";
    case Op::Sup: return "SUP(" + print_name(f.name) + ")";
  }
  return "?";
}

}  // namespace detail

/// Concrete syntax of a formula; parse_formula() reads it back.
inline std::string to_string(const Formula& f) { return detail::print(f); }

// ---------------------------------------------------------------------------
// Semantic checks

namespace detail {

inline void check_layer_one(const Formula& f, const FaultTree& ft);

inline void check_node(const Formula& f, const FaultTree& ft) {
  switch (f.op) {
    case Op::Const: return;
    case Op::Atom:
      if (!ft.contains(f.name)) throw UnknownElement(f.name);
      return;
    case Op::Evidence: {
      std::set<std::string> seen;
      for (const auto& s : f.evidence) {
        if (!ft.contains(s.target)) throw UnknownElement(s.target);
        if (!ft.is_basic_event(s.target))
          throw FormulaError("evidence target '" + s.target +
                             "' is an intermediate element; only basic events can be set");
        if (!seen.insert(s.target).second)
          throw FormulaError("evidence sets '" + s.target + "' more than once");
      }
      if (f.evidence.empty() && !f.others) throw FormulaError("empty evidence");
      break;
    }
    case Op::Vot:
      if (f.args.empty()) throw FormulaError("VOT needs at least one operand");
      if (f.k > f.args.size())
        throw FormulaError("VOT threshold " + std::to_string(f.k) + " exceeds operand count " +
                           std::to_string(f.args.size()));
      break;
    default:
      break;
  }
  if (is_layer_two(f.op))
    throw FormulaError(
        "exists, forall, IDP and SUP may only appear at the root of a formula");
  for (const auto& a : f.args) check_node(*a, ft);
}

inline void check_layer_one(const Formula& f, const FaultTree& ft) { check_node(f, ft); }

}  // namespace detail

/// Checks name resolution, evidence targets, VOT bounds and layering.
inline void check_formula(const Formula& f, const FaultTree& ft) {
  switch (f.op) {
    case Op::Exists:
    case Op::Forall:
    case Op::Idp:
      for (const auto& a : f.args) detail::check_layer_one(*a, ft);
      return;
    case Op::Sup:
      if (!ft.contains(f.name)) throw UnknownElement(f.name);
      return;
    default:
      detail::check_layer_one(f, ft);
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : ts_(tokenize(text)) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return f;
  }

 private:
  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const auto& t = ts_.peek(ahead);
    return t.kind == TokenKind::Identifier && t.text == kw;
  }

  FormulaPtr formula() {
    if (is_keyword("exists")) {
      ts_.next();
      return f::exists(formula());
    }
    if (is_keyword("forall")) {
      ts_.next();
      return f::forall(formula());
    }
    return iff();
  }

  FormulaPtr iff() {
    FormulaPtr lhs = implication();
    for (;;) {
      if (ts_.accept("<=>")) {
        lhs = f::iff(lhs, implication());
      } else if (ts_.accept("!=")) {
        lhs = f::neq(lhs, implication());
      } else {
        return lhs;
      }
    }
  }

  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (ts_.accept("=>")) return f::implies(lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (ts_.accept("|")) lhs = f::disj(lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = unary();
    while (ts_.accept("&")) lhs = f::conj(lhs, unary());
    return lhs;
  }

  FormulaPtr unary() {
    if (ts_.accept("!")) return f::negation(unary());
    FormulaPtr base = primary();
    while (ts_.is_punct("[")) base = evidence(std::move(base));
    return base;
  }

  FormulaPtr evidence(FormulaPtr base) {
    ts_.expect("[");
    std::vector<Substitution> subs;
    std::optional<bool> others;
    do {
      const Token t = ts_.peek();
      bool is_others = t.kind == TokenKind::Identifier && t.text == "others";
      std::string target = name("evidence target");
      ts_.expect(":=");
      bool value = bit();
      if (is_others) {
        if (others) throw ParseError(t.line, t.column, "'others' given twice");
        others = value;
      } else {
        if (others) throw ParseError(t.line, t.column, "'others' must come last");
        subs.push_back({std::move(target), value});
      }
    } while (ts_.accept(","));
    ts_.expect("]");
    return f::evidence(std::move(base), std::move(subs), others);
  }

  bool bit() {
    const auto& t = ts_.peek();
    if (t.kind != TokenKind::Number || (t.text != "0" && t.text != "1")) ts_.fail("expected 0 or 1");
    return ts_.next().text == "1";
  }

  // Accepts keywords too: callers decide whether that is meaningful.
  std::string name(const char* what) {
    const auto& t = ts_.peek();
    if (t.kind != TokenKind::Identifier && t.kind != TokenKind::Quoted)
      ts_.fail(std::string("expected ") + what);
    return ts_.next().text;
  }

  FormulaPtr parenthesised() {
    ts_.expect("(");
    FormulaPtr f = formula();
    ts_.expect(")");
    return f;
  }

  FormulaPtr primary() {
    const Token t = ts_.peek();
    if (t.kind == TokenKind::Quoted) {
      ts_.next();
      return f::atom(t.text);
    }
    if (ts_.is_punct("(")) return parenthesised();
    if (t.kind != TokenKind::Identifier) ts_.fail("expected a formula");

    if (t.text == "true" || t.text == "false") {
      ts_.next();
      return f::constant(t.text == "true");
    }
    if (t.text == "MCS") {
      ts_.next();
      return f::mcs(parenthesised());
    }
    if (t.text == "MPS") {
      ts_.next();
      return f::mps(parenthesised());
    }
    if (t.text == "IDP") {
      ts_.next();
      ts_.expect("(");
      FormulaPtr a = formula();
      ts_.expect(",");
      FormulaPtr b = formula();
      ts_.expect(")");
      return f::idp(a, b);
    }
    if (t.text == "SUP") {
      ts_.next();
      ts_.expect("(");
      std::string n = name("element name");
      ts_.expect(")");
      return f::sup(std::move(n));
    }
    if (t.text == "VOT") {
      ts_.next();
      ts_.expect("(");
      Cmp cmp;
      if (ts_.accept("<")) cmp = Cmp::Lt;
      else if (ts_.accept("<=")) cmp = Cmp::Le;
      else if (ts_.accept("=")) cmp = Cmp::Eq;
      else if (ts_.accept(">=")) cmp = Cmp::Ge;
      else if (ts_.accept(">")) cmp = Cmp::Gt;
      else ts_.fail("expected a comparator < <= = >= >");
      if (ts_.peek().kind != TokenKind::Number) ts_.fail("expected VOT threshold");
      std::size_t k = std::stoul(ts_.next().text);
      ts_.expect(";");
      std::vector<FormulaPtr> ops{formula()};
      while (ts_.accept(",")) ops.push_back(formula());
      ts_.expect(")");
      return f::vot(cmp, k, std::move(ops));
    }
    if (formula_keywords().count(t.text))
      ts_.fail("'" + t.text + "' is a keyword; quote it to use it as a name");
    ts_.next();
    return f::atom(t.text);
  }

  TokenStream ts_;
};

}  // namespace detail

/// Parses a formula and resolves it against `ft`. Throws ParseError on bad
/// syntax, UnknownElement for unresolved names and FormulaError for layering,
/// evidence and VOT violations.
inline FormulaPtr parse_formula(std::string_view text, const FaultTree& ft) {
  FormulaPtr f = detail::FormulaParser(text).parse();
  check_formula(*f, ft);
  return f;
}

// ---------------------------------------------------------------------------
// Desugaring

/// A formula built only from Const, Atom, Not, And, single-target Evidence,
/// MCS, MPS, Exists, Forall and IDP. Obtained from desugar().
class CoreFormula {
 public:
  const Formula& root() const { return *root_; }
  const FormulaPtr& ptr() const { return root_; }
  Layer layer() const { return layer_of(*root_); }

 private:
  explicit CoreFormula(FormulaPtr root) : root_(std::move(root)) {}
  friend CoreFormula desugar(const Formula& f, const FaultTree& ft);
  FormulaPtr root_;
};

namespace detail {

class Desugarer {
 public:
  explicit Desugarer(const FaultTree& ft) : ft_(ft) {}

  FormulaPtr run(const FormulaPtr& f) {
    switch (f->op) {
      case Op::Const:
      case Op::Atom: return f;
      case Op::Not: return mk_not(run(f->args[0]));
      case Op::And: return mk_and(run(f->args[0]), run(f->args[1]));
      case Op::Or: return mk_or(run(f->args[0]), run(f->args[1]));
      case Op::Implies: return mk_implies(run(f->args[0]), run(f->args[1]));
      case Op::Iff: return mk_iff(run(f->args[0]), run(f->args[1]));
      case Op::Neq: return mk_not(mk_iff(run(f->args[0]), run(f->args[1])));
      case Op::Evidence: {
        FormulaPtr body = run(f->args[0]);
        std::set<std::string> listed;
        for (const auto& s : f->evidence) {
          body = f::evidence(body, {s});
          listed.insert(s.target);
        }
        if (f->others)
          for (const auto& be : ft_.basic_events())
            if (!listed.count(be)) body = f::evidence(body, {{be, *f->others}});
        return body;
      }
      case Op::Mcs: return f::mcs(run(f->args[0]));
      case Op::Mps: return f::mps(run(f->args[0]));
      case Op::Vot: return vot(*f);
      case Op::Exists: return f::exists(run(f->args[0]));
      case Op::Forall: return f::forall(run(f->args[0]));
      case Op::Idp: return f::idp(run(f->args[0]), run(f->args[1]));
      case Op::Sup: return f::idp(f::atom(f->name), f::atom(ft_.top()));
    }
    throw Error("unhandled formula node");
  }

 private:
  static bool is_const(const FormulaPtr& f, bool v) { return f->op == Op::Const && f->value == v; }

  static FormulaPtr mk_not(FormulaPtr a) {
    if (a->op == Op::Const) return f::constant(!a->value);
    return f::negation(std::move(a));
  }
  static FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
    if (is_const(a, false) || is_const(b, false)) return f::constant(false);
    if (is_const(a, true)) return b;
    if (is_const(b, true)) return a;
    return f::conj(std::move(a), std::move(b));
  }
  static FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
    return mk_not(mk_and(mk_not(std::move(a)), mk_not(std::move(b))));
  }
  static FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
    return mk_not(mk_and(std::move(a), mk_not(std::move(b))));
  }
  static FormulaPtr mk_iff(const FormulaPtr& a, const FormulaPtr& b) {
    return mk_and(mk_implies(a, b), mk_implies(b, a));
  }

  // "At least k of ops" via the recursion
  //   T(i, k) = (ops[i] & T(i+1, k-1)) | T(i+1, k)
  // with shared subterms, so the result has O(n*k) distinct nodes.
  FormulaPtr at_least(const std::vector<FormulaPtr>& ops, std::size_t k) {
    std::map<std::pair<std::size_t, std::size_t>, FormulaPtr> memo;
    auto rec = [&](auto& self, std::size_t i, std::size_t need) -> FormulaPtr {
      if (need == 0) return f::constant(true);
      if (need > ops.size() - i) return f::constant(false);
      auto key = std::make_pair(i, need);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      FormulaPtr r = mk_or(mk_and(ops[i], self(self, i + 1, need - 1)), self(self, i + 1, need));
      memo.emplace(key, r);
      return r;
    };
    return rec(rec, 0, k);
  }

  FormulaPtr vot(const Formula& v) {
    std::vector<FormulaPtr> ops;
    for (const auto& a : v.args) ops.push_back(run(a));
    switch (v.cmp) {
      case Cmp::Ge: return at_least(ops, v.k);
      case Cmp::Gt: return at_least(ops, v.k + 1);
      case Cmp::Lt: return mk_not(at_least(ops, v.k));
      case Cmp::Le: return mk_not(at_least(ops, v.k + 1));
      case Cmp::Eq: return mk_and(at_least(ops, v.k), mk_not(at_least(ops, v.k + 1)));
    }
    throw Error("unhandled comparator");
  }

  const FaultTree& ft_;
};

}  // namespace detail

/// Expands Or, Implies, Iff, Neq, VOT comparisons, SUP and multi-target
/// evidence into the core connectives. MPS stays a dedicated node.
inline CoreFormula desugar(const Formula& f, const FaultTree& ft) {
  check_formula(f, ft);
  auto copy = std::make_shared<const Formula>(f);
  return CoreFormula(detail::Desugarer(ft).run(copy));
}

}  // namespace bfl
