#pragma once

// Shared fixtures and random generators for the test suites.

#include <algorithm>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bfl/bfl.hpp"

namespace bfl::test {

using NameSet = std::set<std::string>;
using Family = std::set<NameSet>;

inline std::string data_path(const std::string& file) { return std::string(BFL_DATA_DIR) + "/" + file; }

inline std::string read_data(const std::string& file) {
  std::ifstream in(data_path(file));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline FaultTree load(const std::string& file) { return parse_fault_tree(read_data(file)); }

inline FormulaPtr formula(const std::string& text, const FaultTree& ft) { return parse_formula(text, ft); }

/// Failed (or operational) basic events of every reported set.
inline Family failed_sets(const std::vector<ReportedSet>& sets) {
  Family out;
  for (const auto& s : sets) out.emplace(s.failed.begin(), s.failed.end());
  return out;
}
inline Family operational_sets(const std::vector<ReportedSet>& sets) {
  Family out;
  for (const auto& s : sets) out.emplace(s.operational.begin(), s.operational.end());
  return out;
}

inline Family allsat_failed(Session& s, const std::string& text, ScopeMode mode = ScopeMode::Support) {
  auto f = formula(text, s.tree());
  return failed_sets(enumerate_satisfying(s, *f, mode).render(s.tree()));
}
inline Family allsat_operational(Session& s, const std::string& text,
                                 ScopeMode mode = ScopeMode::Support) {
  auto f = formula(text, s.tree());
  return operational_sets(enumerate_satisfying(s, *f, mode).render(s.tree()));
}

inline StatusVector bits(std::initializer_list<int> xs) {
  std::vector<bool> v;
  for (int x : xs) v.push_back(x != 0);
  return StatusVector(v);
}

/// The revision satisfies chi and every flipped bit is needed.
inline bool valid_revision(Session& s, const StatusVector& original, const StatusVector& revised,
                           const Formula& chi, ScopeMode mode = ScopeMode::Support) {
  if (!evaluate(s, revised, chi, mode).holds) return false;
  for (std::size_t i = 0; i < revised.size(); ++i) {
    if (revised[i] == original[i]) continue;
    StatusVector back = revised;
    back.set(i, original[i]);
    if (evaluate(s, back, chi, mode).holds) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Random instances

struct RandomTreeOptions {
  std::size_t min_be = 2;
  std::size_t max_be = 8;
  std::size_t max_fan_in = 4;
  bool allow_vot = true;
  double share_probability = 0.25;
};

inline FaultTree random_tree(std::mt19937& rng, RandomTreeOptions opt = {}) {
  std::uniform_int_distribution<std::size_t> be_dist(opt.min_be, opt.max_be);
  const std::size_t n = be_dist(rng);
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < n; ++i) pool.push_back("b" + std::to_string(i));
  std::shuffle(pool.begin(), pool.end(), rng);

  std::vector<std::string> made;  // every element already placed under a gate
  std::vector<std::pair<std::string, ElementDef>> gates;
  std::size_t gate_id = 0;
  while (pool.size() > 1 || gates.empty()) {
    std::size_t hi = std::min(opt.max_fan_in, pool.size());
    std::size_t take = std::uniform_int_distribution<std::size_t>(2, hi)(rng);
    std::vector<std::string> children;
    for (std::size_t j = 0; j < take; ++j) {
      std::size_t idx = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
      children.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<long>(idx));
    }
    if (!made.empty() && std::bernoulli_distribution(opt.share_probability)(rng)) {
      const auto& extra = made[std::uniform_int_distribution<std::size_t>(0, made.size() - 1)(rng)];
      if (std::find(children.begin(), children.end(), extra) == children.end())
        children.push_back(extra);
    }
    int kind = std::uniform_int_distribution<int>(0, opt.allow_vot ? 2 : 1)(rng);
    ElementDef def;
    if (kind == 2) {
      std::size_t k = std::uniform_int_distribution<std::size_t>(1, children.size())(rng);
      def = ElementDef::make_gate(GateType::Vot, children, k);
    } else {
      def = ElementDef::make_gate(kind == 0 ? GateType::And : GateType::Or, children);
    }
    std::string name = "g" + std::to_string(gate_id++);
    for (const auto& c : children) made.push_back(c);
    gates.emplace_back(name, def);
    pool.push_back(name);
  }
  std::reverse(gates.begin(), gates.end());
  std::string top = gates.front().first;
  return FaultTree(top, std::move(gates));
}

inline std::vector<std::string> all_elements(const FaultTree& ft) {
  std::vector<std::string> out;
  for (const auto& [name, def] : ft.elements()) out.push_back(name);
  return out;
}

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& xs) {
  return xs[std::uniform_int_distribution<std::size_t>(0, xs.size() - 1)(rng)];
}

/// Random first-layer formula using every constructor.
inline FormulaPtr random_formula(std::mt19937& rng, const FaultTree& ft, int depth,
                                 bool with_cuts = true) {
  auto elements = all_elements(ft);
  if (depth <= 0) {
    if (std::bernoulli_distribution(0.05)(rng)) return f::constant(rng() & 1u);
    return f::atom(pick(rng, elements));
  }
  int choice = std::uniform_int_distribution<int>(0, with_cuts ? 11 : 9)(rng);
  auto sub = [&] { return random_formula(rng, ft, depth - 1, with_cuts); };
  switch (choice) {
    case 0: return f::atom(pick(rng, elements));
    case 1: return f::negation(sub());
    case 2: return f::conj(sub(), sub());
    case 3: return f::disj(sub(), sub());
    case 4: return f::implies(sub(), sub());
    case 5: return f::iff(sub(), sub());
    case 6: return f::neq(sub(), sub());
    case 7:
    case 8: {
      std::vector<std::string> bes = ft.basic_events();
      std::shuffle(bes.begin(), bes.end(), rng);
      std::size_t m = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(2, bes.size()))(rng);
      std::vector<Substitution> subs;
      for (std::size_t i = 0; i < m; ++i) subs.push_back({bes[i], bool(rng() & 1u)});
      std::optional<bool> others;
      if (std::bernoulli_distribution(0.15)(rng)) others = bool(rng() & 1u);
      return f::evidence(sub(), subs, others);
    }
    case 9: {
      std::size_t m = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
      std::vector<FormulaPtr> ops;
      for (std::size_t i = 0; i < m; ++i) ops.push_back(sub());
      auto cmp = static_cast<Cmp>(std::uniform_int_distribution<int>(0, 4)(rng));
      std::size_t k = std::uniform_int_distribution<std::size_t>(0, m)(rng);
      return f::vot(cmp, k, ops);
    }
    case 10: return f::mcs(sub());
    default: return f::mps(sub());
  }
}

inline FormulaPtr random_layer_two(std::mt19937& rng, const FaultTree& ft, int depth) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return f::exists(random_formula(rng, ft, depth));
    case 1: return f::forall(random_formula(rng, ft, depth));
    case 2: return f::idp(random_formula(rng, ft, depth), random_formula(rng, ft, depth));
    default: return f::sup(pick(rng, all_elements(ft)));
  }
}

// ---------------------------------------------------------------------------
// Plain propositional expressions over BDD variables, for engine-level tests.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum Kind { Var, Const, Not, Bin } kind = Const;
  std::size_t var = 0;
  bool value = false;
  BinOp op = BinOp::And;
  ExprPtr a, b;
};

inline ExprPtr e_var(std::size_t v) { return std::make_shared<const Expr>(Expr{Expr::Var, v, false, BinOp::And, nullptr, nullptr}); }
inline ExprPtr e_const(bool c) { return std::make_shared<const Expr>(Expr{Expr::Const, 0, c, BinOp::And, nullptr, nullptr}); }
inline ExprPtr e_not(ExprPtr a) { return std::make_shared<const Expr>(Expr{Expr::Not, 0, false, BinOp::And, std::move(a), nullptr}); }
inline ExprPtr e_bin(BinOp op, ExprPtr a, ExprPtr b) {
  return std::make_shared<const Expr>(Expr{Expr::Bin, 0, false, op, std::move(a), std::move(b)});
}

inline bool eval_expr(const Expr& e, std::uint64_t mask) {
  switch (e.kind) {
    case Expr::Var: return mask >> e.var & 1u;
    case Expr::Const: return e.value;
    case Expr::Not: return !eval_expr(*e.a, mask);
    case Expr::Bin: {
      bool x = eval_expr(*e.a, mask), y = eval_expr(*e.b, mask);
      switch (e.op) {
        case BinOp::And: return x && y;
        case BinOp::Or: return x || y;
        case BinOp::Xor: return x != y;
        case BinOp::Implies: return !x || y;
      }
    }
  }
  return false;
}

/// Variables are plain variables of basic events 0..n-1.
inline BddRef compile_expr(BddManager& m, const Expr& e) {
  switch (e.kind) {
    case Expr::Var: return m.var(VarId::plain(e.var));
    case Expr::Const: return m.constant(e.value);
    case Expr::Not: return m.negate(compile_expr(m, *e.a));
    case Expr::Bin: return m.apply(e.op, compile_expr(m, *e.a), compile_expr(m, *e.b));
  }
  return m.zero();
}

inline ExprPtr random_expr(std::mt19937& rng, std::size_t vars, int depth) {
  if (depth <= 0 || std::bernoulli_distribution(0.2)(rng)) {
    if (std::bernoulli_distribution(0.05)(rng)) return e_const(rng() & 1u);
    return e_var(std::uniform_int_distribution<std::size_t>(0, vars - 1)(rng));
  }
  if (std::bernoulli_distribution(0.2)(rng)) return e_not(random_expr(rng, vars, depth - 1));
  auto op = static_cast<BinOp>(std::uniform_int_distribution<int>(0, 3)(rng));
  return e_bin(op, random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
}

/// A syntactically different but equivalent expression.
inline ExprPtr rewrite_expr(std::mt19937& rng, const ExprPtr& e, std::size_t vars) {
  auto coin = [&] { return bool(rng() & 1u); };
  switch (e->kind) {
    case Expr::Var:
    case Expr::Const:
      if (coin()) return e_not(e_not(e));
      {
        auto v = e_var(std::uniform_int_distribution<std::size_t>(0, vars - 1)(rng));
        return e_bin(BinOp::And, e, e_bin(BinOp::Or, v, e_not(v)));
      }
    case Expr::Not:
      if (e->a->kind == Expr::Not && coin()) return rewrite_expr(rng, e->a->a, vars);
      return e_not(rewrite_expr(rng, e->a, vars));
    case Expr::Bin: {
      auto a = rewrite_expr(rng, e->a, vars), b = rewrite_expr(rng, e->b, vars);
      switch (e->op) {
        case BinOp::And:
          return coin() ? e_bin(BinOp::And, b, a) : e_not(e_bin(BinOp::Or, e_not(a), e_not(b)));
        case BinOp::Or:
          return coin() ? e_bin(BinOp::Or, b, a) : e_not(e_bin(BinOp::And, e_not(a), e_not(b)));
        case BinOp::Xor:
          return coin() ? e_bin(BinOp::Xor, b, a)
                        : e_bin(BinOp::Or, e_bin(BinOp::And, a, e_not(b)), e_bin(BinOp::And, e_not(a), b));
        case BinOp::Implies:
          return coin() ? e_bin(BinOp::Or, e_not(a), b) : e_bin(BinOp::Implies, e_not(b), e_not(a));
      }
    }
  }
  return e;
}

}  // namespace bfl::test
