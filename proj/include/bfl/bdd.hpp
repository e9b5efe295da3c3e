#pragma once

// Reduced ordered BDDs with a hash-consed node table.
//
// Every node is created through make_node(), which refuses redundant nodes
// (low == high) and returns the existing node for a repeated (var, low, high)
// triple, so every BDD is reduced by construction and equal functions share a
// node id. Variables are interleaved: basic event i owns plain variable 2i and
// primed variable 2i+1.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bfl/error.hpp"

namespace bfl {

/// Position in the variable order.
struct VarId {
  std::uint32_t index = 0;

  static constexpr VarId plain(std::size_t basic_event) {
    return VarId{static_cast<std::uint32_t>(2 * basic_event)};
  }
  static constexpr VarId primed(std::size_t basic_event) {
    return VarId{static_cast<std::uint32_t>(2 * basic_event + 1)};
  }
  constexpr bool is_primed() const { return index & 1u; }
  constexpr std::size_t basic_event() const { return index / 2; }
  constexpr VarId to_primed() const { return VarId{index | 1u}; }

  auto operator<=>(const VarId&) const = default;
};

/// Handle to a node of one BddManager.
class BddRef {
 public:
  BddRef() = default;

  std::uint32_t id() const { return node_; }
  bool operator==(const BddRef&) const = default;

 private:
  friend class BddManager;
  BddRef(std::uint32_t manager, std::uint32_t node) : manager_(manager), node_(node) {}
  std::uint32_t manager_ = 0;
  std::uint32_t node_ = 0;
};

struct Literal {
  VarId var;
  bool value;
  bool operator==(const Literal&) const = default;
};

/// Partial assignment; variables that do not appear are don't-care.
/// Literals are sorted by variable order.
struct Cube {
  std::vector<Literal> literals;

  std::optional<bool> value_of(VarId v) const {
    for (const auto& l : literals)
      if (l.var == v) return l.value;
    return std::nullopt;
  }
  bool operator==(const Cube&) const = default;
};

enum class BinOp : std::uint8_t { And, Or, Xor, Implies };

class BddManager {
 public:
  static constexpr std::uint32_t kTerminalVar = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    std::uint32_t var;
    std::uint32_t low;
    std::uint32_t high;
  };

  struct Stats {
    std::size_t cache_lookups = 0;
    std::size_t cache_hits = 0;
  };

  /// Manager over `basic_events` plain variables and their primed copies.
  explicit BddManager(std::size_t basic_events)
      : id_(next_manager_id()), var_count_(static_cast<std::uint32_t>(2 * basic_events)) {
    nodes_.push_back({kTerminalVar, 0, 0});
    nodes_.push_back({kTerminalVar, 1, 1});
  }

  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;
  BddManager(BddManager&&) = default;
  BddManager& operator=(BddManager&&) = default;

  std::size_t var_count() const { return var_count_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Stats& stats() const { return stats_; }

  BddRef zero() const { return {id_, 0}; }
  BddRef one() const { return {id_, 1}; }
  BddRef constant(bool v) const { return v ? one() : zero(); }

  /// Single-node BDD with low child 0 and high child 1.
  BddRef var(VarId v) {
    check_var(v);
    return ref(make_node(v.index, 0, 1));
  }

  BddRef apply(BinOp op, BddRef a, BddRef b) {
    check(a);
    check(b);
    return ref(apply_rec(op, a.node_, b.node_));
  }
  BddRef bdd_and(BddRef a, BddRef b) { return apply(BinOp::And, a, b); }
  BddRef bdd_or(BddRef a, BddRef b) { return apply(BinOp::Or, a, b); }

  BddRef negate(BddRef a) {
    check(a);
    return ref(negate_rec(a.node_));
  }

  /// Cofactor of `a` with `v` fixed to `value`.
  BddRef restrict(BddRef a, VarId v, bool value) {
    check(a);
    check_var(v);
    return ref(restrict_rec(a.node_, v.index, value));
  }

  /// Iterated existential quantification: exists v1. exists v2. ... a, each
  /// step being restrict(a, v, 0) | restrict(a, v, 1).
  BddRef exists(BddRef a, std::span<const VarId> vs) {
    check(a);
    std::uint32_t n = a.node_;
    for (VarId v : vs) {
      check_var(v);
      n = apply_rec(BinOp::Or, restrict_rec(n, v.index, false), restrict_rec(n, v.index, true));
    }
    return ref(n);
  }

  /// Relabels each plain variable in `vs` to its primed copy. Interleaving
  /// keeps the relative order, so the result has the same shape.
  BddRef rename_to_primed(BddRef a, std::span<const VarId> vs) {
    check(a);
    std::unordered_set<std::uint32_t> targets;
    for (VarId v : vs) {
      check_var(v);
      if (v.is_primed()) throw PreconditionError("rename_to_primed: variable list holds a primed variable");
      targets.insert(v.index);
    }
    for (VarId v : support(a))
      if (v.is_primed()) throw PreconditionError("rename_to_primed: BDD already depends on a primed variable");
    std::unordered_map<std::uint32_t, std::uint32_t> memo;
    auto rec = [&](auto& self, std::uint32_t n) -> std::uint32_t {
      if (n <= 1) return n;
      if (auto it = memo.find(n); it != memo.end()) return it->second;
      const Node node = nodes_[n];
      std::uint32_t lo = self(self, node.low);
      std::uint32_t hi = self(self, node.high);
      std::uint32_t v = targets.count(node.var) ? (node.var | 1u) : node.var;
      std::uint32_t r = make_node(v, lo, hi);
      memo.emplace(n, r);
      return r;
    };
    return ref(rec(rec, a.node_));
  }

  /// Labels of all nodes reachable from `a`, in variable order.
  std::vector<VarId> support(BddRef a) const {
    check(a);
    std::unordered_set<std::uint32_t> seen, vars;
    std::vector<std::uint32_t> work{a.node_};
    while (!work.empty()) {
      std::uint32_t n = work.back();
      work.pop_back();
      if (n <= 1 || !seen.insert(n).second) continue;
      vars.insert(nodes_[n].var);
      work.push_back(nodes_[n].low);
      work.push_back(nodes_[n].high);
    }
    std::vector<VarId> out;
    out.reserve(vars.size());
    for (auto v : vars) out.push_back(VarId{v});
    std::sort(out.begin(), out.end());
    return out;
  }

  /// One cube per path to the 1-terminal, low branch before high branch.
  std::vector<Cube> all_sat_cubes(BddRef a) const {
    check(a);
    std::vector<Cube> out;
    Cube path;
    auto rec = [&](auto& self, std::uint32_t n) -> void {
      if (n == 0) return;
      if (n == 1) {
        out.push_back(path);
        return;
      }
      const Node& node = nodes_[n];
      path.literals.push_back({VarId{node.var}, false});
      self(self, node.low);
      path.literals.back().value = true;
      self(self, node.high);
      path.literals.pop_back();
    };
    rec(rec, a.node_);
    return out;
  }

  std::optional<bool> is_constant(BddRef a) const {
    check(a);
    if (a.node_ <= 1) return a.node_ == 1;
    return std::nullopt;
  }

  /// Walks from the root, taking the high edge when `value_of(var)` is true.
  template <typename F>
  bool evaluate(BddRef a, F&& value_of) const {
    check(a);
    std::uint32_t n = a.node_;
    while (n > 1) {
      const Node& node = nodes_[n];
      n = value_of(VarId{node.var}) ? node.high : node.low;
    }
    return n == 1;
  }

  bool is_terminal(BddRef a) const { return a.node_ <= 1; }
  VarId label(BddRef a) const {
    check(a);
    if (a.node_ <= 1) throw PreconditionError("terminal node has no variable");
    return VarId{nodes_[a.node_].var};
  }
  BddRef low(BddRef a) const {
    check(a);
    return ref(nodes_[a.node_].low);
  }
  BddRef high(BddRef a) const {
    check(a);
    return ref(nodes_[a.node_].high);
  }

  /// Read-only view of the node table (index = BddRef::id()).
  const std::vector<Node>& nodes() const { return nodes_; }

  /// Scans the node table for redundant nodes, duplicate triples and edges
  /// that do not go strictly down the variable order. Returns one message per
  /// violation.
  std::vector<std::string> check_invariants() const {
    std::vector<std::string> problems;
    std::unordered_set<NodeKey, NodeKeyHash> seen;
    for (std::uint32_t i = 2; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (n.low == n.high) problems.push_back("node " + std::to_string(i) + " is redundant");
      if (!seen.insert({n.var, n.low, n.high}).second)
        problems.push_back("node " + std::to_string(i) + " duplicates an existing triple");
      if (!(n.var < nodes_[n.low].var) || !(n.var < nodes_[n.high].var))
        problems.push_back("node " + std::to_string(i) + " violates the variable order");
    }
    return problems;
  }

  /// Graphviz rendering: dashed edges are low branches, solid edges high.
  std::string to_dot(BddRef a, const std::function<std::string(VarId)>& name_of) const {
    check(a);
    std::ostringstream os;
    os << "digraph bdd {\n";
    os << "  node [shape=circle];\n";
    std::vector<std::uint32_t> order;
    std::unordered_set<std::uint32_t> seen;
    auto rec = [&](auto& self, std::uint32_t n) -> void {
      if (!seen.insert(n).second) return;
      order.push_back(n);
      if (n > 1) {
        self(self, nodes_[n].low);
        self(self, nodes_[n].high);
      }
    };
    rec(rec, a.node_);
    for (std::uint32_t n : order) {
      if (n <= 1) {
        os << "  n" << n << " [shape=box, label=\"" << n << "\"];\n";
      } else {
        os << "  n" << n << " [label=\"" << name_of(VarId{nodes_[n].var}) << "\"];\n";
      }
    }
    for (std::uint32_t n : order) {
      if (n <= 1) continue;
      os << "  n" << n << " -> n" << nodes_[n].low << " [style=dashed];\n";
      os << "  n" << n << " -> n" << nodes_[n].high << ";\n";
    }
    os << "}\n";
    return os.str();
  }

 private:
  struct NodeKey {
    std::uint32_t var, low, high;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      std::size_t h = k.var;
      h = h * 0x9e3779b97f4a7c15ull + k.low;
      h = h * 0x9e3779b97f4a7c15ull + k.high;
      return h ^ (h >> 29);
    }
  };

  // op codes for the computed table
  enum : std::uint32_t { kAnd, kOr, kXor, kImplies, kNot, kRestrict0, kRestrict1 };

  struct CacheKey {
    std::uint32_t op, a, b;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const { return NodeKeyHash{}({k.op, k.a, k.b}); }
  };

  static std::uint32_t next_manager_id() {
    static std::atomic<std::uint32_t> counter{1};
    return counter++;
  }

  BddRef ref(std::uint32_t node) const { return {id_, node}; }

  void check(BddRef a) const {
    if (a.manager_ != id_) throw PreconditionError("BddRef belongs to a different manager");
  }
  void check_var(VarId v) const {
    if (v.index >= var_count_)
      throw PreconditionError("variable " + std::to_string(v.index) + " is not registered");
  }

  std::uint32_t make_node(std::uint32_t var, std::uint32_t low, std::uint32_t high) {
    if (low == high) return low;
    NodeKey key{var, low, high};
    if (auto it = unique_.find(key); it != unique_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({var, low, high});
    unique_.emplace(key, id);
    return id;
  }

  bool lookup(const CacheKey& key, std::uint32_t& out) {
    ++stats_.cache_lookups;
    auto it = computed_.find(key);
    if (it == computed_.end()) return false;
    ++stats_.cache_hits;
    out = it->second;
    return true;
  }

  static bool terminal_case(BinOp op, std::uint32_t a, std::uint32_t b, std::uint32_t& out) {
    switch (op) {
      case BinOp::And:
        if (a == 0 || b == 0) return out = 0, true;
        if (a == 1) return out = b, true;
        if (b == 1 || a == b) return out = a, true;
        return false;
      case BinOp::Or:
        if (a == 1 || b == 1) return out = 1, true;
        if (a == 0) return out = b, true;
        if (b == 0 || a == b) return out = a, true;
        return false;
      case BinOp::Xor:
        if (a == b) return out = 0, true;
        if (a == 0) return out = b, true;
        if (b == 0) return out = a, true;
        return false;
      case BinOp::Implies:
        if (a == 0 || b == 1 || a == b) return out = 1, true;
        if (a == 1) return out = b, true;
        return false;
    }
    return false;
  }

  std::uint32_t apply_rec(BinOp op, std::uint32_t a, std::uint32_t b) {
    std::uint32_t r;
    if (terminal_case(op, a, b, r)) return r;
    if (op == BinOp::Xor && (a == 1 || b == 1)) return negate_rec(a == 1 ? b : a);
    if (op == BinOp::Implies && b == 0) return negate_rec(a);
    if (op != BinOp::Implies && a > b) std::swap(a, b);

    CacheKey key{static_cast<std::uint32_t>(op), a, b};
    if (lookup(key, r)) return r;

    const Node na = nodes_[a];
    const Node nb = nodes_[b];
    std::uint32_t top = std::min(na.var, nb.var);
    std::uint32_t a0 = na.var == top ? na.low : a, a1 = na.var == top ? na.high : a;
    std::uint32_t b0 = nb.var == top ? nb.low : b, b1 = nb.var == top ? nb.high : b;
    std::uint32_t lo = apply_rec(op, a0, b0);
    std::uint32_t hi = apply_rec(op, a1, b1);
    r = make_node(top, lo, hi);
    computed_.emplace(key, r);
    return r;
  }

  std::uint32_t negate_rec(std::uint32_t a) {
    if (a <= 1) return 1 - a;
    CacheKey key{kNot, a, 0};
    std::uint32_t r;
    if (lookup(key, r)) return r;
    const Node n = nodes_[a];
    std::uint32_t lo = negate_rec(n.low);
    std::uint32_t hi = negate_rec(n.high);
    r = make_node(n.var, lo, hi);
    computed_.emplace(key, r);
    return r;
  }

  std::uint32_t restrict_rec(std::uint32_t a, std::uint32_t var, bool value) {
    if (a <= 1) return a;
    const Node n = nodes_[a];
    if (n.var > var) return a;
    if (n.var == var) return value ? n.high : n.low;
    CacheKey key{value ? kRestrict1 : kRestrict0, a, var};
    std::uint32_t r;
    if (lookup(key, r)) return r;
    std::uint32_t lo = restrict_rec(n.low, var, value);
    std::uint32_t hi = restrict_rec(n.high, var, value);
    r = make_node(n.var, lo, hi);
    computed_.emplace(key, r);
    return r;
  }

  std::uint32_t id_;
  std::uint32_t var_count_;
  std::vector<Node> nodes_;
  std::unordered_map<NodeKey, std::uint32_t, NodeKeyHash> unique_;
  std::unordered_map<CacheKey, std::uint32_t, CacheKeyHash> computed_;
  Stats stats_;
};

}  // namespace bfl
