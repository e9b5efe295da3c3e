#pragma once

// Translation of fault-tree elements and core formulas to BDDs.

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bfl/bdd.hpp"
#include "bfl/error.hpp"
#include "bfl/fault_tree.hpp"
#include "bfl/formula.hpp"
#include "bfl/scope_mode.hpp"

namespace bfl {

/// First-layer result: a predicate on status vectors over plain variables.
struct VectorPredicate {
  BddRef bdd;
};

/// Second-layer result: a verdict about the whole tree.
struct TreeVerdict {
  bool value;
};

using CompileResult = std::variant<VectorPredicate, TreeVerdict>;

/// A compilation session: one tree, one BDD manager, and the caches that
/// live as long as the manager. Calls on one session must be serialized.
class Session {
 public:
  struct Stats {
    std::size_t element_translations = 0;  // cache misses of compile_element
    std::size_t element_cache_hits = 0;
  };

  explicit Session(FaultTree ft)
      : ft_(std::move(ft)), mgr_(ft_.basic_event_count()) {
    for (std::size_t i = 0; i < ft_.basic_event_count(); ++i)
      all_plain_.push_back(VarId::plain(i));
  }

  const FaultTree& tree() const { return ft_; }
  BddManager& manager() { return mgr_; }
  const BddManager& manager() const { return mgr_; }
  const Stats& stats() const { return stats_; }

  /// Plain variables of every basic event, in order.
  const std::vector<VarId>& all_variables() const { return all_plain_; }

  VarId variable_of(std::string_view basic_event) const {
    auto idx = ft_.basic_event_index(basic_event);
    if (!idx) throw UnknownElement(std::string(basic_event));
    return VarId::plain(*idx);
  }
  const std::string& name_of(VarId v) const { return ft_.basic_events().at(v.basic_event()); }

  /// BDD of the structure function of element `e`. Cached per element.
  BddRef compile_element(std::string_view e) {
    std::string name(e);
    if (auto it = element_cache_.find(name); it != element_cache_.end()) {
      ++stats_.element_cache_hits;
      return it->second;
    }
    const ElementDef& def = ft_.element(name);
    ++stats_.element_translations;

    BddRef r;
    if (def.is_basic()) {
      r = mgr_.var(variable_of(name));
    } else {
      std::vector<BddRef> kids;
      kids.reserve(def.children.size());
      for (const auto& c : def.children) kids.push_back(compile_element(c));
      switch (def.gate) {
        case GateType::And:
          r = mgr_.one();
          for (auto k : kids) r = mgr_.bdd_and(r, k);
          break;
        case GateType::Or:
          r = mgr_.zero();
          for (auto k : kids) r = mgr_.bdd_or(r, k);
          break;
        case GateType::Vot:
          r = at_least(kids, def.threshold);
          break;
      }
    }
    element_cache_.emplace(std::move(name), r);
    return r;
  }

  /// Threshold function "at least k of xs" by the recursion
  /// T(i, k) = (xs[i] & T(i+1, k-1)) | T(i+1, k).
  BddRef at_least(const std::vector<BddRef>& xs, std::size_t k) {
    std::map<std::pair<std::size_t, std::size_t>, BddRef> memo;
    auto rec = [&](auto& self, std::size_t i, std::size_t need) -> BddRef {
      if (need == 0) return mgr_.one();
      if (need > xs.size() - i) return mgr_.zero();
      auto key = std::make_pair(i, need);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      BddRef take = mgr_.bdd_and(xs[i], self(self, i + 1, need - 1));
      BddRef r = mgr_.bdd_or(take, self(self, i + 1, need));
      memo.emplace(key, r);
      return r;
    };
    return rec(rec, 0, k);
  }

  /// Compiles a desugared formula. First-layer formulas give a BDD over plain
  /// variables, second-layer formulas a verdict.
  CompileResult compile(const CoreFormula& f, ScopeMode mode = ScopeMode::Support) {
    const Formula& root = f.root();
    switch (root.op) {
      case Op::Exists: {
        BddRef b = predicate(root.args[0], mode);
        BddRef q = mgr_.exists(b, all_plain_);
        return TreeVerdict{q != mgr_.zero()};
      }
      case Op::Forall: {
        BddRef b = predicate(root.args[0], mode);
        BddRef q = mgr_.negate(mgr_.exists(mgr_.negate(b), all_plain_));
        return TreeVerdict{q == mgr_.one()};
      }
      case Op::Idp: {
        BddRef a = predicate(root.args[0], mode);
        BddRef b = predicate(root.args[1], mode);
        return TreeVerdict{disjoint_support(a, b)};
      }
      default:
        return VectorPredicate{predicate(f.ptr(), mode)};
    }
  }

  /// Compiles a first-layer formula; throws on a second-layer one.
  BddRef compile_predicate(const CoreFormula& f, ScopeMode mode = ScopeMode::Support) {
    if (f.layer() != Layer::One)
      throw PreconditionError("expected a first-layer formula");
    return predicate(f.ptr(), mode);
  }

  /// Satisfying vectors of `b` that are minimal in ones over `vars`: keeps
  /// b(V) & !exists V'. (V' strictly below V) & b(V').
  BddRef minimize_cuts(BddRef b, const std::vector<VarId>& vars) {
    check_scope(b, vars);
    BddRef primed = mgr_.rename_to_primed(b, vars);
    BddRef smaller = mgr_.bdd_and(strict_order(vars, Direction::Below), primed);
    BddRef witness = mgr_.exists(smaller, primed_of(vars));
    return mgr_.bdd_and(b, mgr_.negate(witness));
  }

  /// Vectors falsifying `b_phi` that are maximal in ones over `vars`: every
  /// strictly larger vector satisfies `b_phi`. The zero positions of such a
  /// vector form a minimal path set.
  BddRef maximize_paths(BddRef b_phi, const std::vector<VarId>& vars) {
    check_scope(b_phi, vars);
    BddRef nb = mgr_.negate(b_phi);
    BddRef primed = mgr_.rename_to_primed(nb, vars);
    BddRef larger = mgr_.bdd_and(strict_order(vars, Direction::Above), primed);
    BddRef witness = mgr_.exists(larger, primed_of(vars));
    return mgr_.bdd_and(nb, mgr_.negate(witness));
  }

  /// Basic events whose value can change the truth of a first-layer formula:
  /// the support of its reduced BDD.
  std::vector<std::string> influencing_basic_events(const CoreFormula& f,
                                                    ScopeMode mode = ScopeMode::Support) {
    BddRef b = compile_predicate(f, mode);
    std::vector<std::string> out;
    for (VarId v : mgr_.support(b)) out.push_back(name_of(v));
    return out;
  }

  bool independent(const CoreFormula& a, const CoreFormula& b,
                   ScopeMode mode = ScopeMode::Support) {
    return disjoint_support(compile_predicate(a, mode), compile_predicate(b, mode));
  }

  /// Variables over which minimality of MCS/MPS(operand) is enforced.
  std::vector<VarId> scope_of(BddRef operand, ScopeMode mode) const {
    return mode == ScopeMode::Global ? all_plain_ : mgr_.support(operand);
  }

 private:
  enum class Direction { Below, Above };

  BddRef predicate(const FormulaPtr& f, ScopeMode mode) {
    std::unordered_map<const Formula*, BddRef> memo;
    return predicate_rec(*f, mode, memo);
  }

  BddRef predicate_rec(const Formula& f, ScopeMode mode,
                       std::unordered_map<const Formula*, BddRef>& memo) {
    if (auto it = memo.find(&f); it != memo.end()) return it->second;
    BddRef r;
    switch (f.op) {
      case Op::Const: r = mgr_.constant(f.value); break;
      case Op::Atom: r = compile_element(f.name); break;
      case Op::Not: r = mgr_.negate(predicate_rec(*f.args[0], mode, memo)); break;
      case Op::And:
        r = mgr_.bdd_and(predicate_rec(*f.args[0], mode, memo), predicate_rec(*f.args[1], mode, memo));
        break;
      case Op::Evidence: {
        r = predicate_rec(*f.args[0], mode, memo);
        for (const auto& s : f.evidence) r = mgr_.restrict(r, variable_of(s.target), s.value);
        break;
      }
      case Op::Mcs: {
        BddRef b = predicate_rec(*f.args[0], mode, memo);
        r = minimize_cuts(b, scope_of(b, mode));
        break;
      }
      case Op::Mps: {
        BddRef b = predicate_rec(*f.args[0], mode, memo);
        r = maximize_paths(b, scope_of(b, mode));
        break;
      }
      default:
        throw PreconditionError("formula is not desugared or mixes layers: " + to_string(f));
    }
    memo.emplace(&f, r);
    return r;
  }

  bool disjoint_support(BddRef a, BddRef b) const {
    auto sa = mgr_.support(a), sb = mgr_.support(b);
    std::vector<VarId> common;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
    return common.empty();
  }

  void check_scope(BddRef b, const std::vector<VarId>& vars) const {
    for (VarId v : mgr_.support(b)) {
      if (v.is_primed()) throw PreconditionError("operand depends on a primed variable");
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        throw PreconditionError("operand depends on '" + name_of(v) +
                                "', which is outside the minimisation scope");
    }
  }

  static std::vector<VarId> primed_of(const std::vector<VarId>& vars) {
    std::vector<VarId> out;
    out.reserve(vars.size());
    for (VarId v : vars) out.push_back(v.to_primed());
    return out;
  }

  // Below: (AND_k v'_k => v_k) & (OR_k v'_k != v_k), i.e. V' is a strict
  // subset of V. Above swaps the implication.
  BddRef strict_order(const std::vector<VarId>& vars, Direction dir) {
    auto key = std::make_pair(dir, vars);
    if (auto it = order_cache_.find(key); it != order_cache_.end()) return it->second;
    BddRef within = mgr_.one();
    BddRef differs = mgr_.zero();
    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      BddRef v = mgr_.var(*it);
      BddRef vp = mgr_.var(it->to_primed());
      BddRef step = dir == Direction::Below ? mgr_.apply(BinOp::Implies, vp, v)
                                            : mgr_.apply(BinOp::Implies, v, vp);
      within = mgr_.bdd_and(step, within);
      differs = mgr_.bdd_or(mgr_.apply(BinOp::Xor, vp, v), differs);
    }
    BddRef r = mgr_.bdd_and(within, differs);
    order_cache_.emplace(std::move(key), r);
    return r;
  }

  FaultTree ft_;
  BddManager mgr_;
  std::vector<VarId> all_plain_;
  std::unordered_map<std::string, BddRef> element_cache_;
  std::map<std::pair<Direction, std::vector<VarId>>, BddRef> order_cache_;
  Stats stats_;
};

}  // namespace bfl
