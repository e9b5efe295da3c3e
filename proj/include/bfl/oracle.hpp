#pragma once

// Exhaustive reference semantics. Every subformula is evaluated on all 2^n
// status vectors straight from the satisfaction clauses, with no BDDs
// involved. Exponential; intended for cross-checking on small trees.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "bfl/error.hpp"
#include "bfl/fault_tree.hpp"
#include "bfl/formula.hpp"
#include "bfl/scope_mode.hpp"

namespace bfl {

inline constexpr std::size_t kOracleMaxBasicEvents = 16;

/// Satisfaction table indexed by status-vector mask (bit i = basic event i).
using TruthTable = std::vector<bool>;

class Oracle {
 public:
  Oracle(const FaultTree& ft, ScopeMode mode) : ft_(ft), mode_(mode), n_(ft.basic_event_count()) {
    if (n_ > kOracleMaxBasicEvents)
      throw PreconditionError("oracle is limited to " + std::to_string(kOracleMaxBasicEvents) +
                              " basic events");
    size_ = std::size_t{1} << n_;
  }

  std::size_t vector_count() const { return size_; }

  /// Table of the structure function of element `e`.
  const TruthTable& element(const std::string& e) {
    if (auto it = elements_.find(e); it != elements_.end()) return it->second;
    if (!ft_.contains(e)) throw UnknownElement(e);
    TruthTable t(size_);
    for (std::uint64_t m = 0; m < size_; ++m)
      t[m] = eval_structure(ft_, StatusVector::from_mask(n_, m), e);
    return elements_.emplace(e, std::move(t)).first->second;
  }

  /// Satisfaction set of a first-layer formula (sugared or desugared).
  TruthTable table(const Formula& f) {
    Memo memo;
    return table(f, memo);
  }

  /// Truth of a second-layer formula.
  bool verdict(const Formula& f) {
    switch (f.op) {
      case Op::Exists: {
        auto a = table(*f.args[0]);
        for (bool x : a)
          if (x) return true;
        return false;
      }
      case Op::Forall: {
        auto a = table(*f.args[0]);
        for (bool x : a)
          if (!x) return false;
        return true;
      }
      case Op::Idp:
        return (ibe_mask(table(*f.args[0])) & ibe_mask(table(*f.args[1]))) == 0;
      case Op::Sup:
        return (ibe_mask(element(f.name)) & ibe_mask(element(ft_.top()))) == 0;
      default:
        throw PreconditionError("first-layer formula has no tree verdict");
    }
  }

  /// Influencing basic events from the definition: e influences phi iff some
  /// vector satisfies phi[e:=0] but not phi[e:=1], or vice versa.
  std::uint64_t ibe_mask(const TruthTable& t) const {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint64_t bit = std::uint64_t{1} << i;
      for (std::uint64_t m = 0; m < size_; ++m) {
        if (t[m & ~bit] != t[m | bit]) {
          out |= bit;
          break;
        }
      }
    }
    return out;
  }

  std::vector<std::string> influencing_basic_events(const Formula& f) {
    auto mask = ibe_mask(table(f));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n_; ++i)
      if (mask >> i & 1u) out.push_back(ft_.basic_events()[i]);
    return out;
  }

 private:
  using Memo = std::unordered_map<const Formula*, TruthTable>;

  TruthTable table(const Formula& f, Memo& memo) {
    if (auto it = memo.find(&f); it != memo.end()) return it->second;
    TruthTable t(size_);
    switch (f.op) {
      case Op::Const:
        t.assign(size_, f.value);
        break;
      case Op::Atom:
        t = element(f.name);
        break;
      case Op::Not: {
        auto a = table(*f.args[0], memo);
        for (std::size_t m = 0; m < size_; ++m) t[m] = !a[m];
        break;
      }
      case Op::And:
      case Op::Or:
      case Op::Implies:
      case Op::Iff:
      case Op::Neq: {
        auto a = table(*f.args[0], memo);
        auto b = table(*f.args[1], memo);
        for (std::size_t m = 0; m < size_; ++m) {
          bool x = a[m], y = b[m];
          switch (f.op) {
            case Op::And: t[m] = x && y; break;
            case Op::Or: t[m] = x || y; break;
            case Op::Implies: t[m] = !x || y; break;
            case Op::Iff: t[m] = x == y; break;
            default: t[m] = x != y; break;
          }
        }
        break;
      }
      case Op::Evidence: {
        // b |= phi[e := c] iff b' |= phi with b' = b except b'_e = c.
        std::uint64_t set_mask = 0, clear_mask = 0;
        auto pin = [&](const std::string& be, bool value) {
          std::uint64_t bit = std::uint64_t{1} << *ft_.basic_event_index(be);
          (value ? set_mask : clear_mask) |= bit;
        };
        std::map<std::string, bool> listed;
        for (const auto& s : f.evidence) {
          pin(s.target, s.value);
          listed[s.target] = true;
        }
        if (f.others)
          for (const auto& be : ft_.basic_events())
            if (!listed.count(be)) pin(be, *f.others);
        auto a = table(*f.args[0], memo);
        for (std::uint64_t m = 0; m < size_; ++m) t[m] = a[(m | set_mask) & ~clear_mask];
        break;
      }
      case Op::Mcs: {
        // b |= MCS(phi) iff b |= phi and no b' strictly below b (over the
        // scope) satisfies phi.
        auto a = table(*f.args[0], memo);
        std::uint64_t scope = scope_mask(a);
        for (std::uint64_t m = 0; m < size_; ++m) {
          if (!a[m]) continue;
          bool minimal = true;
          std::uint64_t removable = m & scope;
          for (std::uint64_t d = removable; d != 0; d = (d - 1) & removable) {
            if (a[m & ~d]) {
              minimal = false;
              break;
            }
          }
          t[m] = minimal;
        }
        break;
      }
      case Op::Mps: {
        // b |= MPS(phi) iff b does not satisfy phi and every b' strictly
        // above b (over the scope) does.
        auto a = table(*f.args[0], memo);
        std::uint64_t scope = scope_mask(a);
        for (std::uint64_t m = 0; m < size_; ++m) {
          if (a[m]) continue;
          bool maximal = true;
          std::uint64_t addable = ~m & scope;
          for (std::uint64_t d = addable; d != 0; d = (d - 1) & addable) {
            if (!a[m | d]) {
              maximal = false;
              break;
            }
          }
          t[m] = maximal;
        }
        break;
      }
      case Op::Vot: {
        std::vector<TruthTable> ops;
        for (const auto& a : f.args) ops.push_back(table(*a, memo));
        for (std::size_t m = 0; m < size_; ++m) {
          std::size_t count = 0;
          for (const auto& o : ops) count += o[m] ? 1 : 0;
          switch (f.cmp) {
            case Cmp::Lt: t[m] = count < f.k; break;
            case Cmp::Le: t[m] = count <= f.k; break;
            case Cmp::Eq: t[m] = count == f.k; break;
            case Cmp::Ge: t[m] = count >= f.k; break;
            case Cmp::Gt: t[m] = count > f.k; break;
          }
        }
        break;
      }
      default:
        throw PreconditionError("second-layer formula has no satisfaction set");
    }
    memo.emplace(&f, t);
    return t;
  }

  std::uint64_t scope_mask(const TruthTable& operand) const {
    if (mode_ == ScopeMode::Global) return (n_ == 64 ? ~0ull : (std::uint64_t{1} << n_) - 1);
    return ibe_mask(operand);
  }

  const FaultTree& ft_;
  ScopeMode mode_;
  std::size_t n_;
  std::size_t size_;
  std::unordered_map<std::string, TruthTable> elements_;
};

/// Reference truth of `chi` under `b`. Second-layer formulas ignore `b`.
inline bool oracle_evaluate(const FaultTree& ft, const StatusVector& b, const Formula& chi,
                            ScopeMode mode = ScopeMode::Support) {
  check_vector(ft, b);
  Oracle o(ft, mode);
  if (layer_of(chi) == Layer::Two) return o.verdict(chi);
  return o.table(chi)[b.to_mask()];
}

}  // namespace bfl
