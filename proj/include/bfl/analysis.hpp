#pragma once

// Model-checking queries on top of a compilation session: check a vector,
// enumerate all satisfying vectors, and revise a failing vector into a
// counterexample.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bfl/bdd.hpp"
#include "bfl/compiler.hpp"
#include "bfl/error.hpp"
#include "bfl/fault_tree.hpp"
#include "bfl/formula.hpp"

namespace bfl {

struct Verdict {
  bool holds = false;
  Layer layer = Layer::One;
  ScopeMode mode = ScopeMode::Support;
};

/// A revised vector that satisfies the formula, plus the basic events whose
/// value differs from the input vector.
struct Counterexample {
  StatusVector revised;
  std::vector<std::string> flipped;
};

/// One satisfying cube rendered with basic-event names. Scope variables are
/// the support of the formula's BDD; those not fixed by the cube are
/// don't-care.
struct ReportedSet {
  std::vector<std::string> failed;
  std::vector<std::string> operational;
  std::vector<std::string> dont_care;
  bool operator==(const ReportedSet&) const = default;
};

struct ResultSet {
  std::vector<Cube> cubes;
  std::vector<VarId> scope;

  bool empty() const { return cubes.empty(); }
  std::size_t size() const { return cubes.size(); }

  std::vector<ReportedSet> render(const FaultTree& ft) const {
    std::vector<ReportedSet> out;
    for (const auto& c : cubes) {
      ReportedSet r;
      for (VarId v : scope) {
        const auto& name = ft.basic_events().at(v.basic_event());
        auto value = c.value_of(v);
        if (!value) r.dont_care.push_back(name);
        else if (*value) r.failed.push_back(name);
        else r.operational.push_back(name);
      }
      out.push_back(std::move(r));
    }
    return out;
  }

  /// Multiplies out every cube into total status vectors over all basic
  /// events of `ft`. Throws if more than `limit` vectors would be produced.
  std::vector<StatusVector> expand(const FaultTree& ft, std::size_t limit = 4096) const {
    const std::size_t n = ft.basic_event_count();
    std::size_t total = 0;
    for (const auto& c : cubes) {
      std::size_t free = n - c.literals.size();
      if (free >= 63 || total + (std::size_t{1} << free) > limit)
        throw PreconditionError("expansion exceeds the limit of " + std::to_string(limit) +
                                " vectors");
      total += std::size_t{1} << free;
    }
    std::vector<StatusVector> out;
    out.reserve(total);
    for (const auto& c : cubes) {
      StatusVector base(n);
      std::vector<std::size_t> free;
      std::vector<bool> fixed(n, false);
      for (const auto& l : c.literals) {
        base.set(l.var.basic_event(), l.value);
        fixed[l.var.basic_event()] = true;
      }
      for (std::size_t i = 0; i < n; ++i)
        if (!fixed[i]) free.push_back(i);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << free.size()); ++m) {
        StatusVector v = base;
        for (std::size_t j = 0; j < free.size(); ++j) v.set(free[j], (m >> j) & 1u);
        out.push_back(std::move(v));
      }
    }
    return out;
  }
};

// ---------------------------------------------------------------------------

/// Walks `bdd` from the root along `b`: low edge on 0, high edge on 1.
/// Variables skipped by the diagram are irrelevant to the result.
inline bool walk(const BddManager& mgr, BddRef bdd, const StatusVector& b) {
  return mgr.evaluate(bdd, [&](VarId v) { return b[v.basic_event()]; });
}

/// Direct substitution of `b` into a first-layer formula without MCS/MPS.
/// Returns nullopt when the formula is outside that fragment.
inline std::optional<bool> substitute(const FaultTree& ft, const StatusVector& b,
                                      const Formula& f) {
  if (layer_of(f) != Layer::One || mentions_cut_operators(f)) return std::nullopt;
  auto rec = [&](auto& self, const Formula& g, const StatusVector& v) -> bool {
    switch (g.op) {
      case Op::Const: return g.value;
      case Op::Atom: return eval_structure(ft, v, g.name);
      case Op::Not: return !self(self, *g.args[0], v);
      case Op::And: return self(self, *g.args[0], v) && self(self, *g.args[1], v);
      case Op::Or: return self(self, *g.args[0], v) || self(self, *g.args[1], v);
      case Op::Implies: return !self(self, *g.args[0], v) || self(self, *g.args[1], v);
      case Op::Iff: return self(self, *g.args[0], v) == self(self, *g.args[1], v);
      case Op::Neq: return self(self, *g.args[0], v) != self(self, *g.args[1], v);
      case Op::Evidence: {
        StatusVector w = v;
        std::vector<bool> listed(ft.basic_event_count(), false);
        for (const auto& s : g.evidence) {
          auto i = *ft.basic_event_index(s.target);
          w.set(i, s.value);
          listed[i] = true;
        }
        if (g.others)
          for (std::size_t i = 0; i < listed.size(); ++i)
            if (!listed[i]) w.set(i, *g.others);
        return self(self, *g.args[0], w);
      }
      case Op::Vot: {
        std::size_t count = 0;
        for (const auto& a : g.args) count += self(self, *a, v) ? 1 : 0;
        switch (g.cmp) {
          case Cmp::Lt: return count < g.k;
          case Cmp::Le: return count <= g.k;
          case Cmp::Eq: return count == g.k;
          case Cmp::Ge: return count >= g.k;
          case Cmp::Gt: return count > g.k;
        }
        return false;
      }
      default:
        throw PreconditionError("unexpected operator in substitution");
    }
  };
  return rec(rec, f, b);
}

/// Checks whether `b` satisfies `chi`. First-layer formulas are compiled and
/// the BDD is walked along `b`; second-layer formulas ignore `b`.
inline Verdict evaluate(Session& s, const StatusVector& b, const Formula& chi,
                        ScopeMode mode = ScopeMode::Support) {
  check_vector(s.tree(), b);
  CoreFormula core = desugar(chi, s.tree());
  CompileResult r = s.compile(core, mode);
  Verdict v;
  v.layer = layer_of(chi);
  v.mode = mode;
  if (auto* t = std::get_if<TreeVerdict>(&r)) {
    v.holds = t->value;
  } else {
    v.holds = walk(s.manager(), std::get<VectorPredicate>(r).bdd, b);
  }
  return v;
}

/// All satisfying vectors of a first-layer formula as disjoint cubes, in
/// path order (low before high).
inline ResultSet enumerate_satisfying(Session& s, const Formula& chi,
                                      ScopeMode mode = ScopeMode::Support) {
  if (layer_of(chi) != Layer::One)
    throw PreconditionError("enumeration needs a first-layer formula; use evaluate for " +
                            to_string(chi));
  BddRef bdd = s.compile_predicate(desugar(chi, s.tree()), mode);
  ResultSet rs;
  rs.cubes = s.manager().all_sat_cubes(bdd);
  rs.scope = s.manager().support(bdd);
  return rs;
}

/// Greedy descent along `b`: whenever the edge chosen by `b` leads straight
/// to the 0-terminal, the other edge is taken and the bit is flipped. Bits not
/// decided on the path keep their value from `b`.
///
/// Returns nullopt if `chi` is unsatisfiable. Throws if `b` already
/// satisfies `chi` or if `chi` is a second-layer formula.
inline std::optional<Counterexample> counterexample(Session& s, const StatusVector& b,
                                                    const Formula& chi,
                                                    ScopeMode mode = ScopeMode::Support) {
  check_vector(s.tree(), b);
  if (layer_of(chi) != Layer::One)
    throw PreconditionError("counterexamples need a first-layer formula");
  const BddManager& mgr = s.manager();
  BddRef bdd = s.compile_predicate(desugar(chi, s.tree()), mode);
  if (walk(mgr, bdd, b)) throw PreconditionError("the vector already satisfies the formula");
  if (bdd == mgr.zero()) return std::nullopt;

  StatusVector revised = b;
  BddRef w = bdd;
  while (!mgr.is_terminal(w)) {
    std::size_t i = mgr.label(w).basic_event();
    bool bit = b[i];
    BddRef next = bit ? mgr.high(w) : mgr.low(w);
    if (next == mgr.zero()) {
      bit = !bit;
      next = bit ? mgr.high(w) : mgr.low(w);
    }
    revised.set(i, bit);
    w = next;
  }

  Counterexample cex{revised, {}};
  for (std::size_t i = 0; i < b.size(); ++i)
    if (revised[i] != b[i]) cex.flipped.push_back(s.tree().basic_events()[i]);
  return cex;
}

}  // namespace bfl
