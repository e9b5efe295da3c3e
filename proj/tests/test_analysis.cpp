#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace bfl;
using namespace bfl::test;

namespace {

struct TableRow {
  const char* chi;
  StatusVector given;
  StatusVector printed;
};

std::vector<TableRow> table_one() {
  return {
      {"MCS(e1)", bits({0, 1, 0}), bits({1, 1, 0})},
      {"MCS(e1)", bits({1, 1, 1}), bits({1, 0, 1})},
      {"MPS(e1)", bits({1, 0, 1}), bits({1, 0, 0})},
      {"MPS(e1)", bits({0, 0, 0}), bits({0, 1, 1})},
      {"MCS(e1) & MCS(e3)", bits({0, 1, 0}), bits({1, 1, 0})},
      {"MPS(e1) & MPS(e3)", bits({1, 0, 1}), bits({1, 0, 0})},
  };
}

}  // namespace

TEST(Evaluate, PathogenExamples) {
  FaultTree ft = load("pathogen.ft");
  Session s(ft);
  auto chi = formula("MCS(CP_R)", ft);
  EXPECT_FALSE(evaluate(s, bits({0, 1, 1, 0}), *chi).holds);
  EXPECT_TRUE(evaluate(s, bits({0, 0, 1, 1}), *chi).holds);
  EXPECT_TRUE(evaluate(s, bits({1, 1, 0, 0}), *chi).holds);
  EXPECT_THROW(evaluate(s, bits({1, 1, 0}), *chi), PreconditionError);
}

TEST(Evaluate, OneGateTree) {
  FaultTree ft = load("or2.ft");
  Session s(ft);
  EXPECT_TRUE(evaluate(s, bits({0, 1}), *formula("MCS(e_top)", ft)).holds);
  EXPECT_FALSE(evaluate(s, bits({1, 1}), *formula("MCS(e_top)", ft)).holds);
}

TEST(Evaluate, TautologyAndLayerTwo) {
  FaultTree ft = load("pathogen.ft");
  Session s(ft);
  for (std::uint64_t m = 0; m < 16; ++m) {
    auto b = StatusVector::from_mask(4, m);
    EXPECT_TRUE(evaluate(s, b, *formula("IW | !IW", ft)).holds);
    Verdict v = evaluate(s, b, *formula("forall (CP => CP_R)", ft));
    EXPECT_TRUE(v.holds);
    EXPECT_EQ(v.layer, Layer::Two);
  }
}

TEST(Evaluate, FastPathAgrees) {
  std::mt19937 rng(51);
  int compared = 0;
  for (int trial = 0; trial < 200; ++trial) {
    FaultTree ft = random_tree(rng);
    Session s(ft);
    auto chi = random_formula(rng, ft, 4, false);
    const std::size_t n = ft.basic_event_count();
    for (std::uint64_t m = 0; m < (1u << n); ++m) {
      auto b = StatusVector::from_mask(n, m);
      auto direct = substitute(ft, b, *chi);
      ASSERT_TRUE(direct.has_value());
      ASSERT_EQ(*direct, evaluate(s, b, *chi).holds) << to_string(*chi);
      ++compared;
    }
  }
  EXPECT_GT(compared, 0);
  FaultTree ft = load("pathogen.ft");
  EXPECT_FALSE(substitute(ft, bits({0, 0, 0, 0}), *formula("MCS(CP)", ft)).has_value());
}

TEST(Enumerate, OneGateTree) {
  FaultTree ft = load("or2.ft");
  Session s(ft);
  auto rs = enumerate_satisfying(s, *formula("MCS(e_top)", ft));
  auto vectors = rs.expand(ft);
  EXPECT_EQ(vectors, (std::vector<StatusVector>{bits({0, 1}), bits({1, 0})}));
}

TEST(Enumerate, CovidMcsOfMotWithIs) {
  Session s(load("covid.ft"));
  EXPECT_EQ(allsat_failed(s, "MCS(MoT) & IS"), (Family{{"IS", "H1", "H5"}}));
}

TEST(Enumerate, ContradictionAndLayerTwo) {
  FaultTree ft = load("pathogen.ft");
  Session s(ft);
  EXPECT_TRUE(enumerate_satisfying(s, *formula("IW & !IW", ft)).empty());
  EXPECT_THROW(enumerate_satisfying(s, *formula("exists IW", ft)), PreconditionError);
}

TEST(Enumerate, RenderListsDontCares) {
  FaultTree ft = load("pathogen.ft");
  Session s(ft);
  auto sets = enumerate_satisfying(s, *formula("CP", ft)).render(ft);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].failed, (std::vector<std::string>{"IW", "H3"}));
  EXPECT_TRUE(sets[0].operational.empty());
  // IT and H2 are outside the scope of CP: they do not show up at all
  EXPECT_TRUE(sets[0].dont_care.empty());
  auto or_sets = enumerate_satisfying(s, *formula("IW | IT", ft)).render(ft);
  ASSERT_EQ(or_sets.size(), 2u);
  EXPECT_EQ(or_sets[0].operational, (std::vector<std::string>{"IW"}));
  EXPECT_EQ(or_sets[1].dont_care, (std::vector<std::string>{"IT"}));
}

TEST(Enumerate, ExpandLimit) {
  FaultTree ft = load("covid.ft");
  Session s(ft);
  auto rs = enumerate_satisfying(s, *formula("IW | !IW", ft));
  EXPECT_THROW(rs.expand(ft, 4096), PreconditionError);
  EXPECT_EQ(rs.expand(ft, 8192).size(), 8192u);
}

TEST(Enumerate, ConsistentWithEvaluate) {
  std::mt19937 rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    FaultTree ft = random_tree(rng);
    Session s(ft);
    auto chi = random_formula(rng, ft, 4);
    ScopeMode mode = trial % 2 ? ScopeMode::Global : ScopeMode::Support;
    auto vectors = enumerate_satisfying(s, *chi, mode).expand(ft, 1u << 9);
    std::set<StatusVector> listed(vectors.begin(), vectors.end());
    ASSERT_EQ(listed.size(), vectors.size()) << "cubes overlap";
    const std::size_t n = ft.basic_event_count();
    for (std::uint64_t m = 0; m < (1u << n); ++m) {
      auto b = StatusVector::from_mask(n, m);
      ASSERT_EQ(listed.count(b) == 1, evaluate(s, b, *chi, mode).holds) << to_string(*chi);
    }
  }
}

TEST(Counterexample, TableOne) {
  FaultTree ft = load("patterns.ft");
  Session s(ft);
  for (const auto& row : table_one()) {
    auto chi = formula(row.chi, ft);
    ASSERT_FALSE(evaluate(s, row.given, *chi).holds) << row.chi;
    auto cex = counterexample(s, row.given, *chi);
    ASSERT_TRUE(cex.has_value());
    EXPECT_TRUE(valid_revision(s, row.given, cex->revised, *chi)) << row.chi;
    EXPECT_TRUE(valid_revision(s, row.given, row.printed, *chi)) << row.chi;
  }
}

TEST(Counterexample, TableOneGreedyOutput) {
  FaultTree ft = load("patterns.ft");
  Session s(ft);
  auto run = [&](const char* chi, StatusVector b) {
    return counterexample(s, b, *formula(chi, ft))->revised;
  };
  EXPECT_EQ(run("MCS(e1)", bits({0, 1, 0})), bits({1, 1, 0}));
  EXPECT_EQ(run("MCS(e1)", bits({1, 1, 1})), bits({1, 1, 0}));  // the printed (1,0,1) is another valid choice
  EXPECT_EQ(run("MPS(e1)", bits({1, 0, 1})), bits({1, 0, 0}));
  EXPECT_EQ(run("MPS(e1)", bits({0, 0, 0})), bits({0, 1, 1}));
  EXPECT_EQ(run("MCS(e1) & MCS(e3)", bits({0, 1, 0})), bits({1, 1, 0}));
  EXPECT_EQ(run("MPS(e1) & MPS(e3)", bits({1, 0, 1})), bits({1, 0, 0}));
  auto cex = counterexample(s, bits({0, 1, 0}), *formula("MCS(e1)", ft));
  EXPECT_EQ(cex->flipped, (std::vector<std::string>{"e2"}));
}

TEST(Counterexample, Preconditions) {
  FaultTree ft = load("patterns.ft");
  Session s(ft);
  EXPECT_EQ(counterexample(s, bits({0, 0, 0}), *formula("e2 & !e2", ft)), std::nullopt);
  EXPECT_THROW(counterexample(s, bits({1, 1, 0}), *formula("MCS(e1)", ft)), PreconditionError);
  EXPECT_THROW(counterexample(s, bits({0, 0, 0}), *formula("exists e1", ft)), PreconditionError);
}

TEST(Counterexample, PropertySix) {
  FaultTree ft = load("covid.ft");
  Session s(ft);
  auto evidence = formula("MPS(IWoS)[H1:=0, H2:=0, H3:=0, H4:=0, H5:=0, others:=1]", ft);
  EXPECT_FALSE(evaluate(s, StatusVector(13), *evidence).holds);
  auto quantified = formula("exists MPS(IWoS)[H1:=0, H2:=0, H3:=0, H4:=0, H5:=0, others:=1]", ft);
  EXPECT_FALSE(evaluate(s, StatusVector(13), *quantified).holds);

  // the vector of the evidence: human errors operational, everything else failed
  std::vector<std::pair<std::string, bool>> values;
  for (const auto& be : ft.basic_events()) values.emplace_back(be, !(be.size() == 2 && be[0] == 'H'));
  auto b = StatusVector::from_names(ft, values);
  auto mps = formula("MPS(IWoS)", ft);
  ASSERT_FALSE(evaluate(s, b, *mps).holds);
  auto cex = counterexample(s, b, *mps);
  ASSERT_TRUE(cex.has_value());
  EXPECT_TRUE(valid_revision(s, b, cex->revised, *mps));

  // {H1} and {H2, H3}: vectors failing everything except the named events
  auto all_but = [&](std::set<std::string> op) {
    std::vector<std::pair<std::string, bool>> v;
    for (const auto& be : ft.basic_events()) v.emplace_back(be, !op.count(be));
    return StatusVector::from_names(ft, v);
  };
  auto sets = operational_sets(enumerate_satisfying(s, *mps).render(ft));
  for (const std::set<std::string>& op : {std::set<std::string>{"H1"}, std::set<std::string>{"H2", "H3"}}) {
    EXPECT_TRUE(sets.count(op));
    auto v = all_but(op);
    EXPECT_TRUE(evaluate(s, v, *mps).holds);
    EXPECT_TRUE(valid_revision(s, b, v, *mps));
  }
}

TEST(Counterexample, ContractOnRandomInstances) {
  std::mt19937 rng(53);
  int produced = 0;
  for (int trial = 0; trial < 300; ++trial) {
    FaultTree ft = random_tree(rng);
    Session s(ft);
    auto chi = random_formula(rng, ft, 4);
    ScopeMode mode = trial % 2 ? ScopeMode::Global : ScopeMode::Support;
    const std::size_t n = ft.basic_event_count();
    bool satisfiable = !enumerate_satisfying(s, *chi, mode).empty();
    auto b = StatusVector::from_mask(n, rng() & ((1u << n) - 1));
    if (evaluate(s, b, *chi, mode).holds) continue;
    auto cex = counterexample(s, b, *chi, mode);
    ASSERT_EQ(cex.has_value(), satisfiable) << to_string(*chi);
    if (!cex) continue;
    ++produced;
    ASSERT_TRUE(valid_revision(s, b, cex->revised, *chi, mode)) << to_string(*chi);
    for (const auto& name : cex->flipped) {
      auto i = *ft.basic_event_index(name);
      ASSERT_NE(cex->revised[i], b[i]);
    }
  }
  EXPECT_GT(produced, 50);
}

TEST(Oracle, SmallExamples) {
  FaultTree ft = load("pathogen.ft");
  EXPECT_FALSE(oracle_evaluate(ft, StatusVector(4), *formula("CP_R", ft)));
  EXPECT_TRUE(oracle_evaluate(ft, StatusVector(4), *formula("forall (CP => CP_R)", ft)));
  EXPECT_THROW(Oracle(parse_fault_tree("toplevel T; T = or(a0,a1,a2,a3,a4,a5,a6,a7,a8,a9,b0,b1,b2,b3,b4,b5,b6);"),
                      ScopeMode::Support),
               PreconditionError);
}

TEST(Oracle, AgreesOnPathogenProperties) {
  FaultTree ft = load("pathogen.ft");
  Session s(ft);
  const char* props[] = {"MCS(CP_R)", "MPS(CP_R)", "CP & !CR", "MCS(CP) & MCS(CP_R)", "CP_R[IW:=1]",
                         "VOT(>=2; IW, H3, IT)", "exists (CP & CR)", "forall (CP => CP_R)",
                         "IDP(CP, CR)", "SUP(IW)"};
  for (ScopeMode mode : {ScopeMode::Support, ScopeMode::Global})
    for (const char* p : props) {
      auto chi = formula(p, ft);
      for (std::uint64_t m = 0; m < 16; ++m) {
        auto b = StatusVector::from_mask(4, m);
        EXPECT_EQ(evaluate(s, b, *chi, mode).holds, oracle_evaluate(ft, b, *chi, mode)) << p;
      }
    }
}

TEST(Oracle, EquivalenceOnRandomInstances) {
  std::mt19937 rng(54);
  for (int trial = 0; trial < 300; ++trial) {
    FaultTree ft = random_tree(rng);
    Session s(ft);
    ScopeMode mode = trial % 2 ? ScopeMode::Global : ScopeMode::Support;
    auto chi = trial % 4 == 0 ? random_layer_two(rng, ft, 4) : random_formula(rng, ft, 5);
    Oracle o(ft, mode);
    const std::size_t n = ft.basic_event_count();
    if (layer_of(*chi) == Layer::Two) {
      ASSERT_EQ(evaluate(s, StatusVector(n), *chi, mode).holds, o.verdict(*chi)) << to_string(*chi);
      continue;
    }
    auto t = o.table(*chi);
    for (std::uint64_t m = 0; m < (1u << n); ++m)
      ASSERT_EQ(evaluate(s, StatusVector::from_mask(n, m), *chi, mode).holds, t[m]) << to_string(*chi);
  }
}

TEST(Oracle, ReusedAcrossShortLivedFormulas) {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    FaultTree ft = random_tree(rng);
    Oracle shared(ft, ScopeMode::Support);
    for (int i = 0; i < 5; ++i) {
      auto chi = random_formula(rng, ft, 3);
      Oracle fresh(ft, ScopeMode::Support);
      ASSERT_EQ(shared.table(*chi), fresh.table(*chi)) << to_string(*chi);
    }
  }
}
