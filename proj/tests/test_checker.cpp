#include <gtest/gtest.h>

#include "support.hpp"

using namespace permitmc;
using permitmc::testing::NameOracle;
using permitmc::testing::names_of;
using V = std::vector<std::string>;

namespace {
const TransitionSystem& fig1() {
  static const auto m = TransitionSystem::build(load_fixture("fig1-wa").variant("main").model);
  return m;
}
}  // namespace

TEST(Checker, FigureOneGoldenValues) {
  EXPECT_EQ(names_of(fig1(), "p"), (V{"u"}));
  EXPECT_EQ(names_of(fig1(), "WA[a] p"), (V{"s", "u"}));
  EXPECT_EQ(names_of(fig1(), "WE[a] p"), (V{"u"}));
  EXPECT_EQ(names_of(fig1(), "false"), V{});
  EXPECT_EQ(names_of(fig1(), "true"), (V{"s", "t", "u"}));
}

TEST(Checker, EnsuresAndAdmitsAtFigureOne) {
  const auto p = fig1().proposition("p");
  // At s, agent a's action 1 can reach u (with b=2) but also t.
  EXPECT_TRUE(admits(fig1(), "s", "a", "1", p));
  EXPECT_FALSE(ensures(fig1(), "s", "a", "1", p));
  EXPECT_FALSE(admits(fig1(), "s", "a", "2", p));
  EXPECT_TRUE(ensures(fig1(), "s", "a", "2", p.complement()));
}

TEST(Checker, ModalitiesDisagreeOnHandBuiltState) {
  // One agent with three actions at s: "x" permitted, "y" and "z" forbidden.
  // x -> {g}, y -> {g, h}, z -> {h}; g satisfies p.
  SystemDescription d;
  d.agents = {"a"};
  d.states = {"s", "g", "h"};
  d.actions["s"]["a"] = {"x", "y", "z"};
  d.permitted["s"]["a"] = {"x"};
  for (const std::string s : {"g", "h"}) {
    d.actions[s]["a"] = {"i"};
    d.permitted[s]["a"] = {"i"};
    d.transitions.push_back({s, {{"a", "i"}}, s});
  }
  d.transitions.push_back({"s", {{"a", "x"}}, "g"});
  d.transitions.push_back({"s", {{"a", "y"}}, "g"});
  d.transitions.push_back({"s", {{"a", "y"}}, "h"});
  d.transitions.push_back({"s", {{"a", "z"}}, "h"});
  d.valuation["p"] = {"g"};
  auto m = TransitionSystem::build(d);
  auto at_s = [&](const std::string& f) { return model_check(m, parse_formula(f)).contains(0); };
  EXPECT_TRUE(at_s("WA[a] p"));   // x admits p
  EXPECT_TRUE(at_s("WE[a] p"));   // x ensures p
  EXPECT_TRUE(at_s("SE[a] p"));   // only x ensures p, and it is permitted
  EXPECT_FALSE(at_s("SA[a] p"));  // y admits p but is forbidden
  EXPECT_FALSE(at_s("WE[a] !p"));
  EXPECT_TRUE(at_s("SA[a] false"));
  EXPECT_FALSE(at_s("SE[a] true"));  // y and z ensure true but are forbidden
}

TEST(Checker, UnknownAgentIsAnInputError) {
  EXPECT_THROW((void)model_check(fig1(), parse_formula("WA[zz] p")), InputError);
}

TEST(Checker, MemoizationSharesSubformulas) {
  ModelChecker mc(fig1());
  auto f = parse_formula("WA[a] p | !WA[a] p");
  EXPECT_EQ(mc.truth_set(f), fig1().all_states());
  // p, WA[a] p, its negation, the disjunction.
  EXPECT_EQ(mc.cache_size(), 4U);
}

TEST(Checker, AgreesWithIndependentOracleOnRandomModels) {
  Rng rng(2024);
  for (int k = 0; k < 150; ++k) {
    GenParams g;
    g.seed = rng.next();
    g.num_states = 1 + rng.below(6);
    g.num_agents = 1 + rng.below(3);
    g.max_actions = 1 + rng.below(3);
    g.branching = 1 + rng.below(3);
    auto d = random_description(g);
    auto m = TransitionSystem::build(d);
    NameOracle oracle(d);
    FormulaGenParams fp;
    fp.depth = 4;
    fp.agents = d.agents;
    for (int j = 0; j < 10; ++j) {
      auto f = random_formula(rng, fp);
      ASSERT_EQ(names_of(m, f), oracle.truth_set(f)) << "seed " << g.seed << " " << print_formula(f);
    }
  }
}

TEST(Checker, NaiveOracleAgreesWithCollector) {
  Rng rng(99);
  for (int k = 0; k < 100; ++k) {
    GenParams g;
    g.seed = rng.next();
    g.num_states = 5;
    g.num_agents = 2;
    auto m = random_model(g);
    FormulaGenParams fp;
    fp.depth = 3;
    auto f = random_formula(rng, fp);
    auto set = model_check(m, f);
    for (std::size_t s = 0; s < m.num_states(); ++s) EXPECT_EQ(set.contains(s), check_state_naive(m, s, f));
  }
}

TEST(Checker, SingleAgentDeterministicCollapse) {
  // With one agent and deterministic transitions, admitting and ensuring coincide.
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    GenParams g;
    g.seed = seed;
    g.num_agents = 1;
    g.deterministic = true;
    g.max_actions = 3;
    auto m = random_model(g);
    FormulaGenParams fp;
    fp.agents = {"a"};
    auto phi = random_formula(seed, fp);
    EXPECT_EQ(model_check(m, dsl::WA("a", phi)), model_check(m, dsl::WE("a", phi)));
    EXPECT_EQ(model_check(m, dsl::SA("a", phi)), model_check(m, dsl::SE("a", phi)));
  }
}
