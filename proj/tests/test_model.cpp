#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

using namespace permitmc;

namespace {

SystemDescription two_state() {
  SystemDescription d;
  d.agents = {"a", "b"};
  d.states = {"s", "t"};
  for (const std::string s : {"s", "t"}) {
    d.actions[s]["a"] = {"1", "2"};
    d.actions[s]["b"] = {"1"};
    d.permitted[s]["a"] = {"1"};
    d.permitted[s]["b"] = {"1"};
    d.transitions.push_back({s, {{"a", "1"}, {"b", "1"}}, "s"});
    d.transitions.push_back({s, {{"a", "2"}, {"b", "1"}}, "t"});
  }
  d.valuation["p"] = {"t"};
  return d;
}

bool has_kind(const ValidationReport& r, ViolationKind k) {
  return std::any_of(r.begin(), r.end(), [&](const Violation& v) { return v.kind == k; });
}

}  // namespace

TEST(Validate, WellFormedModelHasNoViolations) {
  EXPECT_TRUE(validate_model(two_state()).empty());
  EXPECT_NO_THROW((void)TransitionSystem::build(two_state()));
}

TEST(Validate, ContinuityGapIsReported) {
  auto d = two_state();
  d.transitions.pop_back();  // t has no successor for (2,1)
  auto r = validate_model(d);
  ASSERT_TRUE(has_kind(r, ViolationKind::ContinuityGap));
  EXPECT_EQ(r.front().state, "t");
  EXPECT_THROW((void)TransitionSystem::build(d), ModelError);
}

TEST(Validate, EmptyPermittedSet) {
  auto d = two_state();
  d.permitted["s"]["a"].clear();
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::EmptyPermitted));
}

TEST(Validate, PermittedMustBeAvailable) {
  auto d = two_state();
  d.permitted["s"]["a"] = {"1", "9"};
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::PermittedNotAvailable));
}

TEST(Validate, EmptyActionSet) {
  auto d = two_state();
  d.actions["s"]["b"].clear();
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::EmptyActions));
}

TEST(Validate, DanglingTransition) {
  auto d = two_state();
  d.transitions.push_back({"s", {{"a", "1"}, {"b", "1"}}, "nowhere"});
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::DanglingTransition));
}

TEST(Validate, MalformedProfile) {
  auto d = two_state();
  d.transitions.push_back({"s", {{"a", "7"}, {"b", "1"}}, "t"});
  d.transitions.push_back({"s", {{"a", "1"}}, "t"});
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::MalformedProfile));
}

TEST(Validate, DuplicatesAndUnknowns) {
  auto d = two_state();
  d.agents.push_back("a");
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::DuplicateAgent));
  d = two_state();
  d.states.push_back("s");
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::DuplicateState));
  d = two_state();
  d.actions["zzz"]["a"] = {"1"};
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::UnknownState));
  d = two_state();
  d.actions["s"]["c"] = {"1"};
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::UnknownAgent));
  d = two_state();
  d.actions["s"]["a"] = {"1", "1", "2"};
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::DuplicateAction));
}

TEST(Validate, ValuationChecks) {
  auto d = two_state();
  d.valuation["q"] = {"nowhere"};
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::ValuationOutsideStates));
  d = two_state();
  d.valuation[std::string(kTopProposition)] = {"s"};
  EXPECT_TRUE(has_kind(validate_model(d), ViolationKind::ReservedProposition));
}

TEST(Validate, ProfileCap) {
  SystemDescription d;
  d.agents = {"a", "b", "c"};
  d.states = {"s"};
  std::vector<std::string> acts;
  for (int i = 0; i < 20; ++i) acts.push_back(std::to_string(i));
  for (const auto& a : d.agents) {
    d.actions["s"][a] = acts;
    d.permitted["s"][a] = acts;
  }
  // 8000 profiles and no transitions: the cap is hit before continuity runs.
  EXPECT_THROW((void)validate_model(d, 1000), CapacityError);
}

TEST(Validate, EmptyStateSetIsValid) {
  SystemDescription d;
  d.agents = {"a"};
  EXPECT_TRUE(validate_model(d).empty());
  auto m = TransitionSystem::build(d);
  EXPECT_EQ(m.num_states(), 0U);
  EXPECT_TRUE(model_check(m, parse_formula("WA[a] p")).empty());
}

TEST(Model, IndexingAndQueries) {
  auto m = TransitionSystem::build(two_state());
  EXPECT_EQ(m.num_states(), 2U);
  EXPECT_EQ(m.state_index("t"), 1U);
  EXPECT_EQ(m.agent_index("b"), 1U);
  EXPECT_EQ(m.num_actions(0, 0), 2U);
  EXPECT_TRUE(m.is_permitted(0, 0, m.action_index(0, 0, "1")));
  EXPECT_FALSE(m.is_permitted(0, 0, m.action_index(0, 0, "2")));
  EXPECT_EQ(m.sorted_names(m.successors("s", {{"a", "2"}, {"b", "1"}})), std::vector<std::string>{"t"});
  EXPECT_TRUE(m.proposition("unknown").empty());
  EXPECT_TRUE(m.deterministic());
  EXPECT_THROW((void)m.state_index("x"), InputError);
  EXPECT_THROW((void)m.agent_index("x"), InputError);
}

TEST(Model, SizesCountTriplesAndTransitions) {
  auto m = TransitionSystem::build(two_state());
  // |Δ| sums |Δ_a^s| over states and agents: 2 * (2 + 1).
  EXPECT_EQ(m.action_space_size(), 6U);
  EXPECT_EQ(m.mechanism_size(), 4U);
}

TEST(Model, ActionNamesAreScopedPerStateAndAgent) {
  auto d = two_state();
  d.actions["t"]["a"] = {"2", "1"};  // same tokens, different order
  auto m = TransitionSystem::build(d);
  EXPECT_EQ(m.action_name(1, 0, 0), "2");
  EXPECT_EQ(m.action_index(1, 0, "1"), 1U);
}

TEST(Model, DescribeRoundTrips) {
  auto m = TransitionSystem::build(two_state());
  auto again = TransitionSystem::build(m.describe());
  EXPECT_EQ(again.describe().transitions.size(), m.describe().transitions.size());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    auto x = m.mechanism(s);
    auto y = again.mechanism(s);
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
  }
}

TEST(Model, NondeterminismDetected) {
  auto d = two_state();
  d.transitions.push_back({"s", {{"a", "1"}, {"b", "1"}}, "t"});
  auto m = TransitionSystem::build(d);
  EXPECT_FALSE(m.deterministic());
  EXPECT_EQ(m.successors("s", {{"a", "1"}, {"b", "1"}}).count(), 2U);
}
