#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permitmc/errors.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

struct Expectation {
  std::string formula;
  std::vector<std::string> truth_set;  // sorted state names
};

struct WitnessSpec {
  Modality target;
  std::string proposition = "p";
  std::optional<std::vector<Modality>> closure;  // default: the other three
};

struct FixtureVariant {
  std::string name;
  SystemDescription model;
  std::vector<Expectation> expectations;
  std::optional<WitnessSpec> witness;
};

struct Fixture {
  std::string id;
  std::string summary;
  std::vector<FixtureVariant> variants;

  [[nodiscard]] const FixtureVariant& variant(std::string_view name) const {
    for (const auto& v : variants)
      if (v.name == name) return v;
    throw InputError("fixture " + id + " has no variant " + std::string(name));
  }
};

namespace fixtures_detail {

using Acts = std::vector<std::string>;

// Per-state builder that keeps the fixture definitions close to how the
// diagrams read: actions per agent, the permitted ones, then arrows.
class Builder {
public:
  explicit Builder(std::vector<std::string> agents) { d_.agents = std::move(agents); }

  Builder& state(const std::string& s, std::vector<Acts> actions, std::vector<Acts> permitted) {
    d_.states.push_back(s);
    for (std::size_t a = 0; a < d_.agents.size(); ++a) {
      d_.actions[s][d_.agents[a]] = actions.at(a);
      d_.permitted[s][d_.agents[a]] = permitted.at(a);
    }
    return *this;
  }

  // All available actions permitted.
  Builder& state(const std::string& s, std::vector<Acts> actions) {
    auto copy = actions;
    return state(s, std::move(actions), std::move(copy));
  }

  Builder& arrow(const std::string& from, const Acts& profile, const std::string& to) {
    ActionProfile p;
    for (std::size_t a = 0; a < d_.agents.size(); ++a) p[d_.agents[a]] = profile.at(a);
    d_.transitions.push_back({from, std::move(p), to});
    return *this;
  }

  Builder& holds(const std::string& prop, std::vector<std::string> states) {
    d_.valuation[prop] = std::move(states);
    return *this;
  }

  SystemDescription done() { return std::move(d_); }

private:
  SystemDescription d_;
};

inline SystemDescription fig1() {
  return Builder({"a", "b"})
      .state("s", {{"1", "2"}, {"1", "2"}})
      .state("t", {{"1"}, {"1"}})
      .state("u", {{"1"}, {"1"}})
      .arrow("s", {"1", "1"}, "t")
      .arrow("s", {"1", "2"}, "u")
      .arrow("s", {"2", "1"}, "t")
      .arrow("s", {"2", "2"}, "t")
      .arrow("t", {"1", "1"}, "t")
      .arrow("u", {"1", "1"}, "u")
      .holds("p", {"u"})
      .done();
}

// Every action permitted; s and t mirror each other with the agents swapped.
inline SystemDescription fig2() {
  return Builder({"a", "b"})
      .state("s", {{"1", "2"}, {"1"}})
      .state("t", {{"1"}, {"1", "2"}})
      .state("u", {{"1"}, {"1"}})
      .arrow("s", {"1", "1"}, "s")
      .arrow("s", {"2", "1"}, "u")
      .arrow("t", {"1", "1"}, "t")
      .arrow("t", {"1", "2"}, "u")
      .arrow("u", {"1", "1"}, "u")
      .holds("p", {"s", "t"})
      .done();
}

// Negative action names are the non-permitted ones.
inline SystemDescription fig3() {
  return Builder({"a", "b"})
      .state("s", {{"1", "-1"}, {"1"}}, {{"1"}, {"1"}})
      .state("t", {{"1", "-1", "-2"}, {"1"}}, {{"1"}, {"1"}})
      .state("u", {{"1"}, {"1"}})
      .arrow("s", {"1", "1"}, "s")
      .arrow("s", {"-1", "1"}, "t")
      .arrow("s", {"-1", "1"}, "u")
      .arrow("t", {"1", "1"}, "t")
      .arrow("t", {"-1", "1"}, "s")
      .arrow("t", {"-2", "1"}, "u")
      .arrow("u", {"1", "1"}, "u")
      .holds("p", {"s", "t"})
      .done();
}

inline SystemDescription fig4() {
  return Builder({"a", "b"})
      .state("s", {{"1", "-1"}, {"1"}}, {{"1"}, {"1"}})
      .state("t", {{"1", "-1", "-2"}, {"1"}}, {{"1"}, {"1"}})
      .state("u", {{"1"}, {"1"}})
      .arrow("s", {"1", "1"}, "s")
      .arrow("s", {"-1", "1"}, "u")
      .arrow("t", {"1", "1"}, "t")
      .arrow("t", {"-1", "1"}, "u")
      .arrow("t", {"-2", "1"}, "s")
      .arrow("t", {"-2", "1"}, "u")
      .arrow("u", {"1", "1"}, "u")
      .holds("p", {"s", "t"})
      .done();
}

inline SystemDescription fig5_wa() {
  return Builder({"a"})
      .state("s", {{"1"}})
      .state("t", {{"1"}})
      .state("u", {{"1"}})
      .arrow("s", {"1"}, "s")
      .arrow("t", {"1"}, "u")
      .arrow("u", {"1"}, "u")
      .holds("p", {"s", "t"})
      .done();
}

inline SystemDescription fig5_sa() {
  return Builder({"a"})
      .state("s", {{"1"}})
      .state("t", {{"1", "-1"}}, {{"1"}})
      .state("u", {{"1"}})
      .arrow("s", {"1"}, "s")
      .arrow("t", {"1"}, "s")
      .arrow("t", {"-1"}, "t")
      .arrow("u", {"1"}, "u")
      .holds("p", {"s", "t"})
      .done();
}

}  // namespace fixtures_detail

// ---------------------------------------------------------------------------
// Factory and river
// ---------------------------------------------------------------------------

inline constexpr int kFactoryStep = 5;
inline constexpr int kLargeMax = 150;
inline constexpr int kSmallMax = 60;
inline constexpr int kFishLimit = 100;

/// Dumped amounts, in g/day, available to one factory.
inline std::vector<int> factory_amounts(int max) {
  std::vector<int> out;
  for (int x = 0; x <= max; x += kFactoryStep) out.push_back(x);
  return out;
}

/// Large and small factory on one river. From state `river` every pair of
/// amounts leads to `alive` when the total stays within the limit and to
/// `dead` otherwise; both are sinks. The large factory may use the amounts
/// listed in `large_permitted`; the small one is unconstrained.
inline SystemDescription factory_model(const std::vector<int>& large_permitted) {
  SystemDescription d;
  d.agents = {"large", "small"};
  d.states = {"river", "alive", "dead"};
  auto names = [](const std::vector<int>& xs) {
    std::vector<std::string> out;
    for (int x : xs) out.push_back(std::to_string(x));
    return out;
  };
  const auto large = factory_amounts(kLargeMax);
  const auto small = factory_amounts(kSmallMax);
  d.actions["river"]["large"] = names(large);
  d.actions["river"]["small"] = names(small);
  d.permitted["river"]["large"] = names(large_permitted);
  d.permitted["river"]["small"] = names(small);
  for (int x : large)
    for (int y : small)
      d.transitions.push_back({"river",
                               {{"large", std::to_string(x)}, {"small", std::to_string(y)}},
                               x + y <= kFishLimit ? "alive" : "dead"});
  for (const std::string s : {"alive", "dead"}) {
    for (const auto& a : d.agents) {
      d.actions[s][a] = {"idle"};
      d.permitted[s][a] = {"idle"};
    }
    d.transitions.push_back({s, {{"large", "idle"}, {"small", "idle"}}, s});
  }
  d.valuation["fishAlive"] = {"alive"};
  return d;
}

inline std::vector<int> amounts_between(int lo, int hi) {
  std::vector<int> out;
  for (int x : factory_amounts(kLargeMax))
    if (x >= lo && x <= hi) out.push_back(x);
  return out;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& fixture_ids() {
  static const std::vector<std::string> ids{"fig1-wa",           "fig2-we", "fig3-se", "fig4-sa",
                                            "fig5-single-agent", "factory"};
  return ids;
}

inline Fixture load_fixture(std::string_view id) {
  using namespace fixtures_detail;
  const std::vector<Modality> strong{Modality::SA, Modality::SE};
  const std::vector<Modality> weak{Modality::WA, Modality::WE};

  if (id == "fig1-wa")
    return {"fig1-wa",
            "three states, two agents, every action permitted; WA escapes the family of p",
            {{"main",
              fig1(),
              {{"p", {"u"}},
               {"!p", {"s", "t"}},
               {"WA[a] p", {"s", "u"}},
               {"WE[a] p", {"u"}},
               {"WE[a] !p", {"s", "t"}},
               {"SE[b] p", {"s", "t", "u"}},
               {"false", {}}},
              WitnessSpec{Modality::WA, "p", std::nullopt}}}};
  if (id == "fig2-we")
    return {"fig2-we",
            "every action permitted; WE escapes while WA, SE, SA stay in the family",
            {{"main",
              fig2(),
              {{"p", {"s", "t"}}, {"WE[a] p", {"s"}}, {"WE[b] p", {"t"}}, {"WA[a] p", {"s", "t"}}},
              WitnessSpec{Modality::WE, "p", std::nullopt}}}};
  if (id == "fig3-se")
    return {"fig3-se",
            "negative actions are not permitted; SE escapes",
            {{"main",
              fig3(),
              {{"p", {"s", "t"}}, {"SE[a] p", {"s", "u"}}, {"SA[a] p", {"u"}}, {"WE[a] p", {"s", "t"}}},
              WitnessSpec{Modality::SE, "p", std::nullopt}}}};
  if (id == "fig4-sa")
    return {"fig4-sa",
            "negative actions are not permitted; SA escapes",
            {{"main",
              fig4(),
              {{"p", {"s", "t"}}, {"SA[a] p", {"s", "u"}}, {"SE[a] p", {"s", "t", "u"}}, {"WA[a] p", {"s", "t"}}},
              WitnessSpec{Modality::SA, "p", std::nullopt}}}};
  if (id == "fig5-single-agent")
    return {"fig5-single-agent",
            "single agent, deterministic; WA escapes the strong modalities, SA escapes the weak ones",
            {{"wa", fig5_wa(), {{"WA[a] p", {"s"}}, {"WE[a] p", {"s"}}}, WitnessSpec{Modality::WA, "p", strong}},
             {"sa", fig5_sa(), {{"SA[a] p", {"s", "u"}}, {"SE[a] p", {"s", "u"}}},
              WitnessSpec{Modality::SA, "p", weak}}}};
  if (id == "factory")
    return {"factory",
            "large and small factory on one river; amounts in steps of 5 g/day",
            {{"sa-regulation",
              factory_model(amounts_between(0, kFishLimit)),
              {{"SA[large] fishAlive", {"alive", "dead", "river"}}, {"WA[large] fishAlive", {"alive", "river"}}},
              {}},
             {"se-regulation",
              factory_model(amounts_between(0, kFishLimit - kSmallMax)),
              {{"SE[large] fishAlive", {"alive", "dead", "river"}},
               {"WE[large] fishAlive", {"alive", "river"}},
               {"SA[large] fishAlive", {"alive", "dead"}}},
              {}},
             {"contract-30",
              factory_model(amounts_between(30, kLargeMax)),
              {{"WE[large] fishAlive", {"alive", "river"}}, {"SE[large] fishAlive", {"alive", "dead"}}},
              {}},
             {"contract-50",
              factory_model(amounts_between(50, kLargeMax)),
              {{"WE[large] fishAlive", {"alive"}}, {"WA[large] fishAlive", {"alive", "river"}}},
              {}}}};
  throw InputError("unknown fixture " + std::string(id));
}

}  // namespace permitmc
