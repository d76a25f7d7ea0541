#include <gtest/gtest.h>

#include "support.hpp"

using namespace permitmc;
namespace fs = std::filesystem;

TEST(ModelJson, RoundTrip) {
  for (const auto& id : fixture_ids()) {
    for (const auto& v : load_fixture(id).variants) {
      auto j = model_to_json(v.model);
      EXPECT_EQ(j.at("schema"), kModelSchema);
      auto back = model_from_json(json::parse(j.dump()));
      EXPECT_EQ(back.agents, v.model.agents);
      EXPECT_EQ(back.states, v.model.states);
      EXPECT_EQ(back.actions, v.model.actions);
      EXPECT_EQ(back.permitted, v.model.permitted);
      EXPECT_EQ(back.transitions, v.model.transitions);
      EXPECT_EQ(back.valuation, v.model.valuation);
    }
  }
}

TEST(ModelJson, ReadsTheDocumentedFormat) {
  const char* text = R"({
    "agents": ["a","b"], "states": ["s","t"],
    "actions": {"s": {"a": ["1","2"], "b": ["1"]}, "t": {"a": ["1"], "b": ["1"]}},
    "permitted": {"s": {"a": ["1"], "b": ["1"]}, "t": {"a": ["1"], "b": ["1"]}},
    "transitions": [{"from":"s","profile":{"a":"1","b":"1"},"to":"s"},
                    {"from":"s","profile":{"a":"2","b":"1"},"to":"t"},
                    {"from":"t","profile":{"a":"1","b":"1"},"to":"t"}],
    "valuation": {"p": ["t"]} })";
  auto d = model_from_json(json::parse(text));
  auto m = TransitionSystem::build(d);
  EXPECT_EQ(m.sorted_names(model_check(m, parse_formula("WA[a] p"))), std::vector<std::string>{"t"});
  EXPECT_EQ(m.sorted_names(model_check(m, parse_formula("SA[a] p"))), std::vector<std::string>{"t"});
}

TEST(ModelJson, StructuralErrors) {
  EXPECT_THROW((void)model_from_json(json::parse(R"({"agents": 3})")), InputError);
  EXPECT_THROW((void)model_from_json(json::parse(R"({"schema":"other@9","agents":[],"states":[]})")), InputError);
  EXPECT_THROW((void)parse_json("{", "x"), InputError);
  EXPECT_THROW((void)read_model_file("/nonexistent/file.json"), IoError);
}

TEST(ModelJson, ShippedFixtureFilesMatchTheCatalog) {
  for (const auto& id : fixture_ids()) {
    auto fx = load_fixture(id);
    for (const auto& v : fx.variants) {
      auto path = permitmc::testing::source_dir() / "fixtures" / id / (v.name + ".model.json");
      ASSERT_TRUE(fs::exists(path)) << path;
      EXPECT_EQ(read_model_file(path).transitions, v.model.transitions) << path;
    }
    auto exp = parse_json(read_text(permitmc::testing::source_dir() / "fixtures" / id / "expectations.json"), id);
    EXPECT_EQ(exp, expectations_to_json(fx)) << id;
  }
}

TEST(DerivationJson, ParsesJustifications) {
  auto j = json::parse(R"J({"steps":[
    {"formula":"WE[a] p & !WE[a] q -> WA[a](p & !q)","by":"axiom:A7","bind":{"a":"a","phi":"p","psi":"q"}},
    {"formula":"p | !p","by":"taut"},
    {"formula":"x","by":"mp:1,2"},
    {"formula":"x","by":"ir2:1","agent":"b"},
    {"formula":"x","by":"ir4:3","as":["a"],"bs":["b","c"]}]})J");
  auto d = derivation_from_json(j);
  ASSERT_EQ(d.steps.size(), 5U);
  EXPECT_EQ(d.steps[0].by.kind, Justification::Kind::Axiom);
  EXPECT_EQ(d.steps[0].by.axiom, AxiomId::A7);
  EXPECT_EQ(print_formula(*d.steps[0].by.bind.phi), "p");
  EXPECT_EQ(d.steps[2].by.i, 1U);
  EXPECT_EQ(d.steps[2].by.j, 2U);
  EXPECT_EQ(d.steps[3].by.agent, "b");
  EXPECT_EQ(d.steps[4].by.bs, (std::vector<std::string>{"b", "c"}));

  auto back = derivation_from_json(derivation_to_json(d));
  for (std::size_t k = 0; k < d.steps.size(); ++k) EXPECT_EQ(back.steps[k].formula, d.steps[k].formula);
}

TEST(DerivationJson, BadJustifications) {
  for (const char* by : {"axiom:A12", "mp:1", "mp:a,b", "ir2:1,2", "frobnicate", "ir3:"}) {
    json j = {{"steps", {{{"formula", "p"}, {"by", by}}}}};
    EXPECT_THROW((void)derivation_from_json(j), InputError) << by;
  }
}

TEST(DerivationJson, ShippedProofsAreAccepted) {
  for (const char* name : {"we_monotone.json", "se_antitone.json"}) {
    auto d = read_derivation_file(permitmc::testing::source_dir() / "proofs" / name);
    auto v = verify_derivation(d);
    EXPECT_TRUE(v.accepted) << name << ": step " << v.failed_step << " " << v.reason;
  }
}

TEST(ResultJson, TruthSetAndValidation) {
  auto m = TransitionSystem::build(load_fixture("fig1-wa").variant("main").model);
  auto f = parse_formula("WA[a] p");
  auto j = truth_set_to_json(m, f, model_check(m, f));
  EXPECT_EQ(j.dump(), R"({"schema":"permitmc/truth-set@1","formula":"WA[a] p","states":["s","u"]})");

  auto d = load_fixture("fig1-wa").variant("main").model;
  d.transitions.pop_back();
  auto r = validation_to_json(validate_model(d));
  EXPECT_FALSE(r.at("valid").get<bool>());
  EXPECT_EQ(r.at("violations").at(0).at("kind"), "continuity");
}

TEST(ResultJson, WitnessAndAtl) {
  auto m = TransitionSystem::build(load_fixture("fig1-wa").variant("main").model);
  auto w = verify_witness(m, Modality::WA, "p");
  ASSERT_TRUE(w.ok());
  auto j = witness_to_json(m, *w.report);
  EXPECT_EQ(j.at("target"), "WA");
  EXPECT_EQ(j.at("family").size(), 4U);
  EXPECT_EQ(j.at("escape").at("states"), json::parse(R"(["s","u"])"));
  EXPECT_EQ(j.at("closedUnder").size(), 6U);

  auto a = atl_model_to_json(expand_model(m));
  EXPECT_EQ(a.at("states").size(), 12U);
  EXPECT_TRUE(a.at("nature").is_null());
  EXPECT_EQ(a.at("transitions").at(0).at("transitions").size(), 4U);
}
