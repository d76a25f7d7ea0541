// permitmc command-line driver.
//
// Exit codes: 0 success, 1 semantic failure (counterexample, rejected proof,
// invalid model, failed expectation), 2 usage or I/O error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "permitmc/permitmc.hpp"

namespace fs = std::filesystem;
using namespace permitmc;

namespace {

constexpr int kOk = 0;
constexpr int kSemantic = 1;
constexpr int kUsage = 2;

// Raised for semantic failures that should carry a machine-readable payload.
struct SemanticFailure {
  json detail;
};

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ' ';
    out += x;
  }
  return out;
}

TransitionSystem load_model(const std::string& path) {
  auto d = read_model_file(path);
  try {
    return TransitionSystem::build(d, {.validate = true, .profile_cap = profile_cap_from_env()});
  } catch (const ModelError& e) {
    throw SemanticFailure{validation_to_json(e.report())};
  }
}

Modality parse_modality(const std::string& s) {
  if (auto m = modality_from_string(s)) return *m;
  throw CLI::ValidationError("--target", "expected one of WA, WE, SE, SA");
}

// ---------------------------------------------------------------------------

struct CheckOpts {
  std::string model, formula;
  bool as_json = false;
};

int run_check(const CheckOpts& o) {
  const auto m = load_model(o.model);
  const auto f = parse_formula(o.formula);
  const auto set = model_check(m, f);
  if (o.as_json)
    emit(truth_set_to_json(m, f, set));
  else
    std::cout << join(m.sorted_names(set)) << "\n";
  return kOk;
}

int run_validate(const std::string& path) {
  const auto d = read_model_file(path);
  const auto report = validate_model(d, profile_cap_from_env());
  emit(validation_to_json(report));
  return report.empty() ? kOk : kSemantic;
}

struct AxiomOpts {
  std::string model;
  std::vector<std::string> axioms;
  std::size_t depth = 2;
  std::size_t count = 20;
  std::uint64_t seed = 1;
};

int run_axioms(const AxiomOpts& o) {
  const auto m = load_model(o.model);
  if (m.num_agents() == 0) throw InputError("model has no agents to bind");
  std::vector<AxiomId> ids;
  if (o.axioms.empty()) {
    ids.assign(std::begin(kAllAxioms), std::end(kAllAxioms));
  } else {
    for (const auto& s : o.axioms) {
      auto id = axiom_from_string(s);
      if (!id) throw CLI::ValidationError("--axiom", "unknown axiom " + s);
      ids.push_back(*id);
    }
  }
  Rng rng(o.seed);
  FormulaGenParams fp;
  fp.depth = o.depth;
  fp.agents = m.agents();
  fp.propositions = m.propositions();
  if (fp.propositions.empty()) fp.propositions = {"p"};

  json results = json::array();
  bool all_valid = true;
  for (auto id : ids) {
    std::size_t checked = 0;
    json failure = nullptr;
    const std::size_t rounds = axiom_signature(id).needs_formulas || axiom_signature(id).needs_second_agent
                                   ? o.count
                                   : m.num_agents();
    for (std::size_t k = 0; k < rounds && failure.is_null(); ++k) {
      AxiomBindings b;
      b.a = axiom_signature(id).needs_formulas ? m.agents()[rng.below(m.num_agents())] : m.agents()[k];
      b.b = m.agents()[rng.below(m.num_agents())];
      b.phi = random_formula(rng, fp);
      b.psi = random_formula(rng, fp);
      const auto inst = instantiate_axiom(id, b);
      ++checked;
      auto v = check_validity(m, inst);
      if (!v.valid) failure = {{"instance", print_formula(inst)}, {"state", *v.counterexample}};
    }
    all_valid = all_valid && failure.is_null();
    results.push_back({{"axiom", to_string(id)}, {"instances", checked}, {"valid", failure.is_null()},
                       {"counterexample", failure}});
  }
  emit({{"seed", o.seed}, {"depth", o.depth}, {"results", std::move(results)}});
  return all_valid ? kOk : kSemantic;
}

int run_soundness(const SoundnessParams& p) {
  const auto s = soundness_fuzz(p);
  emit({{"seed", p.seed},
        {"models", s.models},
        {"checks", s.checks},
        {"premisesValid", s.premises_valid},
        {"counterexamples", s.failures.size()},
        {"failures", s.failures}});
  return s.failures.empty() ? kOk : kSemantic;
}

int run_prove(const std::string& path) {
  const auto d = read_derivation_file(path);
  const auto v = verify_derivation(d);
  json out = {{"accepted", v.accepted}, {"steps", d.steps.size()}};
  if (!v.accepted) {
    out["failedStep"] = v.failed_step;
    out["reason"] = v.reason;
    if (v.failed_step > 0) out["formula"] = print_formula(d.steps[v.failed_step - 1].formula);
  } else {
    out["conclusion"] = print_formula(d.steps.back().formula);
  }
  emit(out);
  return v.accepted ? kOk : kSemantic;
}

struct WitnessOpts {
  std::string target = "WA";
  std::string model;
  std::string prop = "p";
  bool search = false;
  SearchBounds bounds;
  std::uint64_t seed = 1;
  std::uint64_t budget = 20'000;
};

int run_witness(const WitnessOpts& o) {
  const auto target = parse_modality(o.target);
  if (o.search) {
    std::cerr << "seed " << o.seed << "\n";
    auto r = search_witness(target, o.bounds, o.seed, o.budget);
    if (!r.found()) {
      emit({{"found", false},
            {"target", to_string(target)},
            {"method", r.method},
            {"exhausted", r.exhausted},
            {"candidates", r.candidates},
            {"bounds", {{"maxStates", o.bounds.max_states}, {"agents", o.bounds.agents},
                        {"maxActions", o.bounds.max_actions}}}});
      return kSemantic;
    }
    const auto m = TransitionSystem::build(*r.model);
    auto j = witness_to_json(m, *r.report);
    j["seed"] = o.seed;
    j["method"] = r.method;
    j["candidates"] = r.candidates;
    j["model"] = model_to_json(*r.model);
    emit(j);
    return kOk;
  }
  if (o.model.empty()) throw CLI::ValidationError("witness", "either --model or --search is required");
  const auto m = load_model(o.model);
  auto w = verify_witness(m, target, o.prop);
  if (!w.ok()) {
    emit({{"found", false}, {"target", to_string(target)}, {"reason", w.failure}});
    return kSemantic;
  }
  emit(witness_to_json(m, *w.report));
  return kOk;
}

struct TranslateOpts {
  std::string model, out, formula;
  bool verify = false;
  std::size_t max_depth = 2;
};

int run_translate(const TranslateOpts& o) {
  const auto m = load_model(o.model);
  const auto am = expand_model(m);
  const auto text = atl_model_to_json(am).dump(2) + "\n";
  if (o.out.empty())
    std::cout << text;
  else
    write_text(o.out, text);
  if (!o.verify) return kOk;
  if (o.formula.empty()) throw CLI::ValidationError("--verify", "requires --formula");
  const auto f = parse_formula(o.formula);
  const auto v = verify_translation(m, f, {.max_modal_depth = o.max_depth});
  json out = {{"formula", print_formula(f)},
              {"translation", print_atl(translate_formula(f))},
              {"agree", v.agree},
              {"dIndependent", v.d_independent},
              {"statesChecked", v.states_checked}};
  if (v.mismatch) out["mismatch"] = {{"state", v.mismatch->state}, {"expected", v.mismatch->expected}};
  // Keep stdout a single JSON document when the model goes there too.
  (o.out.empty() ? std::cerr : std::cout) << out.dump(2) << "\n";
  return v.ok() ? kOk : kSemantic;
}

int run_gen(const GenParams& g, const std::string& out) {
  const auto text = model_to_json(random_description(g)).dump(2) + "\n";
  std::cerr << "seed " << g.seed << "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return kOk;
}

struct FixtureOpts {
  bool run = false;
  std::string export_dir;
  std::vector<std::string> ids;
};

// Runs one variant's expectations and witness; returns the failures.
std::vector<std::string> run_variant(const Fixture& fx, const FixtureVariant& v) {
  std::vector<std::string> bad;
  const auto m = TransitionSystem::build(v.model);
  for (const auto& e : v.expectations) {
    const auto got = m.sorted_names(model_check(m, parse_formula(e.formula)));
    if (got != e.truth_set)
      bad.push_back(fx.id + "/" + v.name + ": [[" + e.formula + "]] = {" + join(got) + "}, expected {" +
                    join(e.truth_set) + "}");
  }
  if (v.witness) {
    auto w = verify_witness(m, v.witness->target, v.witness->proposition, v.witness->closure);
    if (!w.ok()) bad.push_back(fx.id + "/" + v.name + ": witness: " + w.failure);
  }
  return bad;
}

int run_fixtures(const FixtureOpts& o) {
  const auto& ids = o.ids.empty() ? fixture_ids() : o.ids;
  std::vector<Fixture> all;
  for (const auto& id : ids) all.push_back(load_fixture(id));

  if (!o.export_dir.empty())
    for (const auto& fx : all) export_fixture(fx, o.export_dir);

  if (!o.run) {
    for (const auto& fx : all) {
      std::cout << fx.id << "  " << fx.summary << "\n";
      for (const auto& v : fx.variants)
        std::cout << "    " << v.name << " (" << v.expectations.size() << " expectations"
                  << (v.witness ? ", witness " + std::string(to_string(v.witness->target)) : std::string()) << ")\n";
    }
    return kOk;
  }
  std::size_t checks = 0;
  std::vector<std::string> failures;
  for (const auto& fx : all) {
    for (const auto& v : fx.variants) {
      checks += v.expectations.size() + (v.witness ? 1 : 0);
      auto bad = run_variant(fx, v);
      failures.insert(failures.end(), bad.begin(), bad.end());
    }
  }
  emit({{"checks", checks}, {"passed", checks - failures.size()}, {"failures", failures}});
  return failures.empty() ? kOk : kSemantic;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker and proof tools for agentive permission logic"};
  app.require_subcommand(1);

  CheckOpts check;
  auto* c = app.add_subcommand("check", "print the truth set of a formula");
  c->add_option("--model", check.model, "model JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--formula", check.formula, "formula text")->required();
  c->add_flag("--json", check.as_json, "JSON output");

  std::string validate_path;
  auto* v = app.add_subcommand("validate", "validate a model file");
  v->add_option("--model", validate_path, "model JSON")->required()->check(CLI::ExistingFile);

  AxiomOpts ax;
  auto* a = app.add_subcommand("axioms", "check random axiom instances on a model");
  a->add_option("--model", ax.model, "model JSON")->required()->check(CLI::ExistingFile);
  a->add_option("--axiom", ax.axioms, "restrict to these axioms (A1..A9)");
  a->add_option("--depth", ax.depth, "formula depth for bindings")->check(CLI::Range(0, 6));
  a->add_option("--count", ax.count, "instances per schema")->check(CLI::PositiveNumber);
  a->add_option("--seed", ax.seed, "random seed");

  SoundnessParams sp;
  auto* s = app.add_subcommand("soundness", "fuzz the axioms and rules on random models");
  s->add_option("--seed", sp.seed, "random seed");
  s->add_option("--count", sp.count, "number of models")->check(CLI::PositiveNumber);
  s->add_option("--depth", sp.formula_depth, "formula depth")->check(CLI::Range(0, 6));
  s->add_option("--max-agents", sp.max_agents)->check(CLI::Range(1, 4));
  s->add_option("--max-states", sp.max_states)->check(CLI::Range(1, 12));
  s->add_option("--max-actions", sp.max_actions)->check(CLI::Range(1, 4));
  s->add_option("--max-branching", sp.max_branching)->check(CLI::Range(1, 4));

  std::string proof_path;
  auto* p = app.add_subcommand("prove", "verify a derivation");
  p->add_option("--derivation", proof_path, "derivation JSON")->required()->check(CLI::ExistingFile);

  WitnessOpts wo;
  auto* w = app.add_subcommand("witness", "check or search for an undefinability witness");
  w->add_option("--target", wo.target, "WA, WE, SE or SA")->required();
  auto* wm = w->add_option("--model", wo.model, "model JSON")->check(CLI::ExistingFile);
  w->add_option("--prop", wo.prop, "proposition whose family is used");
  auto* ws = w->add_flag("--search", wo.search, "search small models instead");
  w->add_option("--max-states", wo.bounds.max_states)->check(CLI::Range(2, 8));
  w->add_option("--agents", wo.bounds.agents)->check(CLI::Range(1, 3));
  w->add_option("--max-actions", wo.bounds.max_actions)->check(CLI::Range(1, 4));
  w->add_option("--seed", wo.seed, "random seed");
  w->add_option("--budget", wo.budget, "random samples before exhaustive enumeration");
  wm->excludes(ws);

  TranslateOpts to;
  auto* t = app.add_subcommand("translate", "expand a model into a concurrent game structure");
  t->add_option("--model", to.model, "model JSON")->required()->check(CLI::ExistingFile);
  t->add_option("--out", to.out, "output path (default stdout)");
  t->add_flag("--verify", to.verify, "check the formula translation on the expansion");
  t->add_option("--formula", to.formula, "formula for --verify");
  t->add_option("--max-depth", to.max_depth, "modal depth bound for --verify");

  GenParams gp;
  std::string gen_out;
  auto* g = app.add_subcommand("gen", "generate a random valid model");
  g->add_option("--seed", gp.seed, "random seed");
  g->add_option("--states", gp.num_states)->check(CLI::Range(1, 1000));
  g->add_option("--agents", gp.num_agents)->check(CLI::Range(1, 8));
  g->add_option("--max-actions", gp.max_actions)->check(CLI::Range(1, 16));
  g->add_option("--props", gp.propositions)->check(CLI::Range(0, 26));
  g->add_option("--density", gp.permitted_density, "probability an action is permitted")->check(CLI::Range(0.0, 1.0));
  g->add_option("--branching", gp.branching, "maximum successors per profile")->check(CLI::Range(1, 16));
  g->add_flag("--deterministic", gp.deterministic);
  g->add_option("--out", gen_out, "output path (default stdout)");

  FixtureOpts fo;
  auto* f = app.add_subcommand("fixtures", "list or run the golden fixtures");
  f->add_flag("--run", fo.run, "execute every expectation");
  f->add_option("--export", fo.export_dir, "write fixture models and expectations to DIR");
  f->add_option("--id", fo.ids, "restrict to these fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  gp.profile_cap = profile_cap_from_env();

  try {
    if (*c) return run_check(check);
    if (*v) return run_validate(validate_path);
    if (*a) return run_axioms(ax);
    if (*s) return run_soundness(sp);
    if (*p) return run_prove(proof_path);
    if (*w) return run_witness(wo);
    if (*t) return run_translate(to);
    if (*g) return run_gen(gp, gen_out);
    if (*f) return run_fixtures(fo);
  } catch (const SemanticFailure& e) {
    emit(e.detail);
    return kSemantic;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
