#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "permitmc/algebra.hpp"
#include "permitmc/atl.hpp"
#include "permitmc/deduction.hpp"
#include "permitmc/errors.hpp"
#include "permitmc/fixtures.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kModelSchema = "permitmc/model@1";
inline constexpr std::string_view kTruthSetSchema = "permitmc/truth-set@1";
inline constexpr std::string_view kValidationSchema = "permitmc/validation@1";
inline constexpr std::string_view kWitnessSchema = "permitmc/witness@1";
inline constexpr std::string_view kAtlSchema = "permitmc/atl-model@1";
inline constexpr std::string_view kDerivationSchema = "permitmc/derivation@1";
inline constexpr std::string_view kExpectationsSchema = "permitmc/expectations@1";

/// File could not be read or written.
class IoError : public InputError {
public:
  using InputError::InputError;
};

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

inline json model_to_json(const SystemDescription& d) {
  json j;
  j["schema"] = kModelSchema;
  j["agents"] = d.agents;
  j["states"] = d.states;
  auto table = [&](const auto& t) {
    json out = json::object();
    for (const auto& s : d.states) {
      auto it = t.find(s);
      if (it == t.end()) continue;
      json row = json::object();
      for (const auto& a : d.agents)
        if (auto jt = it->second.find(a); jt != it->second.end()) row[a] = jt->second;
      out[s] = std::move(row);
    }
    return out;
  };
  j["actions"] = table(d.actions);
  j["permitted"] = table(d.permitted);
  json trs = json::array();
  for (const auto& t : d.transitions) {
    json prof = json::object();
    for (const auto& a : d.agents)
      if (auto it = t.profile.find(a); it != t.profile.end()) prof[a] = it->second;
    trs.push_back({{"from", t.from}, {"profile", std::move(prof)}, {"to", t.to}});
  }
  j["transitions"] = std::move(trs);
  json val = json::object();
  for (const auto& [p, members] : d.valuation) val[p] = members;
  j["valuation"] = std::move(val);
  return j;
}

/// Reads the model format. Structure errors (wrong JSON types, missing
/// fields) throw InputError; semantic problems are left to validate_model.
inline SystemDescription model_from_json(const json& j) {
  try {
    if (j.contains("schema") && j.at("schema").get<std::string>() != kModelSchema)
      throw InputError("unsupported model schema " + j.at("schema").get<std::string>());
    SystemDescription d;
    d.agents = j.at("agents").get<std::vector<std::string>>();
    d.states = j.at("states").get<std::vector<std::string>>();
    for (const auto* key : {"actions", "permitted"}) {
      auto& table = std::string_view(key) == "actions" ? d.actions : d.permitted;
      for (const auto& [s, row] : j.at(key).items())
        for (const auto& [a, acts] : row.items()) table[s][a] = acts.get<std::vector<std::string>>();
    }
    for (const auto& t : j.at("transitions")) {
      TransitionEntry e;
      e.from = t.at("from").get<std::string>();
      e.to = t.at("to").get<std::string>();
      for (const auto& [a, i] : t.at("profile").items()) e.profile[a] = i.get<std::string>();
      d.transitions.push_back(std::move(e));
    }
    if (j.contains("valuation"))
      for (const auto& [p, members] : j.at("valuation").items())
        d.valuation[p] = members.get<std::vector<std::string>>();
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model JSON: ") + e.what());
  }
}

inline SystemDescription read_model_file(const std::filesystem::path& path) {
  return model_from_json(parse_json(read_text(path), path.string()));
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

inline json truth_set_to_json(const TransitionSystem& m, const Formula& f, const TruthSet& set) {
  return {{"schema", kTruthSetSchema}, {"formula", print_formula(f)}, {"states", m.sorted_names(set)}};
}

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::EmptyName: return "empty-name";
    case ViolationKind::DuplicateAgent: return "duplicate-agent";
    case ViolationKind::DuplicateState: return "duplicate-state";
    case ViolationKind::UnknownState: return "unknown-state";
    case ViolationKind::UnknownAgent: return "unknown-agent";
    case ViolationKind::EmptyActions: return "empty-actions";
    case ViolationKind::DuplicateAction: return "duplicate-action";
    case ViolationKind::EmptyPermitted: return "empty-permitted";
    case ViolationKind::PermittedNotAvailable: return "permitted-not-available";
    case ViolationKind::DanglingTransition: return "dangling-transition";
    case ViolationKind::MalformedProfile: return "malformed-profile";
    case ViolationKind::ContinuityGap: return "continuity";
    case ViolationKind::ValuationOutsideStates: return "valuation-outside-states";
    case ViolationKind::ReservedProposition: return "reserved-proposition";
  }
  return "unknown";
}

inline json validation_to_json(const ValidationReport& r) {
  json v = json::array();
  for (const auto& x : r)
    v.push_back({{"kind", to_string(x.kind)}, {"state", x.state}, {"agent", x.agent}, {"message", x.message}});
  return {{"schema", kValidationSchema}, {"valid", r.empty()}, {"violations", std::move(v)}};
}

inline json witness_to_json(const TransitionSystem& m, const WitnessReport& r) {
  json family = json::array();
  for (const auto& s : r.family.members()) family.push_back(m.sorted_names(s));
  json closed = json::array();
  for (const auto& c : r.closed_under) {
    json arrows = json::array();
    for (const auto& a : c.arrows)
      arrows.push_back({{"from", m.sorted_names(a.source)}, {"to", m.sorted_names(a.image)}});
    closed.push_back({{"modality", to_string(c.modality)}, {"agent", c.agent}, {"arrows", std::move(arrows)}});
  }
  return {{"schema", kWitnessSchema},
          {"target", to_string(r.target)},
          {"proposition", r.proposition},
          {"family", std::move(family)},
          {"closedUnder", std::move(closed)},
          {"escape", {{"formula", print_formula(r.escape_formula)}, {"states", m.sorted_names(r.escape_set)}}}};
}

inline json atl_model_to_json(const AtlModel& am) {
  json j;
  j["schema"] = kAtlSchema;
  j["agents"] = am.agents();
  j["nature"] = am.has_nature() ? json(am.nature_name()) : json(nullptr);
  json states = json::array();
  for (std::size_t i = 0; i < am.num_states(); ++i) {
    const auto& st = am.state(i);
    std::vector<std::string> perm;
    std::vector<std::string> labels;
    for (const auto& [p, set] : am.valuation())
      if (set.contains(st.base)) labels.push_back(p);
    for (std::size_t a = 0; a < am.original_agents(); ++a) {
      if ((st.permitted >> a) & 1U) {
        perm.push_back(am.agents()[a]);
        labels.push_back("d_" + am.agents()[a]);
      }
    }
    states.push_back({{"id", am.state_label(i)},
                      {"base", am.base_names()[st.base]},
                      {"permitted", std::move(perm)},
                      {"labels", std::move(labels)}});
  }
  j["states"] = std::move(states);

  // Transitions leave every copy ⟨s, 𝒟⟩ identically; they are listed once per base state.
  json trans = json::array();
  for (std::size_t s = 0; s < am.base_names().size(); ++s) {
    json moves = json::object();
    for (std::size_t a = 0; a < am.num_agents(); ++a) {
      json names = json::array();
      for (std::size_t k = 0; k < am.moves(s, a); ++k) names.push_back(am.move_name(s, a, k));
      moves[am.agents()[a]] = std::move(names);
    }
    json table = json::array();
    const auto& delta = am.delta(s);
    std::vector<std::size_t> digits(am.num_agents(), 0);
    for (std::size_t code = 0; code < delta.size(); ++code) {
      json mv = json::object();
      for (std::size_t a = 0; a < am.num_agents(); ++a) mv[am.agents()[a]] = am.move_name(s, a, digits[a]);
      table.push_back({{"moves", std::move(mv)}, {"to", am.state_label(delta[code])}});
      for (std::size_t k = 0; k < digits.size() && ++digits[k] == am.moves(s, k); ++k) digits[k] = 0;
    }
    trans.push_back({{"from", am.base_names()[s]}, {"moves", std::move(moves)}, {"transitions", std::move(table)}});
  }
  j["transitions"] = std::move(trans);
  return j;
}

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::size_t> parse_refs(std::string_view text, std::string_view step) {
  std::vector<std::size_t> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto part = text.substr(0, comma);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size())
      throw InputError("bad step reference '" + std::string(part) + "' in " + std::string(step));
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

inline Justification justification_from_json(const json& s) {
  const auto by = s.at("by").get<std::string>();
  const auto colon = by.find(':');
  const std::string head = by.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : by.substr(colon + 1);
  if (head == "taut") return Justification::taut();
  if (head == "axiom") {
    auto id = axiom_from_string(rest);
    if (!id) throw InputError("unknown axiom " + rest);
    AxiomBindings b;
    if (s.contains("bind")) {
      const auto& bind = s.at("bind");
      if (bind.contains("a")) b.a = bind.at("a").get<std::string>();
      if (bind.contains("b")) b.b = bind.at("b").get<std::string>();
      if (bind.contains("phi")) b.phi = parse_formula(bind.at("phi").get<std::string>());
      if (bind.contains("psi")) b.psi = parse_formula(bind.at("psi").get<std::string>());
    }
    return Justification::axiom_of(*id, std::move(b));
  }
  auto refs = detail::parse_refs(rest, by);
  if (head == "mp") {
    if (refs.size() != 2) throw InputError("mp needs two step references: " + by);
    return Justification::mp(refs[0], refs[1]);
  }
  if (refs.size() != 1) throw InputError(head + " needs one step reference: " + by);
  std::optional<std::string> agent;
  if (s.contains("agent")) agent = s.at("agent").get<std::string>();
  if (head == "ir2") return Justification::ir2(refs[0], agent);
  if (head == "ir3") return Justification::ir3(refs[0], agent);
  if (head == "ir4")
    return Justification::ir4(refs[0], s.value("as", std::vector<std::string>{}),
                              s.value("bs", std::vector<std::string>{}));
  throw InputError("unknown justification " + by);
}

inline json justification_to_json(const Justification& by) {
  using K = Justification::Kind;
  json j;
  switch (by.kind) {
    case K::Taut: j["by"] = "taut"; break;
    case K::Axiom: {
      j["by"] = "axiom:" + to_string(by.axiom);
      json b = json::object();
      if (by.bind.a) b["a"] = *by.bind.a;
      if (by.bind.b) b["b"] = *by.bind.b;
      if (by.bind.phi) b["phi"] = print_formula(*by.bind.phi);
      if (by.bind.psi) b["psi"] = print_formula(*by.bind.psi);
      j["bind"] = std::move(b);
      break;
    }
    case K::MP: j["by"] = "mp:" + std::to_string(by.i) + "," + std::to_string(by.j); break;
    case K::IR2:
    case K::IR3:
      j["by"] = std::string(by.kind == K::IR2 ? "ir2:" : "ir3:") + std::to_string(by.i);
      if (by.agent) j["agent"] = *by.agent;
      break;
    case K::IR4:
      j["by"] = "ir4:" + std::to_string(by.i);
      j["as"] = by.as;
      j["bs"] = by.bs;
      break;
  }
  return j;
}

inline Derivation derivation_from_json(const json& j) {
  try {
    Derivation d;
    for (const auto& s : j.at("steps")) {
      auto f = parse_formula(s.at("formula").get<std::string>());
      d.steps.push_back({std::move(f), justification_from_json(s)});
    }
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed derivation JSON: ") + e.what());
  }
}

inline json derivation_to_json(const Derivation& d) {
  json steps = json::array();
  for (const auto& s : d.steps) {
    json step = {{"formula", print_formula(s.formula)}};
    step.update(justification_to_json(s.by));
    steps.push_back(std::move(step));
  }
  return {{"schema", kDerivationSchema}, {"steps", std::move(steps)}};
}

inline Derivation read_derivation_file(const std::filesystem::path& path) {
  return derivation_from_json(parse_json(read_text(path), path.string()));
}

// ---------------------------------------------------------------------------
// Fixture expectations
// ---------------------------------------------------------------------------

inline json expectations_to_json(const Fixture& fx) {
  json variants = json::array();
  for (const auto& v : fx.variants) {
    json exps = json::array();
    for (const auto& e : v.expectations) exps.push_back({{"formula", e.formula}, {"states", e.truth_set}});
    json entry = {{"name", v.name}, {"model", v.name + ".model.json"}, {"expectations", std::move(exps)}};
    if (v.witness) {
      json w = {{"target", to_string(v.witness->target)}, {"proposition", v.witness->proposition}};
      if (v.witness->closure) {
        json c = json::array();
        for (auto m : *v.witness->closure) c.push_back(to_string(m));
        w["closure"] = std::move(c);
      }
      entry["witness"] = std::move(w);
    }
    variants.push_back(std::move(entry));
  }
  return {{"schema", kExpectationsSchema}, {"id", fx.id}, {"summary", fx.summary}, {"variants", std::move(variants)}};
}

/// Writes <dir>/<id>/<variant>.model.json and <dir>/<id>/expectations.json.
inline void export_fixture(const Fixture& fx, const std::filesystem::path& dir) {
  for (const auto& v : fx.variants)
    write_text(dir / fx.id / (v.name + ".model.json"), model_to_json(v.model).dump(2) + "\n");
  write_text(dir / fx.id / "expectations.json", expectations_to_json(fx).dump(2) + "\n");
}

}  // namespace permitmc
