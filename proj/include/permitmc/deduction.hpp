#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "permitmc/checker.hpp"
#include "permitmc/errors.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/generators.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

// ---------------------------------------------------------------------------
// Axiom schemas
// ---------------------------------------------------------------------------

enum class AxiomId { A1 = 1, A2, A3, A4, A5, A6, A7, A8, A9 };

inline constexpr AxiomId kAllAxioms[] = {AxiomId::A1, AxiomId::A2, AxiomId::A3, AxiomId::A4, AxiomId::A5,
                                         AxiomId::A6, AxiomId::A7, AxiomId::A8, AxiomId::A9};

inline std::string to_string(AxiomId id) { return "A" + std::to_string(static_cast<int>(id)); }

inline std::optional<AxiomId> axiom_from_string(std::string_view s) {
  for (auto id : kAllAxioms)
    if (to_string(id) == s) return id;
  return std::nullopt;
}

/// Metavariable bindings for an axiom instance. `b` is only used by A9 and
/// may equal `a`.
struct AxiomBindings {
  std::optional<std::string> a;
  std::optional<std::string> b;
  std::optional<Formula> phi;
  std::optional<Formula> psi;
};

struct AxiomSignature {
  bool needs_formulas;
  bool needs_second_agent;
};

inline AxiomSignature axiom_signature(AxiomId id) {
  switch (id) {
    case AxiomId::A1:
    case AxiomId::A2:
    case AxiomId::A3:
    case AxiomId::A4: return {false, false};
    case AxiomId::A9: return {true, true};
    default: return {true, false};
  }
}

/// Instantiates an axiom schema. Throws InputError on a missing binding.
inline Formula instantiate_axiom(AxiomId id, const AxiomBindings& bind) {
  using namespace dsl;
  const auto sig = axiom_signature(id);
  if (!bind.a) throw InputError(to_string(id) + ": missing binding for agent a");
  if (sig.needs_second_agent && !bind.b) throw InputError(to_string(id) + ": missing binding for agent b");
  if (sig.needs_formulas && (!bind.phi || !bind.psi))
    throw InputError(to_string(id) + ": missing binding for phi/psi");
  const std::string& a = *bind.a;
  switch (id) {
    case AxiomId::A1: return Not(WA(a, F()));
    case AxiomId::A2: return WE(a, T());
    case AxiomId::A3: return SA(a, F());
    case AxiomId::A4: return Imp(SE(a, T()), SA(a, T()));
    default: break;
  }
  const Formula& phi = *bind.phi;
  const Formula& psi = *bind.psi;
  switch (id) {
    case AxiomId::A5: return Imp(WA(a, Or(phi, psi)), Or(WA(a, phi), WA(a, psi)));
    case AxiomId::A6: return Imp(And(SA(a, phi), SA(a, psi)), SA(a, Or(phi, psi)));
    case AxiomId::A7: return Imp(And(WE(a, phi), Not(WE(a, psi))), WA(a, And(phi, Not(psi))));
    case AxiomId::A8: return Imp(And(Not(SE(a, phi)), SE(a, psi)), Not(SA(a, And(phi, Not(psi)))));
    case AxiomId::A9: {
      const std::string& b = *bind.b;
      return Imp(And(Not(WA(a, phi)), SA(a, psi)), And(Not(WA(b, And(phi, psi))), SA(b, And(phi, psi))));
    }
    default: break;
  }
  throw InputError("unknown axiom");
}

/// WE_a φ ∧ ¬WA_a ψ → WE_a(φ ∧ ¬ψ)
inline Formula lemma_we_wa(const std::string& a, const Formula& phi, const Formula& psi) {
  using namespace dsl;
  return Imp(And(WE(a, phi), Not(WA(a, psi))), WE(a, And(phi, Not(psi))));
}

/// ¬SE_a φ ∧ SA_a ψ → ¬SE_a(φ ∧ ¬ψ)
inline Formula lemma_se_sa(const std::string& a, const Formula& phi, const Formula& psi) {
  using namespace dsl;
  return Imp(And(Not(SE(a, phi)), SA(a, psi)), Not(SE(a, And(phi, Not(psi)))));
}

/// ¬WA_a φ ∧ SA_a ⊤ → ¬WA_b φ ∧ SA_b φ
inline Formula lemma_wa_sa_top(const std::string& a, const std::string& b, const Formula& phi) {
  using namespace dsl;
  return Imp(And(Not(WA(a, phi)), SA(a, T())), And(Not(WA(b, phi)), SA(b, phi)));
}

// ---------------------------------------------------------------------------
// Semantic validity
// ---------------------------------------------------------------------------

struct ValidityVerdict {
  bool valid = true;
  std::optional<std::string> counterexample;  // least-index failing state
};

inline ValidityVerdict check_validity(const TransitionSystem& m, const Formula& f) {
  auto truth = model_check(m, f);
  for (std::size_t s = 0; s < m.num_states(); ++s)
    if (!truth.contains(s)) return {false, m.state_name(s)};
  return {};
}

enum class Rule { IR2, IR3, IR4 };

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::IR2: return "IR2";
    case Rule::IR3: return "IR3";
    case Rule::IR4: return "IR4";
  }
  return "??";
}

struct RuleInstance {
  Rule rule;
  Formula premise;
  Formula conclusion;
  std::vector<std::string> as;  // IR4 only
  std::vector<std::string> bs;  // IR4 only
};

/// φ→ψ / WA_a φ → WA_a ψ
inline RuleInstance make_ir2(const std::string& a, const Formula& phi, const Formula& psi) {
  using namespace dsl;
  return {Rule::IR2, Imp(phi, psi), Imp(WA(a, phi), WA(a, psi)), {}, {}};
}

/// φ→ψ / SA_a ψ → SA_a φ
inline RuleInstance make_ir3(const std::string& a, const Formula& phi, const Formula& psi) {
  using namespace dsl;
  return {Rule::IR3, Imp(phi, psi), Imp(SA(a, psi), SA(a, phi)), {}, {}};
}

/// φ1∧…∧φm → ¬ψ1∨…∨¬ψn / WE_a1 φ1∧…∧WE_am φm → SE_b1 ψ1∨…∨SE_bn ψn
inline RuleInstance make_ir4(const std::vector<std::string>& as, const std::vector<Formula>& phis,
                             const std::vector<std::string>& bs, const std::vector<Formula>& psis) {
  if (as.size() != phis.size() || bs.size() != psis.size())
    throw InputError("IR4: agent and formula lists differ in length");
  std::vector<Formula> neg_psis, we, se;
  for (const auto& p : psis) neg_psis.push_back(Formula::neg(p));
  for (std::size_t i = 0; i < as.size(); ++i) we.push_back(Formula::modal(Modality::WE, as[i], phis[i]));
  for (std::size_t j = 0; j < bs.size(); ++j) se.push_back(Formula::modal(Modality::SE, bs[j], psis[j]));
  return {Rule::IR4, Formula::implies(conj_all(phis), disj_all(neg_psis)),
          Formula::implies(conj_all(we), disj_all(se)), as, bs};
}

inline bool agents_distinct(const std::vector<std::string>& as, const std::vector<std::string>& bs) {
  std::set<std::string> seen;
  for (const auto* v : {&as, &bs})
    for (const auto& x : *v)
      if (!seen.insert(x).second) return false;
  return true;
}

struct LocalRuleVerdict {
  bool premise_valid = false;
  bool holds = true;                          // premise invalid, or conclusion valid
  std::optional<std::string> counterexample;  // failing state of the conclusion
};

/// Per-model rule soundness: when the premise is valid in `m`, the
/// conclusion must be valid in `m` too. Throws InputError when an IR4
/// instance names the same agent twice.
inline LocalRuleVerdict check_rule_locally(const TransitionSystem& m, const RuleInstance& r) {
  if (r.rule == Rule::IR4 && !agents_distinct(r.as, r.bs))
    throw InputError("IR4 side condition violated: agents must be distinct");
  LocalRuleVerdict out;
  out.premise_valid = check_validity(m, r.premise).valid;
  if (!out.premise_valid) return out;
  auto c = check_validity(m, r.conclusion);
  out.holds = c.valid;
  out.counterexample = c.counterexample;
  return out;
}

// ---------------------------------------------------------------------------
// Tautologies
// ---------------------------------------------------------------------------

inline constexpr std::size_t kTautologyAtomCap = 20;

namespace detail {

struct PropProgram {
  enum Op : std::uint8_t { Atom, Not, Or };
  struct Instr {
    Op op;
    std::uint32_t atom;
  };
  std::vector<Instr> code;  // postfix
  std::size_t atoms = 0;
};

inline void compile_prop(const Formula& f, std::unordered_map<Formula, std::uint32_t, FormulaHash>& atoms,
                         PropProgram& prog) {
  switch (f.kind()) {
    case Formula::Kind::Neg:
      compile_prop(f.child(), atoms, prog);
      prog.code.push_back({PropProgram::Not, 0});
      return;
    case Formula::Kind::Or:
      compile_prop(f.left(), atoms, prog);
      compile_prop(f.right(), atoms, prog);
      prog.code.push_back({PropProgram::Or, 0});
      return;
    case Formula::Kind::Prop:
    case Formula::Kind::Modal: {
      auto [it, fresh] = atoms.try_emplace(f, static_cast<std::uint32_t>(atoms.size()));
      prog.code.push_back({PropProgram::Atom, it->second});
      return;
    }
  }
}

}  // namespace detail

/// Propositional tautology check treating propositions and maximal modal
/// subformulas as atoms. Truth table evaluated 64 rows at a time. Throws
/// CapacityError above `atom_cap` atoms.
inline bool is_tautology(const Formula& f, std::size_t atom_cap = kTautologyAtomCap) {
  std::unordered_map<Formula, std::uint32_t, FormulaHash> atoms;
  detail::PropProgram prog;
  detail::compile_prop(f, atoms, prog);
  const std::size_t n = atoms.size();
  if (n > atom_cap)
    throw CapacityError("tautology check: " + std::to_string(n) + " atoms exceeds cap " + std::to_string(atom_cap));

  // Atom j < 6 varies inside a 64-row block; higher atoms vary by block.
  static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                            0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const std::size_t rows = std::size_t{1} << n;
  const std::uint64_t valid_mask = rows >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << rows) - 1);
  const std::size_t blocks = rows >= 64 ? rows / 64 : 1;
  std::vector<std::uint64_t> stack;
  std::vector<std::uint64_t> value(n);
  for (std::size_t block = 0; block < blocks; ++block) {
    for (std::size_t j = 0; j < n; ++j)
      value[j] = j < 6 ? kLow[j] : (((block >> (j - 6)) & 1U) ? ~std::uint64_t{0} : 0);
    stack.clear();
    for (const auto& ins : prog.code) {
      switch (ins.op) {
        case detail::PropProgram::Atom: stack.push_back(value[ins.atom]); break;
        case detail::PropProgram::Not: stack.back() = ~stack.back(); break;
        case detail::PropProgram::Or: {
          auto r = stack.back();
          stack.pop_back();
          stack.back() |= r;
          break;
        }
      }
    }
    if ((stack.back() & valid_mask) != valid_mask) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Derivations
// ---------------------------------------------------------------------------

struct Justification {
  enum class Kind { Axiom, Taut, MP, IR2, IR3, IR4 };
  Kind kind = Kind::Taut;
  AxiomId axiom = AxiomId::A1;
  AxiomBindings bind;
  std::size_t i = 0;  // 1-based premise references
  std::size_t j = 0;
  std::optional<std::string> agent;  // IR2/IR3; inferred from the conclusion when absent
  std::vector<std::string> as;       // IR4
  std::vector<std::string> bs;

  static Justification axiom_of(AxiomId id, AxiomBindings b) {
    Justification j;
    j.kind = Kind::Axiom;
    j.axiom = id;
    j.bind = std::move(b);
    return j;
  }
  static Justification taut() { return {}; }
  static Justification mp(std::size_t i, std::size_t j) {
    Justification r;
    r.kind = Kind::MP;
    r.i = i;
    r.j = j;
    return r;
  }
  static Justification ir2(std::size_t i, std::optional<std::string> agent = std::nullopt) {
    Justification r;
    r.kind = Kind::IR2;
    r.i = i;
    r.agent = std::move(agent);
    return r;
  }
  static Justification ir3(std::size_t i, std::optional<std::string> agent = std::nullopt) {
    Justification r = ir2(i, std::move(agent));
    r.kind = Kind::IR3;
    return r;
  }
  static Justification ir4(std::size_t i, std::vector<std::string> as, std::vector<std::string> bs) {
    Justification r;
    r.kind = Kind::IR4;
    r.i = i;
    r.as = std::move(as);
    r.bs = std::move(bs);
    return r;
  }
};

struct DerivationStep {
  Formula formula;
  Justification by;
};

struct Derivation {
  std::vector<DerivationStep> steps;
};

struct DerivationVerdict {
  bool accepted = true;
  std::size_t failed_step = 0;  // 1-based; 0 when accepted
  std::string reason;
};

namespace detail {

inline std::optional<std::string> check_step(const std::vector<DerivationStep>& steps, std::size_t k) {
  const Formula& cur = steps[k].formula;
  const Justification& by = steps[k].by;
  auto ref = [&](std::size_t r) -> const Formula* {
    if (r == 0 || r > k) return nullptr;  // 1-based, strictly earlier
    return &steps[r - 1].formula;
  };
  using K = Justification::Kind;
  switch (by.kind) {
    case K::Axiom: {
      try {
        if (instantiate_axiom(by.axiom, by.bind) == cur) return std::nullopt;
        return "formula is not the " + to_string(by.axiom) + " instance for the given bindings";
      } catch (const InputError& e) {
        return std::string(e.what());
      }
    }
    case K::Taut: {
      try {
        if (is_tautology(cur)) return std::nullopt;
        return "not a tautology";
      } catch (const CapacityError& e) {
        return std::string(e.what());
      }
    }
    case K::MP: {
      const Formula* a = ref(by.i);
      const Formula* b = ref(by.j);
      if (a == nullptr || b == nullptr) return "MP references must point to earlier steps";
      if (*b == Formula::implies(*a, cur)) return std::nullopt;
      return "step " + std::to_string(by.j) + " is not step " + std::to_string(by.i) + " -> current";
    }
    case K::IR2:
    case K::IR3: {
      const Formula* p = ref(by.i);
      if (p == nullptr) return "rule premise must be an earlier step";
      if (!p->is_implication()) return "rule premise is not an implication";
      const bool ir2 = by.kind == K::IR2;
      std::string agent;
      if (by.agent) {
        agent = *by.agent;
      } else if (cur.is_implication() && cur.antecedent().is(Formula::Kind::Modal)) {
        agent = cur.antecedent().agent();
      } else {
        return "cannot determine the rule's agent";
      }
      const Formula phi = p->antecedent();
      const Formula psi = p->consequent();
      const Formula expected = ir2 ? make_ir2(agent, phi, psi).conclusion : make_ir3(agent, phi, psi).conclusion;
      if (expected == cur) return std::nullopt;
      return std::string(ir2 ? "IR2" : "IR3") + " conclusion does not match the premise";
    }
    case K::IR4: {
      const Formula* p = ref(by.i);
      if (p == nullptr) return "rule premise must be an earlier step";
      if (!agents_distinct(by.as, by.bs)) return "IR4 agents must be distinct";
      if (!p->is_implication()) return "IR4 premise is not an implication";
      auto phis = split_conj(p->antecedent(), by.as.size());
      auto negs = split_disj(p->consequent(), by.bs.size());
      if (!phis || !negs) return "IR4 premise does not match the agent lists";
      std::vector<Formula> psis;
      for (const auto& n : *negs) {
        if (!n.is(Formula::Kind::Neg)) return "IR4 premise disjuncts must be negations";
        psis.push_back(n.child());
      }
      if (make_ir4(by.as, *phis, by.bs, psis).conclusion == cur) return std::nullopt;
      return "IR4 conclusion does not match the premise";
    }
  }
  return "unknown justification";
}

}  // namespace detail

/// Checks a Hilbert-style derivation step by step. Rejection names the first
/// bad step.
inline DerivationVerdict verify_derivation(const Derivation& d) {
  if (d.steps.empty()) return {false, 0, "empty derivation"};
  for (std::size_t k = 0; k < d.steps.size(); ++k) {
    if (auto err = detail::check_step(d.steps, k)) return {false, k + 1, *err};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Soundness fuzzing
// ---------------------------------------------------------------------------

struct SoundnessParams {
  std::uint64_t seed = 1;
  std::size_t count = 100;
  std::size_t formula_depth = 3;
  std::size_t max_agents = 3;
  std::size_t max_states = 5;
  std::size_t max_actions = 3;
  std::size_t max_branching = 3;
};

struct SoundnessSummary {
  std::size_t models = 0;
  std::size_t checks = 0;
  std::size_t premises_valid = 0;  // local rule checks whose premise held
  std::vector<std::string> failures;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Generates `count` random valid models and checks, in each, random
/// instances of every axiom schema, the derived lemmas, and the local
/// soundness of IR2/IR3/IR4 and of the derived WE/SE monotonicity rules.
inline SoundnessSummary soundness_fuzz(const SoundnessParams& p) {
  SoundnessSummary out;
  for (std::size_t k = 0; k < p.count; ++k) {
    Rng rng(detail::mix_seed(p.seed, k));
    GenParams g;
    g.seed = rng.next();
    g.num_agents = 1 + rng.below(p.max_agents);
    g.num_states = 1 + rng.below(p.max_states);
    g.max_actions = 1 + rng.below(p.max_actions);
    g.branching = 1 + rng.below(p.max_branching);
    g.propositions = 2;
    g.deterministic = rng.chance(0.25);
    g.permitted_density = 0.3 + 0.7 * rng.unit();
    const auto m = random_model(g);
    ++out.models;

    FormulaGenParams fp;
    fp.depth = p.formula_depth;
    fp.agents = m.agents();
    fp.propositions = {"p", "q"};
    auto rf = [&]() { return random_formula(rng, fp); };
    auto ra = [&]() { return m.agents()[rng.below(m.num_agents())]; };
    auto fail = [&](const std::string& what) {
      if (out.failures.size() < 20) out.failures.push_back("model " + std::to_string(k) + ": " + what);
    };

    auto check = [&](const std::string& label, const Formula& f) {
      ++out.checks;
      auto v = check_validity(m, f);
      if (!v.valid) fail(label + " fails at " + *v.counterexample + ": " + print_formula(f));
    };
    for (auto id : kAllAxioms) {
      AxiomBindings b{ra(), ra(), rf(), rf()};
      check(to_string(id), instantiate_axiom(id, b));
    }
    check("lemma WE/WA", lemma_we_wa(ra(), rf(), rf()));
    check("lemma SE/SA", lemma_se_sa(ra(), rf(), rf()));
    check("lemma WA/SA/top", lemma_wa_sa_top(ra(), ra(), rf()));

    auto local = [&](const RuleInstance& r) {
      ++out.checks;
      auto v = check_rule_locally(m, r);
      if (v.premise_valid) ++out.premises_valid;
      if (!v.holds)
        fail(std::string(to_string(r.rule)) + " conclusion fails at " + *v.counterexample + ": " +
             print_formula(r.conclusion));
    };
    auto monotone = [&](const std::string& label, const Formula& premise, const Formula& conclusion) {
      ++out.checks;
      if (!check_validity(m, premise).valid) return;
      ++out.premises_valid;
      auto v = check_validity(m, conclusion);
      if (!v.valid) fail(label + " conclusion fails at " + *v.counterexample);
    };

    // Premises built to be valid: φ → φ∨χ and ψ∧χ → ψ; plus unconstrained pairs.
    const Formula phi = rf(), psi = rf(), chi = rf();
    const std::vector<std::pair<Formula, Formula>> pairs{
        {phi, Formula::disj(phi, chi)}, {Formula::conj(psi, chi), psi}, {phi, psi}};
    for (const auto& [x, y] : pairs) {
      const auto a = ra();
      local(make_ir2(a, x, y));
      local(make_ir3(a, x, y));
      monotone("WE monotonicity", Formula::implies(x, y),
               Formula::implies(Formula::modal(Modality::WE, a, x), Formula::modal(Modality::WE, a, y)));
      monotone("SE antitonicity", Formula::implies(x, y),
               Formula::implies(Formula::modal(Modality::SE, a, y), Formula::modal(Modality::SE, a, x)));
    }

    // IR4 over a random split of a random subset of distinct agents.
    std::vector<std::string> pool = m.agents();
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
    const std::size_t used = rng.below(pool.size() + 1);
    const std::size_t mcount = used == 0 ? 0 : rng.below(used + 1);
    std::vector<std::string> as(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(mcount));
    std::vector<std::string> bs(pool.begin() + static_cast<std::ptrdiff_t>(mcount),
                                pool.begin() + static_cast<std::ptrdiff_t>(used));
    std::vector<Formula> phis, psis;
    for (std::size_t i = 0; i < as.size(); ++i) phis.push_back(rf());
    for (std::size_t j = 0; j < bs.size(); ++j) psis.push_back(rf());
    const Formula c = conj_all(phis);
    if (!psis.empty()) {
      psis[0] = Formula::conj(Formula::neg(c), rf());  // forces the premise to be valid
    } else if (!phis.empty()) {
      const Formula x = rf();
      phis[0] = Formula::conj(x, Formula::neg(x));
    }
    if (!as.empty() || !bs.empty()) local(make_ir4(as, phis, bs, psis));
  }
  return out;
}

}  // namespace permitmc
