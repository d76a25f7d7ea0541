#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <string>
#include <utility>
#include <vector>

#include "permitmc/checker.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/generators.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

/// A set of truth sets over one model, kept sorted by member lists and free
/// of duplicates so that two families compare equal iff they hold the same sets.
class TruthFamily {
public:
  TruthFamily() = default;
  explicit TruthFamily(std::vector<TruthSet> members) : members_(std::move(members)) { normalize(); }

  void insert(TruthSet s) {
    members_.push_back(std::move(s));
    normalize();
  }

  [[nodiscard]] bool contains(const TruthSet& s) const {
    return std::binary_search(members_.begin(), members_.end(), s);
  }

  [[nodiscard]] const std::vector<TruthSet>& members() const { return members_; }
  [[nodiscard]] std::size_t size() const { return members_.size(); }

  friend bool operator==(const TruthFamily&, const TruthFamily&) = default;

private:
  void normalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  std::vector<TruthSet> members_;
};

/// {[[p]], [[¬p]], S, ∅}; fewer members when some coincide.
inline TruthFamily make_prop_family(const TransitionSystem& m, std::string_view p) {
  auto tp = m.proposition(p);
  return TruthFamily({tp, tp.complement(), m.all_states(), m.no_states()});
}

/// Every subset of the state set. Only sensible for small models.
inline TruthFamily make_powerset_family(const TransitionSystem& m) {
  if (m.num_states() > 16) throw CapacityError("powerset family limited to 16 states");
  std::vector<TruthSet> all;
  for (std::uint32_t bits = 0; bits < (1U << m.num_states()); ++bits) {
    TruthSet s(m.num_states());
    for (std::size_t i = 0; i < m.num_states(); ++i)
      if ((bits >> i) & 1U) s.insert(i);
    all.push_back(std::move(s));
  }
  return TruthFamily(std::move(all));
}

struct ClosureArrow {
  TruthSet source;
  TruthSet image;
};

/// Image of each family member under one modality for one agent.
inline std::vector<ClosureArrow> closure_step(const TransitionSystem& m, const TruthFamily& family, Modality mod,
                                              std::size_t agent) {
  std::vector<ClosureArrow> out;
  for (const auto& member : family.members()) out.push_back({member, truth_set_modal(m, mod, agent, member)});
  return out;
}

inline std::vector<ClosureArrow> closure_step(const TransitionSystem& m, const TruthFamily& family, Modality mod,
                                              std::string_view agent) {
  return closure_step(m, family, mod, m.agent_index(agent));
}

struct ClosureViolation {
  enum class Kind { Complement, Union, Modal } kind;
  std::optional<Modality> modality;
  std::string agent;
  TruthSet source;
  std::optional<TruthSet> other;  // second operand of a union
  TruthSet image;
};

struct ClosureResult {
  bool closed = true;
  std::vector<ClosureViolation> violations;
};

/// Checks closure under complement, pairwise union and each listed modality
/// for each listed agent. An empty agent list means every agent of the model.
inline ClosureResult verify_closure(const TransitionSystem& m, const TruthFamily& family,
                                    const std::vector<Modality>& modalities,
                                    std::vector<std::string> agents = {}) {
  if (agents.empty()) agents = m.agents();
  ClosureResult r;
  const auto& mem = family.members();
  for (const auto& x : mem) {
    auto c = x.complement();
    if (!family.contains(c)) r.violations.push_back({ClosureViolation::Kind::Complement, {}, "", x, {}, c});
  }
  for (std::size_t i = 0; i < mem.size(); ++i) {
    for (std::size_t j = i + 1; j < mem.size(); ++j) {
      auto u = mem[i] | mem[j];
      if (!family.contains(u)) r.violations.push_back({ClosureViolation::Kind::Union, {}, "", mem[i], mem[j], u});
    }
  }
  for (auto mod : modalities) {
    for (const auto& a : agents) {
      for (auto& arrow : closure_step(m, family, mod, a)) {
        if (!family.contains(arrow.image))
          r.violations.push_back(
              {ClosureViolation::Kind::Modal, mod, a, std::move(arrow.source), {}, std::move(arrow.image)});
      }
    }
  }
  r.closed = r.violations.empty();
  return r;
}

struct ClosureCase {
  Modality modality;
  std::string agent;
  std::vector<ClosureArrow> arrows;
};

struct WitnessReport {
  Modality target;
  std::string proposition;
  TruthFamily family;
  std::vector<ClosureCase> closed_under;
  Formula escape_formula;
  TruthSet escape_set;
};

struct WitnessResult {
  std::optional<WitnessReport> report;
  std::string failure;  // empty on success

  [[nodiscard]] bool ok() const { return report.has_value(); }
};

/// All modalities other than `target`.
inline std::vector<Modality> other_modalities(Modality target) {
  std::vector<Modality> out;
  for (auto m : kAllModalities)
    if (m != target) out.push_back(m);
  return out;
}

/// Witness check for the undefinability of `target`: the family must be
/// closed under Boolean operations and under `closure` (by default the other
/// three modalities) for every agent, while target_x p leaves the family for
/// some agent x.
inline WitnessResult verify_witness(const TransitionSystem& m, Modality target, std::string_view prop,
                                    const TruthFamily& family,
                                    std::optional<std::vector<Modality>> closure = std::nullopt) {
  const auto mods = closure.value_or(other_modalities(target));
  auto cl = verify_closure(m, family, mods);
  if (!cl.closed) {
    const auto& v = cl.violations.front();
    std::string what = v.kind == ClosureViolation::Kind::Complement ? "complement"
                       : v.kind == ClosureViolation::Kind::Union    ? "union"
                                                                    : std::string(to_string(*v.modality)) + "_" + v.agent;
    return {std::nullopt, "family not closed under " + what};
  }
  const auto p = m.proposition(prop);
  if (!family.contains(p)) return {std::nullopt, "family does not contain [[" + std::string(prop) + "]]"};

  for (std::size_t a = 0; a < m.num_agents(); ++a) {
    auto image = truth_set_modal(m, target, a, p);
    if (family.contains(image)) continue;
    WitnessReport rep{target, std::string(prop), family, {},
                      Formula::modal(target, m.agent_name(a), Formula::prop(std::string(prop))), image};
    for (auto mod : mods)
      for (std::size_t b = 0; b < m.num_agents(); ++b)
        rep.closed_under.push_back({mod, m.agent_name(b), closure_step(m, family, mod, b)});
    return {std::move(rep), ""};
  }
  return {std::nullopt, "no escape: " + std::string(to_string(target)) + "_x " + std::string(prop) +
                            " stays inside the family for every agent"};
}

inline WitnessResult verify_witness(const TransitionSystem& m, Modality target, std::string_view prop,
                                    std::optional<std::vector<Modality>> closure = std::nullopt) {
  return verify_witness(m, target, prop, make_prop_family(m, prop), std::move(closure));
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

struct SearchBounds {
  std::size_t max_states = 3;
  std::size_t agents = 2;
  std::size_t max_actions = 2;
  bool allow_forbidden = true;  // may D be a proper subset of Δ
  bool deterministic = false;
  std::optional<std::vector<Modality>> closure;  // default: the other three
};

struct SearchResult {
  std::optional<SystemDescription> model;
  std::optional<WitnessReport> report;
  std::uint64_t candidates = 0;
  /// Set when the complete enumeration ran and no witness exists in the bounds.
  bool exhausted = false;
  std::string method;  // "sampling" or "enumeration"

  [[nodiscard]] bool found() const { return model.has_value(); }
};

namespace detail {

inline SystemDescription sample_candidate(Rng& rng, const SearchBounds& b) {
  SystemDescription d;
  const std::size_t n = 2 + rng.below(b.max_states - 1);
  for (std::size_t a = 0; a < b.agents; ++a) d.agents.push_back(agent_name(a));
  for (std::size_t s = 0; s < n; ++s) d.states.push_back(state_name(s));

  for (const auto& s : d.states) {
    for (const auto& a : d.agents) {
      const std::size_t k = 1 + rng.below(b.max_actions);
      auto& acts = d.actions[s][a];
      auto& perm = d.permitted[s][a];
      for (std::size_t i = 1; i <= k; ++i) acts.push_back(std::to_string(i));
      if (!b.allow_forbidden) {
        perm = acts;
        continue;
      }
      for (const auto& i : acts)
        if (rng.chance(0.5)) perm.push_back(i);
      if (perm.empty()) perm.push_back(acts[rng.below(k)]);
    }
  }

  for (const auto& s : d.states) {
    std::vector<std::size_t> digits(d.agents.size(), 0);
    for (;;) {
      ActionProfile prof;
      for (std::size_t j = 0; j < d.agents.size(); ++j) prof[d.agents[j]] = d.actions[s][d.agents[j]][digits[j]];
      if (b.deterministic) {
        d.transitions.push_back({s, prof, d.states[rng.below(n)]});
      } else {
        // Random nonempty subset of successors.
        std::uint32_t mask = 0;
        while (mask == 0) mask = static_cast<std::uint32_t>(rng.below(std::size_t{1} << n));
        for (std::size_t t = 0; t < n; ++t)
          if ((mask >> t) & 1U) d.transitions.push_back({s, prof, d.states[t]});
      }
      std::size_t j = 0;
      while (j < digits.size() && ++digits[j] == d.actions[s][d.agents[j]].size()) digits[j++] = 0;
      if (j == digits.size()) break;
    }
  }

  auto& members = d.valuation["p"];
  for (const auto& s : d.states)
    if (rng.chance(0.5)) members.push_back(s);
  return d;
}

}  // namespace detail

namespace detail {

// Where the successors of one profile lie relative to [[p]].
enum class Outcome : std::uint8_t { Inside, Outside, Both };

struct LocalType {
  std::vector<std::size_t> actions;        // per agent
  std::vector<std::uint32_t> permitted;    // bitmask per agent
  std::vector<Outcome> outcomes;           // per profile, agent 0 varies fastest
};

inline constexpr std::size_t kMaxEnumAgents = 3;

// Bit (mod, agent, X) for X in {[[p]], [[!p]], S, empty}: does a state of this
// local type belong to [[mod_agent X]]? Membership depends on nothing else.
inline std::uint64_t type_signature(const LocalType& t) {
  const std::size_t na = t.actions.size();
  std::uint64_t bits = 0;
  std::vector<char> ens;
  std::vector<char> adm;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t x = 0; x < 4; ++x) {
      ens.assign(t.actions[a], 1);
      adm.assign(t.actions[a], 0);
      std::size_t stride = 1;
      for (std::size_t b = 0; b < a; ++b) stride *= t.actions[b];
      for (std::size_t k = 0; k < t.outcomes.size(); ++k) {
        const std::size_t i = (k / stride) % t.actions[a];
        const Outcome o = t.outcomes[k];
        bool inside = false;
        bool meets = false;
        switch (x) {
          case 0: inside = o == Outcome::Inside; meets = o != Outcome::Outside; break;
          case 1: inside = o == Outcome::Outside; meets = o != Outcome::Inside; break;
          case 2: inside = meets = true; break;
          default: break;
        }
        if (!inside) ens[i] = 0;
        if (meets) adm[i] = 1;
      }
      bool wa = false, we = false, se = true, sa = true;
      for (std::size_t i = 0; i < t.actions[a]; ++i) {
        const bool perm = (t.permitted[a] >> i) & 1U;
        wa = wa || (perm && adm[i]);
        we = we || (perm && ens[i]);
        se = se && (perm || !ens[i]);
        sa = sa && (perm || !adm[i]);
      }
      const bool vals[4] = {wa, we, se, sa};
      for (std::size_t mod = 0; mod < 4; ++mod)
        if (vals[mod]) bits |= std::uint64_t{1} << ((mod * kMaxEnumAgents + a) * 4 + x);
    }
  }
  return bits;
}

inline std::uint64_t modality_mask(const std::vector<Modality>& mods, std::size_t agents) {
  std::uint64_t mask = 0;
  for (auto m : mods)
    for (std::size_t a = 0; a < agents; ++a)
      mask |= std::uint64_t{0xF} << ((static_cast<std::size_t>(m) * kMaxEnumAgents + a) * 4);
  return mask;
}

// States s0, s1 in [[p]] carry the two local types; s2 is a sink outside [[p]].
inline SystemDescription build_from_types(const LocalType& x, const LocalType& y, std::size_t agents) {
  SystemDescription d;
  for (std::size_t a = 0; a < agents; ++a) d.agents.push_back(agent_name(a));
  d.states = {"s0", "s1", "s2"};
  const LocalType* types[2] = {&x, &y};
  for (std::size_t s = 0; s < 2; ++s) {
    const auto& t = *types[s];
    const auto& sn = d.states[s];
    for (std::size_t a = 0; a < agents; ++a) {
      for (std::size_t i = 1; i <= t.actions[a]; ++i) {
        d.actions[sn][d.agents[a]].push_back(std::to_string(i));
        if ((t.permitted[a] >> (i - 1)) & 1U) d.permitted[sn][d.agents[a]].push_back(std::to_string(i));
      }
    }
    for (std::size_t k = 0; k < t.outcomes.size(); ++k) {
      ActionProfile prof;
      std::size_t rest = k;
      for (std::size_t a = 0; a < agents; ++a) {
        prof[d.agents[a]] = std::to_string(rest % t.actions[a] + 1);
        rest /= t.actions[a];
      }
      if (t.outcomes[k] != Outcome::Outside) d.transitions.push_back({sn, prof, "s0"});
      if (t.outcomes[k] != Outcome::Inside) d.transitions.push_back({sn, prof, "s2"});
    }
  }
  ActionProfile idle;
  for (const auto& a : d.agents) {
    d.actions["s2"][a] = {"1"};
    d.permitted["s2"][a] = {"1"};
    idle[a] = "1";
  }
  d.transitions.push_back({"s2", idle, "s2"});
  d.valuation["p"] = {"s0", "s1"};
  return d;
}

}  // namespace detail

/// Complete search over local state types. A truth-set pattern lies in
/// {[[p]], [[!p]], S, empty} iff it is constant on [[p]] and on its
/// complement, and a state's membership in any modal truth set over that
/// family depends only on its own actions, permissions, and on whether each
/// profile's successors fall inside [[p]], outside it, or both. A witness
/// therefore exists iff two local types agree on every closure modality and
/// disagree on the target; the state count matters only in that three states
/// are needed.
inline SearchResult enumerate_witness(Modality target, const SearchBounds& bounds,
                                      std::uint64_t max_types = 50'000'000) {
  if (bounds.agents == 0 || bounds.agents > detail::kMaxEnumAgents || bounds.max_actions == 0)
    throw InputError("enumeration supports 1 to 3 agents and at least 1 action");
  SearchResult r;
  r.method = "enumeration";
  if (bounds.max_states < 3) {
    r.exhausted = true;
    return r;
  }

  const std::size_t na = bounds.agents;
  std::uint64_t estimate = 0;
  {
    std::vector<std::size_t> ks(na, 1);
    for (;;) {
      std::uint64_t profiles = 1, perms = 1, outcomes = 1;
      for (auto k : ks) {
        profiles *= k;
        perms *= bounds.allow_forbidden ? (std::uint64_t{1} << k) - 1 : 1;
      }
      for (std::uint64_t i = 0; i < profiles; ++i) outcomes *= bounds.deterministic ? 2 : 3;
      estimate += perms * outcomes;
      std::size_t j = 0;
      while (j < na && ++ks[j] > bounds.max_actions) ks[j++] = 1;
      if (j == na) break;
    }
  }
  if (estimate > max_types) throw CapacityError("local type space too large: " + std::to_string(estimate));

  const std::uint64_t closure_mask =
      detail::modality_mask(bounds.closure.value_or(other_modalities(target)), na);
  const std::uint64_t target_bit = std::uint64_t{1} << (static_cast<std::size_t>(target) * detail::kMaxEnumAgents * 4);
  // closure signature -> first type seen with the target bit clear / set
  std::unordered_map<std::uint64_t, std::pair<std::optional<detail::LocalType>, std::optional<detail::LocalType>>> seen;

  detail::LocalType t;
  t.actions.assign(na, 1);
  for (;;) {
    std::size_t profiles = 1;
    for (auto k : t.actions) profiles *= k;
    t.permitted.assign(na, 1);
    for (;;) {
      if (!bounds.allow_forbidden)
        for (std::size_t a = 0; a < na; ++a) t.permitted[a] = (1U << t.actions[a]) - 1;
      t.outcomes.assign(profiles, detail::Outcome::Inside);
      const auto last = bounds.deterministic ? detail::Outcome::Outside : detail::Outcome::Both;
      for (;;) {
        ++r.candidates;
        const auto sig = detail::type_signature(t);
        auto& slot = seen[sig & closure_mask];
        auto& mine = (sig & target_bit) ? slot.second : slot.first;
        if (!mine) mine = t;
        if (slot.first && slot.second) {
          auto d = detail::build_from_types(*slot.first, *slot.second, na);
          auto w = verify_witness(TransitionSystem::build(d), target, "p", bounds.closure);
          if (!w.ok()) throw std::logic_error("type enumeration produced a non-witness: " + w.failure);
          r.model = std::move(d);
          r.report = std::move(w.report);
          return r;
        }
        std::size_t k = 0;
        while (k < profiles && t.outcomes[k] == last) t.outcomes[k++] = detail::Outcome::Inside;
        if (k == profiles) break;
        t.outcomes[k] = static_cast<detail::Outcome>(static_cast<int>(t.outcomes[k]) + 1);
      }
      if (!bounds.allow_forbidden) break;
      std::size_t a = 0;
      while (a < na && ++t.permitted[a] == (1U << t.actions[a])) t.permitted[a++] = 1;
      if (a == na) break;
    }
    std::size_t a = 0;
    while (a < na && ++t.actions[a] > bounds.max_actions) t.actions[a++] = 1;
    if (a == na) break;
  }
  r.exhausted = true;
  return r;
}

/// Samples random small models (seeded) until one passes verify_witness for
/// `target` over the family {[[p]], [[!p]], S, empty}. When `budget` samples
/// find nothing, falls back to enumerate_witness, which either produces a
/// witness or establishes that none exists within the bounds. Deterministic in
/// (target, bounds, seed, budget).
inline SearchResult search_witness(Modality target, const SearchBounds& bounds, std::uint64_t seed,
                                   std::uint64_t budget = 20'000) {
  if (bounds.max_states < 2 || bounds.agents == 0 || bounds.max_actions == 0)
    throw InputError("search bounds need at least 2 states, 1 agent and 1 action");
  if (bounds.max_states > 8) throw CapacityError("witness search limited to 8 states");
  Rng rng(seed);
  SearchResult r;
  r.method = "sampling";
  while (r.candidates < budget) {
    auto d = detail::sample_candidate(rng, bounds);
    ++r.candidates;
    auto m = TransitionSystem::build(d, {.validate = false});
    auto p = m.proposition("p");
    if (p.empty() || p.is_full()) continue;  // a trivial family cannot separate anything
    auto w = verify_witness(m, target, "p", bounds.closure);
    if (w.ok()) {
      r.model = std::move(d);
      r.report = std::move(w.report);
      return r;
    }
  }
  auto e = enumerate_witness(target, bounds);
  e.candidates += r.candidates;
  return e;
}

// ---------------------------------------------------------------------------
// Exhaustive formula sweep
// ---------------------------------------------------------------------------

struct SweepResult {
  std::uint64_t formulas = 0;
  std::vector<Formula> escapes;  // at most `max_escapes` kept
};

/// Enumerates every formula of constructor depth at most `depth` over the
/// proposition, the constants, ¬, ∨ and the given modalities for every agent,
/// and reports those whose truth set falls outside `family`. Truth sets are
/// built from the children's sets, so each formula costs one set operation.
/// Formulas of the last level are counted without being materialized unless
/// they escape.
inline SweepResult sweep_formulas(const TransitionSystem& m, const TruthFamily& family,
                                  const std::vector<Modality>& modalities, std::string_view prop,
                                  std::size_t depth = 3, std::size_t max_escapes = 16) {
  struct Item {
    Formula f;
    TruthSet set;
  };
  SweepResult r;
  auto note = [&](const TruthSet& set, auto&& make) {
    ++r.formulas;
    if (!family.contains(set) && r.escapes.size() < max_escapes) r.escapes.push_back(make());
  };

  std::vector<Item> all;  // formulas of depth < current level
  for (auto f : {Formula::prop(std::string(prop)), Formula::top(), Formula::bot()}) {
    auto set = model_check(m, f);
    note(set, [&] { return f; });
    all.push_back({f, set});
  }
  std::size_t frontier = 0;  // first index of the previous level in `all`
  for (std::size_t level = 1; level <= depth; ++level) {
    const bool last = level == depth;
    const std::size_t n = all.size();
    std::vector<Item> next;
    auto emit = [&](TruthSet set, auto&& make) {
      note(set, make);
      if (!last) next.push_back({make(), std::move(set)});
    };
    // Each new formula has at least one child from the previous level, so
    // every formula is produced exactly once, at its own depth.
    for (std::size_t i = frontier; i < n; ++i) {
      const auto& x = all[i];
      emit(x.set.complement(), [&] { return Formula::neg(x.f); });
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = (i < frontier ? frontier : 0); j < n; ++j)
        emit(all[i].set | all[j].set, [&] { return Formula::disj(all[i].f, all[j].f); });
    for (auto mod : modalities)
      for (std::size_t a = 0; a < m.num_agents(); ++a)
        for (std::size_t i = frontier; i < n; ++i)
          emit(truth_set_modal(m, mod, a, all[i].set),
               [&] { return Formula::modal(mod, m.agent_name(a), all[i].f); });
    frontier = n;
    for (auto& it : next) all.push_back(std::move(it));
  }
  return r;
}

}  // namespace permitmc
