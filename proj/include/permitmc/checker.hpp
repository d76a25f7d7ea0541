#pragma once

#include <cstddef>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "permitmc/formula.hpp"
#include "permitmc/model.hpp"
#include "permitmc/state_set.hpp"

namespace permitmc {

// ---------------------------------------------------------------------------
// Action-level relations
// ---------------------------------------------------------------------------

/// Action i of agent a at state s ensures `target`: every mechanism entry with
/// δ_a = i leads into `target`. Vacuously true when no entry uses i.
inline bool ensures(const TransitionSystem& m, std::size_t s, std::size_t a, std::size_t i,
                    const TruthSet& target) {
  for (const auto& t : m.mechanism(s))
    if (t.profile[a] == i && !target.contains(t.target)) return false;
  return true;
}

/// Action i of agent a at state s admits `target`: some entry with δ_a = i
/// leads into `target`.
inline bool admits(const TransitionSystem& m, std::size_t s, std::size_t a, std::size_t i,
                   const TruthSet& target) {
  for (const auto& t : m.mechanism(s))
    if (t.profile[a] == i && target.contains(t.target)) return true;
  return false;
}

inline bool ensures(const TransitionSystem& m, std::string_view s, std::string_view a, std::string_view i,
                    const TruthSet& target) {
  auto si = m.state_index(s);
  auto ai = m.agent_index(a);
  return ensures(m, si, ai, m.action_index(si, ai, i), target);
}

inline bool admits(const TransitionSystem& m, std::string_view s, std::string_view a, std::string_view i,
                   const TruthSet& target) {
  auto si = m.state_index(s);
  auto ai = m.agent_index(a);
  return admits(m, si, ai, m.action_index(si, ai, i), target);
}

// ---------------------------------------------------------------------------
// Truth-set operations, one pass over the mechanism each
// ---------------------------------------------------------------------------

/// [[WA_a ψ]]: states with an entry whose a-action is permitted and whose
/// successor satisfies ψ. Stops scanning a state at the first such entry.
inline TruthSet truth_set_wa(const TransitionSystem& m, std::size_t a, const TruthSet& psi) {
  TruthSet collector(m.num_states());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const char* perm = m.permitted_flags(s, a);
    for (std::size_t e = m.entry_begin(s); e < m.entry_begin(s + 1); ++e) {
      if (perm[m.entry_action(e, a)] && psi.contains(m.entry_target(e))) {
        collector.insert(s);
        break;
      }
    }
  }
  return collector;
}

namespace detail {

// Actions of `a` at `s` that ensure ψ: start from all of Δ_a^s and strike
// δ_a for every entry landing outside ψ.
inline void collect_ensurers(const TransitionSystem& m, std::size_t s, std::size_t a, const TruthSet& psi,
                             std::vector<char>& ensurer) {
  ensurer.assign(m.num_actions(s, a), 1);
  for (std::size_t e = m.entry_begin(s); e < m.entry_begin(s + 1); ++e)
    if (!psi.contains(m.entry_target(e))) ensurer[m.entry_action(e, a)] = 0;
}

}  // namespace detail

/// [[WE_a ψ]]: states where some permitted action ensures ψ.
inline TruthSet truth_set_we(const TransitionSystem& m, std::size_t a, const TruthSet& psi) {
  TruthSet collector(m.num_states());
  std::vector<char> ensurer;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    detail::collect_ensurers(m, s, a, psi, ensurer);
    const char* perm = m.permitted_flags(s, a);
    for (std::size_t i = 0; i < ensurer.size(); ++i) {
      if (ensurer[i] && perm[i]) {
        collector.insert(s);
        break;
      }
    }
  }
  return collector;
}

/// [[SE_a ψ]]: states where every action ensuring ψ is permitted.
inline TruthSet truth_set_se(const TransitionSystem& m, std::size_t a, const TruthSet& psi) {
  TruthSet collector(m.num_states());
  std::vector<char> ensurer;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    detail::collect_ensurers(m, s, a, psi, ensurer);
    const char* perm = m.permitted_flags(s, a);
    bool subset = true;
    for (std::size_t i = 0; i < ensurer.size(); ++i) {
      if (ensurer[i] && !perm[i]) {
        subset = false;
        break;
      }
    }
    if (subset) collector.insert(s);
  }
  return collector;
}

/// [[SA_a ψ]]: all states minus those with an entry whose a-action is not
/// permitted and whose successor satisfies ψ.
inline TruthSet truth_set_sa(const TransitionSystem& m, std::size_t a, const TruthSet& psi) {
  TruthSet sieve = m.all_states();
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const char* perm = m.permitted_flags(s, a);
    for (std::size_t e = m.entry_begin(s); e < m.entry_begin(s + 1); ++e) {
      if (!perm[m.entry_action(e, a)] && psi.contains(m.entry_target(e))) {
        sieve.erase(s);
        break;
      }
    }
  }
  return sieve;
}

inline TruthSet truth_set_modal(const TransitionSystem& m, Modality mod, std::size_t a, const TruthSet& psi) {
  switch (mod) {
    case Modality::WA: return truth_set_wa(m, a, psi);
    case Modality::WE: return truth_set_we(m, a, psi);
    case Modality::SE: return truth_set_se(m, a, psi);
    case Modality::SA: return truth_set_sa(m, a, psi);
  }
  return m.no_states();
}

// ---------------------------------------------------------------------------
// Global model checking
// ---------------------------------------------------------------------------

/// Computes truth sets bottom-up, caching one truth set per structurally
/// distinct subformula. A context is bound to one model and is not shared
/// between threads.
class ModelChecker {
public:
  explicit ModelChecker(const TransitionSystem& m) : model_(m) {}

  [[nodiscard]] const TransitionSystem& model() const { return model_; }

  TruthSet truth_set(const Formula& f) {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    TruthSet result = compute(f);
    memo_.emplace(f, result);
    return result;
  }

  [[nodiscard]] std::size_t cache_size() const { return memo_.size(); }

private:
  TruthSet compute(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Prop:
        return model_.proposition(f.name());
      case Formula::Kind::Neg:
        return truth_set(f.child()).complement();
      case Formula::Kind::Or:
        return truth_set(f.left()) | truth_set(f.right());
      case Formula::Kind::Modal: {
        auto psi = truth_set(f.child());
        return truth_set_modal(model_, f.modality(), model_.agent_index(f.agent()), psi);
      }
    }
    return model_.no_states();
  }

  const TransitionSystem& model_;
  std::unordered_map<Formula, TruthSet, FormulaHash> memo_;
};

/// [[φ]] in `m`. Throws InputError when φ names an agent unknown to `m`.
inline TruthSet model_check(const TransitionSystem& m, const Formula& f) {
  ModelChecker mc(m);
  return mc.truth_set(f);
}

// ---------------------------------------------------------------------------
// Naive per-state oracle
// ---------------------------------------------------------------------------

namespace detail {

inline bool naive_sat(const TransitionSystem& m, std::size_t s, const Formula& f);

// (s, i) ~>_a φ : every entry with δ_a = i leads to a state satisfying φ.
inline bool naive_ensures(const TransitionSystem& m, std::size_t s, std::size_t a, std::size_t i,
                          const Formula& f) {
  for (const auto& t : m.mechanism(s))
    if (t.profile[a] == i && !naive_sat(m, t.target, f)) return false;
  return true;
}

inline bool naive_sat(const TransitionSystem& m, std::size_t s, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Prop:
      return f.name() == kTopProposition || m.proposition(f.name()).contains(s);
    case Formula::Kind::Neg:
      return !naive_sat(m, s, f.child());
    case Formula::Kind::Or:
      return naive_sat(m, s, f.left()) || naive_sat(m, s, f.right());
    case Formula::Kind::Modal:
      break;
  }
  const auto a = m.agent_index(f.agent());
  const auto body = f.child();
  const auto not_body = Formula::neg(body);
  const auto n = m.num_actions(s, a);
  switch (f.modality()) {
    case Modality::WA:  // some permitted i with (s,i) not~> ¬φ
      for (std::size_t i = 0; i < n; ++i)
        if (m.is_permitted(s, a, i) && !naive_ensures(m, s, a, i, not_body)) return true;
      return false;
    case Modality::WE:  // some permitted i with (s,i) ~> φ
      for (std::size_t i = 0; i < n; ++i)
        if (m.is_permitted(s, a, i) && naive_ensures(m, s, a, i, body)) return true;
      return false;
    case Modality::SE:  // every i with (s,i) ~> φ is permitted
      for (std::size_t i = 0; i < n; ++i)
        if (naive_ensures(m, s, a, i, body) && !m.is_permitted(s, a, i)) return false;
      return true;
    case Modality::SA:  // every i with (s,i) not~> ¬φ is permitted
      for (std::size_t i = 0; i < n; ++i)
        if (!naive_ensures(m, s, a, i, not_body) && !m.is_permitted(s, a, i)) return false;
      return true;
  }
  return false;
}

}  // namespace detail

/// s ⊩ φ by direct recursion on the satisfaction clauses; no caching and no
/// per-state algorithms. Kept independent of model_check to serve as its oracle.
inline bool check_state_naive(const TransitionSystem& m, std::string_view state, const Formula& f) {
  return detail::naive_sat(m, m.state_index(state), f);
}

inline bool check_state_naive(const TransitionSystem& m, std::size_t state, const Formula& f) {
  if (state >= m.num_states()) throw InputError("state index out of range");
  return detail::naive_sat(m, state, f);
}

}  // namespace permitmc
