#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "permitmc/errors.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

/// Seeded source of randomness: std::mt19937_64 (fully specified by the
/// standard) with hand-rolled range reduction, since the standard
/// distributions are implementation-defined. Same seed, same stream, on every
/// platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = 0;
    do {
      x = next();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

private:
  std::mt19937_64 engine_;
};

inline std::string agent_name(std::size_t i) {
  if (i < 6) return std::string(1, static_cast<char>('a' + i));
  return "a" + std::to_string(i);
}

inline std::string proposition_name(std::size_t i) {
  static constexpr std::array<const char*, 3> base{"p", "q", "r"};
  if (i < base.size()) return base[i];
  return "p" + std::to_string(i);
}

inline std::string state_name(std::size_t i) { return "s" + std::to_string(i); }

struct GenParams {
  std::uint64_t seed = 0;
  std::size_t num_agents = 2;
  std::size_t num_states = 4;
  std::size_t max_actions = 2;
  std::size_t propositions = 2;
  double permitted_density = 0.6;
  std::size_t branching = 2;
  bool deterministic = false;
  bool single_agent = false;
  std::uint64_t profile_cap = kDefaultProfileCap;
};

/// Random valid transition system (name-level). Continuity holds by
/// construction: every profile in the product is given 1..branching distinct
/// successors (exactly one when deterministic). Throws InputError on
/// out-of-range parameters and CapacityError when a state's profile product
/// exceeds the cap.
inline SystemDescription random_description(const GenParams& p) {
  const std::size_t agents = p.single_agent ? 1 : p.num_agents;
  if (agents == 0 || p.num_states == 0 || p.max_actions == 0 || p.propositions == 0 || p.branching == 0)
    throw InputError("generator counts must be at least 1");
  if (!(p.permitted_density > 0.0 && p.permitted_density <= 1.0))
    throw InputError("permitted density must lie in (0, 1]");
  std::uint64_t worst = 1;
  for (std::size_t a = 0; a < agents; ++a) {
    worst *= p.max_actions;
    if (worst > p.profile_cap) throw CapacityError("profile product exceeds cap");
  }

  Rng rng(p.seed);
  SystemDescription d;
  for (std::size_t a = 0; a < agents; ++a) d.agents.push_back(agent_name(a));
  for (std::size_t s = 0; s < p.num_states; ++s) d.states.push_back(state_name(s));

  for (const auto& s : d.states) {
    for (const auto& a : d.agents) {
      const std::size_t k = 1 + rng.below(p.max_actions);
      auto& acts = d.actions[s][a];
      auto& perm = d.permitted[s][a];
      for (std::size_t i = 1; i <= k; ++i) acts.push_back(std::to_string(i));
      for (const auto& i : acts)
        if (p.permitted_density >= 1.0 || rng.chance(p.permitted_density)) perm.push_back(i);
      if (perm.empty()) perm.push_back(acts[rng.below(acts.size())]);
    }
  }

  const std::size_t max_succ = p.deterministic ? 1 : std::min(p.branching, p.num_states);
  std::vector<std::size_t> pool(p.num_states);
  for (const auto& s : d.states) {
    std::vector<const std::vector<std::string>*> axes;
    for (const auto& a : d.agents) axes.push_back(&d.actions[s][a]);
    std::vector<std::size_t> digits(axes.size(), 0);
    bool done = false;
    while (!done) {
      ActionProfile prof;
      for (std::size_t j = 0; j < axes.size(); ++j) prof[d.agents[j]] = (*axes[j])[digits[j]];
      const std::size_t count = 1 + rng.below(max_succ);
      for (std::size_t k = 0; k < pool.size(); ++k) pool[k] = k;
      for (std::size_t k = 0; k < count; ++k) {
        std::size_t pick = k + rng.below(pool.size() - k);
        std::swap(pool[k], pool[pick]);
        d.transitions.push_back({s, prof, d.states[pool[k]]});
      }
      done = true;
      for (std::size_t j = 0; j < digits.size(); ++j) {
        if (++digits[j] < axes[j]->size()) {
          done = false;
          break;
        }
        digits[j] = 0;
      }
    }
  }

  for (std::size_t k = 0; k < p.propositions; ++k) {
    auto& members = d.valuation[proposition_name(k)];
    for (const auto& s : d.states)
      if (rng.chance(0.5)) members.push_back(s);
  }
  return d;
}

inline TransitionSystem random_model(const GenParams& p) {
  return TransitionSystem::build(random_description(p), {.validate = true, .profile_cap = p.profile_cap});
}

/// Grammar productions the formula generator can choose.
enum class Production { Prop, Top, Bot, Neg, Or, And, Implies, WA, WE, SE, SA };
inline constexpr std::size_t kProductionCount = 11;

using ProductionCounts = std::array<std::size_t, kProductionCount>;

struct FormulaGenParams {
  std::size_t depth = 3;
  std::vector<std::string> agents{"a", "b"};
  std::vector<std::string> propositions{"p", "q"};
  /// Caps modal nesting; unset means bounded only by depth.
  std::optional<std::size_t> max_modal_depth;
  /// Restricts modal productions; empty means all four.
  std::vector<Modality> modalities;
};

namespace detail {

inline Formula gen_formula(Rng& rng, const FormulaGenParams& p, std::size_t depth, std::size_t modal_budget,
                           ProductionCounts* counts) {
  auto note = [&](Production pr) {
    if (counts != nullptr) ++(*counts)[static_cast<std::size_t>(pr)];
  };
  auto leaf = [&]() {
    std::size_t r = rng.below(10);
    if (r == 0) {
      note(Production::Top);
      return Formula::top();
    }
    if (r == 1) {
      note(Production::Bot);
      return Formula::bot();
    }
    note(Production::Prop);
    return Formula::prop(p.propositions[rng.below(p.propositions.size())]);
  };
  if (depth == 0) return leaf();

  const auto& mods = p.modalities.empty() ? std::vector<Modality>(std::begin(kAllModalities), std::end(kAllModalities))
                                          : p.modalities;
  const bool modal_ok = modal_budget > 0 && !p.agents.empty();
  const std::size_t choices = 5 + (modal_ok ? mods.size() : 0);
  const std::size_t pick = rng.below(choices);
  auto sub = [&](std::size_t budget) { return gen_formula(rng, p, depth - 1, budget, counts); };
  switch (pick) {
    case 0: return leaf();
    case 1: note(Production::Neg); return Formula::neg(sub(modal_budget));
    case 2: {
      note(Production::Or);
      auto l = sub(modal_budget);
      return Formula::disj(std::move(l), sub(modal_budget));
    }
    case 3: {
      note(Production::And);
      auto l = sub(modal_budget);
      return Formula::conj(std::move(l), sub(modal_budget));
    }
    case 4: {
      note(Production::Implies);
      auto l = sub(modal_budget);
      return Formula::implies(std::move(l), sub(modal_budget));
    }
    default: break;
  }
  const Modality m = mods[pick - 5];
  note(static_cast<Production>(static_cast<std::size_t>(Production::WA) + static_cast<std::size_t>(m)));
  auto agent = p.agents[rng.below(p.agents.size())];
  return Formula::modal(m, std::move(agent), sub(modal_budget - 1));
}

}  // namespace detail

/// Random formula of generation depth at most `p.depth` (each constructor
/// adds one level). Optionally tallies the productions used.
inline Formula random_formula(Rng& rng, const FormulaGenParams& p, ProductionCounts* counts = nullptr) {
  if (p.propositions.empty()) throw InputError("formula generator needs at least one proposition");
  const std::size_t budget = p.max_modal_depth.value_or(p.depth);
  return detail::gen_formula(rng, p, p.depth, budget, counts);
}

inline Formula random_formula(std::uint64_t seed, const FormulaGenParams& p, ProductionCounts* counts = nullptr) {
  Rng rng(seed);
  return random_formula(rng, p, counts);
}

}  // namespace permitmc
