#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "permitmc/errors.hpp"
#include "permitmc/state_set.hpp"

namespace permitmc {

/// Proposition name reserved for the constant `true`; never valid in a valuation.
inline constexpr std::string_view kTopProposition = "__top";

inline constexpr std::uint64_t kDefaultProfileCap = 1'000'000;

/// Profile cap, overridable through PERMITMC_PROFILE_CAP.
inline std::uint64_t profile_cap_from_env() {
  if (const char* v = std::getenv("PERMITMC_PROFILE_CAP"); v != nullptr && *v != '\0') {
    char* end = nullptr;
    auto cap = std::strtoull(v, &end, 10);
    if (end != nullptr && *end == '\0' && cap > 0) return cap;
  }
  return kDefaultProfileCap;
}

/// agent name -> action name, for one state.
using ActionProfile = std::map<std::string, std::string>;

inline std::string format_profile(const ActionProfile& p) {
  std::string out = "(";
  bool first = true;
  for (const auto& [agent, action] : p) {
    if (!first) out += ",";
    first = false;
    out += agent + "=" + action;
  }
  return out + ")";
}

struct TransitionEntry {
  std::string from;
  ActionProfile profile;
  std::string to;

  friend bool operator==(const TransitionEntry&, const TransitionEntry&) = default;
};

/// Name-level description of a candidate transition system, as read from JSON.
/// Nothing here is checked; see validate_model.
struct SystemDescription {
  std::vector<std::string> agents;
  std::vector<std::string> states;
  // state -> agent -> actions
  std::map<std::string, std::map<std::string, std::vector<std::string>>> actions;
  std::map<std::string, std::map<std::string, std::vector<std::string>>> permitted;
  std::vector<TransitionEntry> transitions;
  std::map<std::string, std::vector<std::string>> valuation;

  friend bool operator==(const SystemDescription&, const SystemDescription&) = default;
};

enum class ViolationKind {
  EmptyName,
  DuplicateAgent,
  DuplicateState,
  UnknownState,
  UnknownAgent,
  EmptyActions,
  DuplicateAction,
  EmptyPermitted,
  PermittedNotAvailable,
  DanglingTransition,
  MalformedProfile,
  ContinuityGap,
  ValuationOutsideStates,
  ReservedProposition,
};

struct Violation {
  ViolationKind kind;
  std::string state;
  std::string agent;
  std::string message;
};

using ValidationReport = std::vector<Violation>;

namespace detail {

inline const std::vector<std::string>* lookup(
    const std::map<std::string, std::map<std::string, std::vector<std::string>>>& table,
    const std::string& state, const std::string& agent) {
  auto it = table.find(state);
  if (it == table.end()) return nullptr;
  auto jt = it->second.find(agent);
  if (jt == it->second.end()) return nullptr;
  return &jt->second;
}

inline bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace detail

/// Checks every structural condition on a transition system: nonempty action
/// sets, nonempty permitted subsets, well-formed mechanism entries,
/// continuity over the full profile product, and valuation range.
///
/// Violations are returned as data; an empty report means the description is
/// a valid transition system. Throws CapacityError when a state's profile
/// product exceeds `profile_cap`.
inline ValidationReport validate_model(const SystemDescription& m,
                                       std::uint64_t profile_cap = kDefaultProfileCap) {
  ValidationReport report;
  auto add = [&report](ViolationKind k, std::string s, std::string a, std::string msg) {
    report.push_back({k, std::move(s), std::move(a), std::move(msg)});
  };

  std::set<std::string> agents;
  for (const auto& a : m.agents) {
    if (a.empty()) add(ViolationKind::EmptyName, "", a, "empty agent name");
    if (!agents.insert(a).second) add(ViolationKind::DuplicateAgent, "", a, "duplicate agent " + a);
  }
  std::set<std::string> states;
  for (const auto& s : m.states) {
    if (s.empty()) add(ViolationKind::EmptyName, s, "", "empty state name");
    if (!states.insert(s).second) add(ViolationKind::DuplicateState, s, "", "duplicate state " + s);
  }

  for (const auto* table : {&m.actions, &m.permitted}) {
    const char* what = table == &m.actions ? "actions" : "permitted";
    for (const auto& [s, per_agent] : *table) {
      if (!states.contains(s))
        add(ViolationKind::UnknownState, s, "", std::string(what) + " given for unknown state " + s);
      for (const auto& [a, _] : per_agent)
        if (!agents.contains(a))
          add(ViolationKind::UnknownAgent, s, a, std::string(what) + " given for unknown agent " + a);
    }
  }

  for (const auto& s : m.states) {
    for (const auto& a : m.agents) {
      const auto* acts = detail::lookup(m.actions, s, a);
      const auto* perm = detail::lookup(m.permitted, s, a);
      if (acts == nullptr || acts->empty()) {
        add(ViolationKind::EmptyActions, s, a, "empty action set at (" + s + "," + a + ")");
      } else {
        std::set<std::string> seen;
        for (const auto& i : *acts)
          if (!seen.insert(i).second)
            add(ViolationKind::DuplicateAction, s, a,
                "duplicate action " + i + " at (" + s + "," + a + ")");
      }
      if (perm == nullptr || perm->empty()) {
        add(ViolationKind::EmptyPermitted, s, a, "empty permitted set at (" + s + "," + a + ")");
      } else {
        for (const auto& i : *perm)
          if (acts == nullptr || !detail::contains(*acts, i))
            add(ViolationKind::PermittedNotAvailable, s, a,
                "permitted action " + i + " not available at (" + s + "," + a + ")");
      }
    }
  }

  // Well-formedness of mechanism entries; collect the covered profiles per state.
  std::map<std::string, std::set<ActionProfile>> covered;
  for (const auto& tr : m.transitions) {
    if (!states.contains(tr.from) || !states.contains(tr.to)) {
      add(ViolationKind::DanglingTransition, tr.from, "",
          "transition " + tr.from + " -> " + tr.to + " names an unknown state");
      continue;
    }
    bool ok = tr.profile.size() == m.agents.size();
    for (const auto& [a, i] : tr.profile) {
      const auto* acts = detail::lookup(m.actions, tr.from, a);
      if (!agents.contains(a) || acts == nullptr || !detail::contains(*acts, i)) ok = false;
    }
    if (!ok) {
      add(ViolationKind::MalformedProfile, tr.from, "",
          "malformed profile " + format_profile(tr.profile) + " at " + tr.from);
      continue;
    }
    covered[tr.from].insert(tr.profile);
  }

  // Continuity: every profile in the product has a successor.
  for (const auto& s : m.states) {
    std::vector<const std::vector<std::string>*> axes;
    bool degenerate = false;
    std::uint64_t product = 1;
    for (const auto& a : m.agents) {
      const auto* acts = detail::lookup(m.actions, s, a);
      if (acts == nullptr || acts->empty()) {
        degenerate = true;
        break;
      }
      axes.push_back(acts);
      product *= acts->size();
      if (product > profile_cap)
        throw CapacityError("profile product at state " + s + " exceeds cap " +
                            std::to_string(profile_cap));
    }
    if (degenerate) continue;  // already reported as EmptyActions
    const auto& have = covered[s];
    std::vector<std::size_t> digits(axes.size(), 0);
    for (std::uint64_t k = 0; k < product; ++k) {
      ActionProfile p;
      for (std::size_t j = 0; j < axes.size(); ++j) p[m.agents[j]] = (*axes[j])[digits[j]];
      if (!have.contains(p))
        add(ViolationKind::ContinuityGap, s, "",
            "continuity: no successor for profile " + format_profile(p) + " at " + s);
      for (std::size_t j = 0; j < digits.size(); ++j) {
        if (++digits[j] < axes[j]->size()) break;
        digits[j] = 0;
      }
    }
  }

  for (const auto& [p, members] : m.valuation) {
    if (p == kTopProposition)
      add(ViolationKind::ReservedProposition, "", "",
          "proposition name " + p + " is reserved");
    for (const auto& s : members)
      if (!states.contains(s))
        add(ViolationKind::ValuationOutsideStates, s, "",
            "valuation of " + p + " names unknown state " + s);
  }
  return report;
}

/// Raised by TransitionSystem::build when validation is requested and fails.
class ModelError : public InputError {
public:
  explicit ModelError(ValidationReport report)
      : InputError(summary(report)), report_(std::move(report)) {}

  [[nodiscard]] const ValidationReport& report() const { return report_; }

private:
  static std::string summary(const ValidationReport& r) {
    std::string out = "invalid transition system (" + std::to_string(r.size()) + " violations)";
    if (!r.empty()) out += ": " + r.front().message;
    return out;
  }
  ValidationReport report_;
};

struct BuildOptions {
  bool validate = true;
  std::uint64_t profile_cap = kDefaultProfileCap;
};

/// Indexed, immutable multiagent transition system.
///
/// States, agents and per-(state, agent) actions are addressed by dense
/// indices; names are kept for I/O. The mechanism is an explicit relation:
/// a list of (profile, successor) entries per state.
class TransitionSystem {
public:
  struct Transition {
    std::vector<std::uint32_t> profile;  // action index per agent
    std::size_t target;

    friend bool operator==(const Transition&, const Transition&) = default;
  };

  /// Compiles a description. With `validate` set, throws ModelError when the
  /// description is not a valid transition system. Without it, only
  /// references must resolve (InputError otherwise).
  static TransitionSystem build(const SystemDescription& d, BuildOptions opt = {}) {
    if (opt.validate) {
      auto report = validate_model(d, opt.profile_cap);
      if (!report.empty()) throw ModelError(std::move(report));
    }
    TransitionSystem ts;
    ts.agents_ = d.agents;
    ts.states_ = d.states;
    for (std::size_t i = 0; i < d.agents.size(); ++i)
      if (!ts.agent_index_.emplace(d.agents[i], i).second)
        throw InputError("duplicate agent " + d.agents[i]);
    for (std::size_t i = 0; i < d.states.size(); ++i)
      if (!ts.state_index_.emplace(d.states[i], i).second)
        throw InputError("duplicate state " + d.states[i]);

    const std::size_t na = d.agents.size();
    ts.local_.resize(d.states.size() * na);
    for (std::size_t s = 0; s < d.states.size(); ++s) {
      for (std::size_t a = 0; a < na; ++a) {
        auto& loc = ts.local_[s * na + a];
        if (const auto* acts = detail::lookup(d.actions, d.states[s], d.agents[a])) {
          for (const auto& name : *acts) {
            if (loc.index.emplace(name, loc.names.size()).second) loc.names.push_back(name);
          }
        }
        loc.permitted.assign(loc.names.size(), false);
        if (const auto* perm = detail::lookup(d.permitted, d.states[s], d.agents[a])) {
          for (const auto& name : *perm) {
            auto it = loc.index.find(name);
            if (it == loc.index.end())
              throw InputError("permitted action " + name + " not available at (" + d.states[s] +
                               "," + d.agents[a] + ")");
            loc.permitted[it->second] = true;
          }
        }
      }
    }

    ts.mechanism_.resize(d.states.size());
    for (const auto& tr : d.transitions) {
      auto from = ts.state_index(tr.from);
      Transition t{ts.profile_indices(from, tr.profile), ts.state_index(tr.to)};
      auto& entries = ts.mechanism_[from];
      if (std::find(entries.begin(), entries.end(), t) == entries.end()) entries.push_back(std::move(t));
    }

    for (const auto& [p, members] : d.valuation) {
      if (p == kTopProposition) throw InputError("proposition name __top is reserved");
      StateSet set(d.states.size());
      for (const auto& s : members) set.insert(ts.state_index(s));
      ts.valuation_.emplace(p, std::move(set));
    }
    ts.build_flat_index();
    return ts;
  }

  [[nodiscard]] std::size_t num_states() const { return states_.size(); }
  [[nodiscard]] std::size_t num_agents() const { return agents_.size(); }
  [[nodiscard]] const std::vector<std::string>& states() const { return states_; }
  [[nodiscard]] const std::vector<std::string>& agents() const { return agents_; }
  [[nodiscard]] const std::string& state_name(std::size_t s) const { return states_.at(s); }
  [[nodiscard]] const std::string& agent_name(std::size_t a) const { return agents_.at(a); }

  [[nodiscard]] std::size_t state_index(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    if (it == state_index_.end()) throw InputError("unknown state " + std::string(name));
    return it->second;
  }

  [[nodiscard]] std::size_t agent_index(std::string_view name) const {
    auto it = agent_index_.find(std::string(name));
    if (it == agent_index_.end()) throw InputError("unknown agent " + std::string(name));
    return it->second;
  }

  [[nodiscard]] bool has_agent(std::string_view name) const {
    return agent_index_.contains(std::string(name));
  }

  [[nodiscard]] std::size_t num_actions(std::size_t s, std::size_t a) const {
    return local(s, a).names.size();
  }

  [[nodiscard]] const std::string& action_name(std::size_t s, std::size_t a, std::size_t i) const {
    return local(s, a).names.at(i);
  }

  [[nodiscard]] std::size_t action_index(std::size_t s, std::size_t a, std::string_view name) const {
    const auto& loc = local(s, a);
    auto it = loc.index.find(std::string(name));
    if (it == loc.index.end())
      throw InputError("action " + std::string(name) + " not available at (" + states_[s] + "," +
                       agents_[a] + ")");
    return it->second;
  }

  [[nodiscard]] bool is_permitted(std::size_t s, std::size_t a, std::size_t i) const {
    return local(s, a).permitted.at(i);
  }

  [[nodiscard]] std::span<const Transition> mechanism(std::size_t s) const { return mechanism_.at(s); }

  // Flat views used by the checker's inner loops. Entries of state s occupy
  // [entry_begin(s), entry_begin(s + 1)); no bounds checks.
  [[nodiscard]] std::size_t entry_begin(std::size_t s) const { return entry_begin_[s]; }
  [[nodiscard]] std::size_t entry_target(std::size_t e) const { return entry_target_[e]; }
  [[nodiscard]] std::uint32_t entry_action(std::size_t e, std::size_t a) const {
    return entry_action_[e * agents_.size() + a];
  }
  /// Permission flags of agent a at state s, indexed by action.
  [[nodiscard]] const char* permitted_flags(std::size_t s, std::size_t a) const {
    return permit_flags_.data() + permit_begin_[s * agents_.size() + a];
  }

  /// Truth set of a proposition; absent propositions are false everywhere.
  [[nodiscard]] StateSet proposition(std::string_view p) const {
    if (p == kTopProposition) return StateSet::all(num_states());
    auto it = valuation_.find(std::string(p));
    return it == valuation_.end() ? StateSet(num_states()) : it->second;
  }

  [[nodiscard]] std::vector<std::string> propositions() const {
    std::vector<std::string> out;
    for (const auto& [p, _] : valuation_) out.push_back(p);
    return out;
  }

  [[nodiscard]] StateSet all_states() const { return StateSet::all(num_states()); }
  [[nodiscard]] StateSet no_states() const { return StateSet(num_states()); }

  /// |M|: total number of mechanism entries.
  [[nodiscard]] std::size_t mechanism_size() const {
    std::size_t n = 0;
    for (const auto& e : mechanism_) n += e.size();
    return n;
  }

  /// |Δ|: number of (state, agent, action) triples.
  [[nodiscard]] std::size_t action_space_size() const {
    std::size_t n = 0;
    for (const auto& l : local_) n += l.names.size();
    return n;
  }

  /// True iff every (state, profile) pair has exactly one successor.
  [[nodiscard]] bool deterministic() const {
    for (const auto& entries : mechanism_) {
      std::set<std::vector<std::uint32_t>> seen;
      for (const auto& t : entries)
        if (!seen.insert(t.profile).second) return false;
    }
    return true;
  }

  /// Resolves a name-level profile at state `s`; throws InputError when the
  /// profile does not assign exactly one available action to every agent.
  [[nodiscard]] std::vector<std::uint32_t> profile_indices(std::size_t s, const ActionProfile& p) const {
    if (p.size() != agents_.size())
      throw InputError("malformed profile " + format_profile(p) + " at " + states_.at(s));
    std::vector<std::uint32_t> out(agents_.size());
    for (const auto& [agent, action] : p)
      out[agent_index(agent)] = static_cast<std::uint32_t>(action_index(s, agent_index(agent), action));
    return out;
  }

  [[nodiscard]] ActionProfile profile_names(std::size_t s, std::span<const std::uint32_t> p) const {
    ActionProfile out;
    for (std::size_t a = 0; a < p.size(); ++a) out[agents_[a]] = action_name(s, a, p[a]);
    return out;
  }

  /// { t | (δ, t) ∈ M_s } for a name-level profile.
  [[nodiscard]] StateSet successors(std::string_view state, const ActionProfile& p) const {
    auto s = state_index(state);
    auto idx = profile_indices(s, p);
    StateSet out(num_states());
    for (const auto& t : mechanism_[s])
      if (t.profile == idx) out.insert(t.target);
    return out;
  }

  /// Mechanism entries at `state` whose profile assigns `action` to `agent`.
  [[nodiscard]] std::vector<std::pair<ActionProfile, std::string>> profiles_with_action(
      std::string_view state, std::string_view agent, std::string_view action) const {
    auto s = state_index(state);
    auto a = agent_index(agent);
    auto i = action_index(s, a, action);
    std::vector<std::pair<ActionProfile, std::string>> out;
    for (const auto& t : mechanism_[s])
      if (t.profile[a] == i) out.emplace_back(profile_names(s, t.profile), states_[t.target]);
    return out;
  }

  /// Member names in declaration order.
  [[nodiscard]] std::vector<std::string> names(const StateSet& set) const {
    std::vector<std::string> out;
    for (auto i : set.members()) out.push_back(states_[i]);
    return out;
  }

  /// Member names sorted lexicographically (stable output order).
  [[nodiscard]] std::vector<std::string> sorted_names(const StateSet& set) const {
    auto out = names(set);
    std::sort(out.begin(), out.end());
    return out;
  }

  [[nodiscard]] StateSet set_of(const std::vector<std::string>& members) const {
    StateSet out(num_states());
    for (const auto& m : members) out.insert(state_index(m));
    return out;
  }

  /// Back to name-level form (mechanism entries in stored order).
  [[nodiscard]] SystemDescription describe() const {
    SystemDescription d;
    d.agents = agents_;
    d.states = states_;
    for (std::size_t s = 0; s < num_states(); ++s) {
      for (std::size_t a = 0; a < num_agents(); ++a) {
        const auto& loc = local(s, a);
        d.actions[states_[s]][agents_[a]] = loc.names;
        auto& perm = d.permitted[states_[s]][agents_[a]];
        for (std::size_t i = 0; i < loc.names.size(); ++i)
          if (loc.permitted[i]) perm.push_back(loc.names[i]);
      }
      for (const auto& t : mechanism_[s])
        d.transitions.push_back({states_[s], profile_names(s, t.profile), states_[t.target]});
    }
    for (const auto& [p, set] : valuation_) d.valuation[p] = names(set);
    return d;
  }

private:
  struct LocalActions {
    std::vector<std::string> names;
    std::vector<bool> permitted;
    std::unordered_map<std::string, std::size_t> index;
  };

  void build_flat_index() {
    entry_begin_.assign(1, 0);
    for (const auto& entries : mechanism_) {
      for (const auto& t : entries) {
        entry_target_.push_back(t.target);
        entry_action_.insert(entry_action_.end(), t.profile.begin(), t.profile.end());
      }
      entry_begin_.push_back(entry_target_.size());
    }
    permit_begin_.reserve(local_.size());
    for (const auto& loc : local_) {
      permit_begin_.push_back(permit_flags_.size());
      for (bool b : loc.permitted) permit_flags_.push_back(b ? 1 : 0);
    }
  }

  [[nodiscard]] const LocalActions& local(std::size_t s, std::size_t a) const {
    return local_.at(s * agents_.size() + a);
  }

  std::vector<std::string> agents_;
  std::vector<std::string> states_;
  std::unordered_map<std::string, std::size_t> agent_index_;
  std::unordered_map<std::string, std::size_t> state_index_;
  std::vector<LocalActions> local_;  // row-major by (state, agent)
  std::vector<std::vector<Transition>> mechanism_;
  std::vector<std::size_t> entry_begin_;
  std::vector<std::size_t> entry_target_;
  std::vector<std::uint32_t> entry_action_;  // entry-major, one slot per agent
  std::vector<std::size_t> permit_begin_;
  std::vector<char> permit_flags_;
  std::map<std::string, StateSet> valuation_;
};

inline ValidationReport validate_model(const TransitionSystem& m,
                                       std::uint64_t profile_cap = kDefaultProfileCap) {
  return validate_model(m.describe(), profile_cap);
}

}  // namespace permitmc
