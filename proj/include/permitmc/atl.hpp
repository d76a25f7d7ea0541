#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permitmc/checker.hpp"
#include "permitmc/errors.hpp"
#include "permitmc/formula.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

inline constexpr std::size_t kDefaultAtlAgentCap = 6;

/// ⟨base, 𝒟⟩ where bit a of `permitted` says agent a acted within its
/// permitted set on the way in.
struct AtlState {
  std::size_t base;
  std::uint32_t permitted;

  friend bool operator==(const AtlState&, const AtlState&) = default;
};

/// Concurrent game structure obtained from a transition system. States are
/// indexed as base * 2^n + mask. Transitions out of ⟨s, 𝒟⟩ do not depend on
/// 𝒟 and are stored once per base state: `delta(s)` maps a flattened move
/// vector (agent 0 varying fastest, Nature last) to a successor index.
class AtlModel {
public:
  [[nodiscard]] const std::vector<std::string>& agents() const { return agents_; }
  [[nodiscard]] std::size_t num_agents() const { return agents_.size(); }
  [[nodiscard]] std::size_t original_agents() const { return original_; }
  [[nodiscard]] bool has_nature() const { return agents_.size() > original_; }
  [[nodiscard]] const std::string& nature_name() const { return agents_.back(); }

  [[nodiscard]] std::size_t num_states() const { return states_.size(); }
  [[nodiscard]] const AtlState& state(std::size_t i) const { return states_.at(i); }
  [[nodiscard]] const std::vector<AtlState>& states() const { return states_; }
  [[nodiscard]] std::size_t index(std::size_t base, std::uint32_t mask) const {
    return base * (std::size_t{1} << original_) + mask;
  }

  [[nodiscard]] const std::vector<std::string>& base_names() const { return base_names_; }
  [[nodiscard]] std::string state_label(std::size_t i) const {
    const auto& st = states_.at(i);
    std::string out = "<" + base_names_[st.base] + ",{";
    bool first = true;
    for (std::size_t a = 0; a < original_; ++a) {
      if (!((st.permitted >> a) & 1U)) continue;
      if (!first) out += ",";
      first = false;
      out += agents_[a];
    }
    return out + "}>";
  }

  /// Move count of `agent` at base state `base`.
  [[nodiscard]] std::size_t moves(std::size_t base, std::size_t agent) const { return moves_.at(base).at(agent); }
  [[nodiscard]] const std::vector<std::size_t>& delta(std::size_t base) const { return delta_.at(base); }

  /// Name of an original agent's move (its action name); Nature's moves are numbered.
  [[nodiscard]] std::string move_name(std::size_t base, std::size_t agent, std::size_t k) const {
    if (agent < original_) return action_names_.at(base).at(agent).at(k);
    return std::to_string(k);
  }

  [[nodiscard]] std::size_t agent_index(std::string_view name) const {
    for (std::size_t a = 0; a < agents_.size(); ++a)
      if (agents_[a] == name) return a;
    throw InputError("unknown ATL agent " + std::string(name));
  }

  [[nodiscard]] bool holds(std::size_t state, std::string_view prop) const {
    if (prop == kTopProposition) return true;
    auto it = valuation_.find(std::string(prop));
    return it != valuation_.end() && it->second.contains(states_.at(state).base);
  }

  [[nodiscard]] bool permitted(std::size_t state, std::size_t agent) const {
    if (agent >= original_) throw InputError("d-atoms exist only for original agents");
    return (states_.at(state).permitted >> agent) & 1U;
  }

  [[nodiscard]] const std::map<std::string, StateSet>& valuation() const { return valuation_; }

private:
  friend AtlModel expand_model(const TransitionSystem&, std::size_t);

  std::vector<std::string> agents_;
  std::size_t original_ = 0;
  std::vector<std::string> base_names_;
  std::vector<AtlState> states_;
  std::vector<std::vector<std::size_t>> moves_;
  std::vector<std::vector<std::vector<std::string>>> action_names_;
  std::vector<std::vector<std::size_t>> delta_;
  std::map<std::string, StateSet> valuation_;
};

/// Expands `m` into an AtlModel. A Nature agent is added iff some profile has
/// two or more successors; at base state s Nature has k_s moves, k_s being the
/// largest successor count of a profile at s, and move k picks successor
/// k mod c (successors sorted by state order) for a profile with c successors.
inline AtlModel expand_model(const TransitionSystem& m, std::size_t agent_cap = kDefaultAtlAgentCap) {
  const std::size_t n = m.num_agents();
  if (n > agent_cap || n >= 31)
    throw CapacityError("ATL expansion needs 2^" + std::to_string(n) + " copies per state; cap is " +
                        std::to_string(agent_cap) + " agents");
  AtlModel am;
  am.original_ = n;
  am.agents_ = m.agents();
  am.base_names_ = m.states();

  using Profile = std::vector<std::uint32_t>;
  std::vector<std::map<Profile, std::vector<std::size_t>>> succ(m.num_states());
  std::vector<std::size_t> branching(m.num_states(), 1);
  bool nondeterministic = false;
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    for (const auto& t : m.mechanism(s)) succ[s][t.profile].push_back(t.target);
    for (auto& [_, targets] : succ[s]) {
      std::sort(targets.begin(), targets.end());
      targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
      branching[s] = std::max(branching[s], targets.size());
      if (targets.size() > 1) nondeterministic = true;
    }
  }
  if (nondeterministic) {
    std::string name = "Nature";
    while (std::find(am.agents_.begin(), am.agents_.end(), name) != am.agents_.end()) name += "_";
    am.agents_.push_back(name);
  }
  const std::size_t total = am.agents_.size();

  for (std::size_t s = 0; s < m.num_states(); ++s)
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) am.states_.push_back({s, mask});

  am.moves_.resize(m.num_states());
  am.action_names_.resize(m.num_states());
  am.delta_.resize(m.num_states());
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    auto& mv = am.moves_[s];
    std::size_t product = 1;
    for (std::size_t a = 0; a < n; ++a) {
      mv.push_back(m.num_actions(s, a));
      std::vector<std::string> names;
      for (std::size_t i = 0; i < m.num_actions(s, a); ++i) names.push_back(m.action_name(s, a, i));
      am.action_names_[s].push_back(std::move(names));
      product *= mv.back();
    }
    if (nondeterministic) {
      mv.push_back(branching[s]);
      product *= branching[s];
    }

    auto& table = am.delta_[s];
    table.resize(product);
    std::vector<std::size_t> digits(total, 0);
    Profile prof(n);
    for (std::size_t code = 0; code < product; ++code) {
      for (std::size_t a = 0; a < n; ++a) prof[a] = static_cast<std::uint32_t>(digits[a]);
      auto it = succ[s].find(prof);
      if (it == succ[s].end())
        throw InputError("continuity violated at " + m.state_name(s) + "; cannot expand an invalid model");
      const auto& targets = it->second;
      const std::size_t k = nondeterministic ? digits[n] : 0;
      const std::size_t t = targets[k % targets.size()];
      std::uint32_t mask = 0;
      for (std::size_t a = 0; a < n; ++a)
        if (m.is_permitted(s, a, prof[a])) mask |= 1U << a;
      table[code] = am.index(t, mask);
      for (std::size_t j = 0; j < total && ++digits[j] == mv[j]; ++j) digits[j] = 0;
    }
  }
  for (const auto& p : m.propositions()) am.valuation_.emplace(p, m.proposition(p));
  return am;
}

// ---------------------------------------------------------------------------
// Next-step ATL formulas
// ---------------------------------------------------------------------------

/// A coalition: an explicit agent list, or the grand coalition of whatever
/// model the formula is evaluated on (Nature included when present).
struct Coalition {
  bool grand = false;
  std::vector<std::string> members;

  static Coalition all() { return {true, {}}; }
  static Coalition of(std::vector<std::string> m) { return {false, std::move(m)}; }

  friend bool operator==(const Coalition&, const Coalition&) = default;
};

class AtlFormula {
public:
  enum class Kind { Top, Prop, Perm, Not, Or, And, Implies, Next };

  static AtlFormula top() { return make(Kind::Top, {}, {}, {}, {}); }
  static AtlFormula prop(std::string p) { return make(Kind::Prop, std::move(p), {}, {}, {}); }
  static AtlFormula perm(std::string agent) { return make(Kind::Perm, std::move(agent), {}, {}, {}); }
  static AtlFormula neg(AtlFormula f) { return make(Kind::Not, {}, {}, std::move(f.node_), {}); }
  static AtlFormula disj(AtlFormula l, AtlFormula r) {
    return make(Kind::Or, {}, {}, std::move(l.node_), std::move(r.node_));
  }
  static AtlFormula conj(AtlFormula l, AtlFormula r) {
    return make(Kind::And, {}, {}, std::move(l.node_), std::move(r.node_));
  }
  static AtlFormula implies(AtlFormula l, AtlFormula r) {
    return make(Kind::Implies, {}, {}, std::move(l.node_), std::move(r.node_));
  }
  static AtlFormula next(Coalition c, AtlFormula body) {
    return make(Kind::Next, {}, std::move(c), std::move(body.node_), {});
  }

  [[nodiscard]] Kind kind() const { return node_->kind; }
  [[nodiscard]] const std::string& name() const { return node_->name; }
  [[nodiscard]] const Coalition& coalition() const { return node_->coalition; }
  [[nodiscard]] AtlFormula child() const { return AtlFormula(node_->left); }
  [[nodiscard]] AtlFormula left() const { return AtlFormula(node_->left); }
  [[nodiscard]] AtlFormula right() const { return AtlFormula(node_->right); }

  friend bool operator==(const AtlFormula& a, const AtlFormula& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.name() != b.name() || !(a.coalition() == b.coalition())) return false;
    switch (a.kind()) {
      case Kind::Top:
      case Kind::Prop:
      case Kind::Perm: return true;
      case Kind::Not:
      case Kind::Next: return a.child() == b.child();
      case Kind::Or:
      case Kind::And:
      case Kind::Implies: return a.left() == b.left() && a.right() == b.right();
    }
    return false;
  }

private:
  struct Node {
    Kind kind;
    std::string name;
    Coalition coalition;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
  };

  explicit AtlFormula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static AtlFormula make(Kind k, std::string name, Coalition c, std::shared_ptr<const Node> l,
                         std::shared_ptr<const Node> r) {
    return AtlFormula(std::make_shared<const Node>(Node{k, std::move(name), std::move(c), std::move(l), std::move(r)}));
  }

  std::shared_ptr<const Node> node_;
};

namespace detail {

inline void print_atl_into(std::string& out, const AtlFormula& f, int ctx) {
  using K = AtlFormula::Kind;
  switch (f.kind()) {
    case K::Top: out += "true"; return;
    case K::Prop: out += f.name(); return;
    case K::Perm: out += "d_" + f.name(); return;
    case K::Not:
      out += "!";
      print_atl_into(out, f.child(), 3);
      return;
    case K::Next: {
      out += "<<";
      if (f.coalition().grand) {
        out += "*";
      } else {
        for (std::size_t i = 0; i < f.coalition().members.size(); ++i) {
          if (i) out += ",";
          out += f.coalition().members[i];
        }
      }
      out += ">>X ";
      print_atl_into(out, f.child(), 3);
      return;
    }
    case K::Implies:
      if (ctx > 0) out += "(";
      print_atl_into(out, f.left(), 1);
      out += " -> ";
      print_atl_into(out, f.right(), 0);
      if (ctx > 0) out += ")";
      return;
    case K::Or:
    case K::And: {
      const int level = f.kind() == K::Or ? 1 : 2;
      if (ctx > level) out += "(";
      print_atl_into(out, f.left(), level);
      out += f.kind() == K::Or ? " | " : " & ";
      print_atl_into(out, f.right(), level + 1);
      if (ctx > level) out += ")";
      return;
    }
  }
}

}  // namespace detail

/// Text form; `<<*>>` stands for the grand coalition.
inline std::string print_atl(const AtlFormula& f) {
  std::string out;
  detail::print_atl_into(out, f, 0);
  return out;
}

/// WA ↦ ⟨⟨*⟩⟩X(d_a ∧ φ), WE ↦ ⟨⟨a⟩⟩X(d_a ∧ φ), SE ↦ ¬⟨⟨a⟩⟩X¬(φ → d_a),
/// SA ↦ ¬⟨⟨*⟩⟩X¬(φ → d_a); Boolean structure is kept as is.
inline AtlFormula translate_formula(const Formula& f) {
  using A = AtlFormula;
  if (f.is_top()) return A::top();
  switch (f.kind()) {
    case Formula::Kind::Prop:
      return f.name() == kTopProposition ? A::top() : A::prop(f.name());
    case Formula::Kind::Neg:
      return A::neg(translate_formula(f.child()));
    case Formula::Kind::Or:
      return A::disj(translate_formula(f.left()), translate_formula(f.right()));
    case Formula::Kind::Modal:
      break;
  }
  const auto body = translate_formula(f.child());
  const auto d = A::perm(f.agent());
  switch (f.modality()) {
    case Modality::WA: return A::next(Coalition::all(), A::conj(d, body));
    case Modality::WE: return A::next(Coalition::of({f.agent()}), A::conj(d, body));
    case Modality::SE: return A::neg(A::next(Coalition::of({f.agent()}), A::neg(A::implies(body, d))));
    case Modality::SA: return A::neg(A::next(Coalition::all(), A::neg(A::implies(body, d))));
  }
  return A::top();
}

/// Truth value of `f` at every state of `am`.
inline std::vector<char> eval_atl_all(const AtlModel& am, const AtlFormula& f) {
  using K = AtlFormula::Kind;
  const std::size_t n = am.num_states();
  std::vector<char> out(n, 0);
  switch (f.kind()) {
    case K::Top:
      out.assign(n, 1);
      return out;
    case K::Prop:
      for (std::size_t i = 0; i < n; ++i) out[i] = am.holds(i, f.name());
      return out;
    case K::Perm: {
      const auto a = am.agent_index(f.name());
      for (std::size_t i = 0; i < n; ++i) out[i] = am.permitted(i, a);
      return out;
    }
    case K::Not: {
      auto x = eval_atl_all(am, f.child());
      for (std::size_t i = 0; i < n; ++i) out[i] = !x[i];
      return out;
    }
    case K::Or:
    case K::And:
    case K::Implies: {
      auto x = eval_atl_all(am, f.left());
      auto y = eval_atl_all(am, f.right());
      for (std::size_t i = 0; i < n; ++i) {
        if (f.kind() == K::Or) out[i] = x[i] || y[i];
        else if (f.kind() == K::And) out[i] = x[i] && y[i];
        else out[i] = !x[i] || y[i];
      }
      return out;
    }
    case K::Next:
      break;
  }

  const auto body = eval_atl_all(am, f.child());
  std::vector<char> in_coalition(am.num_agents(), f.coalition().grand ? 1 : 0);
  for (const auto& name : f.coalition().members) in_coalition[am.agent_index(name)] = 1;

  std::vector<char> forced;  // per joint move of the coalition: every completion lands in `body`
  std::vector<std::size_t> digits;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = am.state(i).base;
    const auto& table = am.delta(s);
    std::size_t choices = 1;
    for (std::size_t a = 0; a < am.num_agents(); ++a)
      if (in_coalition[a]) choices *= am.moves(s, a);
    forced.assign(choices, 1);
    digits.assign(am.num_agents(), 0);
    for (std::size_t code = 0; code < table.size(); ++code) {
      std::size_t key = 0;
      std::size_t radix = 1;
      for (std::size_t a = 0; a < am.num_agents(); ++a) {
        if (!in_coalition[a]) continue;
        key += digits[a] * radix;
        radix *= am.moves(s, a);
      }
      if (!body[table[code]]) forced[key] = 0;
      for (std::size_t j = 0; j < digits.size() && ++digits[j] == am.moves(s, j); ++j) digits[j] = 0;
    }
    out[i] = std::find(forced.begin(), forced.end(), 1) != forced.end();
  }
  return out;
}

inline bool eval_atl(const AtlModel& am, std::size_t state, const AtlFormula& f) {
  if (state >= am.num_states()) throw InputError("ATL state index out of range");
  return eval_atl_all(am, f).at(state);
}

struct TranslationPolicy {
  std::size_t max_modal_depth = 2;
  std::size_t agent_cap = kDefaultAtlAgentCap;
};

struct TranslationMismatch {
  std::string state;  // expanded-state label
  bool expected;      // membership in the truth set of the original formula
  bool got;           // value of the translation
};

struct TranslationVerdict {
  bool agree = true;
  bool d_independent = true;
  std::optional<TranslationMismatch> mismatch;
  std::size_t states_checked = 0;

  [[nodiscard]] bool ok() const { return agree && d_independent; }
};

/// Compares the translation of φ on the expansion of m with model_check(m, φ)
/// at every expanded state, and checks that the value at ⟨s, 𝒟⟩ does not
/// depend on 𝒟.
inline TranslationVerdict verify_translation(const TransitionSystem& m, const Formula& f,
                                             const TranslationPolicy& policy = {}) {
  if (f.modal_depth() > policy.max_modal_depth)
    throw InputError("formula modal depth " + std::to_string(f.modal_depth()) + " exceeds bound " +
                     std::to_string(policy.max_modal_depth));
  const auto am = expand_model(m, policy.agent_cap);
  const auto truth = model_check(m, f);
  const auto values = eval_atl_all(am, translate_formula(f));
  TranslationVerdict v;
  const std::uint32_t copies = 1U << am.original_agents();
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const char first = values[am.index(s, 0)];
    for (std::uint32_t mask = 0; mask < copies; ++mask) {
      const auto i = am.index(s, mask);
      ++v.states_checked;
      if (values[i] != first) v.d_independent = false;
      if (static_cast<bool>(values[i]) != truth.contains(s) && !v.mismatch) {
        v.agree = false;
        v.mismatch = TranslationMismatch{am.state_label(i), truth.contains(s), static_cast<bool>(values[i])};
      }
    }
  }
  return v;
}

}  // namespace permitmc
