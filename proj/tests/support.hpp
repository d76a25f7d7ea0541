#pragma once

// Shared test helpers. The evaluator below works directly on the name-level
// SystemDescription (transition list, permitted lists) and shares no code with
// the indexed checker, so it serves as an independent semantic oracle.

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "permitmc/permitmc.hpp"

namespace permitmc::testing {

inline std::filesystem::path source_dir() { return PERMITMC_SOURCE_DIR; }

class NameOracle {
public:
  explicit NameOracle(const SystemDescription& d) : d_(d) {}

  [[nodiscard]] bool sat(const std::string& s, const Formula& f) const {
    switch (f.kind()) {
      case Formula::Kind::Prop: {
        if (f.name() == kTopProposition) return true;
        auto it = d_.valuation.find(f.name());
        return it != d_.valuation.end() && std::count(it->second.begin(), it->second.end(), s) > 0;
      }
      case Formula::Kind::Neg: return !sat(s, f.child());
      case Formula::Kind::Or: return sat(s, f.left()) || sat(s, f.right());
      case Formula::Kind::Modal: break;
    }
    const std::string& a = f.agent();
    const auto& acts = d_.actions.at(s).at(a);
    const auto& perm = d_.permitted.at(s).at(a);
    auto permitted = [&](const std::string& i) { return std::count(perm.begin(), perm.end(), i) > 0; };
    auto outcomes = [&](const std::string& i) {
      std::set<std::string> out;
      for (const auto& t : d_.transitions)
        if (t.from == s && t.profile.at(a) == i) out.insert(t.to);
      return out;
    };
    auto ensures = [&](const std::string& i) {
      for (const auto& t : outcomes(i))
        if (!sat(t, f.child())) return false;
      return true;
    };
    auto admits = [&](const std::string& i) {
      for (const auto& t : outcomes(i))
        if (sat(t, f.child())) return true;
      return false;
    };
    switch (f.modality()) {
      case Modality::WA:
        return std::any_of(acts.begin(), acts.end(), [&](const auto& i) { return permitted(i) && admits(i); });
      case Modality::WE:
        return std::any_of(acts.begin(), acts.end(), [&](const auto& i) { return permitted(i) && ensures(i); });
      case Modality::SE:
        return std::all_of(acts.begin(), acts.end(), [&](const auto& i) { return !ensures(i) || permitted(i); });
      case Modality::SA:
        return std::all_of(acts.begin(), acts.end(), [&](const auto& i) { return !admits(i) || permitted(i); });
    }
    return false;
  }

  [[nodiscard]] std::vector<std::string> truth_set(const Formula& f) const {
    std::vector<std::string> out;
    for (const auto& s : d_.states)
      if (sat(s, f)) out.push_back(s);
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  const SystemDescription& d_;
};

inline std::vector<std::string> names_of(const TransitionSystem& m, const Formula& f) {
  return m.sorted_names(model_check(m, f));
}

inline std::vector<std::string> names_of(const TransitionSystem& m, const std::string& text) {
  return names_of(m, parse_formula(text));
}

}  // namespace permitmc::testing
