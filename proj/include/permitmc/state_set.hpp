#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace permitmc {

/// Fixed-universe bit set over state indices 0..universe()-1.
///
/// Truth sets are StateSets; the universe size makes complement well
/// defined without a back reference to the model.
class StateSet {
public:
  StateSet() = default;

  explicit StateSet(std::size_t universe, bool full = false)
      : universe_(universe), words_((universe + 63) / 64, full ? ~std::uint64_t{0} : 0) {
    trim();
  }

  static StateSet all(std::size_t universe) { return StateSet(universe, true); }

  static StateSet of(std::size_t universe, std::initializer_list<std::size_t> members) {
    StateSet s(universe);
    for (auto m : members) s.insert(m);
    return s;
  }

  [[nodiscard]] std::size_t universe() const { return universe_; }

  [[nodiscard]] bool contains(std::size_t i) const {
    assert(i < universe_);
    return (words_[i / 64] >> (i % 64)) & 1U;
  }

  void insert(std::size_t i) {
    assert(i < universe_);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }

  void erase(std::size_t i) {
    assert(i < universe_);
    words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  [[nodiscard]] std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  [[nodiscard]] bool empty() const {
    for (auto w : words_)
      if (w != 0) return false;
    return true;
  }

  [[nodiscard]] bool is_full() const { return count() == universe_; }

  [[nodiscard]] StateSet complement() const {
    StateSet r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  StateSet& operator|=(const StateSet& o) {
    assert(universe_ == o.universe_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }

  StateSet& operator&=(const StateSet& o) {
    assert(universe_ == o.universe_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }

  friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
  friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }

  [[nodiscard]] bool subset_of(const StateSet& o) const {
    assert(universe_ == o.universe_);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if ((words_[k] & ~o.words_[k]) != 0) return false;
    return true;
  }

  /// Member indices in increasing order.
  [[nodiscard]] std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < universe_; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  friend bool operator==(const StateSet&, const StateSet&) = default;

  /// Lexicographic order on sorted member lists.
  friend bool operator<(const StateSet& a, const StateSet& b) {
    auto ma = a.members();
    auto mb = b.members();
    return ma < mb;
  }

  [[nodiscard]] std::size_t hash() const {
    std::size_t h = std::hash<std::size_t>{}(universe_);
    for (auto w : words_) h = h * 1099511628211ULL ^ std::hash<std::uint64_t>{}(w);
    return h;
  }

private:
  void trim() {
    if (universe_ % 64 != 0 && !words_.empty())
      words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
  }

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// The truth set of a formula: the states satisfying it.
using TruthSet = StateSet;

}  // namespace permitmc

template <>
struct std::hash<permitmc::StateSet> {
  std::size_t operator()(const permitmc::StateSet& s) const { return s.hash(); }
};
