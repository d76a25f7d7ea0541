#pragma once

#include <cctype>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permitmc/errors.hpp"
#include "permitmc/model.hpp"

namespace permitmc {

enum class Modality { WA, WE, SE, SA };

inline constexpr Modality kAllModalities[] = {Modality::WA, Modality::WE, Modality::SE, Modality::SA};

inline std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::WA: return "WA";
    case Modality::WE: return "WE";
    case Modality::SE: return "SE";
    case Modality::SA: return "SA";
  }
  return "??";
}

inline std::optional<Modality> modality_from_string(std::string_view s) {
  for (auto m : kAllModalities)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

/// Immutable formula over propositions, negation, disjunction and the four
/// agent-indexed permission modalities. Conjunction, implication and the
/// constants are sugar over these four node kinds; `true` is the
/// disjunction `__top | !__top` over a reserved proposition.
///
/// Nodes are shared; size and a structural hash are cached at construction.
class Formula {
public:
  enum class Kind { Prop, Neg, Or, Modal };

  Formula() = delete;

  static Formula prop(std::string name) {
    return Formula(std::make_shared<const Node>(Node{Kind::Prop, std::move(name), Modality::WA, {}, {}}));
  }
  static Formula neg(Formula f) {
    return Formula(std::make_shared<const Node>(Node{Kind::Neg, {}, Modality::WA, std::move(f.node_), {}}));
  }
  static Formula disj(Formula l, Formula r) {
    return Formula(
        std::make_shared<const Node>(Node{Kind::Or, {}, Modality::WA, std::move(l.node_), std::move(r.node_)}));
  }
  static Formula modal(Modality m, std::string agent, Formula body) {
    return Formula(
        std::make_shared<const Node>(Node{Kind::Modal, std::move(agent), m, std::move(body.node_), {}}));
  }

  static Formula top() { return disj(prop(std::string(kTopProposition)), neg(prop(std::string(kTopProposition)))); }
  static Formula bot() { return neg(top()); }
  static Formula conj(Formula l, Formula r) { return neg(disj(neg(std::move(l)), neg(std::move(r)))); }
  static Formula implies(Formula l, Formula r) { return disj(neg(std::move(l)), std::move(r)); }

  [[nodiscard]] Kind kind() const { return node_->kind; }
  [[nodiscard]] bool is(Kind k) const { return node_->kind == k; }

  /// Proposition name (Prop) or agent name (Modal).
  [[nodiscard]] const std::string& name() const { return node_->name; }
  [[nodiscard]] const std::string& agent() const { return node_->name; }
  [[nodiscard]] Modality modality() const { return node_->modality; }

  /// Operand of Neg and Modal; left operand of Or.
  [[nodiscard]] Formula child() const { return Formula(node_->left); }
  [[nodiscard]] Formula left() const { return Formula(node_->left); }
  [[nodiscard]] Formula right() const { return Formula(node_->right); }

  /// Node count of the desugared tree.
  [[nodiscard]] std::size_t size() const { return node_->size; }
  [[nodiscard]] std::size_t hash() const { return node_->hash; }
  [[nodiscard]] std::size_t modal_depth() const { return node_->modal_depth; }

  [[nodiscard]] bool is_top() const {
    return is(Kind::Or) && left().is(Kind::Prop) && left().name() == kTopProposition &&
           right().is(Kind::Neg) && right().child().is(Kind::Prop) &&
           right().child().name() == kTopProposition;
  }
  [[nodiscard]] bool is_bot() const { return is(Kind::Neg) && child().is_top(); }

  /// Neg(Or(Neg l, Neg r)), the shape produced by conj().
  [[nodiscard]] bool is_conj() const {
    return is(Kind::Neg) && child().is(Kind::Or) && child().left().is(Kind::Neg) &&
           child().right().is(Kind::Neg);
  }
  [[nodiscard]] Formula conj_left() const { return child().left().child(); }
  [[nodiscard]] Formula conj_right() const { return child().right().child(); }

  /// Or(Neg l, r), the shape produced by implies().
  [[nodiscard]] bool is_implication() const { return is(Kind::Or) && left().is(Kind::Neg); }
  [[nodiscard]] Formula antecedent() const { return left().child(); }
  [[nodiscard]] Formula consequent() const { return right(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash || a.node_->size != b.node_->size) return false;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.kind != y.kind || x.name != y.name) return false;
    switch (x.kind) {
      case Kind::Prop: return true;
      case Kind::Neg: return a.child() == b.child();
      case Kind::Or: return a.left() == b.left() && a.right() == b.right();
      case Kind::Modal: return x.modality == y.modality && a.child() == b.child();
    }
    return false;
  }

private:
  struct Node {
    Kind kind;
    std::string name;
    Modality modality;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::size_t size = 1;
    std::size_t hash = 0;
    std::size_t modal_depth = 0;

    Node(Kind k, std::string n, Modality m, std::shared_ptr<const Node> l, std::shared_ptr<const Node> r)
        : kind(k), name(std::move(n)), modality(m), left(std::move(l)), right(std::move(r)) {
      std::size_t h = static_cast<std::size_t>(kind) * 0x9e3779b97f4a7c15ULL;
      if (kind == Kind::Prop || kind == Kind::Modal) h ^= std::hash<std::string>{}(name) + (h << 6) + (h >> 2);
      if (kind == Kind::Modal) h ^= (static_cast<std::size_t>(modality) + 1) * 0xff51afd7ed558ccdULL;
      if (left) {
        size += left->size;
        modal_depth = left->modal_depth;
        h ^= left->hash + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      if (right) {
        size += right->size;
        modal_depth = std::max(modal_depth, right->modal_depth);
        h ^= right->hash + 0xc2b2ae3d27d4eb4fULL + (h << 7) + (h >> 3);
      }
      if (kind == Kind::Modal) ++modal_depth;
      hash = h;
    }
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

/// Syntax error with byte offset and the set of tokens that would have been accepted.
class ParseError : public InputError {
public:
  ParseError(const std::string& msg, std::size_t position, std::set<std::string> expected)
      : InputError(format(msg, position, expected)), position_(position), expected_(std::move(expected)) {}

  [[nodiscard]] std::size_t position() const { return position_; }
  [[nodiscard]] const std::set<std::string>& expected() const { return expected_; }

private:
  static std::string format(const std::string& msg, std::size_t pos, const std::set<std::string>& exp) {
    std::string out = "parse error at " + std::to_string(pos) + ": " + msg;
    if (!exp.empty()) {
      out += " (expected";
      for (const auto& e : exp) out += " " + e;
      out += ")";
    }
    return out;
  }
  std::size_t position_;
  std::set<std::string> expected_;
};

namespace detail {

// formula := impl ; impl := or ("->" impl)? ; or := and ("|" and)* ;
// and := unary ("&" unary)* ; unary := "!" unary | modal ;
// modal := ("WA"|"WE"|"SE"|"SA") "[" ident "]" unary | atom ;
// atom := ident | "true" | "false" | "(" formula ")"
class Parser {
public:
  explicit Parser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    auto f = parse_impl();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected input", {"->", "|", "&", "end of input"});
    return f;
  }

private:
  Formula parse_impl() {
    auto lhs = parse_or();
    if (accept("->")) return Formula::implies(std::move(lhs), parse_impl());
    return lhs;
  }

  Formula parse_or() {
    auto f = parse_and();
    while (accept("|")) f = Formula::disj(std::move(f), parse_and());
    return f;
  }

  Formula parse_and() {
    auto f = parse_unary();
    while (accept("&")) f = Formula::conj(std::move(f), parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (accept("!")) return Formula::neg(parse_unary());
    return parse_modal_or_atom();
  }

  Formula parse_modal_or_atom() {
    skip_ws();
    if (accept("(")) {
      auto f = parse_impl();
      expect(")");
      return f;
    }
    auto start = pos_;
    auto word = ident();
    if (!word) fail("expected a formula", {"!", "(", "WA", "WE", "SE", "SA", "true", "false", "identifier"});
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '[') {
      auto m = modality_from_string(*word);
      if (!m) {
        pos_ = start;
        fail("unknown modality keyword '" + *word + "'", {"WA", "WE", "SE", "SA"});
      }
      ++pos_;
      skip_ws();
      auto agent = ident();
      if (!agent) fail("expected agent name", {"identifier"});
      expect("]");
      return Formula::modal(*m, std::move(*agent), parse_unary());
    }
    if (*word == "true") return Formula::top();
    if (*word == "false") return Formula::bot();
    if (modality_from_string(*word)) fail("expected '[' after modality keyword", {"["});
    if (*word == kTopProposition) {
      pos_ = start;
      fail("'" + *word + "' is reserved", {"identifier"});
    }
    return Formula::prop(std::move(*word));
  }

  std::optional<std::string> ident() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    auto c = static_cast<unsigned char>(text_[pos_]);
    if (!(std::isalpha(c) || c == '_')) return std::nullopt;
    auto start = pos_;
    while (pos_ < text_.size()) {
      auto d = static_cast<unsigned char>(text_[pos_]);
      if (!(std::isalnum(d) || d == '_')) break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("missing '" + std::string(tok) + "'", {std::string(tok)});
  }

  [[noreturn]] void fail(const std::string& msg, std::set<std::string> expected) {
    throw ParseError(msg, pos_, std::move(expected));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Precedence levels for printing; higher binds tighter.
enum Level { kOr = 1, kAnd = 2, kUnary = 3 };

inline void print_into(std::string& out, const Formula& f, int ctx) {
  auto open = [&](int lvl) {
    if (lvl < ctx) out += '(';
  };
  auto close = [&](int lvl) {
    if (lvl < ctx) out += ')';
  };
  if (f.is_top()) {
    out += "true";
    return;
  }
  if (f.is_bot()) {
    out += "false";
    return;
  }
  if (f.is_conj()) {
    open(kAnd);
    print_into(out, f.conj_left(), kAnd);
    out += " & ";
    print_into(out, f.conj_right(), kUnary);
    close(kAnd);
    return;
  }
  switch (f.kind()) {
    case Formula::Kind::Prop:
      out += f.name();
      return;
    case Formula::Kind::Neg:
      out += '!';
      print_into(out, f.child(), kUnary);
      return;
    case Formula::Kind::Or:
      open(kOr);
      print_into(out, f.left(), kOr);
      out += " | ";
      print_into(out, f.right(), kAnd);
      close(kOr);
      return;
    case Formula::Kind::Modal:
      out += to_string(f.modality());
      out += '[';
      out += f.agent();
      out += "] ";
      print_into(out, f.child(), kUnary);
      return;
  }
}

}  // namespace detail

/// Parses the concrete syntax: `WA[a] p`, `!`, `&`, `|`, `->` (right
/// associative), `true`, `false`, parentheses. Throws ParseError.
inline Formula parse_formula(std::string_view text) { return detail::Parser(text).parse_all(); }

/// Minimal-parenthesis rendering. Conjunctions and constants are re-sugared;
/// implications print as disjunctions.
inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_into(out, f, detail::kOr);
  return out;
}

inline std::string to_string(const Formula& f) { return print_formula(f); }

/// Left-nested conjunction of a list; the empty list is `true`.
inline Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::conj(acc, fs[i]);
  return acc;
}

/// Left-nested disjunction of a list; the empty list is `false`.
inline Formula disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::bot();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = Formula::disj(acc, fs[i]);
  return acc;
}

/// Splits a left-nested conjunction into exactly `n` conjuncts, or nothing
/// when the shape does not fit. n == 0 requires `true`.
inline std::optional<std::vector<Formula>> split_conj(const Formula& f, std::size_t n) {
  if (n == 0) {
    if (f.is_top()) return std::vector<Formula>{};
    return std::nullopt;
  }
  std::vector<Formula> parts;
  Formula cur = f;
  for (std::size_t k = n; k > 1; --k) {
    if (!cur.is_conj()) return std::nullopt;
    parts.push_back(cur.conj_right());
    cur = cur.conj_left();
  }
  parts.push_back(cur);
  return std::vector<Formula>(parts.rbegin(), parts.rend());
}

/// Splits a left-nested disjunction into exactly `n` disjuncts. n == 0 requires `false`.
inline std::optional<std::vector<Formula>> split_disj(const Formula& f, std::size_t n) {
  if (n == 0) {
    if (f.is_bot()) return std::vector<Formula>{};
    return std::nullopt;
  }
  std::vector<Formula> parts;
  Formula cur = f;
  for (std::size_t k = n; k > 1; --k) {
    if (!cur.is(Formula::Kind::Or)) return std::nullopt;
    parts.push_back(cur.right());
    cur = cur.left();
  }
  parts.push_back(cur);
  return std::vector<Formula>(parts.rbegin(), parts.rend());
}

/// Formula-level shorthands.
namespace dsl {
inline Formula P(std::string n) { return Formula::prop(std::move(n)); }
inline Formula Not(Formula f) { return Formula::neg(std::move(f)); }
inline Formula Or(Formula a, Formula b) { return Formula::disj(std::move(a), std::move(b)); }
inline Formula And(Formula a, Formula b) { return Formula::conj(std::move(a), std::move(b)); }
inline Formula Imp(Formula a, Formula b) { return Formula::implies(std::move(a), std::move(b)); }
inline Formula WA(std::string a, Formula f) { return Formula::modal(Modality::WA, std::move(a), std::move(f)); }
inline Formula WE(std::string a, Formula f) { return Formula::modal(Modality::WE, std::move(a), std::move(f)); }
inline Formula SE(std::string a, Formula f) { return Formula::modal(Modality::SE, std::move(a), std::move(f)); }
inline Formula SA(std::string a, Formula f) { return Formula::modal(Modality::SA, std::move(a), std::move(f)); }
inline Formula T() { return Formula::top(); }
inline Formula F() { return Formula::bot(); }
}  // namespace dsl

}  // namespace permitmc
