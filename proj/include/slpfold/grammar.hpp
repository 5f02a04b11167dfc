#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "alphabet.hpp"
#include "error.hpp"
#include "length.hpp"

namespace slpfold {

using RuleId = std::uint32_t;

/// Handle to word(rule)[start:end]. Untruncated references cover the whole
/// rule; `start == end` denotes the empty word regardless of the rule.
struct Ref {
  RuleId rule = 0;
  Length start = 0;
  Length end = 0;

  Length length() const noexcept { return end - start; }
  bool empty() const noexcept { return start == end; }
  bool operator==(const Ref&) const = default;
  auto operator<=>(const Ref&) const = default;
};

struct RefHash {
  std::size_t operator()(const Ref& r) const noexcept {
    std::uint64_t h = r.rule * 0x9E3779B97F4A7C15ull;
    h ^= r.start + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= r.end + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

struct RefPairHash {
  std::size_t operator()(const std::pair<Ref, Ref>& p) const noexcept {
    return RefHash{}(p.first) * 31u + RefHash{}(p.second);
  }
};

/// A right-hand-side symbol: a terminal letter or a (possibly truncated)
/// reference to an earlier rule.
struct Symbol {
  bool is_letter = true;
  Letter letter = 0;
  Ref ref{};

  static Symbol of(Letter x) { return Symbol{true, x, {}}; }
  static Symbol of(Ref r) { return Symbol{false, 0, r}; }
  Length length() const noexcept { return is_letter ? 1 : ref.length(); }
  bool operator==(const Symbol&) const = default;
};

namespace detail {

inline constexpr std::uint64_t kHashMod = (std::uint64_t{1} << 61) - 1;
inline constexpr std::uint64_t kHashBase = 0x1B5C2E9A3F47D1ull % kHashMod;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kHashMod);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  return s >= kHashMod ? s - kHashMod : s;
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kHashMod ? s - kHashMod : s;
}

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kHashMod - b; }

inline std::uint64_t powmod(std::uint64_t base, Length e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, base);
    base = mulmod(base, base);
    e >>= 1;
  }
  return r;
}

inline std::uint64_t letter_code(Letter x) { return std::uint64_t{x} + 1; }

// Memo of certified equality answers. Copies start empty.
struct EqualityCache {
  std::mutex mutex;
  std::unordered_map<std::pair<Ref, Ref>, bool, RefPairHash> answers;
  EqualityCache() = default;
  EqualityCache(const EqualityCache&) {}
  EqualityCache& operator=(const EqualityCache&) { return *this; }
};

}  // namespace detail

/// Append-only store of production rules over a shared alphabet: the common
/// home of SLPs and composition systems. Rule 0 is the empty word.
///
/// Every rule caches its length, height, first/last letter and a polynomial
/// fingerprint. Fingerprints are only ever used to refute equality; positive
/// answers are certified elsewhere (see slp.hpp).
class Grammar {
 public:
  struct Rule {
    std::vector<Symbol> body;
    std::vector<Length> offsets;             // offsets[t] = start of body[t]; back() = length
    std::vector<std::uint64_t> prefix_hash;  // hash of body[0..t)
    std::vector<std::uint64_t> start_hash;   // for ref symbols: prefix hash of the target at ref.start
    Length length = 0;
    std::uint32_t height = 0;
    std::uint64_t hash = 0;
    Letter first = 0, last = 0;
    std::string name;
  };

  explicit Grammar(Alphabet alphabet = Alphabet::involutive({})) : alphabet_(std::move(alphabet)) {
    rules_.push_back(Rule{});
    rules_[0].offsets.push_back(0);
    rules_[0].prefix_hash.push_back(0);
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return rules_.size(); }
  const Rule& rule(RuleId r) const { return rules_.at(r); }
  detail::EqualityCache& equality_cache() const { return eq_cache_; }

  /// Appends a rule. Ref symbols must point at strictly earlier rules and
  /// stay within range; empty symbols are dropped.
  RuleId add_rule(std::span<const Symbol> body, std::string name = {}) {
    Rule rule;
    rule.name = std::move(name);
    const RuleId id = static_cast<RuleId>(rules_.size());
    for (const Symbol& s : body) {
      if (s.is_letter) {
        if (s.letter >= alphabet_.size()) throw RangeError("letter id out of range");
      } else {
        if (s.ref.rule >= id) throw RangeError("rule references a rule that is not defined earlier");
        if (s.ref.start > s.ref.end || s.ref.end > rules_[s.ref.rule].length)
          throw RangeError("truncation out of range");
        if (s.ref.empty()) continue;
      }
      rule.body.push_back(s);
    }
    rule.offsets.reserve(rule.body.size() + 1);
    rule.prefix_hash.reserve(rule.body.size() + 1);
    rule.offsets.push_back(0);
    rule.prefix_hash.push_back(0);
    for (const Symbol& s : rule.body) {
      std::uint64_t h;
      if (s.is_letter) {
        h = detail::letter_code(s.letter);
        rule.start_hash.push_back(0);
      } else {
        const std::uint64_t at_start = prefix_hash(s.ref.rule, s.ref.start);
        rule.start_hash.push_back(at_start);
        h = detail::submod(prefix_hash(s.ref.rule, s.ref.end),
                           detail::mulmod(at_start, detail::powmod(detail::kHashBase, s.ref.length())));
        rule.height = std::max(rule.height, rules_[s.ref.rule].height);
      }
      const Length len = s.length();
      rule.prefix_hash.push_back(
          detail::addmod(detail::mulmod(rule.prefix_hash.back(), detail::powmod(detail::kHashBase, len)), h));
      rule.offsets.push_back(add_len(rule.offsets.back(), len));
    }
    rule.length = rule.offsets.back();
    rule.hash = rule.prefix_hash.back();
    if (!rule.body.empty()) rule.height += 1;
    if (rule.length > 0) {
      rule.first = first_of(rule.body.front());
      rule.last = last_of(rule.body.back());
    }
    if (!rule.name.empty()) {
      if (names_.count(rule.name)) throw ParseError("duplicate rule name '" + rule.name + "'", 0);
      names_.emplace(rule.name, id);
    }
    rules_.push_back(std::move(rule));
    return id;
  }

  RuleId add_rule(std::initializer_list<Symbol> body, std::string name = {}) {
    return add_rule(std::span<const Symbol>(body.begin(), body.size()), std::move(name));
  }

  Ref whole(RuleId r) const { return Ref{r, 0, rules_.at(r).length}; }
  static Ref empty_ref() { return Ref{0, 0, 0}; }

  /// Reference to the one-letter word `x` (memoized).
  Ref letter(Letter x) {
    auto it = letter_memo_.find(x);
    if (it != letter_memo_.end()) return whole(it->second);
    const Symbol s = Symbol::of(x);
    RuleId r = add_rule(std::span<const Symbol>(&s, 1));
    letter_memo_.emplace(x, r);
    return whole(r);
  }

  /// Builds an untruncated rule spelling `w` with a balanced binary shape.
  Ref from_word(std::span<const Letter> w) {
    if (w.empty()) return empty_ref();
    if (w.size() == 1) return letter(w[0]);
    const std::size_t mid = w.size() / 2;
    Ref l = from_word(w.subspan(0, mid));
    Ref r = from_word(w.subspan(mid));
    return concat(l, r);
  }

  std::optional<RuleId> find_rule(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) return std::nullopt;
    return it->second;
  }

  void set_name(RuleId r, const std::string& name) {
    if (names_.count(name)) throw ParseError("duplicate rule name '" + name + "'", 0);
    rules_.at(r).name = name;
    names_.emplace(name, r);
  }

  // --- queries ---------------------------------------------------------------

  Length length(Ref x) const noexcept { return x.length(); }
  std::uint32_t height(Ref x) const { return x.empty() ? 0 : rules_.at(x.rule).height; }

  void check(Ref x) const {
    if (x.rule >= rules_.size() || x.start > x.end || x.end > rules_[x.rule].length)
      throw RangeError("invalid reference");
  }

  Letter char_at(Ref x, Length i) const {
    if (i >= x.length()) throw RangeError("char_at index out of range");
    RuleId r = x.rule;
    Length k = x.start + i;
    for (;;) {
      const Rule& rule = rules_[r];
      const std::size_t t = locate(rule, k);
      const Symbol& s = rule.body[t];
      if (s.is_letter) return s.letter;
      k = s.ref.start + (k - rule.offsets[t]);
      r = s.ref.rule;
    }
  }

  Letter first_letter(Ref x) const { return char_at(x, 0); }
  Letter last_letter(Ref x) const { return char_at(x, x.length() - 1); }

  /// Expands `x`; throws BudgetExceeded when |word(x)| > max_len.
  std::vector<Letter> eval(Ref x, Length max_len) const {
    if (x.length() > max_len)
      throw BudgetExceeded("word of length " + std::to_string(x.length()) + " exceeds expansion budget " +
                           std::to_string(max_len));
    std::vector<Letter> out;
    out.reserve(static_cast<std::size_t>(x.length()));
    expand(x.rule, x.start, x.end, out);
    return out;
  }

  std::string to_string(Ref x, Length max_len = 4096, const std::string& sep = " ") const {
    std::string s;
    for (Letter c : eval(x, max_len)) {
      if (!s.empty()) s += sep;
      s += alphabet_.name(c);
    }
    return s;
  }

  /// Fingerprint of word(x). Equal words have equal fingerprints.
  std::uint64_t fingerprint(Ref x) const {
    if (x.empty()) return 0;
    return detail::submod(prefix_hash(x.rule, x.end),
                          detail::mulmod(prefix_hash(x.rule, x.start),
                                         detail::powmod(detail::kHashBase, x.length())));
  }

  /// If x lies inside a single body symbol, descend into it until it does not.
  /// Returns either a letter (as a one-letter rule ref is not guaranteed to
  /// exist, `letter_out` is set instead) or a ref spanning two or more symbols.
  Ref normalize(Ref x, std::optional<Letter>* letter_out = nullptr) const {
    if (letter_out) letter_out->reset();
    if (x.empty()) return empty_ref();
    for (;;) {
      const Rule& rule = rules_[x.rule];
      const std::size_t t = locate(rule, x.start);
      if (x.end > rule.offsets[t + 1]) return x;
      const Symbol& s = rule.body[t];
      if (s.is_letter) {
        if (letter_out) *letter_out = s.letter;
        return x;
      }
      const Length shift = x.start - rule.offsets[t];
      x = Ref{s.ref.rule, s.ref.start + shift, s.ref.start + shift + x.length()};
    }
  }

  /// Splits a word of length >= 2 into two non-empty halves along the rule
  /// structure. Both halves have strictly smaller "structural size", so
  /// recursions over split() terminate.
  std::pair<Ref, Ref> split(Ref x) const {
    assert(x.length() >= 2);
    x = normalize(x);
    const Rule& rule = rules_[x.rule];
    const std::size_t t0 = locate(rule, x.start);
    const std::size_t t1 = locate(rule, x.end - 1);
    const std::size_t t = (t0 + t1 + 1) / 2;  // boundary offsets[t], t0 < t <= t1
    const Length b = rule.offsets[t];
    return {Ref{x.rule, x.start, b}, Ref{x.rule, b, x.end}};
  }

  // --- builders ----------------------------------------------------------------

  Ref truncate(Ref x, Length i, Length j) const {
    if (i > j || j > x.length()) throw RangeError("truncation out of range");
    if (i == j) return empty_ref();
    return Ref{x.rule, x.start + i, x.start + j};
  }
  Ref prefix(Ref x, Length k) const { return truncate(x, 0, k); }
  Ref suffix_from(Ref x, Length i) const { return truncate(x, i, x.length()); }
  Ref drop_last(Ref x, Length k) const { return truncate(x, 0, x.length() - std::min(k, x.length())); }
  Ref last(Ref x, Length k) const { return truncate(x, x.length() - std::min(k, x.length()), x.length()); }

  Ref concat(Ref x, Ref y) {
    if (x.empty()) return y;
    if (y.empty()) return x;
    auto key = std::make_pair(x, y);
    auto it = concat_memo_.find(key);
    if (it != concat_memo_.end()) return whole(it->second);
    const Symbol body[2] = {Symbol::of(x), Symbol::of(y)};
    RuleId r = add_rule(std::span<const Symbol>(body, 2));
    concat_memo_.emplace(key, r);
    return whole(r);
  }

  Ref concat(std::span<const Ref> parts) {
    std::vector<Ref> cur;
    for (Ref p : parts)
      if (!p.empty()) cur.push_back(p);
    if (cur.empty()) return empty_ref();
    while (cur.size() > 1) {
      std::vector<Ref> next;
      for (std::size_t i = 0; i + 1 < cur.size(); i += 2) next.push_back(concat(cur[i], cur[i + 1]));
      if (cur.size() % 2) next.push_back(cur.back());
      cur = std::move(next);
    }
    return cur[0];
  }

  /// word(x)^k by repeated doubling; O(log k) new rules, memoized.
  Ref power(Ref x, Length k) {
    if (k == 0 || x.empty()) return empty_ref();
    mul_len(x.length(), k);
    if (k == 1) return x;
    auto key = std::make_pair(x, k);
    auto it = power_memo_.find(key);
    if (it != power_memo_.end()) return it->second;
    Ref half = power(x, k / 2);
    Ref r = concat(half, half);
    if (k % 2) r = concat(r, x);
    power_memo_.emplace(key, r);
    return r;
  }

  /// Formal inverse word(x)^-1: reversed, every letter inverted. Adds at most
  /// one rule per rule reachable from x (memoized per rule).
  Ref inverse(Ref x) {
    if (!alphabet_.is_involutive()) throw UnsupportedAlphabet("inverse requires an involutive alphabet");
    if (x.empty()) return empty_ref();
    const RuleId ir = inverse_rule(x.rule);
    const Length len = rules_[x.rule].length;
    return Ref{ir, len - x.end, len - x.start};
  }

  /// Records that whole rules a and b spell mutually inverse words, so that
  /// inverse() reuses them. The caller is responsible for having checked it.
  void register_inverse(Ref a, Ref b) {
    if (a != whole(a.rule) || b != whole(b.rule) || a.empty()) return;
    inverse_memo_.emplace(a.rule, b.rule);
    inverse_memo_.emplace(b.rule, a.rule);
  }

  /// Rules reachable from the given references (including truncated targets).
  std::vector<RuleId> reachable(std::span<const Ref> roots) const {
    std::vector<char> seen(rules_.size(), 0);
    std::vector<RuleId> stack;
    for (Ref r : roots)
      if (!r.empty() && !seen[r.rule]) {
        seen[r.rule] = 1;
        stack.push_back(r.rule);
      }
    while (!stack.empty()) {
      RuleId r = stack.back();
      stack.pop_back();
      for (const Symbol& s : rules_[r].body)
        if (!s.is_letter && !seen[s.ref.rule]) {
          seen[s.ref.rule] = 1;
          stack.push_back(s.ref.rule);
        }
    }
    std::vector<RuleId> out;
    for (RuleId r = 0; r < rules_.size(); ++r)
      if (seen[r]) out.push_back(r);
    return out;
  }

  static std::size_t locate(const Rule& rule, Length k) {
    auto it = std::upper_bound(rule.offsets.begin(), rule.offsets.end(), k);
    std::size_t t = static_cast<std::size_t>(it - rule.offsets.begin()) - 1;
    return std::min(t, rule.body.size() - 1);
  }

 private:
  Letter first_of(const Symbol& s) const { return s.is_letter ? s.letter : char_at(s.ref, 0); }
  Letter last_of(const Symbol& s) const { return s.is_letter ? s.letter : char_at(s.ref, s.ref.length() - 1); }

  void expand(RuleId r, Length from, Length to, std::vector<Letter>& out) const {
    if (from >= to) return;
    const Rule& rule = rules_[r];
    for (std::size_t t = locate(rule, from); t < rule.body.size() && rule.offsets[t] < to; ++t) {
      const Symbol& s = rule.body[t];
      const Length lo = std::max(from, rule.offsets[t]) - rule.offsets[t];
      const Length hi = std::min(to, rule.offsets[t + 1]) - rule.offsets[t];
      if (s.is_letter)
        out.push_back(s.letter);
      else
        expand(s.ref.rule, s.ref.start + lo, s.ref.start + hi, out);
    }
  }

  // Fingerprint of word(rule)[:k]. Walks a single root-to-leaf path: the
  // answer is `acc + H(word(r)[:remaining])` at every step.
  std::uint64_t prefix_hash(RuleId r, Length k) const {
    using namespace detail;
    std::uint64_t acc = 0;
    Length remaining = k;
    for (;;) {
      if (remaining == 0) return acc;
      const Rule& rule = rules_[r];
      if (remaining >= rule.length) return addmod(acc, rule.hash);
      const std::size_t t = locate(rule, remaining);
      const Length inner = remaining - rule.offsets[t];
      const std::uint64_t shift = powmod(kHashBase, inner);
      acc = addmod(acc, mulmod(rule.prefix_hash[t], shift));
      if (inner == 0) return acc;
      const Symbol& s = rule.body[t];
      if (s.is_letter) return addmod(acc, letter_code(s.letter));
      acc = submod(acc, mulmod(rule.start_hash[t], shift));
      r = s.ref.rule;
      remaining = s.ref.start + inner;
    }
  }

  RuleId inverse_rule(RuleId r) {
    auto it = inverse_memo_.find(r);
    if (it != inverse_memo_.end()) return it->second;
    std::vector<Symbol> body;
    const std::vector<Symbol> src = rules_[r].body;  // copy: add_rule may reallocate
    body.reserve(src.size());
    for (auto s = src.rbegin(); s != src.rend(); ++s) {
      if (s->is_letter) {
        body.push_back(Symbol::of(alphabet_.inverse(s->letter)));
      } else {
        const RuleId ir = inverse_rule(s->ref.rule);
        const Length len = rules_[s->ref.rule].length;
        body.push_back(Symbol::of(Ref{ir, len - s->ref.end, len - s->ref.start}));
      }
    }
    const RuleId id = add_rule(body);
    inverse_memo_.emplace(r, id);
    inverse_memo_.emplace(id, r);
    return id;
  }

  Alphabet alphabet_;
  std::vector<Rule> rules_;
  std::unordered_map<std::string, RuleId> names_;
  std::unordered_map<Letter, RuleId> letter_memo_;
  std::unordered_map<std::pair<Ref, Ref>, RuleId, RefPairHash> concat_memo_;
  std::map<std::pair<Ref, Length>, Ref> power_memo_;
  std::unordered_map<RuleId, RuleId> inverse_memo_;
  mutable detail::EqualityCache eq_cache_;
};

}  // namespace slpfold
