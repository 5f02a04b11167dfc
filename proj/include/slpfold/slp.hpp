#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "grammar.hpp"
#include "recompression.hpp"

namespace slpfold {

/// Words up to this length are compared by expansion.
inline constexpr Length kSmallWord = 256;

/// Exact test word(x) == word(y). Fingerprints refute; a positive answer is
/// certified by expansion (short words) or by recompression.
inline bool equals(const Grammar& g, Ref x, Ref y) {
  if (x.length() != y.length()) return false;
  if (x.empty()) return true;
  x = g.normalize(x);
  y = g.normalize(y);
  if (x == y) return true;
  if (g.fingerprint(x) != g.fingerprint(y)) return false;
  if (x.length() <= kSmallWord) return g.eval(x, kSmallWord) == g.eval(y, kSmallWord);
  if (y < x) std::swap(x, y);
  auto& cache = g.equality_cache();
  {
    std::lock_guard lock(cache.mutex);
    auto it = cache.answers.find({x, y});
    if (it != cache.answers.end()) return it->second;
  }
  const bool eq = Recompression::equal(g, x, y);
  std::lock_guard lock(cache.mutex);
  cache.answers.emplace(std::make_pair(x, y), eq);
  return eq;
}

namespace detail {

// Largest l with fingerprint(x[:l]) == fingerprint(y[:l]) on a monotone
// search; exact whenever fingerprints do not collide.
inline Length hashed_lcp(const Grammar& g, Ref x, Ref y) {
  Length lo = 0, hi = std::min(x.length(), y.length());
  while (lo < hi) {
    const Length mid = lo + (hi - lo + 1) / 2;
    if (g.fingerprint(g.prefix(x, mid)) == g.fingerprint(g.prefix(y, mid)))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

inline Length hashed_lcs(const Grammar& g, Ref x, Ref y) {
  Length lo = 0, hi = std::min(x.length(), y.length());
  while (lo < hi) {
    const Length mid = lo + (hi - lo + 1) / 2;
    if (g.fingerprint(g.last(x, mid)) == g.fingerprint(g.last(y, mid)))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace detail

/// Length of the longest common prefix of word(x) and word(y).
///
/// The candidate from the fingerprint search is certified (equal prefixes and
/// a mismatching next letter); if that fails the search is redone on exact
/// equality.
inline Length lcp(const Grammar& g, Ref x, Ref y) {
  const Length m = std::min(x.length(), y.length());
  if (m == 0 || g.first_letter(x) != g.first_letter(y)) return 0;
  const Length l = detail::hashed_lcp(g, x, y);
  const bool stop = l == m || g.char_at(x, l) != g.char_at(y, l);
  if (stop && equals(g, g.prefix(x, l), g.prefix(y, l))) return l;
  Length lo = 0, hi = m;
  while (lo < hi) {
    const Length mid = lo + (hi - lo + 1) / 2;
    if (equals(g, g.prefix(x, mid), g.prefix(y, mid)))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

/// Length of the longest common suffix of word(x) and word(y).
inline Length lcs(const Grammar& g, Ref x, Ref y) {
  const Length m = std::min(x.length(), y.length());
  if (m == 0 || g.last_letter(x) != g.last_letter(y)) return 0;
  const Length l = detail::hashed_lcs(g, x, y);
  const bool stop = l == m || g.char_at(x, x.length() - l - 1) != g.char_at(y, y.length() - l - 1);
  if (stop && equals(g, g.last(x, l), g.last(y, l))) return l;
  Length lo = 0, hi = m;
  while (lo < hi) {
    const Length mid = lo + (hi - lo + 1) / 2;
    if (equals(g, g.last(x, mid), g.last(y, mid)))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

inline bool is_prefix(const Grammar& g, Ref p, Ref x) {
  return p.length() <= x.length() && equals(g, p, g.prefix(x, p.length()));
}

inline bool is_suffix(const Grammar& g, Ref s, Ref x) {
  return s.length() <= x.length() && equals(g, s, g.last(x, s.length()));
}

/// Copies the words of `roots` into a fresh grammar without truncated
/// references. Every materialized piece is word(R)[i:j] for a source rule R
/// whose boundaries are cut at most at i and j, and pieces are memoized.
class SlpCopier {
 public:
  explicit SlpCopier(const Grammar& src) : src_(src), out_(src.alphabet()) {}

  Ref copy(Ref x) {
    if (x.empty()) return Grammar::empty_ref();
    return out_.whole(materialize(x));
  }

  Grammar& result() { return out_; }
  Grammar take() { return std::move(out_); }

 private:
  RuleId materialize(Ref x) {
    std::optional<Letter> single;
    x = src_.normalize(x, &single);
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
    RuleId id;
    if (single) {
      id = out_.letter(*single).rule;
    } else {
      const auto& rule = src_.rule(x.rule);
      std::vector<Symbol> body;
      for (std::size_t t = Grammar::locate(rule, x.start); t < rule.body.size() && rule.offsets[t] < x.end; ++t) {
        const Symbol& s = rule.body[t];
        if (s.is_letter) {
          body.push_back(s);
          continue;
        }
        const Length lo = std::max(x.start, rule.offsets[t]) - rule.offsets[t];
        const Length hi = std::min(x.end, rule.offsets[t + 1]) - rule.offsets[t];
        body.push_back(Symbol::of(out_.whole(materialize(Ref{s.ref.rule, s.ref.start + lo, s.ref.start + hi}))));
      }
      id = out_.add_rule(body);
    }
    memo_.emplace(x, id);
    return id;
  }

  const Grammar& src_;
  Grammar out_;
  std::unordered_map<Ref, RuleId, RefHash> memo_;
};

/// True when no rule reachable from `x` contains a truncated reference.
inline bool is_truncation_free(const Grammar& g, Ref x) {
  if (x.empty()) return true;
  if (x != g.whole(x.rule)) return false;
  const Ref roots[1] = {x};
  for (RuleId r : g.reachable(roots))
    for (const Symbol& s : g.rule(r).body)
      if (!s.is_letter && s.ref != g.whole(s.ref.rule)) return false;
  return true;
}

struct SlpResult {
  Grammar grammar;
  Ref root;
};

inline SlpResult to_slp(const Grammar& g, Ref x) {
  SlpCopier c(g);
  Ref root = c.copy(x);
  return SlpResult{c.take(), root};
}

}  // namespace slpfold
