#pragma once

#include <optional>
#include <unordered_map>
#include <utility>

#include "grammar.hpp"
#include "progression.hpp"
#include "slp.hpp"

namespace slpfold {

/// sub(X, W, c): start positions j of occurrences of word(X) in word(W)
/// with j <= c < j + |X|.
///
/// Recursion on the split X = X1·X2: an occurrence covers c either inside
/// its X1 part or inside its X2 part, and the occurrences of the covering
/// half form a progression. A progression with two or more elements has step
/// p smaller than that half, so the text around it is p-periodic, and the
/// full pattern can only match where its own p-periodic prefix (suffix) ends
/// together with the periodic run of the text. One lcp, one lcs and at most
/// one equality test per distinct piece of X.
class CrossingOccurrences {
 public:
  CrossingOccurrences(const Grammar& g, Ref w, Length c) : g_(g), w_(w), c_(c) {}

  ArithmeticProgression operator()(Ref x) {
    if (x.empty() || x.length() > w_.length()) return ArithmeticProgression::none();
    std::optional<Letter> single;
    x = g_.normalize(x, &single);
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
    ArithmeticProgression r;
    if (x.length() == 1) {
      const Letter a = single ? *single : g_.char_at(x, 0);
      r = g_.char_at(w_, c_) == a ? ArithmeticProgression::single(c_) : ArithmeticProgression::none();
    } else {
      auto [x1, x2] = g_.split(x);
      r = ap_union(covered_by_left(x, x1, x2), covered_by_right(x, x1, x2));
    }
    memo_.emplace(x, r);
    return r;
  }

 private:
  Ref w(Length i, Length j) const { return g_.truncate(w_, i, j); }

  ArithmeticProgression covered_by_left(Ref x, Ref x1, Ref x2) {
    const Length n = w_.length(), m = x.length();
    ArithmeticProgression s = (*this)(x1).up_to(n - m);
    if (s.empty) return s;
    if (s.count == 0) {
      const Length j = s.offset;
      return equals(g_, w(j + x1.length(), j + m), x2) ? s : ArithmeticProgression::none();
    }
    const Length p = s.step;
    const Length end1 = s.max() + x1.length();
    const Length e = end1 + lcp(g_, w(end1, n), w(end1 - p, n));
    const Length px = p + lcp(g_, g_.suffix_from(x, p), x);
    if (px >= m) return e >= m ? s.up_to(e - m) : ArithmeticProgression::none();
    if (e < px) return ArithmeticProgression::none();
    const Length j = e - px;
    if (s.contains(j) && j + m <= n && equals(g_, w(j, j + m), x)) return ArithmeticProgression::single(j);
    return ArithmeticProgression::none();
  }

  ArithmeticProgression covered_by_right(Ref x, Ref x1, Ref x2) {
    const Length m = x.length(), l1 = x1.length();
    ArithmeticProgression s = (*this)(x2).from(l1);
    if (s.empty) return s;
    if (s.count == 0) {
      const Length k = s.offset;
      return equals(g_, w(k - l1, k), x1) ? ArithmeticProgression::single(k - l1) : ArithmeticProgression::none();
    }
    const Length p = s.step;
    const Length k0 = s.min();
    const Length start = k0 - lcs(g_, w(0, k0), w(0, k0 + p));
    const Length sx = p + lcs(g_, g_.prefix(x, m - p), x);
    if (sx >= m) return s.from(start + l1).shifted_down(l1);
    if (start + sx < x2.length()) return ArithmeticProgression::none();
    const Length k = start + sx - x2.length();
    if (s.contains(k) && equals(g_, w(k - l1, k - l1 + m), x)) return ArithmeticProgression::single(k - l1);
    return ArithmeticProgression::none();
  }

  const Grammar& g_;
  Ref w_;
  Length c_;
  std::unordered_map<Ref, ArithmeticProgression, RefHash> memo_;
};

inline ArithmeticProgression crossing_occurrences(const Grammar& g, Ref x, Ref w, Length i) {
  if (i >= w.length()) throw RangeError("crossing position out of range");
  return CrossingOccurrences(g, w, i)(x);
}

/// Least i with word(x) = word(w)[i:]·word(w)[:i].
inline std::optional<Length> is_conjugate(Grammar& g, Ref x, Ref w) {
  if (x.length() != w.length()) throw PreconditionError("conjugacy test needs words of equal length");
  if (x.empty() || equals(g, x, w)) return Length{0};
  const Ref ww = g.concat(w, w);
  const auto ap = crossing_occurrences(g, x, ww, w.length() - 1);
  if (ap.empty) return std::nullopt;
  return ap.min();
}

/// (Y, k) with word(v) = word(Y)^k and word(Y) primitive.
inline std::pair<Ref, Length> primitive_root(Grammar& g, Ref v) {
  if (v.empty()) throw PreconditionError("primitive root of the empty word");
  const Ref vv = g.concat(v, v);
  const auto ap = crossing_occurrences(g, v, vv, v.length() - 1);
  if (ap.count == 0) return {v, 1};
  return {g.prefix(v, ap.step), v.length() / ap.step};
}

inline bool is_primitive(Grammar& g, Ref v) { return primitive_root(g, v).second == 1; }

/// Largest l with word(y)^l a suffix of word(u).
inline Length max_power_suffix(const Grammar& g, Ref u, Ref y) {
  if (y.empty()) throw PreconditionError("power suffix of the empty word");
  if (!is_suffix(g, y, u)) return 0;
  const Length run = y.length() + lcs(g, g.drop_last(u, y.length()), u);
  return run / y.length();
}

/// Largest l with word(y)^l a prefix of word(u).
inline Length max_power_prefix(const Grammar& g, Ref u, Ref y) {
  if (y.empty()) throw PreconditionError("power prefix of the empty word");
  if (!is_prefix(g, y, u)) return 0;
  const Length run = y.length() + lcp(g, g.suffix_from(u, y.length()), u);
  return run / y.length();
}

/// x = w[i:]·w^n·w[:j]·rest (left) or x = rest·w[i:]·w^n·w[:j] (right), with
/// total = |w[i:]·w^n·w[:j]|. i = 0 stands for an empty leading piece.
struct Factorisation {
  Length i = 0, n = 0, j = 0;
  Ref rest;
  Length total = 0;
  bool operator==(const Factorisation&) const = default;
};

/// Maximal left w-factorisation of length >= |w|; least i on ties.
inline std::optional<Factorisation> left_factorisation(Grammar& g, Ref x, Ref w) {
  const Length m = w.length();
  if (m == 0) throw PreconditionError("factorisation by the empty word");
  if (x.length() < m) return std::nullopt;
  const auto rot = is_conjugate(g, g.prefix(x, m), w);
  if (!rot) return std::nullopt;
  Factorisation f;
  f.i = *rot;
  f.total = m + lcp(g, g.suffix_from(x, m), x);
  const Length rem = f.i > 0 ? f.total - (m - f.i) : f.total;
  f.n = rem / m;
  f.j = rem % m;
  f.rest = g.suffix_from(x, f.total);
  return f;
}

/// Maximal right w-factorisation of length >= |w|; least j on ties.
inline std::optional<Factorisation> right_factorisation(Grammar& g, Ref x, Ref w) {
  const Length m = w.length();
  if (m == 0) throw PreconditionError("factorisation by the empty word");
  if (x.length() < m) return std::nullopt;
  const auto rot = is_conjugate(g, g.last(x, m), w);
  if (!rot) return std::nullopt;
  Factorisation f;
  f.j = *rot;
  f.total = m + lcs(g, g.drop_last(x, m), x);
  const Length rem = f.total - f.j;
  f.n = rem / m;
  const Length r = rem % m;
  f.i = r > 0 ? m - r : 0;
  f.rest = g.drop_last(x, f.total);
  return f;
}

/// Compressed free reduction: reduce both halves, then cancel the longest
/// suffix of the left part against the matching prefix of the right part.
class FreeReducer {
 public:
  explicit FreeReducer(Grammar& g) : g_(g) {
    if (!g.alphabet().is_involutive()) throw UnsupportedAlphabet("free reduction requires an involutive alphabet");
  }

  Ref operator()(Ref x) {
    if (x.length() <= 1) return x;
    x = g_.normalize(x);
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
    auto [x1, x2] = g_.split(x);
    const Ref a = (*this)(x1);
    const Ref b = (*this)(x2);
    Ref r;
    if (a.empty()) {
      r = b;
    } else if (b.empty()) {
      r = a;
    } else {
      const Length t = lcp(g_, g_.inverse(a), b);
      r = (t == 0 && a == x1 && b == x2) ? x : g_.concat(g_.drop_last(a, t), g_.suffix_from(b, t));
    }
    memo_.emplace(x, r);
    return r;
  }

 private:
  Grammar& g_;
  std::unordered_map<Ref, Ref, RefHash> memo_;
};

inline Ref free_reduce(Grammar& g, Ref x) { return FreeReducer(g)(x); }

inline bool is_freely_reduced(Grammar& g, Ref x) { return free_reduce(g, x).length() == x.length(); }

/// word(x) = word(u)·word(v)·word(u)^-1 with v cyclically reduced, |u| maximal.
inline std::pair<Ref, Ref> cyclic_decompose(Grammar& g, Ref x) {
  if (!is_freely_reduced(g, x)) throw PreconditionError("cyclic decomposition needs a freely reduced word");
  if (x.empty()) return {x, x};
  const Length t = lcp(g, x, g.inverse(x));
  return {g.prefix(x, t), g.truncate(x, t, x.length() - t)};
}

}  // namespace slpfold
