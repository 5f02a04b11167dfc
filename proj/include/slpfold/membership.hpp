#pragma once

#include <optional>

#include "automaton.hpp"
#include "intersection.hpp"
#include "run.hpp"
#include "word_algebra.hpp"

namespace slpfold {

inline bool member(const Automaton& a, Ref w, std::uint64_t budget = kDefaultBudget) {
  const RunResult r = run(a, w, RunPoint::at(a.initial()), budget);
  return r.consumed == w.length() && r.end.is_state() && a.is_final(r.end.state);
}

/// transition_crossing with w = u·v given directly and `cut` = |u|.
inline std::optional<Length> transition_crossing_at(const Automaton& a, TransId t, Ref w, Length cut,
                                                    std::uint64_t budget = kDefaultBudget) {
  if (cut >= w.length()) return std::nullopt;
  Grammar& g = a.grammar();
  const Transition& alpha = a.transition(t);
  const Ref x = alpha.label;
  const ArithmeticProgression occ = crossing_occurrences(g, x, w, cut);
  if (occ.empty) return std::nullopt;
  std::optional<Length> m;
  if (occ.count == 0) {
    const RunResult r = run(a, g.prefix(w, occ.offset), RunPoint::at(a.initial()), budget);
    if (r.consumed == occ.offset && r.end == RunPoint::at(alpha.src)) m = occ.offset;
  } else {
    // W[:l]·(W[l:l+k])^s for s ≤ count spells the prefixes ending at the
    // occurrences; intersect with the language of "reach p".
    Automaton to_p = a;
    to_p.set_finals({alpha.src});
    const PeriodicLang hit = periodic_intersection(to_p, g.prefix(w, occ.offset),
                                                   g.truncate(w, occ.offset, occ.offset + occ.step), budget);
    const auto s = hit.exponents.min();
    if (s && *s <= occ.count) m = occ.at(*s);
  }
  if (!m) return std::nullopt;
  return *m + x.length() - cut;
}

/// The i in [1, |label(t)|] such that word(u)·word(v)[:i] leads from q0
/// through transition t last, t covering the first letter of v; none if
/// there is no such i.
inline std::optional<Length> transition_crossing(const Automaton& a, TransId t, Ref u, Ref v,
                                                 std::uint64_t budget = kDefaultBudget) {
  if (v.empty()) return std::nullopt;
  return transition_crossing_at(a, t, a.grammar().concat(u, v), u.length(), budget);
}

namespace detail {

// Copy of `a` (non-involutive) with the run start moved to `offset` letters
// into transition t: t keeps its id for the tail piece, the head piece is
// appended and a fresh non-final state becomes initial.
inline Automaton reroot_inside(const Automaton& a, TransId t, Length offset) {
  Grammar& g = a.grammar();
  Automaton b(a.grammar_ptr(), false);
  b.add_states(a.num_states());
  b.set_finals(a.finals());
  const StateId c = b.add_state();
  std::vector<Transition> ts = a.transitions();
  for (auto& tr : ts) tr.inv = kNone;
  const Transition old = ts[t];
  ts[t] = {c, g.suffix_from(old.label, offset), old.dst, kNone};
  ts.push_back({old.src, g.prefix(old.label, offset), c, kNone});
  b.set_transitions(std::move(ts));
  b.set_initial(c);
  return b;
}

inline constexpr Length kDirectRun = 32;

inline std::optional<Length> max_prefix_rec(const Automaton& a, Ref w, std::uint64_t budget) {
  if (w.length() <= kDirectRun) return run(a, w, RunPoint::at(a.initial()), budget).last_accepted();
  Grammar& g = a.grammar();
  const auto [u, v] = g.split(w);
  for (std::size_t t = 0; t < a.num_transitions(); ++t) {
    const auto i = transition_crossing_at(a, static_cast<TransId>(t), w, u.length(), budget);
    if (!i) continue;
    const Transition& alpha = a.transition(static_cast<TransId>(t));
    const Length offset = alpha.label.length() - *i;  // position of |u| inside alpha
    std::optional<Length> l;
    if (offset == 0) {
      Automaton b = a;
      b.set_initial(alpha.src);
      l = max_prefix_rec(b, v, budget);
    } else {
      l = max_prefix_rec(reroot_inside(a, static_cast<TransId>(t), offset), v, budget);
    }
    if (l) return u.length() + *l;
    break;
  }
  return max_prefix_rec(a, u, budget);
}

}  // namespace detail

/// Largest i with word(w)[:i] ∈ L(A), by recursion on the rule structure
/// of w: a crossing transition at the split point re-roots the automaton
/// for the right half, otherwise only the left half can matter.
inline std::optional<Length> max_prefix(const Automaton& a, Ref w, std::uint64_t budget = kDefaultBudget) {
  Runner check(a);  // rejects non-deterministic input up front
  (void)check;
  return detail::max_prefix_rec(a, w, budget);
}

}  // namespace slpfold
