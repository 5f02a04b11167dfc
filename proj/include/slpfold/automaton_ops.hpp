#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "automaton.hpp"
#include "slp.hpp"
#include "word_algebra.hpp"

namespace slpfold {

using BigNat = boost::multiprecision::cpp_int;

struct DeterminismCertificate {
  bool ok = true;
  TransId first = kNone, second = kNone;  // witnesses when !ok
  explicit operator bool() const { return ok; }
};

/// CDFA test: no two transitions out of a state start with the same letter.
/// Empty labels count as non-deterministic on their own.
inline DeterminismCertificate check_deterministic(const Automaton& a) {
  const Grammar& g = a.grammar();
  for (StateId q = 0; q < a.num_states(); ++q) {
    std::map<Letter, TransId> seen;
    for (TransId t : a.out(q)) {
      const Ref x = a.transition(t).label;
      if (x.empty()) return {false, t, t};
      auto [it, fresh] = seen.emplace(g.first_letter(x), t);
      if (!fresh) return {false, it->second, t};
    }
  }
  return {};
}

inline bool is_deterministic(const Automaton& a) { return check_deterministic(a).ok; }

/// Pairing consistency: partners are distinct, mutually paired, reversed,
/// and spell mutually inverse words. With `require_reduced` every label must
/// also be freely reduced.
inline bool check_involutive(const Automaton& a, bool require_reduced = false) {
  if (!a.involutive()) return false;
  Grammar& g = a.grammar();
  const auto& ts = a.transitions();
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const TransId s = ts[t].inv;
    if (s == kNone || s >= ts.size() || s == t || ts[s].inv != t) return false;
    if (ts[s].src != ts[t].dst || ts[s].dst != ts[t].src) return false;
    if (t < s && !equals(g, ts[s].label, g.inverse(ts[t].label))) return false;
    if (require_reduced && !is_freely_reduced(g, ts[t].label)) return false;
  }
  return true;
}

inline bool is_involutive_cdfa(const Automaton& a) { return check_involutive(a, true) && is_deterministic(a); }

struct AutomatonMetrics {
  std::size_t boundary = 0;  // |∂A|
  std::size_t k = 0;
  BigNat n = 0;
};

inline std::vector<char> boundary_states(const Automaton& a) {
  const auto in = a.in_degrees(), out = a.out_degrees();
  std::vector<char> b(a.num_states(), 0);
  for (std::size_t q = 0; q < a.num_states(); ++q) b[q] = in[q] == 1 && out[q] == 1;
  return b;
}

inline AutomatonMetrics metrics(const Automaton& a) {
  AutomatonMetrics m;
  const auto b = boundary_states(a);
  m.boundary = static_cast<std::size_t>(std::count(b.begin(), b.end(), 1));
  const std::size_t half = a.num_transitions() / 2;
  const std::size_t excess = half > a.num_states() ? half - a.num_states() : 0;
  m.k = 3 * excess + a.finals().size() + m.boundary + 1;
  BigNat total = 0;
  for (const auto& tr : a.transitions()) total += BigNat(tr.label.length());
  m.n = total / 2;
  return m;
}

/// Both size inequalities that hold for minimalistic automata.
inline bool satisfies_transition_bound(const Automaton& a) {
  const auto m = metrics(a);
  const std::size_t half = a.num_transitions() / 2;
  const std::size_t excess = half > a.num_states() ? half - a.num_states() : 0;
  const std::size_t rest = a.finals().size() + m.boundary + 1;
  return half <= 3 * excess + rest && a.num_states() <= 2 * excess + rest;
}

/// True when labels are freely reduced and every state other than the
/// initial and final ones has more than two incoming or outgoing transitions.
inline bool is_minimalistic(const Automaton& a) {
  Grammar& g = a.grammar();
  for (const auto& tr : a.transitions())
    if (tr.label.empty() || !is_freely_reduced(g, tr.label)) return false;
  const auto in = a.in_degrees(), out = a.out_degrees();
  for (StateId q = 0; q < a.num_states(); ++q)
    if (q != a.initial() && !a.is_final(q) && in[q] <= 2 && out[q] <= 2) return false;
  return true;
}

namespace detail {

inline void redirect_tracked(Automaton& a, StateMap& track, StateId from, StateId to) {
  a.redirect_state(from, to);
  for (auto& s : track)
    if (s == from) s = to;
}

// Identifies the endpoints of every empty label and drops those pairs.
inline bool collapse_empty_labels(Automaton& a, StateMap& track) {
  bool changed = false;
  for (;;) {
    std::optional<TransId> e;
    for (std::size_t t = 0; t < a.num_transitions(); ++t)
      if (a.transition(static_cast<TransId>(t)).label.empty()) {
        e = static_cast<TransId>(t);
        break;
      }
    if (!e) return changed;
    const Transition tr = a.transition(*e);
    a.remove_pair(*e);
    StateId keep = std::min(tr.src, tr.dst), drop = std::max(tr.src, tr.dst);
    if (drop == a.initial()) std::swap(keep, drop);
    redirect_tracked(a, track, drop, keep);
    changed = true;
  }
}

}  // namespace detail

/// Minimalistic normal form of an involutive automaton, in place: labels
/// are freely reduced (empty ones collapse their endpoints), then repeatedly
/// states outside {q0} ∪ F with at most two incoming transitions are removed:
/// isolated states, dead ends and lone loops are deleted, and a state
/// between (p1, X, q) and (p2, Y, q) is replaced by (p1, red(X·Y^-1), p2).
/// Returns the map from old to new state ids.
inline StateMap make_minimalistic(Automaton& a) {
  if (!a.involutive()) throw PreconditionError("make_minimalistic needs an involutive automaton");
  Grammar& g = a.grammar();
  StateMap track = identity_map(a.num_states());
  for (std::size_t t = 0; t < a.num_transitions(); ++t) {
    const Transition tr = a.transition(static_cast<TransId>(t));
    if (tr.inv < t) continue;
    const Ref r = free_reduce(g, tr.label);
    if (r.length() != tr.label.length()) {
      a.set_label(static_cast<TransId>(t), r);
      a.set_label(tr.inv, g.inverse(r));
    }
  }
  detail::collapse_empty_labels(a, track);

  std::vector<char> deleted(a.num_states(), 0);
  bool progress = true;
  while (progress) {
    progress = false;
    const auto in = a.in_degrees();
    for (StateId q = 0; q < a.num_states() && !progress; ++q) {
      if (deleted[q] || q == a.initial() || a.is_final(q) || in[q] > 2) continue;
      std::vector<TransId> incoming;
      for (std::size_t t = 0; t < a.num_transitions(); ++t)
        if (a.transition(static_cast<TransId>(t)).dst == q) incoming.push_back(static_cast<TransId>(t));
      const bool lone_loop = incoming.size() == 2 && a.transition(incoming[0]).src == q &&
                             a.transition(incoming[1]).src == q;
      if (incoming.size() < 2 || lone_loop) {
        std::vector<char> dead(a.num_transitions(), 0);
        for (TransId t : incoming) dead[t] = 1;
        a.remove_transitions(std::move(dead));
        deleted[q] = 1;
        for (auto& s : track)
          if (s == q) s = kNone;
        progress = true;
        continue;
      }
      const Transition t1 = a.transition(incoming[0]), t2 = a.transition(incoming[1]);
      const StateId p1 = t1.src, p2 = t2.src;
      const Length c = lcs(g, t1.label, t2.label);
      const Ref z = g.concat(g.drop_last(t1.label, c), g.inverse(g.drop_last(t2.label, c)));
      std::vector<char> dead(a.num_transitions(), 0);
      dead[incoming[0]] = dead[incoming[1]] = 1;
      a.remove_transitions(std::move(dead));
      deleted[q] = 1;
      for (auto& s : track)
        if (s == q) s = kNone;
      if (z.empty()) {
        if (p1 != p2) {
          StateId keep = std::min(p1, p2), drop = std::max(p1, p2);
          if (drop == a.initial()) std::swap(keep, drop);
          detail::redirect_tracked(a, track, drop, keep);
        }
      } else {
        a.add_pair(p1, z, p2);
      }
      progress = true;
    }
  }
  // States emptied by redirection are isolated; drop them too.
  const auto in = a.in_degrees();
  for (StateId q = 0; q < a.num_states(); ++q)
    if (!deleted[q] && in[q] == 0 && q != a.initial() && !a.is_final(q)) {
      deleted[q] = 1;
      for (auto& s : track)
        if (s == q) s = kNone;
    }
  const StateMap removal = a.remove_states(deleted);
  for (auto& s : track)
    if (s != kNone) s = removal[s];
  return track;
}

}  // namespace slpfold
