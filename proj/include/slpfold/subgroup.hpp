#pragma once

#include <algorithm>
#include <queue>

#include "folding.hpp"
#include "intersection.hpp"
#include "membership.hpp"

namespace slpfold {

/// Compressed Stallings automaton of a finitely generated subgroup: an
/// involutive minimalistic CDFA whose initial state is its only final state.
struct StallingsAutomaton {
  Automaton automaton;
  std::size_t generators = 0;  // non-trivial generators after free reduction
  FoldStats stats;
};

namespace detail {

// States renumbered breadth-first from q0, outgoing transitions explored by
// first letter; pairs are emitted in the same order. Unreachable states are
// dropped and counted in `dropped`.
inline Automaton canonical_order(const Automaton& a, std::size_t& dropped) {
  const Grammar& g = a.grammar();
  auto out = a.out_lists();
  for (auto& ts : out)
    std::sort(ts.begin(), ts.end(), [&](TransId x, TransId y) {
      return std::make_pair(g.first_letter(a.transition(x).label), x) <
             std::make_pair(g.first_letter(a.transition(y).label), y);
    });
  std::vector<StateId> id(a.num_states(), kNone), order{a.initial()};
  id[a.initial()] = 0;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (TransId t : out[order[k]]) {
      const StateId d = a.transition(t).dst;
      if (id[d] == kNone) {
        id[d] = static_cast<StateId>(order.size());
        order.push_back(d);
      }
    }
  dropped = a.num_states() - order.size();
  Automaton b(a.grammar_ptr(), a.involutive());
  b.add_states(order.size());
  b.set_initial(0);
  std::vector<StateId> f;
  for (StateId q : a.finals())
    if (id[q] != kNone) f.push_back(id[q]);
  b.set_finals(std::move(f));
  std::vector<char> done(a.num_transitions(), 0);
  for (StateId q : order)
    for (TransId t : out[q]) {
      if (done[t]) continue;
      const Transition& tr = a.transition(t);
      done[t] = 1;
      if (a.involutive()) {
        done[tr.inv] = 1;
        b.add_pair(id[tr.src], tr.label, id[tr.dst], a.transition(tr.inv).label);
      } else {
        b.add_transition(id[tr.src], tr.label, id[tr.dst]);
      }
    }
  return b;
}

// Letter distance from q0 and the transition used to reach each state.
struct ShortestPaths {
  std::vector<Length> dist;
  std::vector<TransId> via;
};

inline ShortestPaths shortest_paths(const Automaton& a) {
  ShortestPaths sp{std::vector<Length>(a.num_states(), kMaxLength), std::vector<TransId>(a.num_states(), kNone)};
  using Item = std::pair<Length, StateId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const auto out = a.out_lists();
  sp.dist[a.initial()] = 0;
  pq.emplace(0, a.initial());
  while (!pq.empty()) {
    const auto [d, q] = pq.top();
    pq.pop();
    if (d != sp.dist[q]) continue;
    for (TransId t : out[q]) {
      const Transition& tr = a.transition(t);
      const Length nd = add_len(d, tr.label.length());
      if (nd < sp.dist[tr.dst]) {
        sp.dist[tr.dst] = nd;
        sp.via[tr.dst] = t;
        pq.emplace(nd, tr.dst);
      }
    }
  }
  return sp;
}

inline Ref path_label(const Automaton& a, const ShortestPaths& sp, StateId q) {
  std::vector<Ref> parts;
  while (q != a.initial()) {
    const Transition& tr = a.transition(sp.via[q]);
    parts.push_back(tr.label);
    q = tr.src;
  }
  std::reverse(parts.begin(), parts.end());
  return a.grammar().concat(parts);
}

inline std::optional<Length> least_positive(const UnaryLang& u) {
  std::optional<Length> best;
  for (Length e : u.exceptions)
    if (e > 0) {
      best = e;
      break;
    }
  for (Length r : u.residues) {
    Length x = u.n0 + r;
    if (x == 0) {
      if (u.period == 0) continue;
      x = u.period;
    }
    if (!best || x < *best) best = x;
  }
  return best;
}

}  // namespace detail

/// Stallings automaton of H = <generators>: the bouquet of the reduced,
/// non-trivial generators at q0, converted to a CDFA.
inline StallingsAutomaton build_stallings(const std::shared_ptr<Grammar>& g, const std::vector<Ref>& generators,
                                          const FoldObserver& observer = {}, std::uint64_t budget = kDefaultBudget) {
  Automaton bouquet(g);
  bouquet.add_state();
  bouquet.add_final(0);
  StallingsAutomaton h{Automaton(g), 0, {}};
  for (Ref w : generators) {
    const Ref r = free_reduce(*g, w);
    if (r.empty()) continue;
    bouquet.add_pair(0, r, 0);
    ++h.generators;
  }
  Conversion c = to_cdfa(bouquet, observer, budget);
  std::size_t dropped = 0;
  h.automaton = detail::canonical_order(c.automaton, dropped);
  if (dropped != 0) throw InvariantViolation("Stallings automaton has unreachable states");
  if (h.automaton.finals() != std::vector<StateId>{0})
    throw InvariantViolation("Stallings automaton must have q0 as its only final state");
  h.stats = c.stats;
  return h;
}

/// π(word(W)) ∈ H.
inline bool subgroup_member(const StallingsAutomaton& h, Ref w, std::uint64_t budget = kDefaultBudget) {
  return member(h.automaton, free_reduce(h.automaton.grammar(), w), budget);
}

/// Shortest X with π(W) ∈ H·π(X): the reduced W is read as far as it goes,
/// the point reached is replaced by the shortest path to it and the unread
/// rest is appended.
inline Ref coset_representative(const StallingsAutomaton& h, Ref w, std::uint64_t budget = kDefaultBudget) {
  const Automaton& a = h.automaton;
  Grammar& g = a.grammar();
  const Ref r = free_reduce(g, w);
  const RunResult run_r = run(a, r, RunPoint::at(a.initial()), budget);
  const Ref rest = g.suffix_from(r, run_r.consumed);
  const detail::ShortestPaths sp = detail::shortest_paths(a);
  Ref head;
  if (run_r.end.is_state()) {
    head = detail::path_label(a, sp, run_r.end.state);
  } else {
    const Transition& tr = a.transition(run_r.end.trans);
    const Length o = run_r.end.offset, len = tr.label.length();
    if (add_len(sp.dist[tr.src], o) <= add_len(sp.dist[tr.dst], len - o))
      head = g.concat(detail::path_label(a, sp, tr.src), g.prefix(tr.label, o));
    else
      head = g.concat(detail::path_label(a, sp, tr.dst), g.prefix(a.transition(tr.inv).label, len - o));
  }
  return g.concat(head, rest);
}

struct CyclicIntersection {
  Length m = 0;  // 0: the intersection is trivial
  Ref x;         // reduced word of W^m
};

/// <π(W)> ∩ H = <π(W)^m>. With W' = U·V·U^-1 reduced and V cyclically
/// reduced, the automaton is re-rooted where U ends and m is the least
/// positive t with V^t accepted there.
inline CyclicIntersection cyclic_intersection(const StallingsAutomaton& h, Ref w,
                                              std::uint64_t budget = kDefaultBudget) {
  const Automaton& a = h.automaton;
  Grammar& g = a.grammar();
  const Ref r = free_reduce(g, w);
  if (r.empty()) return {0, Grammar::empty_ref()};
  const auto [u, v] = cyclic_decompose(g, r);
  const RunResult ru = run(a, u, RunPoint::at(a.initial()), budget);
  if (ru.consumed < u.length()) return {0, Grammar::empty_ref()};
  Automaton b = a;
  StateId root;
  if (ru.end.is_state()) {
    root = ru.end.state;
  } else {
    const Transition tr = a.transition(ru.end.trans);
    const Ref y_inv = a.transition(tr.inv).label;
    const Length o = ru.end.offset, len = tr.label.length();
    root = b.add_state();
    b.remove_pair(ru.end.trans);
    b.add_pair(tr.src, g.prefix(tr.label, o), root, g.suffix_from(y_inv, len - o));
    b.add_pair(root, g.suffix_from(tr.label, o), tr.dst, g.prefix(y_inv, len - o));
  }
  b.set_initial(root);
  b.set_finals({root});
  const PeriodicLang p = periodic_intersection(b, Grammar::empty_ref(), v, budget);
  const auto m = detail::least_positive(p.exponents);
  if (!m) return {0, Grammar::empty_ref()};
  return {*m, g.concat(g.concat(u, g.power(v, *m)), g.inverse(u))};
}

}  // namespace slpfold
