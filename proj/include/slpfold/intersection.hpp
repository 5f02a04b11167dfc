#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "automaton.hpp"
#include "run.hpp"
#include "unary.hpp"
#include "word_algebra.hpp"

namespace slpfold {

namespace detail {

struct WeightedEdge {
  Length weight = 0;
  StateId dst = kNone;
};

// Language of a functional weighted graph read from `start`: the weights of
// walks from start ending in a final state.
inline UnaryLang walk_language(const std::vector<std::optional<WeightedEdge>>& next, StateId start,
                               const std::vector<char>& final) {
  std::map<StateId, std::size_t> index;
  std::vector<Length> at;
  std::vector<StateId> order;
  StateId q = start;
  Length w = 0;
  for (;;) {
    auto [it, fresh] = index.emplace(q, order.size());
    if (!fresh) {
      const std::size_t c = it->second;
      std::set<Length> exc, res;
      for (std::size_t i = 0; i < c; ++i)
        if (final[order[i]]) exc.insert(at[i]);
      const Length period = w - at[c];
      for (std::size_t i = c; i < order.size(); ++i)
        if (final[order[i]]) res.insert(at[i] - at[c]);
      if (period == 0) {
        for (Length r : res) exc.insert(at[c] + r);
        return UnaryLang::make(std::move(exc), 0, 0, {});
      }
      return UnaryLang::make(std::move(exc), at[c], period, std::move(res));
    }
    order.push_back(q);
    at.push_back(w);
    if (!next[q]) break;
    w = add_len(w, next[q]->weight);
    q = next[q]->dst;
  }
  std::set<Length> exc;
  for (std::size_t i = 0; i < order.size(); ++i)
    if (final[order[i]]) exc.insert(at[i]);
  return UnaryLang::make(std::move(exc), 0, 0, {});
}

}  // namespace detail

/// Normal form of L(A) for a CDFA whose labels are all powers of one letter.
inline UnaryLang unary_form(const Automaton& a) {
  Grammar& g = a.grammar();
  std::optional<Letter> letter;
  std::vector<std::optional<detail::WeightedEdge>> next(a.num_states());
  for (std::size_t t = 0; t < a.num_transitions(); ++t) {
    const Transition& tr = a.transition(static_cast<TransId>(t));
    const Ref x = tr.label;
    if (x.empty()) throw PreconditionError("empty transition label");
    const Letter c = g.first_letter(x);
    if (letter && *letter != c) throw UnsupportedAlphabet("automaton is not unary");
    if (x.length() > 1 && lcp(g, g.suffix_from(x, 1), x) != x.length() - 1)
      throw UnsupportedAlphabet("automaton is not unary");
    letter = c;
    if (next[tr.src]) throw NondeterminismError("two transitions out of a unary state", 0, t);
    next[tr.src] = detail::WeightedEdge{x.length(), tr.dst};
  }
  std::vector<char> final(a.num_states(), 0);
  for (StateId f : a.finals()) final[f] = 1;
  return detail::walk_language(next, a.initial(), final);
}

inline UnaryLang unary_intersection(const Automaton& a, const Automaton& b) {
  return unary_intersection(unary_form(a), unary_form(b));
}

/// Bound on the least n with u·v^n ∈ L(A) when v is longer than every label.
inline std::size_t power_pump_bound(const Automaton& a, bool deterministic = true) {
  return (deterministic ? 2 : 4) * a.num_transitions() + 1;
}

/// The same bound with |δ| counted in letters, i.e. over the edges of the
/// spelled-out automaton. The transition-count version above can fail once
/// labels are compressed: a single loop a^7 with v = a^9 first accepts at 7.
inline Length letters_pump_bound(const Automaton& a, bool deterministic = true) {
  Length edges = 0;
  for (const auto& tr : a.transitions()) edges = add_len(edges, tr.label.length());
  return add_len(mul_len(deterministic ? 2 : 4, edges), 1);
}

/// word(u)·word(v)^t for t in `exponents`.
struct PeriodicLang {
  Ref u, v;
  UnaryLang exponents;

  Length n0() const { return exponents.n0; }
  Length period() const { return exponents.period; }
  const std::set<Length>& residues() const { return exponents.residues; }
  const std::set<Length>& exceptions() const { return exponents.exceptions; }
  bool empty() const { return exponents.empty(); }
  bool contains_power(Length t) const { return exponents.contains(t); }
};

inline std::ostream& operator<<(std::ostream& os, const PeriodicLang& p) { return os << p.exponents; }

namespace detail {

// The reduced case: v primitive and u not ending in v. Returns the exponent
// set {t : u·v^t ∈ L(A)}.
inline UnaryLang periodic_exponents(const Automaton& a, Ref u, Ref v, std::uint64_t budget) {
  Grammar& g = a.grammar();
  const Length m = v.length();
  // Step 1: expose maximal right v-factorisations as v^k segments.
  Automaton b(a.grammar_ptr(), false);
  b.add_states(a.num_states());
  b.set_initial(a.initial());
  b.set_finals(a.finals());
  std::vector<std::optional<WeightedEdge>> vnext;  // least v-edge per state
  auto offer = [&](StateId p, Length k, StateId q) {
    if (vnext.size() < b.num_states()) vnext.resize(b.num_states());
    if (k > 0 && (!vnext[p] || k < vnext[p]->weight)) vnext[p] = WeightedEdge{k, q};
  };
  std::vector<std::tuple<StateId, Length, StateId>> step1;
  for (const auto& tr : a.transitions()) {
    const auto f = right_factorisation(g, tr.label, v);
    if (!f) {
      b.add_transition(tr.src, tr.label, tr.dst);
      continue;
    }
    const Length lead = f->i > 0 ? m - f->i : 0;
    const Length cut1 = f->rest.length() + lead, cut2 = tr.label.length() - f->j;
    const StateId c = cut1 == 0 ? tr.src : b.add_state();
    const StateId d = f->j == 0 ? tr.dst : (f->n == 0 ? c : b.add_state());
    if (cut1 > 0) b.add_transition(tr.src, g.prefix(tr.label, cut1), c);
    if (cut2 > cut1) b.add_transition(c, g.truncate(tr.label, cut1, cut2), d);
    if (f->j > 0) b.add_transition(d, g.suffix_from(tr.label, cut2), tr.dst);
    if (f->n > 0) step1.emplace_back(c, f->n, d);
  }
  vnext.assign(b.num_states(), std::nullopt);
  for (auto [c, k, d] : step1) offer(c, k, d);
  const Runner runner(b);
  const std::size_t bound = power_pump_bound(b);
  // Step 2: least m ≤ bound with v^m leading from p to a state.
  for (StateId p = 0; p < b.num_states(); ++p) {
    RunPoint cur = RunPoint::at(p);
    for (Length k = 1; k <= bound; ++k) {
      const RunResult r = runner.run(v, cur, budget);
      if (r.consumed < m) break;
      cur = r.end;
      if (cur.is_state()) {
        offer(p, k, cur.state);
        break;
      }
    }
  }
  // Step 3: the least m with u·v^m leading from q0 to a state.
  const StateId start = b.add_state();
  vnext.resize(b.num_states());
  {
    const RunResult r = runner.run(u, RunPoint::at(b.initial()), budget);
    if (r.consumed == u.length()) {
      RunPoint cur = r.end;
      for (Length k = 0; k <= bound; ++k) {
        if (k > 0) {
          const RunResult s = runner.run(v, cur, budget);
          if (s.consumed < m) break;
          cur = s.end;
        }
        if (cur.is_state()) {
          vnext[start] = WeightedEdge{k, cur.state};
          break;
        }
      }
    }
  }
  if (!vnext[start]) return UnaryLang::none();
  std::vector<char> final(b.num_states(), 0);
  for (StateId f : b.finals()) final[f] = 1;
  return walk_language(vnext, start, final);
}

}  // namespace detail

/// L(A) ∩ word(u)·word(v)^*, for a CDFA A and non-empty v.
inline PeriodicLang periodic_intersection(const Automaton& a, Ref u, Ref v, std::uint64_t budget = kDefaultBudget) {
  if (v.empty()) throw PreconditionError("periodic intersection needs a non-empty period word");
  Grammar& g = a.grammar();
  const auto [y, k] = primitive_root(g, v);
  const Length l = max_power_suffix(g, u, y);
  const Ref u0 = g.drop_last(u, l * y.length());
  const UnaryLang reduced = detail::periodic_exponents(a, u0, y, budget);
  return PeriodicLang{u, v, unary_preimage(reduced, l, k)};
}

}  // namespace slpfold
