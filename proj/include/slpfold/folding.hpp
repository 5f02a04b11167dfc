#pragma once

#include <functional>
#include <map>
#include <optional>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "automaton.hpp"
#include "automaton_ops.hpp"
#include "run.hpp"
#include "slp.hpp"

namespace slpfold {

struct FoldOutcome {
  Automaton automaton;
  StateMap map;  // states of the input -> states of the output
  Length i = 0, j = 0;
  bool complete = false;
};

/// Folds the pair of α into the rest of an involutive automaton: X[:i] and
/// X^-1[:j] are read as far as possible from the endpoints without α, the
/// transitions where those runs stop are split, and only X[i:-j] remains as a
/// new pair between the two split points. A complete fold (i + j = |X|)
/// identifies the two points instead.
inline FoldOutcome fold_transition(const Automaton& a, TransId alpha, std::uint64_t budget = kDefaultBudget) {
  if (!a.involutive()) throw PreconditionError("transition folds need an involutive automaton");
  Grammar& g = a.grammar();
  const Transition al = a.transition(alpha);
  const Ref x = al.label, x_inv = a.transition(al.inv).label;
  Automaton b = a;
  b.clear_state_names();
  std::vector<char> gone(a.num_transitions(), 0);
  gone[alpha] = 1;
  const std::vector<TransId> tmap = b.remove_transitions(std::move(gone));
  std::vector<TransId> back(b.num_transitions());
  for (std::size_t t = 0; t < tmap.size(); ++t)
    if (tmap[t] != kNone) back[tmap[t]] = static_cast<TransId>(t);

  RunResult r1, r2;
  {
    std::optional<Runner> runner;
    try {
      runner.emplace(b);
    } catch (const NondeterminismError& e) {
      throw NondeterminismError("automaton without the folded pair is not deterministic", back[e.first()],
                                back[e.second()]);
    }
    r1 = runner->run(x, RunPoint::at(al.src), budget);
    r2 = runner->run(g.prefix(x_inv, x.length() - r1.consumed), RunPoint::at(al.dst), budget);
  }
  const Length i = r1.consumed, j = r2.consumed;

  // Points inside a transition are keyed by the lower id of its pair.
  auto canon = [&](const RunPoint& pt) -> std::optional<std::pair<TransId, Length>> {
    if (pt.is_state()) return std::nullopt;
    const Transition& tr = b.transition(pt.trans);
    if (tr.inv < pt.trans) return std::make_pair(tr.inv, tr.label.length() - pt.offset);
    return std::make_pair(pt.trans, pt.offset);
  };
  std::map<TransId, std::map<Length, StateId>> cuts;
  for (const RunPoint* pt : {&r1.end, &r2.end})
    if (auto c = canon(*pt)) cuts[c->first].emplace(c->second, kNone);
  std::vector<char> split(b.num_transitions(), 0);
  for (auto& [t, offs] : cuts) {
    const Transition tr = b.transition(t);
    StateId prev = tr.src;
    Length from = 0;
    for (auto& [off, s] : offs) {
      s = b.add_state();
      b.add_pair(prev, g.truncate(tr.label, from, off), s);
      prev = s;
      from = off;
    }
    b.add_pair(prev, g.suffix_from(tr.label, from), tr.dst);
    split[t] = 1;
  }
  auto resolve = [&](const RunPoint& pt) {
    const auto c = canon(pt);
    return c ? cuts[c->first][c->second] : pt.state;
  };
  const StateId pp = resolve(r1.end), qq = resolve(r2.end);
  b.remove_transitions(std::move(split));

  StateMap map = identity_map(a.num_states());
  const Ref w = g.truncate(x, i, x.length() - j);
  if (!w.empty()) {
    if (pp != qq) {
      b.add_pair(pp, w, qq);
    } else {
      // A loop w = s·w'·s^-1 at one point: s becomes a stem so that the
      // loop and its inverse do not start with the same letter.
      const Length m = lcp(g, w, g.inverse(w));
      if (2 * m >= w.length()) throw PreconditionError("transition label is not freely reduced");
      if (m == 0) {
        b.add_pair(pp, w, pp);
      } else {
        const StateId s = b.add_state();
        b.add_pair(pp, g.prefix(w, m), s);
        b.add_pair(s, g.truncate(w, m, w.length() - m), s);
      }
    }
  } else if (pp != qq) {
    StateId keep = std::min(pp, qq), drop = std::max(pp, qq);
    if (drop == b.initial()) std::swap(keep, drop);
    b.redirect_state(drop, keep);
    for (auto& s : map)
      if (s == drop) s = keep;
    std::vector<char> dead(b.num_states(), 0);
    dead[drop] = 1;
    map = compose(map, b.remove_states(dead));
  }
  return {std::move(b), std::move(map), i, j, i + j == x.length()};
}

struct FoldStats {
  std::uint64_t folds_total = 0;
  std::uint64_t folds_complete = 0;
  std::size_t recursion_depth = 0;
  std::size_t k_initial = 0;
  BigNat n_initial = 0;
  BigNat bound = 0;
};

/// Reported after every fold, before the result is made minimalistic.
struct FoldEvent {
  const Automaton& before;
  const Automaton& after;
  TransId alpha;
  Length i, j;
  bool complete;
  std::size_t level;   // recursion depth of the conversion doing the fold
  BigNat n_round;      // n and k of the automaton the round started from
  std::size_t k_round;
  std::uint64_t step;  // 1-based over the whole conversion
};

using FoldObserver = std::function<void(const FoldEvent&)>;

/// floor((2·k·log2 n)^k), 0 when n < 2.
inline BigNat fold_bound(std::size_t k, const BigNat& n) {
  using Float = boost::multiprecision::cpp_bin_float_100;
  if (n < 2 || k == 0) return 0;
  const std::size_t msb = boost::multiprecision::msb(n);
  const Float lg = (BigNat(1) << msb) == n ? Float(msb) : boost::multiprecision::log(Float(n)) / boost::multiprecision::log(Float(2));
  const Float base = Float(2 * k) * lg;
  const Float v = boost::multiprecision::pow(base, Float(k));
  // Nudge up so values that are integers in exact arithmetic survive rounding.
  return BigNat(boost::multiprecision::floor(v * (1 + Float("1e-60"))));
}

struct Conversion {
  Automaton automaton;
  StateMap map;  // input states -> output states
  FoldStats stats;
};

namespace detail {

struct Converter {
  std::uint64_t budget;
  FoldStats& stats;
  const FoldObserver& observer;
  std::size_t depth_limit;

  StateMap convert(Automaton& a, std::size_t level) {
    if (level > depth_limit) throw InvariantViolation("fold recursion deeper than the complexity bound allows");
    stats.recursion_depth = std::max(stats.recursion_depth, level);
    StateMap track = make_minimalistic(a);
    while (!is_deterministic(a)) {
      TransId alpha = 0;
      for (std::size_t t = 1; t < a.num_transitions(); ++t)
        if (a.transition(static_cast<TransId>(t)).label.length() > a.transition(alpha).label.length())
          alpha = static_cast<TransId>(t);
      const Transition al = a.transition(alpha);
      const Ref al_inv = a.transition(al.inv).label;
      const std::vector<StateId> finals = a.finals();
      const AutomatonMetrics round = metrics(a);

      Automaton sub = a;
      sub.remove_pair(alpha);
      sub.add_final(al.src);
      sub.add_final(al.dst);
      StateMap m = identity_map(a.num_states());
      if (!is_deterministic(sub)) m = convert(sub, level + 1);
      std::vector<StateId> f;
      for (StateId q : finals) f.push_back(m[q]);
      sub.set_finals(std::move(f));
      const TransId back = sub.add_pair(m[al.src], al.label, m[al.dst], al_inv);

      FoldOutcome fo = fold_transition(sub, back, budget);
      ++stats.folds_total;
      if (fo.complete) ++stats.folds_complete;
      if (observer)
        observer(FoldEvent{sub, fo.automaton, back, fo.i, fo.j, fo.complete, level, round.n, round.k,
                           stats.folds_total});
      if (BigNat(stats.folds_total) > stats.bound)
        throw InvariantViolation("number of transition folds exceeds (2k log2 n)^k");
      Automaton next = std::move(fo.automaton);
      const StateMap mm = make_minimalistic(next);
      track = compose(track, compose(m, compose(fo.map, mm)));
      a = std::move(next);
    }
    return track;
  }
};

}  // namespace detail

/// Involutive CNFA -> involutive CDFA with the same reduced language. The
/// longest transition is folded after the rest has been converted (with its
/// endpoints temporarily final), until the automaton is deterministic.
inline Conversion to_cdfa(const Automaton& a, const FoldObserver& observer = {},
                          std::uint64_t budget = kDefaultBudget) {
  if (!a.involutive()) throw PreconditionError("to_cdfa needs an involutive automaton");
  Conversion c{a, {}, {}};
  const AutomatonMetrics m = metrics(a);
  c.stats.k_initial = m.k;
  c.stats.n_initial = m.n;
  c.stats.bound = fold_bound(m.k, m.n);
  detail::Converter conv{budget, c.stats, observer, m.k + a.num_transitions() + 8};
  c.map = conv.convert(c.automaton, 0);
  return c;
}

}  // namespace slpfold
