#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "automaton.hpp"
#include "automaton_ops.hpp"
#include "slp.hpp"

namespace slpfold {

inline constexpr std::uint64_t kDefaultBudget = 1'000'000;

/// A state, or the point `offset` letters into transition `trans`
/// (0 < offset < |label|).
struct RunPoint {
  StateId state = 0;
  TransId trans = kNone;
  Length offset = 0;

  static RunPoint at(StateId q) { return {q, kNone, 0}; }
  static RunPoint inside(TransId t, Length off) { return {kNone, t, off}; }
  bool is_state() const noexcept { return trans == kNone; }
  bool operator==(const RunPoint&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const RunPoint& p) {
  if (p.is_state()) return os << 'q' << p.state;
  return os << 't' << p.trans << '(' << p.offset << ')';
}

struct RunResult {
  Length consumed = 0;
  RunPoint end;
  /// Final states met at state boundaries, by strictly increasing position.
  /// Inside an accelerated jump only the last lap is listed.
  std::vector<std::pair<Length, StateId>> accepted_prefixes;
  std::uint64_t budget_spent = 0;
  std::uint64_t jumps = 0;

  std::optional<Length> last_accepted() const {
    if (accepted_prefixes.empty()) return std::nullopt;
    return accepted_prefixes.back().first;
  }
};

/// Deterministic simulation of compressed words on a CDFA. The first-letter
/// index is built once; construction throws NondeterminismError when two
/// transitions out of a state share a first letter.
class Runner {
 public:
  explicit Runner(const Automaton& a) : a_(a), index_(a.num_states()) {
    const Grammar& g = a.grammar();
    for (std::size_t t = 0; t < a.num_transitions(); ++t) {
      const Transition& tr = a.transition(static_cast<TransId>(t));
      if (tr.label.empty())
        throw NondeterminismError("empty transition label", static_cast<TransId>(t), static_cast<TransId>(t));
      auto [it, fresh] = index_[tr.src].emplace(g.first_letter(tr.label), static_cast<TransId>(t));
      if (!fresh) throw NondeterminismError("transitions share a first letter", it->second, static_cast<TransId>(t));
    }
  }

  const Automaton& automaton() const noexcept { return a_; }

  /// Transition out of q whose label starts with x.
  std::optional<TransId> step(StateId q, Letter x) const {
    auto it = index_[q].find(x);
    if (it == index_[q].end()) return std::nullopt;
    return it->second;
  }

  /// Follows word(x) from `from` as far as it goes. Each transition entered
  /// costs one budget unit, as does each accelerated jump: on returning to a
  /// state seen earlier the loop word is repeated as often as the input
  /// allows in one step.
  RunResult run(Ref x, RunPoint from, std::uint64_t budget = kDefaultBudget, bool accelerate = true) const {
    Grammar& g = a_.grammar();
    const Length n = x.length();
    RunResult r;
    r.end = from;
    auto charge = [&] {
      if (++r.budget_spent > budget) throw BudgetExceeded("run exceeded budget of " + std::to_string(budget));
    };
    // Leaves a transition point: returns false when the run stops inside it.
    auto traverse = [&](TransId t, Length off) {
      const Transition& tr = a_.transition(t);
      const Ref rest = g.suffix_from(tr.label, off);
      const Length c = lcp(g, g.suffix_from(x, r.consumed), rest);
      r.consumed += c;
      if (c == rest.length()) {
        r.end = RunPoint::at(tr.dst);
        return true;
      }
      r.end = RunPoint::inside(t, off + c);
      return false;
    };
    if (!from.is_state()) {
      if (from.offset == 0 || from.offset >= a_.transition(from.trans).label.length())
        throw RangeError("run point offset must be interior");
      if (n == 0 || !traverse(from.trans, from.offset)) return r;
    }
    std::unordered_map<StateId, Length> seen;
    for (;;) {
      const StateId q = r.end.state;
      if (a_.is_final(q)) r.accepted_prefixes.emplace_back(r.consumed, q);
      if (r.consumed == n) return r;
      if (accelerate) {
        auto [it, fresh] = seen.try_emplace(q, r.consumed);
        if (!fresh && it->second < r.consumed) {
          const Length p1 = it->second, before = r.consumed, period = before - p1;
          const Length laps = lcp(g, g.suffix_from(x, before), g.suffix_from(x, p1)) / period;
          if (laps > 0) {
            charge();
            ++r.jumps;
            const Length after = before + laps * period;
            // Finals met on one lap, replayed on the last one.
            std::vector<std::pair<Length, StateId>> lap;
            for (const auto& [pos, s] : r.accepted_prefixes)
              if (pos >= p1 && pos < before && pos + (after - before) > before) lap.emplace_back(pos + (after - before), s);
            r.accepted_prefixes.insert(r.accepted_prefixes.end(), lap.begin(), lap.end());
            r.consumed = after;
            it->second = after;
            continue;
          }
        }
        it->second = r.consumed;
      }
      const auto t = step(q, g.char_at(x, r.consumed));
      if (!t) return r;
      charge();
      if (!traverse(*t, 0)) return r;
    }
  }

 private:
  const Automaton& a_;
  std::vector<std::unordered_map<Letter, TransId>> index_;
};

inline RunResult run(const Automaton& a, Ref x, RunPoint from, std::uint64_t budget = kDefaultBudget,
                     bool accelerate = true) {
  return Runner(a).run(x, from, budget, accelerate);
}

/// True iff word(x) read from `from` is consumed entirely and ends at `to`.
inline bool determines_path(const Automaton& a, Ref x, RunPoint from, RunPoint to,
                            std::uint64_t budget = kDefaultBudget) {
  const RunResult r = run(a, x, from, budget);
  return r.consumed == x.length() && r.end == to;
}

}  // namespace slpfold
