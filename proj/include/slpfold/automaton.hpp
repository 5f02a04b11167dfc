#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "grammar.hpp"

namespace slpfold {

using StateId = std::uint32_t;
using TransId = std::uint32_t;
inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct Transition {
  StateId src = 0;
  Ref label;
  StateId dst = 0;
  TransId inv = kNone;  // involution partner, kNone in non-involutive automata
};

/// old state id -> new state id (kNone when the state was deleted).
using StateMap = std::vector<StateId>;

inline StateMap compose(const StateMap& first, const StateMap& second) {
  StateMap out(first.size(), kNone);
  for (std::size_t i = 0; i < first.size(); ++i)
    if (first[i] != kNone) out[i] = second[first[i]];
  return out;
}

inline StateMap identity_map(std::size_t n) {
  StateMap m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<StateId>(i);
  return m;
}

/// Finite automaton whose transitions are labelled by grammar references.
/// All automata built from one computation share a grammar.
class Automaton {
 public:
  explicit Automaton(std::shared_ptr<Grammar> g, bool involutive = true) : g_(std::move(g)), involutive_(involutive) {}

  Grammar& grammar() const { return *g_; }
  const std::shared_ptr<Grammar>& grammar_ptr() const { return g_; }
  bool involutive() const noexcept { return involutive_; }

  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_transitions() const noexcept { return trans_.size(); }
  const std::vector<Transition>& transitions() const noexcept { return trans_; }
  const Transition& transition(TransId t) const { return trans_.at(t); }

  StateId initial() const noexcept { return initial_; }
  void set_initial(StateId q) { initial_ = check_state(q); }
  const std::vector<StateId>& finals() const noexcept { return finals_; }
  bool is_final(StateId q) const { return std::binary_search(finals_.begin(), finals_.end(), q); }
  void set_finals(std::vector<StateId> f) {
    for (StateId q : f) check_state(q);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    finals_ = std::move(f);
  }
  void add_final(StateId q) {
    check_state(q);
    auto it = std::lower_bound(finals_.begin(), finals_.end(), q);
    if (it == finals_.end() || *it != q) finals_.insert(it, q);
  }

  StateId add_state() { return static_cast<StateId>(num_states_++); }
  StateId add_states(std::size_t n) {
    const auto first = static_cast<StateId>(num_states_);
    num_states_ += n;
    return first;
  }

  /// Adds (p, x, q) and, in involutive mode, (q, x^-1, p). Returns the id of
  /// the first; the partner is the next id.
  TransId add_pair(StateId p, Ref x, StateId q) {
    check_state(p);
    check_state(q);
    const auto t = static_cast<TransId>(trans_.size());
    if (!involutive_) {
      trans_.push_back({p, x, q, kNone});
      return t;
    }
    const Ref y = g_->inverse(x);
    trans_.push_back({p, x, q, t + 1});
    trans_.push_back({q, y, p, t});
    return t;
  }

  /// Adds a pair with a caller-supplied inverse label (trusted).
  TransId add_pair(StateId p, Ref x, StateId q, Ref x_inv) {
    check_state(p);
    check_state(q);
    const auto t = static_cast<TransId>(trans_.size());
    trans_.push_back({p, x, q, t + 1});
    trans_.push_back({q, x_inv, p, t});
    return t;
  }

  /// Non-involutive single transition.
  TransId add_transition(StateId p, Ref x, StateId q) {
    if (involutive_) throw PreconditionError("single transitions need a non-involutive automaton");
    check_state(p);
    check_state(q);
    trans_.push_back({p, x, q, kNone});
    return static_cast<TransId>(trans_.size() - 1);
  }

  /// Removes the marked transitions (and, in involutive mode, their
  /// partners). Returns old id -> new id.
  std::vector<TransId> remove_transitions(std::vector<char> dead) {
    dead.resize(trans_.size(), 0);
    if (involutive_)
      for (std::size_t t = 0; t < trans_.size(); ++t)
        if (dead[t]) dead[trans_[t].inv] = 1;
    std::vector<TransId> map(trans_.size(), kNone);
    std::vector<Transition> kept;
    for (std::size_t t = 0; t < trans_.size(); ++t)
      if (!dead[t]) {
        map[t] = static_cast<TransId>(kept.size());
        kept.push_back(trans_[t]);
      }
    for (auto& tr : kept)
      if (tr.inv != kNone) tr.inv = map[tr.inv];
    trans_ = std::move(kept);
    return map;
  }

  void remove_pair(TransId t) {
    std::vector<char> dead(trans_.size(), 0);
    dead[t] = 1;
    remove_transitions(std::move(dead));
  }

  /// Redirects every endpoint `from` to `to`; `from` becomes isolated. The
  /// merged state is initial/final if either was.
  void redirect_state(StateId from, StateId to) {
    if (from == to) return;
    for (auto& tr : trans_) {
      if (tr.src == from) tr.src = to;
      if (tr.dst == from) tr.dst = to;
    }
    if (initial_ == from) initial_ = to;
    if (is_final(from)) {
      finals_.erase(std::lower_bound(finals_.begin(), finals_.end(), from));
      add_final(to);
    }
  }

  /// Deletes the marked states together with their transitions and renumbers
  /// the rest in increasing order. The initial state may not be deleted.
  StateMap remove_states(const std::vector<char>& dead) {
    StateMap map(num_states_, kNone);
    StateId next = 0;
    for (std::size_t q = 0; q < num_states_; ++q)
      if (q >= dead.size() || !dead[q]) map[q] = next++;
    if (map[initial_] == kNone) throw PreconditionError("cannot delete the initial state");
    std::vector<char> dead_t(trans_.size(), 0);
    for (std::size_t t = 0; t < trans_.size(); ++t)
      if (map[trans_[t].src] == kNone || map[trans_[t].dst] == kNone) dead_t[t] = 1;
    remove_transitions(std::move(dead_t));
    for (auto& tr : trans_) {
      tr.src = map[tr.src];
      tr.dst = map[tr.dst];
    }
    initial_ = map[initial_];
    std::vector<StateId> f;
    for (StateId q : finals_)
      if (map[q] != kNone) f.push_back(map[q]);
    finals_.clear();
    set_finals(std::move(f));
    num_states_ = next;
    if (!names_.empty()) {
      std::vector<std::string> n(next);
      for (std::size_t q = 0; q < map.size(); ++q)
        if (map[q] != kNone) n[map[q]] = names_[q];
      names_ = std::move(n);
    }
    return map;
  }

  /// Renumbers states by an injective map onto [0, n).
  void permute_states(const StateMap& map) {
    for (auto& tr : trans_) {
      tr.src = map[tr.src];
      tr.dst = map[tr.dst];
    }
    initial_ = map[initial_];
    std::vector<StateId> f;
    for (StateId q : finals_) f.push_back(map[q]);
    set_finals(std::move(f));
    if (!names_.empty()) {
      std::vector<std::string> n(names_.size());
      for (std::size_t q = 0; q < map.size(); ++q) n[map[q]] = names_[q];
      names_ = std::move(n);
    }
  }

  void set_label(TransId t, Ref x) { trans_.at(t).label = x; }
  void set_transitions(std::vector<Transition> t) { trans_ = std::move(t); }

  /// Optional state names (used by the text format); default q<i>.
  std::string state_name(StateId q) const {
    if (q < names_.size() && !names_[q].empty()) return names_[q];
    return "q" + std::to_string(q);
  }
  void set_state_names(std::vector<std::string> n) { names_ = std::move(n); }
  void clear_state_names() { names_.clear(); }

  /// Transitions leaving q, in id order.
  std::vector<TransId> out(StateId q) const {
    std::vector<TransId> r;
    for (std::size_t t = 0; t < trans_.size(); ++t)
      if (trans_[t].src == q) r.push_back(static_cast<TransId>(t));
    return r;
  }

  std::vector<std::vector<TransId>> out_lists() const {
    std::vector<std::vector<TransId>> r(num_states_);
    for (std::size_t t = 0; t < trans_.size(); ++t) r[trans_[t].src].push_back(static_cast<TransId>(t));
    return r;
  }

  std::vector<std::size_t> in_degrees() const {
    std::vector<std::size_t> d(num_states_, 0);
    for (const auto& tr : trans_) ++d[tr.dst];
    return d;
  }
  std::vector<std::size_t> out_degrees() const {
    std::vector<std::size_t> d(num_states_, 0);
    for (const auto& tr : trans_) ++d[tr.src];
    return d;
  }

 private:
  StateId check_state(StateId q) const {
    if (q >= num_states_) throw RangeError("state id out of range");
    return q;
  }

  std::shared_ptr<Grammar> g_;
  bool involutive_;
  std::size_t num_states_ = 0;
  std::vector<Transition> trans_;
  StateId initial_ = 0;
  std::vector<StateId> finals_;
  std::vector<std::string> names_;
};

}  // namespace slpfold
