#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "grammar.hpp"

namespace slpfold {

/// Exact equality of two grammar-compressed words by recompression.
///
/// Both words are copied into a private SLP (truncations are resolved while
/// copying) and then rewritten in rounds of block compression (maximal runs
/// a^k become fresh letters) and pair compression (for a partition of the
/// letters into left/right, every occurrence of ab with a left and b right
/// becomes a fresh letter). Before each round, letters that would straddle a
/// rule boundary are popped out of the rule into its callers, so the
/// replacements are performed on rule bodies only. Both rewritings are
/// injective functions of the word, so the two inputs are equal iff their
/// compressed forms are; rounds continue until the words are short enough to
/// compare letter by letter.
class Recompression {
 public:
  static bool equal(const Grammar& g, Ref a, Ref b) {
    if (a.length() != b.length()) return false;
    if (a.length() == 0) return true;
    Recompression rc(g);
    rc.roots_[0] = {Item::nt(rc.materialize(a))};
    rc.roots_[1] = {Item::nt(rc.materialize(b))};
    return rc.run();
  }

  /// Number of rounds used by the last call on this thread (diagnostics).
  static std::size_t& last_rounds() {
    thread_local std::size_t n = 0;
    return n;
  }

 private:
  struct Item {
    bool is_nt;
    std::uint32_t id;
    Length exp;  // run length for letters; 1 for non-terminals
    static Item nt(std::uint32_t i) { return Item{true, i, 1}; }
    static Item letter(std::uint32_t c, Length e = 1) { return Item{false, c, e}; }
  };
  using Body = std::vector<Item>;

  struct Popped {
    bool present = false;
    std::uint32_t letter = 0;
    Length exp = 0;
  };

  explicit Recompression(const Grammar& g) : g_(g), next_letter_(static_cast<std::uint32_t>(g.alphabet().size())) {}

  std::uint32_t materialize(Ref x) {
    std::optional<Letter> single;
    x = g_.normalize(x, &single);
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
    Body body;
    if (single) {
      body.push_back(Item::letter(*single));
    } else {
      const auto& rule = g_.rule(x.rule);
      for (std::size_t t = Grammar::locate(rule, x.start); t < rule.body.size() && rule.offsets[t] < x.end; ++t) {
        const Symbol& s = rule.body[t];
        if (s.is_letter) {
          body.push_back(Item::letter(s.letter));
          continue;
        }
        const Length lo = std::max(x.start, rule.offsets[t]) - rule.offsets[t];
        const Length hi = std::min(x.end, rule.offsets[t + 1]) - rule.offsets[t];
        body.push_back(Item::nt(materialize(Ref{s.ref.rule, s.ref.start + lo, s.ref.start + hi})));
      }
    }
    const auto id = static_cast<std::uint32_t>(rules_.size());
    rules_.push_back(std::move(body));
    memo_.emplace(x, id);
    return id;
  }

  bool run() {
    std::size_t rounds = 0;
    for (;;) {
      dead_.assign(rules_.size(), 0);
      for (std::size_t i = 0; i < rules_.size(); ++i) dead_[i] = rules_[i].empty();
      compute_lengths();
      const Length la = root_length(0), lb = root_length(1);
      if (la != lb) return finish(rounds, false);
      if (la <= kExpandLimit) return finish(rounds, expand_root(0) == expand_root(1));
      block_compression();
      pair_compression();
      ++rounds;
    }
  }

  bool finish(std::size_t rounds, bool v) {
    last_rounds() = rounds;
    return v;
  }

  static constexpr Length kExpandLimit = 32;

  void compute_lengths() {
    len_.assign(rules_.size(), 0);
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      Length l = 0;
      for (const Item& it : rules_[i]) l += it.is_nt ? len_[it.id] : it.exp;
      len_[i] = l;
    }
  }

  Length root_length(int r) const {
    Length l = 0;
    for (const Item& it : roots_[r]) l += it.is_nt ? len_[it.id] : it.exp;
    return l;
  }

  std::vector<std::uint32_t> expand_root(int r) const {
    std::vector<std::uint32_t> out;
    for (const Item& it : roots_[r]) expand_item(it, out);
    return out;
  }

  void expand_item(const Item& it, std::vector<std::uint32_t>& out) const {
    if (!it.is_nt) {
      for (Length k = 0; k < it.exp; ++k) out.push_back(it.id);
      return;
    }
    for (const Item& sub : rules_[it.id]) expand_item(sub, out);
  }

  static void push_merge(Body& body, Item it) {
    if (!it.is_nt && !body.empty() && !body.back().is_nt && body.back().id == it.id)
      body.back().exp += it.exp;
    else
      body.push_back(it);
  }

  // Rebuilds `body` with every child replaced by pre(child) child suf(child).
  Body substitute(const Body& body, const std::vector<Popped>& pre, const std::vector<Popped>& suf, bool merge) const {
    Body out;
    out.reserve(body.size() + 4);
    auto push = [&](Item it) {
      if (merge)
        push_merge(out, it);
      else
        out.push_back(it);
    };
    for (const Item& it : body) {
      if (!it.is_nt) {
        push(it);
        continue;
      }
      if (pre[it.id].present) push(Item::letter(pre[it.id].letter, pre[it.id].exp));
      if (!dead_[it.id]) push(it);
      if (suf[it.id].present) push(Item::letter(suf[it.id].letter, suf[it.id].exp));
    }
    return out;
  }

  std::uint32_t fresh(std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t>& dict, std::uint64_t a,
                      std::uint64_t b) {
    auto [it, inserted] = dict.try_emplace({a, b}, next_letter_);
    if (inserted) ++next_letter_;
    return it->second;
  }

  void block_compression() {
    const std::size_t n = rules_.size();
    std::vector<Popped> pre(n), suf(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (dead_[i]) continue;
      Body body = substitute(rules_[i], pre, suf, true);
      // The leading run of the word is the first item: every live child
      // starts with a letter different from the run popped in front of it.
      if (!body.empty()) {
        pre[i] = Popped{true, body.front().id, body.front().exp};
        body.erase(body.begin());
      }
      if (!body.empty()) {
        suf[i] = Popped{true, body.back().id, body.back().exp};
        body.pop_back();
      }
      rules_[i] = std::move(body);
      dead_[i] = rules_[i].empty();
    }
    for (auto& r : roots_) r = substitute(r, pre, suf, true);
    auto replace_runs = [&](Body& body) {
      for (Item& it : body)
        if (!it.is_nt && it.exp >= 2) it = Item::letter(fresh(block_dict_, it.id, it.exp));
    };
    for (auto& r : rules_) replace_runs(r);
    for (auto& r : roots_) replace_runs(r);
  }

  void pair_compression() {
    const std::size_t n = rules_.size();
    // First/last letters of every live rule.
    std::vector<std::uint32_t> first(n), last(n);
    auto item_first = [&](const Item& it) { return it.is_nt ? first[it.id] : it.id; };
    auto item_last = [&](const Item& it) { return it.is_nt ? last[it.id] : it.id; };
    for (std::size_t i = 0; i < n; ++i) {
      if (dead_[i]) continue;
      first[i] = item_first(rules_[i].front());
      last[i] = item_last(rules_[i].back());
    }
    // Live rules reachable from the roots.
    std::vector<char> reach(n, 0);
    std::vector<std::uint32_t> stack;
    for (const auto& r : roots_)
      for (const Item& it : r)
        if (it.is_nt && !reach[it.id]) reach[it.id] = 1, stack.push_back(it.id);
    while (!stack.empty()) {
      auto i = stack.back();
      stack.pop_back();
      for (const Item& it : rules_[i])
        if (it.is_nt && !reach[it.id]) reach[it.id] = 1, stack.push_back(it.id);
    }
    // Adjacent letter pairs listed by the grammar (explicit or crossing).
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
    auto count_body = [&](const Body& body) {
      for (std::size_t t = 0; t + 1 < body.size(); ++t) {
        const auto a = item_last(body[t]), b = item_first(body[t + 1]);
        if (a != b) ++counts[{a, b}];
      }
    };
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i]) count_body(rules_[i]);
    for (const auto& r : roots_) count_body(r);

    // Greedy partition: each letter joins the side that covers more pair
    // occurrences with letters already placed; flip if the reverse direction
    // covers more.
    std::map<std::uint32_t, std::vector<std::pair<std::uint32_t, std::int64_t>>> adj;  // signed: + out, - in
    for (const auto& [p, c] : counts) {
      adj[p.first].push_back({p.second, static_cast<std::int64_t>(c)});
      adj[p.second].push_back({p.first, -static_cast<std::int64_t>(c)});
    }
    std::unordered_map<std::uint32_t, int> side;  // 0 = left, 1 = right
    for (const auto& [c, nbrs] : adj) {
      std::int64_t as_left = 0, as_right = 0;
      for (const auto& [d, w] : nbrs) {
        auto s = side.find(d);
        if (s == side.end()) continue;
        if (w > 0 && s->second == 1) as_left += w;    // c d with d right
        if (w < 0 && s->second == 0) as_right += -w;  // d c with d left
      }
      side[c] = as_left >= as_right ? 0 : 1;
    }
    std::uint64_t lr = 0, rl = 0;
    for (const auto& [p, c] : counts) {
      const int sa = side[p.first], sb = side[p.second];
      if (sa == 0 && sb == 1) lr += c;
      if (sa == 1 && sb == 0) rl += c;
    }
    const int left_side = lr >= rl ? 0 : 1;
    auto is_left = [&](std::uint32_t c) {
      auto s = side.find(c);
      return s != side.end() && s->second == left_side;
    };
    auto is_right = [&](std::uint32_t c) {
      auto s = side.find(c);
      return s != side.end() && s->second != left_side;
    };

    std::vector<Popped> lpop(n), rpop(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (dead_[i]) continue;
      Body body = substitute(rules_[i], lpop, rpop, false);
      if (!body.empty() && !body.front().is_nt && is_right(body.front().id)) {
        lpop[i] = Popped{true, body.front().id, 1};
        body.erase(body.begin());
      }
      if (!body.empty() && !body.back().is_nt && is_left(body.back().id)) {
        rpop[i] = Popped{true, body.back().id, 1};
        body.pop_back();
      }
      rules_[i] = std::move(body);
      dead_[i] = rules_[i].empty();
    }
    for (auto& r : roots_) r = substitute(r, lpop, rpop, false);
    auto compress = [&](Body& body) {
      Body out;
      out.reserve(body.size());
      for (std::size_t t = 0; t < body.size(); ++t) {
        if (t + 1 < body.size() && !body[t].is_nt && !body[t + 1].is_nt && is_left(body[t].id) &&
            is_right(body[t + 1].id)) {
          out.push_back(Item::letter(fresh(pair_dict_, body[t].id, body[t + 1].id)));
          ++t;
        } else {
          out.push_back(body[t]);
        }
      }
      body = std::move(out);
    };
    for (auto& r : rules_) compress(r);
    for (auto& r : roots_) compress(r);
  }

  const Grammar& g_;
  std::vector<Body> rules_;
  Body roots_[2];
  std::vector<char> dead_;
  std::vector<Length> len_;
  std::unordered_map<Ref, std::uint32_t, RefHash> memo_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint32_t> block_dict_, pair_dict_;
  std::uint32_t next_letter_;
};

}  // namespace slpfold
