#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <slpfold/grammar.hpp>

namespace testsupport {

using slpfold::Grammar;
using slpfold::Length;
using slpfold::Letter;
using slpfold::Ref;
using slpfold::Symbol;

struct GrammarShape {
  std::size_t rules = 12;
  Length max_len = 10000;
  double truncate_prob = 0.3;
  std::size_t max_body = 4;
};

/// Appends random rules (letters, whole and truncated refs) to g; returns a
/// ref to every added rule. Letters are drawn from [0, letters).
inline std::vector<Ref> random_rules(Grammar& g, std::mt19937_64& rng, std::size_t letters, const GrammarShape& s) {
  std::vector<Ref> made;
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::bernoulli_distribution trunc(s.truncate_prob);
  for (std::size_t k = 0; k < s.rules; ++k) {
    std::vector<Symbol> body;
    Length len = 0;
    const std::size_t parts = 1 + pick(s.max_body);
    for (std::size_t p = 0; p < parts; ++p) {
      if (made.empty() || pick(3) == 0) {
        body.push_back(Symbol::of(static_cast<Letter>(pick(letters))));
        len += 1;
        continue;
      }
      // Recent rules are the long ones; prefer them so lengths grow.
      const std::size_t back = std::min<std::size_t>(made.size() - 1, std::geometric_distribution<std::size_t>(0.5)(rng));
      Ref r = pick(4) == 0 ? made[pick(made.size())] : made[made.size() - 1 - back];
      if (trunc(rng) && r.length() >= 2) {
        const Length keep = std::uniform_int_distribution<Length>((r.length() + 1) / 2, r.length())(rng);
        const Length a = std::uniform_int_distribution<Length>(0, r.length() - keep)(rng);
        r = Ref{r.rule, r.start + a, r.start + a + keep};
      }
      if (len + r.length() > s.max_len) continue;
      body.push_back(Symbol::of(r));
      len += r.length();
    }
    if (body.empty()) body.push_back(Symbol::of(static_cast<Letter>(pick(letters))));
    made.push_back(g.whole(g.add_rule(body)));
  }
  return made;
}

/// A random truncation of x (possibly empty, possibly all of x).
inline Ref random_piece(std::mt19937_64& rng, Ref x) {
  Length a = std::uniform_int_distribution<Length>(0, x.length())(rng);
  Length b = std::uniform_int_distribution<Length>(a, x.length())(rng);
  return Ref{x.rule, x.start + a, x.start + b};
}

/// Word over [0, letters) into a balanced rule.
inline Ref random_word(Grammar& g, std::mt19937_64& rng, std::size_t letters, std::size_t len) {
  std::vector<Letter> w(len);
  for (auto& a : w) a = static_cast<Letter>(std::uniform_int_distribution<std::size_t>(0, letters - 1)(rng));
  return g.from_word(w);
}

}  // namespace testsupport
