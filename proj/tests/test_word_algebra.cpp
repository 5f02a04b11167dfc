#include <gtest/gtest.h>

#include <random>

#include <slpfold/slp_io.hpp>
#include <slpfold/word_algebra.hpp>

#include "oracle/naive_words.hpp"
#include "support/random_grammar.hpp"

using namespace slpfold;

namespace {

struct Env {
  Grammar g{Alphabet::involutive({"a", "b", "c"})};
  Ref w(const std::string& s) {
    std::vector<Letter> out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      Letter x = static_cast<Letter>(2 * (s[i] - 'a'));
      if (i + 1 < s.size() && s[i + 1] == '^') x ^= 1u, ++i;
      out.push_back(x);
    }
    return g.from_word(out);
  }
  std::string str(Ref x) { return g.to_string(x, 1 << 20, ""); }
};

std::vector<Length> elems(const ArithmeticProgression& p) { return p.elements(); }

}  // namespace

TEST(LeftFactorisation, Examples) {
  Env e;
  auto f = left_factorisation(e.g, e.w("bababac"), e.w("ab"));
  ASSERT_TRUE(f);
  EXPECT_EQ(f->i, 1u);
  EXPECT_EQ(f->n, 2u);
  EXPECT_EQ(f->j, 1u);
  EXPECT_EQ(f->total, 6u);
  EXPECT_EQ(e.str(f->rest), "c");
  EXPECT_FALSE(left_factorisation(e.g, e.w("ccc"), e.w("ab")));
  auto id = left_factorisation(e.g, e.w("ab"), e.w("ab"));
  ASSERT_TRUE(id);
  EXPECT_EQ(id->i, 0u);
  EXPECT_EQ(id->n, 1u);
  EXPECT_EQ(id->j, 0u);
  EXPECT_TRUE(id->rest.empty());
}

TEST(RightFactorisation, Mirror) {
  Env e;
  auto f = right_factorisation(e.g, e.w("cbababa"), e.w("ab"));
  ASSERT_TRUE(f);
  EXPECT_EQ(f->total, 6u);
  EXPECT_EQ(e.str(f->rest), "c");
  EXPECT_EQ(f->j, 1u);  // ... ab ab a
  EXPECT_EQ(f->i, 1u);  // b ...
  EXPECT_EQ(f->n, 2u);
}

TEST(CrossingOccurrences, Examples) {
  Env e;
  Ref x = e.w("aba"), w = e.w("abababa");
  auto p = crossing_occurrences(e.g, x, w, 2);
  EXPECT_EQ(elems(p), (std::vector<Length>{0, 2}));
  EXPECT_EQ(p.step, 2u);
  EXPECT_EQ(p.count, 1u);
  EXPECT_EQ(p.offset, 0u);
  EXPECT_EQ(elems(crossing_occurrences(e.g, x, w, 3)), (std::vector<Length>{2}));
  for (Length i = 0; i < 7; ++i) EXPECT_TRUE(crossing_occurrences(e.g, e.w("bb"), w, i).empty);
  EXPECT_THROW(crossing_occurrences(e.g, x, w, 7), RangeError);
}

TEST(PrimitiveRoot, Examples) {
  Env e;
  auto [y, k] = primitive_root(e.g, e.w("ababab"));
  EXPECT_EQ(e.str(y), "ab");
  EXPECT_EQ(k, 3u);
  auto [y2, k2] = primitive_root(e.g, e.w("aab"));
  EXPECT_EQ(e.str(y2), "aab");
  EXPECT_EQ(k2, 1u);
  Ref big = e.g.power(e.g.letter(0), Length{1} << 20);
  auto [y3, k3] = primitive_root(e.g, big);
  EXPECT_EQ(e.str(y3), "a");
  EXPECT_EQ(k3, Length{1} << 20);
  EXPECT_THROW(primitive_root(e.g, Grammar::empty_ref()), PreconditionError);
}

TEST(IsConjugate, Examples) {
  Env e;
  EXPECT_EQ(is_conjugate(e.g, e.w("bab"), e.w("abb")), Length{2});
  EXPECT_EQ(is_conjugate(e.g, e.w("abb"), e.w("abb")), Length{0});
  EXPECT_FALSE(is_conjugate(e.g, e.w("aab"), e.w("abb")));
  EXPECT_THROW(is_conjugate(e.g, e.w("ab"), e.w("abb")), PreconditionError);
}

TEST(MaxPowerSuffix, Examples) {
  Env e;
  EXPECT_EQ(max_power_suffix(e.g, e.w("cabab"), e.w("ab")), 2u);
  EXPECT_EQ(max_power_suffix(e.g, e.w("c"), e.w("ab")), 0u);
  Ref u = e.g.concat(e.w("b"), e.g.power(e.g.letter(0), 1024));
  EXPECT_EQ(max_power_suffix(e.g, u, e.w("a")), 1024u);
}

TEST(FreeReduce, Examples) {
  Env e;
  EXPECT_TRUE(free_reduce(e.g, e.w("aa^")).empty());
  EXPECT_EQ(e.str(free_reduce(e.g, e.w("abb^a"))), "aa");
  Ref x = e.g.power(e.w("aa^"), Length{1} << 15);
  EXPECT_TRUE(free_reduce(e.g, x).empty());
  Grammar p(Alphabet::plain({"a"}));
  EXPECT_THROW(free_reduce(p, p.letter(0)), UnsupportedAlphabet);
}

TEST(FreeReduce, HugeConjugate) {
  Env e;
  // a b^(2^60) b^-(2^60 - 1) a^ reduces to a b a^.
  Ref b = e.g.power(e.g.letter(2), Length{1} << 60);
  Ref bi = e.g.power(e.g.letter(3), (Length{1} << 60) - 1);
  Ref x = e.g.concat(std::vector<Ref>{e.g.letter(0), b, bi, e.g.letter(1)});
  EXPECT_EQ(e.str(free_reduce(e.g, x)), "aba^");
}

TEST(CyclicDecompose, Examples) {
  Env e;
  auto [u, v] = cyclic_decompose(e.g, e.w("aba^"));
  EXPECT_EQ(e.str(u), "a");
  EXPECT_EQ(e.str(v), "b");
  auto [u2, v2] = cyclic_decompose(e.g, e.w("ab"));
  EXPECT_TRUE(u2.empty());
  EXPECT_EQ(e.str(v2), "ab");
  auto [u3, v3] = cyclic_decompose(e.g, e.w("abba^"));
  EXPECT_EQ(e.str(u3), "a");
  EXPECT_EQ(e.str(v3), "bb");
  EXPECT_THROW(cyclic_decompose(e.g, e.w("abb^")), PreconditionError);
}

class WordRandom : public ::testing::TestWithParam<int> {};

TEST_P(WordRandom, OccurrencesAndRoots) {
  std::mt19937_64 rng(5000 + GetParam());
  Grammar g(Alphabet::plain({"a", "b", "c"}));
  const std::size_t letters = 1 + GetParam() % 3;
  // Periodic-ish texts make the progressions non-trivial.
  Ref base = testsupport::random_word(g, rng, letters, 1 + rng() % 4);
  Ref text = g.concat(g.power(base, 3 + rng() % 20), testsupport::random_word(g, rng, letters, rng() % 4));
  auto wt = naive::expand(g, text);
  for (int q = 0; q < 15; ++q) {
    Ref x = testsupport::random_piece(rng, g.concat(text, text));
    if (x.empty() || x.length() > text.length()) continue;
    auto wx = naive::expand(g, x);
    const Length c = rng() % wt.size();
    auto got = crossing_occurrences(g, x, text, c).elements();
    ASSERT_EQ(got, naive::occurrences_covering(wx, wt, c)) << "c=" << c;
  }
  Ref v = g.power(testsupport::random_word(g, rng, letters, 1 + rng() % 5), 1 + rng() % 6);
  auto [y, k] = primitive_root(g, v);
  auto [ny, nk] = naive::primitive_root(naive::expand(g, v));
  ASSERT_EQ(naive::expand(g, y), ny);
  ASSERT_EQ(k, nk);
  Ref a = testsupport::random_word(g, rng, letters, 1 + rng() % 8);
  Ref b = testsupport::random_word(g, rng, letters, a.length());
  if (rng() % 2) {
    const Length s = rng() % a.length();
    b = g.concat(g.suffix_from(a, s), g.prefix(a, s));
  }
  auto got = is_conjugate(g, b, a);
  auto want = naive::conjugate_offset(naive::expand(g, b), naive::expand(g, a));
  ASSERT_EQ(got.has_value(), want.has_value());
  if (got) {
    ASSERT_EQ(*got, *want);
  }
  Ref u = g.concat(testsupport::random_word(g, rng, letters, rng() % 3), g.power(y, rng() % 5));
  ASSERT_EQ(max_power_suffix(g, u, y), naive::max_power_suffix(naive::expand(g, u), ny));
}

TEST_P(WordRandom, Factorisations) {
  std::mt19937_64 rng(7000 + GetParam());
  Grammar g(Alphabet::plain({"a", "b", "c"}));
  const std::size_t letters = 1 + GetParam() % 3;
  for (int q = 0; q < 10; ++q) {
    Ref w = testsupport::random_word(g, rng, letters, 1 + rng() % 4);
    Ref x = g.concat(g.concat(testsupport::random_piece(rng, w), g.power(w, rng() % 5)),
                     testsupport::random_word(g, rng, letters, rng() % 5));
    if (rng() % 2) x = g.concat(testsupport::random_word(g, rng, letters, rng() % 4), x);
    auto wx = naive::expand(g, x), ww = naive::expand(g, w);
    if (wx.size() > 40) continue;
    for (int side = 0; side < 2; ++side) {
      auto got = side == 0 ? left_factorisation(g, x, w) : right_factorisation(g, x, w);
      auto want = side == 0 ? naive::left_factorisation(wx, ww) : naive::right_factorisation(wx, ww);
      ASSERT_EQ(got.has_value(), want.has_value());
      if (!got) continue;
      ASSERT_EQ(got->total, want->total);
      ASSERT_EQ(got->i, want->i);
      ASSERT_EQ(got->n, want->n);
      ASSERT_EQ(got->j, want->j);
      ASSERT_EQ(naive::expand(g, got->rest), want->rest);
    }
  }
}

TEST_P(WordRandom, FreeReductionAndCyclicDecomposition) {
  std::mt19937_64 rng(9000 + GetParam());
  Grammar g(Alphabet::involutive({"a", "b"}));
  auto rules = testsupport::random_rules(g, rng, 4, {20, 3000, 0.3, 4});
  for (int q = 0; q < 10; ++q) {
    Ref x = testsupport::random_piece(rng, rules[rng() % rules.size()]);
    // Mix in inverses so cancellations happen.
    if (rng() % 2) x = g.concat(x, g.inverse(testsupport::random_piece(rng, x)));
    auto wx = naive::expand(g, x);
    Ref r = free_reduce(g, x);
    auto wr = naive::expand(g, r);
    ASSERT_EQ(wr, naive::reduce(wx));
    ASSERT_TRUE(equals(g, free_reduce(g, r), r));
    auto [u, v] = cyclic_decompose(g, r);
    auto [nu, nv] = naive::cyclic_decompose(wr);
    ASSERT_EQ(naive::expand(g, u), nu);
    ASSERT_EQ(naive::expand(g, v), nv);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, WordRandom, ::testing::Range(0, 60));
