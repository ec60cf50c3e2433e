#include <gtest/gtest.h>

#include <cmath>

#include "ergolab/oracle.hpp"
#include "ergolab/random.hpp"
#include "ergolab/shiftspace.hpp"

using namespace ergolab;

namespace {

std::vector<std::uint64_t> counts(const SubshiftSpec& spec, std::size_t n_max, unsigned threads = 1) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 1; n <= n_max; ++n) out.push_back(count_language(spec, n, false, threads).count);
  return out;
}

Word random_word(Rng& rng, const Alphabet& a, std::size_t n) {
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(a.symbol(rng.below(a.size())));
  return w;
}

}  // namespace

TEST(GapBudget, FloorPlusOne) {
  const GapBudget b(Rational(1, 4));
  EXPECT_EQ(b.m(0), 1);
  EXPECT_EQ(b.m(1), 1);
  EXPECT_EQ(b.m(3), 1);
  EXPECT_EQ(b.m(4), 2);
  EXPECT_EQ(b.m(8), 3);
  EXPECT_EQ(GapBudget(Rational(1)).m(5), 6);
  EXPECT_THROW(GapBudget(Rational(0)), Error);
  EXPECT_THROW(GapBudget(Rational(-1, 2)), Error);
}

TEST(GapBudget, MonotoneAndSubadditive) {
  for (const Rational k : {Rational(1, 4), Rational(1, 3), Rational(2, 3), Rational(1), Rational(5, 2)}) {
    const GapBudget b(k);
    for (std::int64_t a = 0; a < 40; ++a) {
      EXPECT_LE(b.m(a), b.m(a + 1));
      for (std::int64_t c = 0; c < 40; ++c) EXPECT_LE(b.m(a + c), b.m(a) + b.m(c));
    }
  }
}

TEST(SubshiftSpec, JsonRoundTrip) {
  for (const auto& spec : {SubshiftSpec::paper(Rational(1, 4)), SubshiftSpec::sgap(2), SubshiftSpec::full(2),
                           SubshiftSpec::sft(Alphabet::binary(), {Word{1, 1}})}) {
    const auto back = SubshiftSpec::from_json(spec.to_json());
    EXPECT_EQ(back.to_json(), spec.to_json());
    EXPECT_EQ(back.describe(), spec.describe());
  }
}

TEST(SubshiftSpec, RejectsBadJson) {
  EXPECT_THROW(SubshiftSpec::from_json({{"kappa", "1/4"}}), Error);
  EXPECT_THROW(SubshiftSpec::from_json({{"type", "paper"}}), Error);
  EXPECT_THROW(SubshiftSpec::from_json({{"type", "paper"}, {"kappa", 0.25}}), Error);
  EXPECT_THROW(SubshiftSpec::from_json({{"type", "paper"}, {"kappa", "0"}}), Error);
  EXPECT_THROW(SubshiftSpec::from_json({{"type", "sgap"}, {"min_run", 0}}), Error);
  EXPECT_THROW(SubshiftSpec::from_json({{"type", "cantor"}}), Error);
  EXPECT_THROW(SubshiftSpec::sft(Alphabet::binary(), {}), Error);
}

TEST(PaperShift, Examples) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  EXPECT_FALSE(is_legal(spec, Word{1, -1}));
  EXPECT_FALSE(is_legal(spec, Word{1, 0, 1}));
  EXPECT_TRUE(is_legal(spec, Word{1, 0, 0, 1}));
  EXPECT_TRUE(is_legal(spec, Word{1, 1, 0, 0, -1, -1}));
  EXPECT_TRUE(is_legal(spec, Word{0, 0, 0}));
  EXPECT_TRUE(is_legal(spec, Word{}));
  // j = 4 needs k > m(4) = 2.
  EXPECT_FALSE(is_legal(spec, Word{1, 0, 0, 1, 1, 1, 1}));
  EXPECT_TRUE(is_legal(spec, Word{1, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_THROW(is_legal(spec, Word{2}), Error);
}

TEST(PaperShift, FrozenCounts) {
  EXPECT_EQ(counts(SubshiftSpec::paper(Rational(1, 4)), 12),
            (std::vector<std::uint64_t>{3, 7, 13, 25, 51, 103, 201, 393, 779, 1543, 3041, 5989}));
  EXPECT_EQ(counts(SubshiftSpec::paper(Rational(1, 2)), 12),
            (std::vector<std::uint64_t>{3, 7, 13, 25, 47, 87, 165, 309, 575, 1079, 2017, 3765}));
  EXPECT_EQ(counts(SubshiftSpec::paper(Rational(1)), 17),
            (std::vector<std::uint64_t>{3, 7, 13, 21, 35, 59, 101, 169, 283, 471, 789, 1317, 2203, 3675, 6141,
                                        10249, 17123}));
}

TEST(SGapShift, FrozenCountsAndGrowth) {
  const auto spec = SubshiftSpec::sgap(2);
  EXPECT_EQ(counts(spec, 16), (std::vector<std::uint64_t>{2, 3, 4, 6, 9, 13, 19, 28, 41, 60, 88, 129, 189, 277,
                                                           406, 595}));
  const auto est = entropy_estimate(spec, 24);
  EXPECT_NEAR(est.ratio, oracle::sgap_growth_root(2), 1e-3);
  EXPECT_NEAR(oracle::sgap_growth_root(2), 1.4655712318767680, 1e-12);
}

TEST(FullShift, CountsArePowers) {
  EXPECT_EQ(count_language(SubshiftSpec::full(3), 7).count, 2187u);
  EXPECT_EQ(count_language(SubshiftSpec::full(2), 10).count, 1024u);
}

TEST(Language, SearchMatchesNaiveEnumeration) {
  const std::vector<SubshiftSpec> specs = {
      SubshiftSpec::paper(Rational(1, 4)), SubshiftSpec::paper(Rational(1, 2)), SubshiftSpec::paper(Rational(1)),
      SubshiftSpec::paper(Rational(3, 2)), SubshiftSpec::sgap(1),              SubshiftSpec::sgap(3),
      SubshiftSpec::sft(Alphabet::of_size(3), {Word{1, 1}, Word{-1, 0, -1}})};
  for (const auto& spec : specs) {
    for (std::size_t n = 0; n <= 8; ++n) {
      EXPECT_EQ(count_language(spec, n).count, oracle::naive_count(spec, n)) << spec.describe() << " n=" << n;
    }
  }
}

TEST(Language, ListingIsSortedAndLegal) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  const auto lc = count_language(spec, 6, true);
  ASSERT_EQ(lc.words.size(), lc.count);
  for (std::size_t i = 0; i < lc.words.size(); ++i) {
    EXPECT_TRUE(oracle::naive_is_legal(spec, lc.words[i]));
    if (i > 0) EXPECT_LT(lc.words[i - 1], lc.words[i]);
  }
}

TEST(Language, ThreadCountDoesNotChangeResults) {
  const auto spec = SubshiftSpec::paper(Rational(1, 2));
  const auto a = count_language(spec, 9, true, 1);
  const auto b = count_language(spec, 9, true, 8);
  EXPECT_EQ(a.count, b.count);
  EXPECT_EQ(a.words, b.words);
}

TEST(Language, Caps) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  EnumerationLimits limits;
  limits.max_count_length = 10;
  try {
    count_language(spec, 11, false, 1, limits);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCapExceeded);
  }
  limits.max_listing_length = 5;
  EXPECT_THROW(count_language(spec, 6, true, 1, limits), Error);
}

TEST(Language, FastLegalityMatchesNaiveOnRandomWords) {
  Rng rng(2024);
  const Alphabet a = Alphabet::signed_ternary();
  for (const Rational k : {Rational(1, 4), Rational(1, 2), Rational(1), Rational(3)}) {
    const auto spec = SubshiftSpec::paper(k);
    for (int trial = 0; trial < 3000; ++trial) {
      // Bias toward zeros so that long legal words show up.
      Word w;
      const std::size_t n = 1 + rng.below(30);
      for (std::size_t i = 0; i < n; ++i) w.push_back(rng.below(2) == 0 ? 0 : a.symbol(rng.below(3)));
      EXPECT_EQ(is_legal(spec, w), oracle::naive_is_legal(spec, w)) << to_compact(w);
    }
  }
  const auto sgap = SubshiftSpec::sgap(2);
  for (int trial = 0; trial < 2000; ++trial) {
    const Word w = random_word(rng, Alphabet::binary(), 1 + rng.below(20));
    EXPECT_EQ(is_legal(sgap, w), oracle::naive_is_legal(sgap, w)) << to_compact(w);
  }
}

TEST(Language, TrackerAgreesWithLegality) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    LegalityTracker tracker(spec);
    Word w;
    for (int i = 0; i < 25; ++i) {
      const Symbol s = rng.below(2) == 0 ? 0 : static_cast<Symbol>(rng.below(2) == 0 ? 1 : -1);
      w.push_back(s);
      const bool ok = tracker.push(s);
      EXPECT_EQ(ok, is_legal(spec, w)) << to_compact(w);
      if (!ok) break;
    }
  }
}

TEST(Language, HereditaryAndExtendable) {
  // Subwords of legal words are legal; every legal word extends on the right by 0.
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  for (const Word& w : count_language(spec, 8, true).words) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (std::size_t l = 1; i + l <= w.size(); ++l) {
        EXPECT_TRUE(is_legal(spec, w.view().subspan(i, l)));
      }
    }
    Word ext(w);
    ext.push_back(0);
    EXPECT_TRUE(is_legal(spec, ext));
  }
}

TEST(Language, PaddingByLongZeroRunsStaysLegal) {
  const auto spec = SubshiftSpec::paper(Rational(1, 2));
  const auto words = count_language(spec, 6, true).words;
  for (std::size_t i = 0; i < words.size(); i += 7) {
    for (std::size_t j = 0; j < words.size(); j += 11) {
      Word glued(words[i]);
      glued.append(0, 20).append(words[j]);
      EXPECT_TRUE(is_legal(spec, glued)) << to_compact(glued);
    }
  }
}

TEST(Language, LargerKappaGivesSmallerLanguage) {
  const std::vector<Rational> kappas = {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2)};
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t i = 0; i + 1 < kappas.size(); ++i) {
      EXPECT_GE(count_language(SubshiftSpec::paper(kappas[i]), n).count,
                count_language(SubshiftSpec::paper(kappas[i + 1]), n).count);
    }
  }
  const auto big = SubshiftSpec::paper(Rational(1));
  for (const Word& w : count_language(big, 7, true).words) {
    EXPECT_TRUE(is_legal(SubshiftSpec::paper(Rational(1, 4)), w));
  }
}

TEST(Entropy, TableAndCertificate) {
  const auto rows = entropy_table(SubshiftSpec::paper(Rational(1, 4)), 12);
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0].count, 1u);
  EXPECT_DOUBLE_EQ(rows[12].ratio, 5989.0 / 3041.0);
  EXPECT_NEAR(rows[12].log_growth, std::log(5989.0) / 12.0, 1e-12);
  EXPECT_TRUE(certifies_positive_entropy(rows, 0.5, 4));
  EXPECT_FALSE(certifies_positive_entropy(rows, 1.5, 4));
  EXPECT_THROW(entropy_estimate(SubshiftSpec::paper(Rational(1, 4)), 1), Error);
}

TEST(PeriodicPoint, Legality) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  EXPECT_TRUE(periodic_point_legal(spec, Word{1}, 0));
  EXPECT_FALSE(periodic_point_legal(spec, Word{1}, 1));
  EXPECT_TRUE(periodic_point_legal(spec, Word{1}, 2));
  EXPECT_FALSE(periodic_point_legal(spec, Word{1, -1}, 5));
  EXPECT_FALSE(periodic_point_legal(spec, Word{1, 0, 0, 1, 1, 1}, 0));
  EXPECT_THROW(periodic_point_legal(spec, Word{}, 1), Error);
}

TEST(PaperShift, WitnessWordsAtTheGapBoundary) {
  for (const Rational k : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
    const auto spec = SubshiftSpec::paper(k);
    const GapBudget b(k);
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto m = static_cast<std::size_t>(b.m(static_cast<std::int64_t>(n)));
      const Word ok = Word{1} + Word::zeros(m + 1) + Word::repeat(-1, n);
      const Word bad = Word{1} + Word::zeros(m) + Word::repeat(-1, n);
      EXPECT_TRUE(is_legal(spec, ok));
      EXPECT_FALSE(is_legal(spec, bad));
      EXPECT_EQ(oracle::naive_is_legal(spec, ok), true);
      EXPECT_EQ(oracle::naive_is_legal(spec, bad), false);
    }
  }
}

TEST(PaperShift, ZeroPaddingKeepsLegality) {
  const auto spec = SubshiftSpec::paper(Rational(1, 2));
  Rng rng(77);
  const auto words = count_language(spec, 9, true).words;
  for (int trial = 0; trial < 500; ++trial) {
    const Word& w = words[rng.below(words.size())];
    const Word padded = Word::zeros(rng.below(6)) + w + Word::zeros(rng.below(6));
    EXPECT_TRUE(is_legal(spec, padded)) << to_compact(padded);
  }
}

TEST(PaperShift, ContainsTheGapShiftLanguageCount) {
  const auto paper = SubshiftSpec::paper(Rational(1));
  const auto sgap = SubshiftSpec::sgap(2);
  for (std::size_t n = 1; n <= 14; ++n) {
    EXPECT_GE(count_language(paper, n).count, count_language(sgap, n).count) << n;
  }
}

TEST(PeriodicPoint, MoreExamples) {
  const auto one = SubshiftSpec::paper(Rational(1));
  EXPECT_FALSE(periodic_point_legal(one, Word{1}, 1));
  EXPECT_TRUE(periodic_point_legal(one, Word{1}, 3));
  EXPECT_TRUE(periodic_point_legal(one, Word::zeros(4), 0));
  const auto sft = SubshiftSpec::sft(Alphabet::binary(), {Word{1, 0, 0, 0, 0, 0, 1}});
  EXPECT_FALSE(periodic_point_legal(sft, Word{1}, 5));
  EXPECT_TRUE(periodic_point_legal(sft, Word{1}, 4));
}
