#include <gtest/gtest.h>

#include "ergolab/gluing.hpp"
#include "ergolab/oracle.hpp"
#include "ergolab/random.hpp"

using namespace ergolab;

namespace {

std::vector<Word> words_up_to(const SubshiftSpec& spec, std::size_t max_len) {
  std::vector<Word> out;
  for (std::size_t n = 1; n <= max_len; ++n) {
    auto lc = count_language(spec, n, true);
    out.insert(out.end(), lc.words.begin(), lc.words.end());
  }
  return out;
}

std::vector<std::int64_t> max_gaps(const GlueReport& report) {
  std::vector<std::int64_t> out;
  for (const auto& row : report.per_length) out.push_back(row.max_gap);
  return out;
}

}  // namespace

TEST(Profiles, TailAndHead) {
  const Word w{0, -1, 0, 0, 1, 1, 0};
  const TailProfile t = tail_profile(w);
  EXPECT_TRUE(t.has_nonzero);
  EXPECT_EQ(t.last_sign, 1);
  EXPECT_EQ(t.trailing_zeros, 1);
  EXPECT_EQ(t.last_run, 2);
  EXPECT_EQ(t.gap_before_last_run, 2);
  EXPECT_TRUE(t.gap_flanked);
  const HeadProfile h = head_profile(w);
  EXPECT_EQ(h.leading_zeros, 1);
  EXPECT_EQ(h.first_sign, -1);
  EXPECT_EQ(h.first_run, 1);
  EXPECT_FALSE(tail_profile(Word{0, 0}).has_nonzero);
}

TEST(Profiles, RepeatedMatchesMaterialized) {
  for (const Word& block : {Word{1, 1, 0, 0}, Word{-1}, Word{0, 1, 0}, Word{0, 0}, Word{1, 0, 0, 0, 1}}) {
    for (std::uint64_t reps : {1u, 2u, 5u}) {
      const Word full = repeat_word(block, reps);
      const TailProfile a = tail_profile_repeated(block, reps), b = tail_profile(full);
      EXPECT_EQ(a.has_nonzero, b.has_nonzero);
      EXPECT_EQ(a.last_sign, b.last_sign);
      EXPECT_EQ(a.trailing_zeros, b.trailing_zeros);
      EXPECT_EQ(a.last_run, b.last_run);
      EXPECT_EQ(a.gap_before_last_run, b.gap_before_last_run);
      EXPECT_EQ(a.gap_flanked, b.gap_flanked);
      const HeadProfile c = head_profile_repeated(block, reps), d = head_profile(full);
      EXPECT_EQ(c.has_nonzero, d.has_nonzero);
      EXPECT_EQ(c.first_sign, d.first_sign);
      EXPECT_EQ(c.leading_zeros, d.leading_zeros);
      EXPECT_EQ(c.first_run, d.first_run);
    }
  }
}

TEST(MinimalGap, Examples) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  EXPECT_EQ(minimal_gap(spec, Word{1}, Word{1}, 10), 0);
  EXPECT_EQ(minimal_gap(spec, Word{1}, Word{-1}, 10), 2);
  EXPECT_EQ(minimal_gap(spec, Word{1, 0}, Word{-1}, 10), 1);
  EXPECT_EQ(minimal_gap(SubshiftSpec::paper(Rational(1)), Word{1}, Word{-1, -1, -1}, 10), 5);
  EXPECT_EQ(minimal_gap(SubshiftSpec::full(3), Word{1}, Word{-1}, 0), 0);
  EXPECT_EQ(minimal_gap(spec, Word{1}, Word{-1}, 1), std::nullopt);
}

TEST(MinimalGap, Errors) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  try {
    minimal_gap(spec, Word{1, -1}, Word{1}, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIllegalInput);
  }
  EXPECT_THROW(minimal_gap(spec, Word{1}, Word{1, 0, 1}, 5), Error);
  EXPECT_THROW(minimal_gap(spec, Word{1}, Word{1}, -1), Error);
}

TEST(MinimalGap, WitnessLaw) {
  for (const Rational k : {Rational(1, 4), Rational(1, 2), Rational(1), Rational(3, 2)}) {
    const auto spec = SubshiftSpec::paper(k);
    for (std::int64_t n = 1; n <= 40; ++n) {
      const std::int64_t expected = k.numerator() * n / k.denominator() + 2;
      EXPECT_EQ(minimal_gap(spec, Word{1}, Word::repeat(-1, static_cast<std::size_t>(n)), 200), expected)
          << "kappa=" << to_string(k) << " n=" << n;
    }
  }
}

TEST(MinimalGap, ClosedFormMatchesScan) {
  for (const auto& spec : {SubshiftSpec::paper(Rational(1, 4)), SubshiftSpec::paper(Rational(1)),
                           SubshiftSpec::paper(Rational(5, 3)), SubshiftSpec::sgap(2)}) {
    const auto ws = words_up_to(spec, 5);
    for (std::size_t i = 0; i < ws.size(); i += 3) {
      for (std::size_t j = 0; j < ws.size(); j += 5) {
        EXPECT_EQ(minimal_gap(spec, ws[i], ws[j], 30), oracle::scan_minimal_gap(spec, ws[i], ws[j], 30))
            << spec.describe() << " " << to_compact(ws[i]) << " | " << to_compact(ws[j]);
      }
    }
  }
}

TEST(MinimalGap, LongerGapsStayLegal) {
  // Once some v >= 1 works, every larger gap works too.
  const auto spec = SubshiftSpec::paper(Rational(1, 2));
  const auto ws = words_up_to(spec, 5);
  for (std::size_t i = 0; i < ws.size(); i += 4) {
    for (std::size_t j = 0; j < ws.size(); j += 7) {
      const auto g = minimal_gap(spec, ws[i], ws[j], 40);
      ASSERT_TRUE(g.has_value());
      std::int64_t first = *g;
      if (first == 0) {
        first = 1;
        while (!oracle::naive_is_legal(spec, ws[i] + Word::zeros(static_cast<std::size_t>(first)) + ws[j])) ++first;
      }
      for (std::int64_t v = first; v <= first + 8; ++v) {
        Word glued(ws[i]);
        glued.append(0, static_cast<std::size_t>(v)).append(ws[j]);
        EXPECT_TRUE(is_legal(spec, glued)) << to_compact(glued);
      }
    }
  }
}

TEST(MinimalGap, ZeroGapDoesNotImplyOne) {
  const auto spec = SubshiftSpec::paper(Rational(1, 2));
  const Word w{-1}, u{-1, -1, -1, -1, 0};
  EXPECT_EQ(minimal_gap(spec, w, u, 10), 0);
  for (std::size_t v = 1; v <= 3; ++v) EXPECT_FALSE(is_legal(spec, w + Word::zeros(v) + u)) << v;
  EXPECT_TRUE(is_legal(spec, w + Word::zeros(4) + u));
}

TEST(Transitivity, FrozenMaxGapsQuarter) {
  VerifyOptions opt;
  const auto report = verify_m_transitivity(SubshiftSpec::paper(Rational(1, 4)), opt);
  EXPECT_TRUE(report.exhaustive);
  EXPECT_EQ(report.pairs_tested, 633616u);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(max_gaps(report), (std::vector<std::int64_t>{2, 2, 2, 3, 3, 3, 3, 4}));
  EXPECT_EQ(report.max_min_gap, 4);
  EXPECT_DOUBLE_EQ(report.per_length.back().max_ratio, 0.5);
  EXPECT_EQ(report.per_length.back().bound, 4);
  for (const auto& g : report.witnesses) {
    Word glued(g.w);
    glued.append(0, static_cast<std::size_t>(g.gap)).append(g.u);
    EXPECT_TRUE(is_legal(SubshiftSpec::paper(Rational(1, 4)), glued));
  }
}

TEST(Transitivity, FrozenMaxGapsHalfAndOne) {
  VerifyOptions opt;
  const auto half = verify_m_transitivity(SubshiftSpec::paper(Rational(1, 2)), opt);
  EXPECT_EQ(half.pairs_tested, 430336u);
  EXPECT_EQ(max_gaps(half), (std::vector<std::int64_t>{2, 3, 3, 4, 4, 5, 5, 6}));
  const auto one = verify_m_transitivity(SubshiftSpec::paper(Rational(1)), opt);
  EXPECT_EQ(one.pairs_tested, 166464u);
  EXPECT_EQ(max_gaps(one), (std::vector<std::int64_t>{3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_TRUE(half.failures.empty());
  EXPECT_TRUE(one.failures.empty());
}

TEST(Transitivity, ThreadInvariant) {
  VerifyOptions opt;
  opt.w_max_length = 6;
  opt.u_max_length = 6;
  opt.threads = 1;
  const auto a = verify_m_transitivity(SubshiftSpec::paper(Rational(1, 2)), opt);
  opt.threads = 8;
  const auto b = verify_m_transitivity(SubshiftSpec::paper(Rational(1, 2)), opt);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(Transitivity, SamplingIsSeeded) {
  VerifyOptions opt;
  opt.pair_budget = 10;
  opt.samples = 2000;
  opt.seed = 99;
  const auto a = verify_m_transitivity(SubshiftSpec::paper(Rational(1, 4)), opt);
  const auto b = verify_m_transitivity(SubshiftSpec::paper(Rational(1, 4)), opt);
  EXPECT_FALSE(a.exhaustive);
  EXPECT_EQ(a.pairs_tested, 2000u);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}

TEST(Transitivity, RejectsBadRanges) {
  VerifyOptions opt;
  opt.u_min_length = 0;
  EXPECT_THROW(verify_m_transitivity(SubshiftSpec::paper(Rational(1, 4)), opt), Error);
  opt.u_min_length = 5;
  opt.u_max_length = 4;
  EXPECT_THROW(verify_m_transitivity(SubshiftSpec::paper(Rational(1, 4)), opt), Error);
}

TEST(AppFalsifier, NoWitnessForLongWords) {
  EXPECT_FALSE(app_falsifier(SubshiftSpec::paper(Rational(1, 4)), 20, 1, 1).has_value());
}

TEST(AppFalsifier, ControlFindsWitness) {
  const auto spec = SubshiftSpec::paper(Rational(1));
  const auto hit = app_falsifier(spec, 4, 12, 0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(to_compact(hit->w_hat), "ppp0");
  EXPECT_EQ(to_compact(hit->connector), "00000");
  const auto quarter = app_falsifier(SubshiftSpec::paper(Rational(1, 4)), 4, 12, 0);
  ASSERT_TRUE(quarter.has_value());
  EXPECT_EQ(to_compact(quarter->connector), "00");
  EXPECT_EQ(to_compact(hit->u_hat), "pppp");
  EXPECT_TRUE(is_legal(spec, hit->w_hat + hit->connector + hit->u_hat));
}

TEST(AppFalsifier, FullShiftGluesTrivially) {
  const auto hit = app_falsifier(SubshiftSpec::full(3), 6, 2, 1);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->w_hat, Word({1, 1, 1, 1, 0, 0}));
  EXPECT_TRUE(hit->connector.empty());
  EXPECT_EQ(hit->u_hat, Word::repeat(1, 6));
}

TEST(AppFalsifier, ThreadInvariantAndValidated) {
  const auto spec = SubshiftSpec::paper(Rational(1, 2));
  AppSearchOptions one, many;
  many.threads = 8;
  const auto a = app_falsifier(spec, 6, 8, 1, one);
  const auto b = app_falsifier(spec, 6, 8, 1, many);
  ASSERT_EQ(a.has_value(), b.has_value());
  if (a) {
    EXPECT_EQ(a->w_hat, b->w_hat);
    EXPECT_EQ(a->connector, b->connector);
    EXPECT_EQ(a->u_hat, b->u_hat);
  }
  EXPECT_THROW(app_falsifier(spec, 3, 1, 1), Error);
  AppSearchOptions tiny;
  tiny.search_budget = 10;
  try {
    app_falsifier(spec, 10, 4, 2, tiny);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudgetExceeded);
  }
  EXPECT_THROW(app_falsifier(SubshiftSpec::sft(Alphabet(std::vector<Symbol>{2, 3}), {Word{2, 2}}), 4, 1, 0),
               Error);
}

TEST(AppFalsifier, ThresholdScanStopsGluing) {
  // A connector of length f carries at most f zeros, enough while m(n) <= f.
  const auto rows = app_threshold_scan(SubshiftSpec::paper(Rational(1, 4)), 2, 12, 2, 0);
  ASSERT_EQ(rows.size(), 11u);
  for (const auto& row : rows) EXPECT_EQ(row.witness_found, row.n < 8) << "n=" << row.n;
}
