#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "ergolab/cocycle.hpp"
#include "ergolab/oracle.hpp"
#include "ergolab/random.hpp"
#include "ergolab/splicer.hpp"

using namespace ergolab;

namespace {

Matrix make(int d, std::initializer_list<double> rows) {
  Matrix m(d, d);
  auto it = rows.begin();
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) m(r, c) = *it++;
  }
  return m;
}

Matrix random_matrix(Rng& rng, int d) {
  while (true) {
    Matrix m(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) m(r, c) = rng.uniform(-1.0, 1.0);
    }
    if (std::abs(m.determinant()) > 1e-2) return m;
  }
}

CocycleSpec random_cocycle(Rng& rng, int d, std::size_t window) {
  const Alphabet a = Alphabet::signed_ternary();
  std::vector<Matrix> table;
  for (std::size_t i = 0; i < power_checked(3, window, 1000); ++i) table.push_back(random_matrix(rng, d));
  return CocycleSpec(a, d, window, std::move(table));
}

CylinderFunction random_function(Rng& rng, std::size_t window) {
  std::vector<double> v(power_checked(3, window, 1000));
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return CylinderFunction(Alphabet::signed_ternary(), window, std::move(v));
}

Word random_word(Rng& rng, std::size_t n) {
  Word w;
  for (std::size_t i = 0; i < n; ++i) w.push_back(static_cast<Symbol>(static_cast<int>(rng.below(3)) - 1));
  return w;
}

CocycleSpec constant_cocycle(const Matrix& m) {
  return CocycleSpec(Alphabet::signed_ternary(), static_cast<int>(m.rows()), 1, {m, m, m});
}

}  // namespace

TEST(SpectralNorm, KnownMatrices) {
  EXPECT_NEAR(spectral_norm(make(2, {3, 0, 0, -4})), 4.0, 1e-12);
  EXPECT_NEAR(spectral_norm(make(2, {1, 1, 0, 1})), (1.0 + std::sqrt(5.0)) / 2.0, 1e-12);
  // The all-ones start vector is orthogonal to the top singular vector here.
  EXPECT_NEAR(spectral_norm(make(2, {1, -1, 1, -1})), 2.0, 1e-12);
  EXPECT_NEAR(spectral_norm(make(2, {0, 1, -1, 0})), 1.0, 1e-12);
  EXPECT_NEAR(matrix_norm(make(2, {1, 2, 3, 4}), NormKind::kFrobenius), std::sqrt(30.0), 1e-12);
}

TEST(SpectralNorm, MatchesSingularValues) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(kMaxCocycleDim));
    const Matrix m = random_matrix(rng, d);
    const Eigen::MatrixXd dense = m;
    const double expected = std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense.transpose() * dense)
                                          .eigenvalues()
                                          .maxCoeff());
    EXPECT_NEAR(spectral_norm(m), expected, 1e-10 * expected);
  }
}

TEST(Cocycle, ValidatesTable) {
  const Alphabet a = Alphabet::signed_ternary();
  const Matrix id = Matrix::Identity(2, 2);
  EXPECT_THROW(CocycleSpec(a, 0, 1, {}), Error);
  EXPECT_THROW(CocycleSpec(a, 9, 1, {}), Error);
  EXPECT_THROW(CocycleSpec(a, 2, 0, {}), Error);
  EXPECT_THROW(CocycleSpec(a, 2, 1, {id, id}), Error);
  EXPECT_THROW(CocycleSpec(a, 2, 1, {id, id, Matrix::Identity(3, 3)}), Error);
  try {
    CocycleSpec(a, 2, 1, {id, id, make(2, {1, 2, 2, 4})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSingularMatrix);
  }
}

TEST(Cocycle, JsonRoundTripWithIdentityDefault) {
  const nlohmann::json j = {{"dim", 2}, {"window", 1}, {"entries", {{{"word", "p"}, {"matrix", {2, 1, 0, 1}}}}}};
  const auto c = CocycleSpec::from_json(j, Alphabet::signed_ternary());
  EXPECT_EQ(c.matrix(Word{1}), make(2, {2, 1, 0, 1}));
  EXPECT_EQ(c.matrix(Word{0}), Matrix::Identity(2, 2));
  const auto back = CocycleSpec::from_json(c.to_json(), Alphabet::signed_ternary());
  EXPECT_EQ(back.to_json(), c.to_json());
  nlohmann::json bad = j;
  bad["entries"][0]["matrix"] = {1, 2, 3};
  EXPECT_THROW(CocycleSpec::from_json(bad, Alphabet::signed_ternary()), Error);
}

TEST(Lyapunov, ProductOrderIsLeftMultiplication) {
  const Alphabet a = Alphabet::signed_ternary();
  const Matrix p = make(2, {1, 1, 0, 1}), m = make(2, {1, 0, 1, 1});
  const CocycleSpec c(a, 2, 1, {m, Matrix::Identity(2, 2), p});
  const Word w{1, -1, -1};
  const Matrix product = m * m * p;
  EXPECT_NEAR(log_norm_product(c, w, 0, 3), std::log(spectral_norm(product)), 1e-12);
  EXPECT_NEAR(log_norm_product(c, w, 1, 2), std::log(spectral_norm(m * m)), 1e-12);
  EXPECT_THROW(log_norm_product(c, w, 1, 3), Error);
  EXPECT_THROW(lyapunov_estimate(c, w, 0), Error);
}

TEST(Lyapunov, RenormalizationSurvivesLongProducts) {
  const auto c = constant_cocycle(make(2, {3, 1, 0, 0.5}));
  const Word w = Word::repeat(1, 20000);
  EXPECT_NEAR(lyapunov_estimate(c, w, 20000), std::log(3.0), 1e-3);
  const auto shrink = constant_cocycle(make(1, {1e-3}));
  EXPECT_NEAR(lyapunov_estimate(shrink, w, 20000), std::log(1e-3), 1e-12);
}

TEST(Lyapunov, ScalarCocycleIsBirkhoffAverage) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_function(rng, 1 + rng.below(3));
    const int d = 1 + static_cast<int>(rng.below(4));
    const Word w = random_word(rng, 600);
    EXPECT_NEAR(lyapunov_estimate(scalar_cocycle(f, d), w, 500), oracle::naive_birkhoff_average(f, w, 500), 1e-9);
  }
}

TEST(Lyapunov, PerturbationShiftsByAverageOverK) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_cocycle(rng, 1 + static_cast<int>(rng.below(3)), 1 + rng.below(2));
    const auto f = random_function(rng, 1 + rng.below(2));
    const double k = 1.0 + static_cast<double>(rng.below(9));
    const Word w = random_word(rng, 700);
    const double lhs = lyapunov_estimate(perturb(a, f, k), w, 600);
    const double rhs = lyapunov_estimate(a, w, 600) + oracle::naive_birkhoff_average(f, w, 600) / k;
    EXPECT_NEAR(lhs, rhs, 1e-9);
  }
}

TEST(Lyapunov, PerturbationVanishesForLargeK) {
  Rng rng(14);
  const auto a = random_cocycle(rng, 3, 1);
  const auto f = random_function(rng, 2);
  double a_max = 0.0;
  for (std::size_t i = 0; i < a.table_size(); ++i) a_max = std::max(a_max, a.at(i).cwiseAbs().maxCoeff());
  for (double k : {1e2, 1e4, 1e6}) {
    EXPECT_LE(max_entry_delta(a, perturb(a, f, k)), 2.0 * a_max * f.sup_norm() / k);
  }
  EXPECT_THROW(perturb(a, f, 0.0), Error);
  EXPECT_THROW(perturb(a, CylinderFunction::coordinate(Alphabet::binary()), 1.0), Error);
}

TEST(Lyapunov, Subadditive) {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_cocycle(rng, 2 + static_cast<int>(rng.below(3)), 1);
    const Word w = random_word(rng, 300);
    const std::size_t n = 1 + rng.below(150), m = 1 + rng.below(149);
    EXPECT_LE(log_norm_product(a, w, 0, n + m), log_norm_product(a, w, 0, n) + log_norm_product(a, w, n, m) + 1e-9);
  }
}

TEST(Lyapunov, NormKindIndependence) {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(kMaxCocycleDim));
    const auto a = random_cocycle(rng, d, 1);
    const Word w = random_word(rng, 400);
    for (std::size_t n : {1u, 10u, 400u}) {
      const double spectral = lyapunov_estimate(a, w, n, NormKind::kSpectral);
      const double frob = lyapunov_estimate(a, w, n, NormKind::kFrobenius);
      EXPECT_GE(frob, spectral - 1e-12);
      EXPECT_LE(frob - spectral, std::log(static_cast<double>(d)) / static_cast<double>(n) + 1e-12);
    }
  }
}

TEST(Lyapunov, TraceMatchesPointEstimates) {
  Rng rng(18);
  const auto a = random_cocycle(rng, 3, 2);
  const Word w = random_word(rng, 200);
  const auto trace = lyapunov_trace(a, w, 50, 199);
  ASSERT_EQ(trace.size(), 150u);
  for (std::size_t i = 0; i < trace.size(); i += 37) {
    EXPECT_NEAR(trace[i].chi, lyapunov_estimate(a, w, trace[i].n), 1e-12);
  }
  EXPECT_THROW(lyapunov_trace(a, w, 0, 10), Error);
  EXPECT_THROW(lyapunov_trace(a, w, 20, 10), Error);
  EXPECT_THROW(lyapunov_trace(a, w, 1, 200), Error);
}

TEST(Lyapunov, ConstantCocycleConverges) {
  const auto c = constant_cocycle(make(2, {2, 5, 0, 0.5}));
  const Word w = Word::repeat(0, 40000);
  const double small = lyapunov_irregularity_gap(c, w, 100, 400).width();
  const double large = lyapunov_irregularity_gap(c, w, 10000, 40000).width();
  EXPECT_GT(small, 0.0);
  EXPECT_LE(large, small * 100.0 / 10000.0 * 1.01);
}

TEST(Lyapunov, ScalarCocycleOscillatesAlongSplicedPoint) {
  const auto spec = SubshiftSpec::paper(Rational(1, 4));
  const OscillationSpec osc{CylinderFunction::coordinate(spec.alphabet()), -0.75, 0.75, 0.05, 4, 10.0};
  const auto program = plan_oscillation(spec, osc, Word{-1}, Word{1});
  const Word w = build_point(spec, program);
  const auto gap = lyapunov_irregularity_gap(scalar_cocycle(osc.f, 2), w, program.checkpoints[1], w.size());
  EXPECT_GE(gap.width(), 1.4);
}

TEST(Lyapunov, ConstantExamples) {
  const Word w = Word::repeat(0, 300);
  const auto id = constant_cocycle(Matrix::Identity(3, 3));
  const auto diag = constant_cocycle(make(2, {2, 0, 0, 0.5}));
  const double t = 0.7;
  const auto rot = constant_cocycle(make(2, {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}));
  for (std::size_t n : {1u, 7u, 300u}) {
    EXPECT_NEAR(lyapunov_estimate(id, w, n), 0.0, 1e-14);
    EXPECT_NEAR(lyapunov_estimate(diag, w, n), std::log(2.0), 1e-12);
    EXPECT_NEAR(lyapunov_estimate(rot, w, n), 0.0, 1e-12);
  }
  const auto gap = lyapunov_irregularity_gap(diag, w, 40, 40);
  EXPECT_DOUBLE_EQ(gap.lo, gap.hi);
}

TEST(Lyapunov, ScalarCocycleTrivia) {
  const Alphabet a = Alphabet::signed_ternary();
  const auto zero = scalar_cocycle(CylinderFunction::constant(a, 0.0), 2);
  for (std::size_t i = 0; i < zero.table_size(); ++i) EXPECT_EQ(zero.at(i), Matrix::Identity(2, 2));
  Rng rng(19);
  const auto f = random_function(rng, 2);
  const Word w = random_word(rng, 300);
  EXPECT_NEAR(lyapunov_estimate(scalar_cocycle(f, 1), w, 299), lyapunov_estimate(scalar_cocycle(f, 3), w, 299),
              1e-12);
  const auto A = random_cocycle(rng, 2, 1);
  EXPECT_DOUBLE_EQ(max_entry_delta(A, perturb(A, CylinderFunction::constant(a, 0.0), 5.0)), 0.0);
}
