#include <gtest/gtest.h>

#include <boost/rational.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ecc/probability.hpp"
#include "test_support.hpp"

using namespace ecc;
using Rational = boost::rational<std::int64_t>;

namespace {

const double kTwoOverE = 2.0 / std::exp(1.0);

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t m, double total) {
  // Uniform point on the scaled simplex face, then a random shrink.
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(m);
  double s = 0.0;
  for (double& v : x) s += (v = ex(rng));
  const double scale = total * unif(rng);
  for (double& v : x) v = std::min(1.0, v / s * scale);
  return x;
}

}  // namespace

TEST(ExactlyT, Examples) {
  const std::vector<double> coin{0.5, 0.5};
  EXPECT_DOUBLE_EQ(exactly_t_probability(coin, 1), 0.5);
  const std::vector<double> x{2.0 / 3.0, 1.0 / 3.0, 0.0};
  EXPECT_NEAR(exactly_t_probability(x, 0), 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(exactly_t_probability(x, 1), 5.0 / 9.0, 1e-15);
  EXPECT_NEAR(exactly_t_probability(x, 2), 2.0 / 9.0, 1e-15);
  EXPECT_EQ(exactly_t_probability(x, 4), 0.0);
  EXPECT_EQ(exactly_t_probability(x, -1), 0.0);
  EXPECT_EQ(exactly_t_probability(std::vector<double>{}, 0), 1.0);
  const std::vector<double> y{0.2, 0.3};
  EXPECT_DOUBLE_EQ(exactly_t_probability(y, 0), 0.8 * 0.7);
}

TEST(ExactlyT, ExactInRationals) {
  const std::vector<Rational> x{Rational(2, 3), Rational(1, 3), Rational(0)};
  const auto dist = exact_count_distribution<Rational>(x);
  EXPECT_EQ(dist[0], Rational(2, 9));
  EXPECT_EQ(dist[1], Rational(5, 9));
  EXPECT_EQ(dist[2], Rational(2, 9));
  EXPECT_EQ(dist[3], Rational(0));
}

TEST(ExactlyT, SumsToOne) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(ecc_test::draw(rng, 0, 100));
    for (double& v : x) v = unif(rng);
    double s = 0.0;
    for (long long t = 0; t <= static_cast<long long>(x.size()); ++t) s += exactly_t_probability(x, t);
    ASSERT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(ExactlyT, MatchesSubsetSum) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x(ecc_test::draw(rng, 0, 10));
    for (double& v : x) v = unif(rng);
    for (std::size_t t = 0; t <= x.size(); ++t)
      ASSERT_NEAR(exactly_t_probability(x, static_cast<long long>(t)), ecc_test::direct_exactly_t(x, t), 1e-12);
  }
}

TEST(AtMostOne, Examples) {
  EXPECT_DOUBLE_EQ(at_most_one_probability(std::vector<double>{0.5, 0.5}), 0.75);
  EXPECT_GE(0.75, kTwoOverE);
  EXPECT_DOUBLE_EQ(at_most_one_probability(std::vector<double>{1.0}), 1.0);
  const std::vector<double> flat(50, 1.0 / 50.0);
  const double v = at_most_one_probability(flat);
  EXPECT_GE(v, kTwoOverE);
  EXPECT_LT(v - kTwoOverE, 0.01);
}

TEST(AtMostOne, AtLeastTwoOverEWhenSumAtMostOne) {
  std::mt19937_64 rng(107);
  for (int i = 0; i < 1000; ++i) {
    const auto x = random_vector(rng, ecc_test::draw(rng, 1, 60), 1.0);
    ASSERT_GE(at_most_one_probability(x), kTwoOverE - 1e-12);
  }
}

TEST(ProductBound, AtLeastOneMinusBeta) {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double beta = unif(rng);
    const auto x = random_vector(rng, ecc_test::draw(rng, 1, 60), beta);
    double prod = 1.0, sum = 0.0;
    for (double v : x) {
      prod *= 1.0 - v;
      sum += v;
    }
    ASSERT_LE(sum, beta + 1e-12);
    ASSERT_GE(prod, 1.0 - beta - 1e-12);
    ASSERT_NEAR(exactly_t_probability(x, 0), prod, 1e-12);
  }
}

TEST(WeightedSeries, Examples) {
  const std::vector<double> ones(4, 1.0);
  EXPECT_NEAR(weighted_series<double>(std::vector<double>{0.1, 0.7, 0.3}, ones), 1.0, 1e-15);
  const auto h = harmonic_sequence<Rational>(2);
  EXPECT_EQ(weighted_series<Rational>(std::vector<Rational>{Rational(2, 3), Rational(1, 3)}, h), Rational(31, 54));
  const std::vector<double> a{0.9, 0.5, 0.2};
  EXPECT_EQ(weighted_series<double>(std::vector<double>{0.0, 0.0}, a), 0.9);
  EXPECT_THROW(weighted_series<double>(std::vector<double>{0.0}, a), Error);
}

TEST(SequenceConditions, Examples) {
  for (std::size_t g = 0; g <= 3; ++g) EXPECT_TRUE(check_sequence_conditions<double>(harmonic_sequence<double>(10, g)));
  EXPECT_TRUE(check_sequence_conditions<Rational>(composite_sequence<Rational>(10)));
  EXPECT_FALSE(check_sequence_conditions<double>(std::vector<double>{1, 0, 1}));
  EXPECT_FALSE(check_sequence_conditions<double>(std::vector<double>{1, 0.9, 0.1}));  // not convex
  EXPECT_THROW(check_sequence_conditions<double>(std::vector<double>{1, 0}), Error);
}

TEST(LemmaBoundingMin, ExactConstants) {
  EXPECT_EQ(lemma_bounding_min<Rational>(harmonic_sequence<Rational>(3)), Rational(31, 54));
  EXPECT_EQ(lemma_bounding_min<Rational>(composite_sequence<Rational>(3)), Rational(154, 405));
  const std::vector<Rational> constant(5, Rational(3, 7));
  EXPECT_EQ(lemma_bounding_min<Rational>(constant), Rational(3, 7));
  EXPECT_THROW(lemma_bounding_min<double>(std::vector<double>{1, 0, 1}), Error);
}

TEST(LemmaBoundingMin, CompositeEqualsAverageOfShiftedHarmonics) {
  // Composite a_t is the lemma applied to the harmonic sequence shifted by t.
  const auto a = composite_sequence<Rational>(6);
  for (std::size_t t = 0; t <= 6; ++t) {
    const auto shifted = harmonic_sequence<Rational>(2, t);
    ASSERT_EQ(a[t], lemma_bounding_min<Rational>(shifted));
  }
}

TEST(GridMin, HarmonicAndComposite) {
  const auto h = harmonic_sequence<double>(3);
  const GridMinimum gh = grid_min_of_f(h, 3, 30);
  EXPECT_NEAR(gh.value, 31.0 / 54.0, 1e-9);
  auto sorted = gh.numerators;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::uint64_t>{0, 10, 20}));

  const auto c = composite_sequence<double>(3);
  const GridMinimum gc = grid_min_of_f(c, 3, 30);
  EXPECT_NEAR(gc.value, 154.0 / 405.0, 1e-9);
  sorted = gc.numerators;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::uint64_t>{0, 10, 20}));
}

TEST(GridMin, ConstantSequence) {
  const std::vector<double> a(4, 0.25);
  EXPECT_NEAR(grid_min_of_f(a, 3, 12).value, 0.25, 1e-15);
}

TEST(GridMin, NeverBelowLemmaValue) {
  for (std::size_t g = 0; g <= 3; ++g)
    for (std::size_t m : {2u, 3u, 4u}) {
      const auto a = harmonic_sequence<double>(m, g);
      const GridMinimum gm = grid_min_of_f(a, m, 12);
      ASSERT_GE(gm.value, lemma_bounding_min<double>(a) - 1e-9);
      ASSERT_NEAR(gm.value, lemma_bounding_min<double>(a), 1e-9);
    }
}

TEST(GridMin, Guards) {
  const auto a = harmonic_sequence<double>(3);
  EXPECT_THROW(grid_min_of_f(a, 3, 10), Error);
  EXPECT_THROW(grid_min_of_f(a, 2, 30), Error);
  const auto big = harmonic_sequence<double>(12);
  EXPECT_THROW(grid_min_of_f(big, 12, 300), Error);
}
