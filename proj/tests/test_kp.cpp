#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "znlab/kp.hpp"
#include "znlab/rochberg.hpp"
#include "znlab/sampling.hpp"

using namespace znlab;

namespace {

const double kPair[] = {0.6, 0.8};

oracle::Dense to_dense(const CoordVector& x, std::size_t m) {
  oracle::Dense d(m, 0.0);
  for (const auto& e : x.to_entries()) d.at(e.index - 1) = e.value;
  return d;
}

void expect_close(const CoordVector& a, const CoordVector& b, double rel) {
  const double scale_by = std::max({1.0, l2_norm(a), l2_norm(b)});
  EXPECT_LE(l2_norm(a - b), rel * scale_by) << "difference too large";
}

}  // namespace

TEST(Kp, ComponentExamples) {
  EXPECT_TRUE(kp_component(1, CoordVector::unit(1)).is_zero());
  const auto x = CoordVector::from_values(kPair);
  EXPECT_EQ(kp_component(0, x), x);
  const auto k1 = kp_component(1, x);
  EXPECT_NEAR(k1.at(1), -0.61297, 5e-5);
  EXPECT_NEAR(k1.at(2), -0.35702, 5e-5);
  EXPECT_NEAR(k1.at(1), 2 * 0.6 * std::log(0.6), 1e-15);
  EXPECT_TRUE(kp_component(3, CoordVector{}).is_zero());
}

TEST(Kp, MapExamples) {
  const auto m = kp_map(2, CoordVector::unit(1));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_TRUE(m[0].is_zero() && m[1].is_zero());
  const auto x = CoordVector::from_values(kPair);
  const auto single = kp_map(1, x);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], kp_component(1, x));
  EXPECT_THROW(kp_map(0, x), InvalidArgument);
}

TEST(Kp, FlatMapMatchesScalarOracle) {
  const std::uint64_t N = std::uint64_t{1} << 40;
  const double a = std::ldexp(1.0, -20);
  const auto x = CoordVector::flat(N, a);
  const auto m = kp_map(2, x);
  ASSERT_TRUE(m[0].is_flat() && m[1].is_flat());
  const double L = std::log(static_cast<double>(N));
  EXPECT_NEAR(m[0].as_flat()->value, a * L * L / 2, 1e-13 * a * L * L);
  EXPECT_NEAR(m[1].as_flat()->value, -a * L, 1e-13 * a * L);
  for (unsigned k = 0; k <= 6; ++k)
    EXPECT_NEAR(kp_component(k, x).as_flat() ? kp_component(k, x).as_flat()->value : 0.0,
                a * oracle::flat_coefficient(k, static_cast<double>(N)),
                1e-12 * a * std::abs(oracle::flat_coefficient(k, static_cast<double>(N))));
}

TEST(Kp, QuasilinearityExamples) {
  // collinear multiples of e_1 all have KP = 0 under the normalised formula
  EXPECT_EQ(quasilinearity_defect(1, CoordVector::unit(1), CoordVector::unit(1, 2.0)).defect, 0.0);
  const auto d = quasilinearity_defect(1, CoordVector::unit(1), CoordVector::unit(2));
  EXPECT_NEAR(d.defect, std::sqrt(2.0) * std::log(2.0), 1e-14);
  EXPECT_DOUBLE_EQ(d.budget, 2.0);
  EXPECT_EQ(quasilinearity_defect(3, CoordVector::unit(1), CoordVector{}).defect, 0.0);
}

TEST(Kp, Lemma4Examples) {
  const auto e1 = CoordVector::unit(1), e2 = CoordVector::unit(2);
  auto r = lemma4_sum(1, e1, e1);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_DOUBLE_EQ(r.bound, 1.0);
  for (unsigned n = 1; n <= 6; ++n) {
    r = lemma4_sum(n, e1, e2);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.bound, std::ldexp(1.0, static_cast<int>(n) - 1));
  }
  const auto x = CoordVector::from_values(kPair);
  r = lemma4_sum(2, x, x);
  EXPECT_NEAR(r.value, 0.0, 1e-16);
  EXPECT_NEAR(r.bound, 2.0, 1e-15);
}

TEST(KpProperty, MatchesDenseOracle) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    SampleRng rng(21, 0, i);
    const auto x = random_coord(rng, 32);
    const auto dx = to_dense(x, 32);
    for (unsigned k = 0; k <= 5; ++k) {
      const auto got = to_dense(kp_component(k, x), 32);
      const auto want = oracle::kp(k, dx);
      for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(got[j], want[j], 1e-12 * (1 + std::abs(want[j])));
    }
  }
}

TEST(KpProperty, Homogeneity) {
  for (std::uint64_t i = 0; i < 500; ++i) {
    SampleRng rng(22, 0, i);
    const auto x = random_coord(rng, 48);
    double lam = 0;
    while (lam == 0) lam = rng.uniform(-10, 10);
    const auto a = kp_map(4, scale(lam, x));
    const auto b = kp_map(4, x);
    for (std::size_t p = 0; p < 4; ++p) expect_close(a[p], scale(lam, b[p]), 1e-12);
  }
}

TEST(KpProperty, FlatAgreesWithDensified) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleRng rng(23, 0, i);
    const auto f = CoordVector::flat(rng.integer(1, 10000), rng.normal(), rng.integer(0, 9));
    const auto a = kp_map(5, f);
    const auto b = kp_map(5, f.densified());
    for (std::size_t p = 0; p < 5; ++p) {
      ASSERT_TRUE(a[p].is_zero() || a[p].is_flat());
      expect_close(a[p], b[p], 1e-12);
    }
  }
}

TEST(KpProperty, Lemma4Bound) {
  for (unsigned n = 1; n <= 5; ++n)
    for (std::uint64_t i = 0; i < 4000; ++i) {
      SampleRng rng(24, n, i);
      const auto r = lemma4_sum(n, random_coord(rng, 64), random_coord(rng, 64));
      ASSERT_LE(r.value, r.bound * (1 + 1e-9)) << "n=" << n << " sample " << i;
    }
}

TEST(KpProperty, QuasilinearityBounded) {
  for (unsigned m = 1; m <= 4; ++m) {
    double worst = 0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
      SampleRng rng(25, m, i);
      const auto d = quasilinearity_defect(m, random_coord(rng, 64), random_coord(rng, 64));
      worst = std::max(worst, d.defect / d.budget);
    }
    EXPECT_LE(worst, std::pow(4.0, m)) << "m=" << m;
    EXPECT_GT(worst, 0.0);
  }
}
