#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "znlab/rochberg.hpp"
#include "znlab/sampling.hpp"

using namespace znlab;

namespace {

std::vector<oracle::Dense> to_dense(const RochbergVector& v, std::size_t m) {
  std::vector<oracle::Dense> out;
  for (const auto& c : v.coords()) {
    oracle::Dense d(m, 0.0);
    for (const auto& e : c.to_entries()) d.at(e.index - 1) = e.value;
    out.push_back(d);
  }
  return out;
}

CoordVector normalised_flat(std::uint64_t N) { return CoordVector::flat(N, 1.0 / std::sqrt(static_cast<double>(N))); }

}  // namespace

TEST(Rochberg, Construction) {
  EXPECT_THROW(RochbergVector(std::vector<CoordVector>{}), InvalidArgument);
  const auto v = RochbergVector({CoordVector::unit(1), CoordVector::unit(2), CoordVector::unit(3)});
  EXPECT_EQ(v.order(), 3u);
  EXPECT_EQ(v.at_order(0), CoordVector::unit(3));
  EXPECT_EQ(v.at_order(2), CoordVector::unit(1));
  EXPECT_THROW(v + RochbergVector::zero(2), OrderMismatch);
}

TEST(Rochberg, QuasinormExamples) {
  EXPECT_EQ(quasinorm(RochbergVector({CoordVector{}, CoordVector::unit(1)})), 1.0);
  for (std::uint64_t e : {10u, 20u, 40u, 60u}) {
    const double N = std::ldexp(1.0, static_cast<int>(e));
    const double q = quasinorm(RochbergVector::bottom(2, normalised_flat(std::uint64_t{1} << e)));
    EXPECT_NEAR(q, std::log(N) + 1, 1e-12 * q);
  }
}

TEST(Rochberg, GraphVectorExamples) {
  EXPECT_EQ(graph_vector(2, CoordVector::unit(1)), RochbergVector({CoordVector{}, CoordVector::unit(1)}));
  const auto u = CoordVector::unit(4, 3.0);
  EXPECT_EQ(graph_vector(1, u), RochbergVector({u}));
  const std::uint64_t N = 1 << 20;
  const auto x = normalised_flat(N);
  const auto g = graph_vector(3, x);
  const double L = std::log(static_cast<double>(N));
  EXPECT_NEAR(g[0].as_flat()->value, x.as_flat()->value * L * L / 2, 1e-14);
  EXPECT_NEAR(g[1].as_flat()->value, -x.as_flat()->value * L, 1e-14);
  EXPECT_EQ(g[2], x);
}

TEST(Rochberg, EmbedProjectExamples) {
  const auto u = CoordVector::unit(2, 5.0);
  EXPECT_EQ(embed(RochbergVector({u}), 2), RochbergVector({u, CoordVector{}}));
  const auto v = RochbergVector({CoordVector::unit(1), u});
  EXPECT_EQ(embed(v, 2), v);
  EXPECT_EQ(project(v, 2), v);
  EXPECT_EQ(project(v, 1), RochbergVector({u}));
  EXPECT_THROW(embed(v, 1), OrderMismatch);
  EXPECT_THROW(project(v, 3), OrderMismatch);
  const double vals[] = {0.6, 0.8};
  const auto w = CoordVector::from_values(vals);
  EXPECT_DOUBLE_EQ(quasinorm(project(graph_vector(2, w), 1)) / quasinorm(graph_vector(2, w)), 1.0);
}

TEST(Rochberg, PairingExamples) {
  const auto e1 = CoordVector::unit(1);
  EXPECT_EQ(duality_pairing(RochbergVector({e1}), RochbergVector({e1})), -1.0);
  EXPECT_EQ(duality_pairing(RochbergVector({e1, CoordVector{}}), RochbergVector({CoordVector{}, e1})), -1.0);
  const auto x = RochbergVector({CoordVector::unit(1, 2.0), CoordVector::unit(1, 3.0)});
  EXPECT_EQ(duality_pairing(x, x), 0.0);
  EXPECT_THROW(duality_pairing(x, RochbergVector({e1})), OrderMismatch);
}

TEST(Rochberg, OmegaExamples) {
  EXPECT_THROW(omega_lower_bound(RochbergVector({CoordVector::unit(1)}), {}), EmptyWitnessSet);
  EXPECT_EQ(omega_lower_bound(RochbergVector::zero(3)), 0.0);
  const auto g = graph_vector(2, CoordVector::unit(1));
  const RochbergVector w[] = {g};
  EXPECT_EQ(omega_lower_bound(g, w), 0.0);
  const double vals[] = {0.6, -0.8, 0.1};
  const auto u = CoordVector::from_values(vals);
  for (unsigned n = 1; n <= 5; ++n) {
    const double om = omega_lower_bound(RochbergVector::top(n, u));
    EXPECT_GE(om, u.max_abs() * (1 - 1e-15));
    EXPECT_NEAR(om, l2_norm(u), 1e-12);  // the normalised coordinate witness reaches ||u||_2
  }
}

TEST(Rochberg, GramExamples) {
  const auto J = pairing_gram(2, 1).matrix();
  Eigen::MatrixXd want(2, 2);
  want << 0, -1, 1, 0;
  EXPECT_EQ(J, want);
  EXPECT_EQ(pairing_gram(1, 1).matrix()(0, 0), -1.0);
  for (unsigned n = 1; n <= 5; ++n) {
    const auto G = pairing_gram(n, 3);
    EXPECT_EQ(G.matrix(), oracle::gram(n, 3));
    EXPECT_TRUE((G.matrix() * G.inverse()).isIdentity(1e-12));
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(3 * n, -1.0, 2.0);
    EXPECT_EQ(G.solve(G.apply(v)), v);
    EXPECT_EQ(G.apply(v), G.matrix() * v);
    const Eigen::MatrixXd sign = (n % 2 ? 1.0 : -1.0) * G.matrix();
    EXPECT_EQ(G.matrix().transpose(), sign);
  }
}

TEST(RochbergProperty, MatchesDenseOracle) {
  for (unsigned n = 1; n <= 5; ++n)
    for (std::uint64_t i = 0; i < 200; ++i) {
      SampleRng rng(31, n, i);
      const auto x = random_rochberg(rng, n, 24);
      const auto y = random_rochberg(rng, n, 24);
      const double q = quasinorm(x);
      EXPECT_NEAR(q, oracle::quasinorm(to_dense(x, 24)), 1e-11 * (1 + q));
      const double p = duality_pairing(x, y);
      EXPECT_NEAR(p, oracle::pairing(to_dense(x, 24), to_dense(y, 24)), 1e-11 * (1 + std::abs(p)));
      const auto J = pairing_gram(n, 24).matrix();
      EXPECT_NEAR(p, to_stacked(x, 24).dot(J * to_stacked(y, 24)), 1e-11 * (1 + std::abs(p)));
      EXPECT_EQ(from_stacked(to_stacked(x, 24), n), x);
    }
}

TEST(RochbergProperty, IsometriesAndHomogeneity) {
  for (unsigned n = 1; n <= 6; ++n)
    for (std::uint64_t i = 0; i < 500; ++i) {
      SampleRng rng(32, n, i);
      const auto u = random_coord(rng, 64);
      EXPECT_NEAR(quasinorm(graph_vector(n, u)), l2_norm(u), 1e-9 * l2_norm(u));
      const auto v = random_rochberg(rng, n, 64);
      for (unsigned m = n; m <= 6; ++m) EXPECT_NEAR(quasinorm(embed(v, m)), quasinorm(v), 1e-12 * quasinorm(v));
      const double lam = rng.uniform(-4, 4);
      EXPECT_NEAR(quasinorm(lam * v), std::abs(lam) * quasinorm(v), 1e-12 * std::abs(lam) * quasinorm(v));
    }
}

TEST(RochbergProperty, PairingStructure) {
  for (unsigned n = 1; n <= 6; ++n)
    for (std::uint64_t i = 0; i < 500; ++i) {
      SampleRng rng(33, n, i);
      const auto x = random_rochberg(rng, n, 32);
      const auto y = random_rochberg(rng, n, 32);
      if (n % 2 == 0) {
        EXPECT_EQ(duality_pairing(x, x), 0.0);
        EXPECT_NEAR(duality_pairing(x, y), -duality_pairing(y, x), 1e-12 * (1 + std::abs(duality_pairing(x, y))));
      } else {
        EXPECT_NEAR(duality_pairing(x, y), duality_pairing(y, x), 1e-12 * (1 + std::abs(duality_pairing(x, y))));
        // the middle label contributes (-1)^{(n+1)/2} ||x_mid||^2 to D(x, x)
        const auto& mid = x[n / 2];
        const double sign = ((n + 1) / 2) % 2 ? -1.0 : 1.0;
        auto z = x;
        std::vector<CoordVector> c(x.coords().begin(), x.coords().end());
        for (unsigned p = 0; p < n; ++p)
          if (p != n / 2) c[p] = CoordVector{};
        EXPECT_NEAR(duality_pairing(RochbergVector(c), RochbergVector(c)), sign * l2_norm(mid) * l2_norm(mid),
                    1e-12 * (1 + pair(mid, mid)));
      }
    }
}

TEST(RochbergProperty, MeasuredConstants) {
  for (unsigned n = 2; n <= 5; ++n) {
    double K = 0, D = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      SampleRng rng(34, n, i);
      const auto x = random_rochberg(rng, n, 64);
      const auto y = random_rochberg(rng, n, 64);
      K = std::max(K, std::abs(duality_pairing(x, y)) / (quasinorm(x) * quasinorm(y)));
      D = std::max(D, quasinorm(x + y) / (quasinorm(x) + quasinorm(y)));
      const auto w = default_witnesses(x);
      EXPECT_LE(omega_lower_bound(x, w), std::pow(4.0, n) * quasinorm(x));
    }
    EXPECT_LE(K, std::pow(4.0, n));
    EXPECT_LE(D, std::pow(4.0, n));
  }
}

TEST(RochbergProperty, QuasilinearityDefectHomogeneous) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleRng rng(35, 0, i);
    const auto x = random_coord(rng, 32), y = random_coord(rng, 32);
    const auto a = quasilinearity_defect(3, x, y);
    const auto b = quasilinearity_defect(3, scale(-3.0, x), scale(-3.0, y));
    EXPECT_NEAR(b.defect, 3 * a.defect, 1e-11 * (1 + a.defect));
    EXPECT_NEAR(b.budget, 3 * a.budget, 1e-12 * a.budget);
  }
}
