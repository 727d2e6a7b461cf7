#include <gtest/gtest.h>

#include "znlab/operator_expr.hpp"
#include "znlab/sampling.hpp"

using namespace znlab;

TEST(OperatorExpr, Primaries) {
  EXPECT_EQ(build("id", 3), OperatorMatrix::identity(3));
  EXPECT_EQ(build("zero", 2), OperatorMatrix::zero(2, 2));
  EXPECT_EQ(build("mult[1, 0.5]", 2),
            OperatorMatrix::diagonal(2, OperatorAtom::multiplier(CoordVector::from_values(std::vector<double>{1, 0.5}))));
  EXPECT_EQ(build("perm[2,1,3]", 1), OperatorMatrix::diagonal(1, OperatorAtom::permutation({2, 1, 3})));
  EXPECT_EQ(build("block[len:4,count:2]", 3), block_operator(3, flat_blocks(4, 2)));
  EXPECT_EQ(build("iota(2,4)", 2), embed_matrix(2, 4));
  EXPECT_EQ(build("pi(4,1)", 4), project_matrix(4, 1));
  EXPECT_EQ(build("shift(3)", 3), shift_power(3, 1));
}

TEST(OperatorExpr, Combinations) {
  EXPECT_EQ(build("iota(3,4) * pi(4,3)", 4), shift_power(4, 1));
  EXPECT_EQ(build("shift(4)^3", 4), shift_power(4, 3));
  EXPECT_EQ(build("shift(2)^0", 2), OperatorMatrix::identity(2));
  // iota fills the top orders and pi keeps the bottom ones
  EXPECT_EQ(build("pi(3,2) * iota(2,3)", 2), shift_power(2, 1));
  EXPECT_EQ(build("pi(3,3) * iota(3,3)", 3), OperatorMatrix::identity(3));
  const auto v = RochbergVector({CoordVector::unit(1), CoordVector::unit(2)});
  EXPECT_EQ(build("2·id", 2).apply(v), 2.0 * v);
  EXPECT_EQ(build("2*id", 2).apply(v), 2.0 * v);
  EXPECT_EQ(build("-id", 2).apply(v), -1.0 * v);
  EXPECT_EQ(build("-0.5·id", 2).apply(v), -0.5 * v);
  EXPECT_TRUE(build("id - id", 2).apply(v).is_zero());
  EXPECT_EQ(build("(id + shift(2)) * (id - shift(2))", 2).apply(v), v);
  // iota(1,3) * pi(3,1) maps order 3 to order 3 through order 1
  EXPECT_EQ(build("iota(1,3)*pi(3,1)", 3), shift_power(3, 2));
}

TEST(OperatorExpr, ApplyMatchesManual) {
  const auto R = build("mult[2,3] + 0.5·shift(3) * perm[2,1]", 3);
  SampleRng rng(61, 0, 0);
  const auto v = random_rochberg(rng, 3, 4);
  const auto d = OperatorAtom::multiplier(CoordVector::from_values(std::vector<double>{2, 3}));
  const auto want = OperatorMatrix::diagonal(3, d).apply(v) +
                    0.5 * shift_power(3, 1).apply(OperatorMatrix::diagonal(3, OperatorAtom::permutation({2, 1})).apply(v));
  const auto got = R.apply(v);
  for (unsigned p = 0; p < 3; ++p) EXPECT_LE((got[p] - want[p]).max_abs(), 1e-15);
}

TEST(OperatorExpr, Errors) {
  EXPECT_THROW(parse_operator(""), InvalidArgument);
  EXPECT_THROW(parse_operator("id +"), InvalidArgument);
  EXPECT_THROW(parse_operator("foo"), InvalidArgument);
  EXPECT_THROW(parse_operator("mult[]"), InvalidArgument);
  EXPECT_THROW(parse_operator("block[len:0,count:1]"), InvalidArgument);
  EXPECT_THROW(parse_operator("(id"), InvalidArgument);
  EXPECT_THROW(parse_operator("2 id"), InvalidArgument);
  EXPECT_THROW(parse_operator("id id"), InvalidArgument);
  EXPECT_THROW(build("perm[1,1]", 2), InvalidArgument);
  EXPECT_THROW(build("shift(3)", 2), OrderMismatch);
  EXPECT_THROW(build("iota(2,3)", 3), OrderMismatch);
  EXPECT_THROW(build("pi(3,2)", 2), OrderMismatch);
  EXPECT_THROW(build("iota(1,2)^2", 1), OrderMismatch);
  EXPECT_THROW(build("iota(1,2) + id", 1), OrderMismatch);
}
