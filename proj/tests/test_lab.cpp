#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "znlab/lab.hpp"

using namespace znlab;

namespace {

ExperimentConfig config(std::string exp, std::vector<unsigned> n = {}, std::uint64_t samples = 50) {
  ExperimentConfig c;
  c.experiment = std::move(exp);
  c.n = std::move(n);
  c.samples = samples;
  return c;
}

std::string csv(const ExperimentReport& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST(Lab, ParseLengths) {
  EXPECT_EQ(parse_lengths("1024"), std::vector<std::uint64_t>{1024});
  EXPECT_EQ(parse_lengths("2^3..2^5, 7"), (std::vector<std::uint64_t>{8, 16, 32, 7}));
  EXPECT_EQ(parse_lengths("2^10..2^60").size(), 51u);
  EXPECT_THROW(parse_lengths(""), ConfigInvalid);
  EXPECT_THROW(parse_lengths("2^70"), ConfigInvalid);
  EXPECT_THROW(parse_lengths("abc"), ConfigInvalid);
  EXPECT_THROW(parse_lengths("2^5..2^3"), ConfigInvalid);
}

TEST(Lab, Validation) {
  EXPECT_NO_THROW(validate(config("norm")));
  EXPECT_THROW(validate(config("nope")), ConfigInvalid);
  auto c = config("norm");
  c.dim = 1;
  EXPECT_THROW(validate(c), ConfigInvalid);
  c = config("norm", {}, 0);
  EXPECT_THROW(validate(c), ConfigInvalid);
  c = config("norm");
  c.tol = 0;
  EXPECT_THROW(validate(c), ConfigInvalid);
  c = config("norm");
  c.format = "xml";
  EXPECT_THROW(validate(c), ConfigInvalid);
  EXPECT_THROW(validate(config("norm", {13})), ConfigInvalid);
  EXPECT_THROW(validate(config("norm", {0})), ConfigInvalid);
  EXPECT_THROW(validate(config("report-all", {2})), ConfigInvalid);
  c = config("norm");
  c.budgets["no_such_gate"] = 1;
  EXPECT_THROW(validate(c), ConfigInvalid);
  c = config("growth");
  c.lengths = {1};
  EXPECT_THROW(validate(c), ConfigInvalid);
  c = config("norm");
  c.op = "id";
  EXPECT_THROW(validate(c), ConfigInvalid);
  c = config("corners");
  c.op = "iota(1,2)";
  EXPECT_THROW(validate(c), ConfigInvalid);
  c.op = "mult[1,2";
  EXPECT_THROW(validate(c), ConfigInvalid);
  c.op = "mult[1,2] + shift(3)";
  c.n = {3};
  EXPECT_NO_THROW(validate(c));
}

TEST(Lab, CsvSchema) {
  const auto r = run(config("telescope"), 1);
  const auto s = csv(r);
  EXPECT_EQ(s.rfind("experiment,n,param,value,bound,ratio,pass\n", 0), 0u);
  EXPECT_NE(s.find("telescope,2,alpha_1"), std::string::npos);
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.meta.at("tool"), "zn-lab");
  EXPECT_EQ(r.meta.at("config_hash").get<std::string>().size(), 16u);
}

TEST(Lab, ThreadCountDoesNotChangeResults) {
  for (const char* exp : {"norm", "pairing", "commutator", "adjoint-check", "corners"}) {
    auto c = config(exp, {2, 3}, 40);
    EXPECT_EQ(csv(run(c, 1)), csv(run(c, 4))) << exp;
  }
}

TEST(Lab, SeedChangesSamples) {
  auto a = config("pairing", {3}, 40), b = a;
  b.seed = 2;
  EXPECT_NE(csv(run(a, 1)), csv(run(b, 1)));
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Lab, BudgetOverride) {
  auto c = config("lemma4", {2}, 200);
  c.budgets["lemma4_slack"] = 0.5;
  const auto r = run(c, 1);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].slack, 0.5);
  EXPECT_EQ(r.rows[0].bound, 2.0);  // the theorem constant itself is not overridable
  auto q = config("quasilinearity", {1}, 200);
  q.budgets["quasilinearity"] = 1e-6;
  const auto rq = run(q, 1);
  EXPECT_EQ(rq.rows[0].bound, 1e-6);
  EXPECT_FALSE(rq.rows[0].pass);
}

TEST(Lab, JsonRoundTripAndReplay) {
  const auto r = run(config("commutator", {2}, 30), 1);
  const auto j = report_to_json(r);
  EXPECT_TRUE(j.contains("meta"));
  EXPECT_EQ(j.at("summary").at("gates"), r.rows.size());
  const auto back = report_from_json(nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.rows.size(), r.rows.size());
  EXPECT_EQ(csv(back), csv(r));
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    const auto rep = replay(back, i);
    EXPECT_TRUE(rep.matches) << back.rows[i].param();
  }
  const auto idx = find_row(back, "commutator", 2, back.rows[0].param());
  EXPECT_EQ(idx, 0u);
  EXPECT_THROW(find_row(back, "commutator", 9, "x"), RowNotFound);
  EXPECT_THROW(replay(back, back.rows.size()), RowNotFound);
}

TEST(Lab, ReplayUnderAnotherSeedDiffers) {
  const auto r = run(config("pairing", {2}, 30), 1);
  const auto i = find_row(r, "pairing", 2, r.rows[0].param());
  EXPECT_TRUE(replay(r, i).matches);
  EXPECT_FALSE(replay(r, i, 99).matches);
}

TEST(Lab, FailingSampleIsNamed) {
  auto c = config("norm", {2}, 20);
  c.tol = 1e-300;
  try {
    run(c, 1);
    FAIL() << "expected SampleError";
  } catch (const SampleError& e) {
    EXPECT_EQ(e.kind(), "ToleranceNotReached");
    EXPECT_GE(e.sample(), 0);
    EXPECT_NE(std::string(e.what()).find("seed=1"), std::string::npos);
  }
}

TEST(Lab, ThreadsFromEnvironment) {
  ::setenv("ZN_LAB_THREADS", "3", 1);
  EXPECT_EQ(lab_threads(), 3u);
  ::setenv("ZN_LAB_THREADS", "zero", 1);
  EXPECT_THROW(lab_threads(), ConfigInvalid);
  ::setenv("ZN_LAB_THREADS", "0", 1);
  EXPECT_THROW(lab_threads(), ConfigInvalid);
  ::unsetenv("ZN_LAB_THREADS");
  EXPECT_GE(lab_threads(), 1u);
}

TEST(Lab, ParallelForRethrowsLowestIndex) {
  try {
    parallel_for(1000, 4, [](std::uint64_t i) {
      if (i == 700 || i == 300) throw InvalidArgument(std::to_string(i));
    });
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "300");
  }
}

TEST(Lab, ConfigJsonRoundTrip) {
  auto c = config("growth", {3, 4});
  c.lengths = {1024, 4096};
  c.budgets["growth_top"] = 0.1;
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json().dump(), c.to_json().dump());
  EXPECT_EQ(back.hash(), c.hash());
}
