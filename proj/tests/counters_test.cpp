#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dpstream/counters.hpp"
#include "dpstream/error.hpp"
#include "dpstream/queries.hpp"
#include "test_util.hpp"

namespace dpstream {
namespace {

const CounterKind kAllKinds[] = {CounterKind::kSimple,
                                 CounterKind::kBoundedBlock,
                                 CounterKind::kBinaryTree,
                                 CounterKind::kUnboundedBlock};

}  // namespace

void PrintTo(CounterKind k, std::ostream* os) { *os << to_string(k); }

namespace {

std::unique_ptr<Counter> counter_of(CounterKind kind, double eps,
                                    NoiseSource& noise,
                                    std::uint64_t horizon = 1000) {
  CounterOptions opts;
  opts.kind = kind;
  opts.horizon = horizon;
  return make_counter(opts, eps, noise);
}

class AllCountersTest : public ::testing::TestWithParam<CounterKind> {};

TEST_P(AllCountersTest, ZeroNoiseSmallSequence) {
  NoiseSource zero(NoiseMode::kZero, 0);
  auto c = counter_of(GetParam(), 1.0, zero);
  EXPECT_EQ(c->feed(1), 1.0);
  EXPECT_EQ(c->feed(2), 3.0);
  EXPECT_EQ(c->feed(3), 6.0);
}

TEST_P(AllCountersTest, ZeroNoiseRandomStreamIsExactPrefixSums) {
  NoiseSource zero(NoiseMode::kZero, 0);
  auto c = counter_of(GetParam(), 0.3, zero, 777);
  std::mt19937_64 rng(GetParam() == CounterKind::kSimple ? 1 : 2);
  double sum = 0.0;
  for (int t = 1; t <= 777; ++t) {
    const double v = static_cast<double>(rng() % 50);
    sum += v;
    ASSERT_NEAR(c->feed(v), sum, 1e-9) << "t = " << t;
  }
}

TEST_P(AllCountersTest, PeekHoldsTheLastRelease) {
  NoiseSource noise(NoiseMode::kLaplace, 4);
  auto c = counter_of(GetParam(), 1.0, noise);
  EXPECT_EQ(c->peek(), 0.0);
  const double out = c->feed(5.0);
  const auto draws = noise.laplace_draws();
  for (int i = 0; i < 100; ++i) ASSERT_EQ(c->peek(), out);
  EXPECT_EQ(noise.laplace_draws(), draws);
  EXPECT_EQ(c->steps(), 1u);
}

TEST_P(AllCountersTest, RejectsNonFiniteInput) {
  NoiseSource noise(NoiseMode::kLaplace, 4);
  auto c = counter_of(GetParam(), 1.0, noise);
  EXPECT_THROW(c->feed(NAN), Error);
  EXPECT_EQ(c->steps(), 0u);
}

// Every item's total privacy loss, sum of 1/scale over the draws perturbing a
// partial sum that contains it, is at most epsilon.
TEST_P(AllCountersTest, PerItemPrivacyLossWithinEpsilon) {
  const double eps = 0.7;
  NoiseSource noise(NoiseMode::kLaplace, 10);
  auto c = counter_of(GetParam(), eps, noise, 300);
  c->enable_trace();
  const std::uint64_t horizon = 300;
  for (std::uint64_t t = 0; t < horizon; ++t) c->feed(0.0);

  std::vector<double> loss(horizon + 1, 0.0);
  std::vector<int> touches(horizon + 1, 0);
  for (const auto& e : c->trace()) {
    ASSERT_LE(e.first_step, e.last_step);
    for (std::uint64_t s = e.first_step; s <= e.last_step; ++s) {
      loss[s] += 1.0 / e.scale;
      ++touches[s];
    }
  }
  for (std::uint64_t s = 1; s <= horizon; ++s) {
    EXPECT_LE(loss[s], eps + 1e-12) << "step " << s;
    EXPECT_GE(touches[s], 1) << "step " << s;
    switch (GetParam()) {
      case CounterKind::kSimple:
        EXPECT_LE(touches[s], 1);
        break;
      case CounterKind::kBoundedBlock:
      case CounterKind::kUnboundedBlock:
        EXPECT_LE(touches[s], 2);
        break;
      case CounterKind::kBinaryTree:
        EXPECT_LE(touches[s],
                  static_cast<int>(std::ceil(std::log2(double(s)))) + 1);
        break;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, AllCountersTest, ::testing::ValuesIn(kAllKinds),
                         [](const auto& info) {
                           return std::string(to_string(info.param));
                         });

TEST(SimpleCounterTest, StdOfSumOfLaplaceIncrements) {
  const double eps = 1.0;
  const int t = 256, trials = 500;
  NoiseSource noise(NoiseMode::kLaplace, 31);
  double sq = 0.0;
  for (int i = 0; i < trials; ++i) {
    SimpleCounter c(eps, noise);
    double out = 0.0;
    for (int s = 0; s < t; ++s) out = c.feed(0.0);
    sq += out * out;
  }
  const double std_dev = std::sqrt(sq / trials);
  EXPECT_NEAR(std_dev / (std::sqrt(2.0 * t) / eps), 1.0, 0.1);
}

TEST(UnboundedBlockCounterTest, SeventeenOnes) {
  NoiseSource zero(NoiseMode::kZero, 0);
  UnboundedBlockCounter c(1.0, zero);
  double out = 0.0;
  for (int i = 0; i < 17; ++i) out = c.feed(1.0);
  EXPECT_EQ(out, 17.0);
}

// Frozen from tests/oracles/unbounded_block_schedule.py.
TEST(UnboundedBlockCounterTest, BoundaryAndRolloverSchedule) {
  NoiseSource zero(NoiseMode::kZero, 0);
  UnboundedBlockCounter c(1.0, zero);
  std::vector<std::uint64_t> boundaries, rollovers;
  for (std::uint64_t t = 1; t <= 30; ++t) {
    c.feed(0.0);
    if (c.last_was_block_boundary()) boundaries.push_back(t);
    if (c.last_was_rollover()) {
      rollovers.push_back(t);
      EXPECT_EQ(c.block_size() * c.block_size(), c.partition_size());
    }
    EXPECT_GE(c.block_size(), 2u);
  }
  EXPECT_EQ(boundaries,
            (std::vector<std::uint64_t>{2, 4, 7, 10, 13, 17, 21, 25, 29}));
  EXPECT_EQ(rollovers, (std::vector<std::uint64_t>{4, 13, 29}));
}

TEST(UnboundedBlockCounterTest, FeedRequiresTheRightKind) {
  NoiseSource zero(NoiseMode::kZero, 0);
  UnboundedBlockCounter ub(1.0, zero);
  SimpleCounter simple(1.0, zero);
  EXPECT_EQ(unbounded_block_feed(ub, 4.0), 4.0);
  EXPECT_THROW(unbounded_block_feed(simple, 1.0), Error);
}

TEST(BlockCounterTest, DefaultBlockSizeIsCeilSqrtHorizon) {
  NoiseSource zero(NoiseMode::kZero, 0);
  CounterOptions opts{CounterKind::kBoundedBlock, 0, 50};
  auto c = make_counter(opts, 1.0, zero);
  EXPECT_EQ(static_cast<BlockCounter&>(*c).block_size(), 8u);
  EXPECT_THROW(BlockCounter(1.0, zero, 0), Error);
}

TEST(CounterTest, RejectsBadEpsilon) {
  NoiseSource zero(NoiseMode::kZero, 0);
  EXPECT_THROW(SimpleCounter(0.0, zero), Error);
  EXPECT_THROW(SimpleCounter(-1.0, zero), Error);
  EXPECT_THROW(parse_counter_kind("hybrid"), Error);
}

TEST(MultiDimCounterTest, ZeroNoiseFeeds) {
  NoiseSource zero(NoiseMode::kZero, 0);
  MultiDimCounter m(2, {}, 1.0, zero);
  EXPECT_EQ(m.feed(std::vector<double>{1, 0}), (std::vector<double>{1, 0}));
  EXPECT_EQ(m.feed(std::vector<double>{0, 2}), (std::vector<double>{1, 2}));
  EXPECT_EQ(m.peek(), (std::vector<double>{1, 2}));
  EXPECT_EQ(m.steps(), 2u);
}

TEST(MultiDimCounterTest, LengthMismatch) {
  NoiseSource zero(NoiseMode::kZero, 0);
  MultiDimCounter m(3, {}, 1.0, zero);
  EXPECT_THROW(m.feed(std::vector<double>{1, 2}), Error);
}

TEST(MultiDimCounterTest, CellsMatchStandaloneCounters) {
  const double eps = 0.5;
  NoiseSource noise(NoiseMode::kLaplace, 17);
  CounterOptions opts{CounterKind::kUnboundedBlock, 0, 0};
  MultiDimCounter m(4, opts, eps, noise);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.cell(i).kind(), CounterKind::kUnboundedBlock);
    EXPECT_EQ(m.cell(i).epsilon(), eps);
  }
  // Error spread of one cell against a standalone counter at the same
  // epsilon, over independent trials.
  const int trials = 400, t = 40;
  double sq_cell = 0.0, sq_alone = 0.0;
  for (int i = 0; i < trials; ++i) {
    MultiDimCounter mm(3, opts, eps, noise);
    UnboundedBlockCounter alone(eps, noise);
    std::vector<double> out;
    double a = 0.0;
    for (int s = 0; s < t; ++s) {
      out = mm.feed(std::vector<double>{0, 0, 0});
      a = alone.feed(0.0);
    }
    sq_cell += out[1] * out[1];
    sq_alone += a * a;
  }
  EXPECT_NEAR(std::sqrt(sq_cell / sq_alone), 1.0, 0.15);
}

TEST(MultiDimCounterTest, NeighboringRecordChangesOneCell) {
  auto s = testing::schema_of({2, 3, 4});
  std::mt19937_64 rng(8);
  auto delta = testing::random_dataset(s, 30, rng);
  auto neighbor = delta;
  neighbor.add({1, 2, 3}, 1.0);
  for (const auto& w : enumerate_workloads(*s, 2)) {
    const auto a = eval_workload(w, delta);
    const auto b = eval_workload(w, neighbor);
    int changed = 0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (a[c] != b[c]) {
        ++changed;
        EXPECT_EQ(b[c] - a[c], 1.0);
      }
    }
    EXPECT_EQ(changed, 1);
  }
}

}  // namespace
}  // namespace dpstream
