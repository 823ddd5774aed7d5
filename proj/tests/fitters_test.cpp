#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "dpstream/error.hpp"
#include "dpstream/fitters.hpp"
#include "test_util.hpp"

namespace dpstream {
namespace {

using testing::dataset_of;
using testing::schema_of;

std::shared_ptr<const Support> dense_support(const SchemaPtr& s,
                                             const WorkloadSet& q) {
  return Support::working_support(s, q, 1 << 20, 0);
}

TEST(MwUpdateTest, ExactMeasurementIsAFixedPoint) {
  auto s = schema_of({2, 3});
  auto h = dataset_of(s, {{{0, 0}, 1.5}, {{0, 1}, 2}, {{1, 2}, 0.5}});
  MarginalQuery q({1}, {1});
  const auto out = mw_update(h, q, eval_query(q, h), total_mass(h));
  for (const auto& [x, w] : h) EXPECT_NEAR(out.weight(x), w, 1e-15);
}

// a = 2 e^{1/4} / (e^{1/4} + 1), b = 2 / (e^{1/4} + 1).
TEST(MwUpdateTest, TwoPointExample) {
  auto s = schema_of({2});
  auto h = dataset_of(s, {{{0}, 1}, {{1}, 1}});
  MwStats stats;
  const auto out = mw_update(h, MarginalQuery({0}, {0}), 2.0, 2.0, &stats);
  const double e = std::exp(0.25);
  EXPECT_NEAR(out.weight({0}), 2 * e / (e + 1), 1e-14);
  EXPECT_NEAR(out.weight({1}), 2 / (e + 1), 1e-14);
  EXPECT_NEAR(out.weight({0}), 1.1245, 2e-4);
  EXPECT_NEAR(out.weight({1}), 0.8755, 2e-4);
  EXPECT_EQ(stats.updates, 1u);
  EXPECT_EQ(stats.clamped, 0u);
}

TEST(MwUpdateTest, Errors) {
  auto s = schema_of({2});
  MarginalQuery q({0}, {0});
  EXPECT_THROW(mw_update(WeightedDataset(s), q, 1.0, 1.0), Error);
  auto h = dataset_of(s, {{{0}, 1}});
  EXPECT_THROW(mw_update(h, q, 1.0, 0.0), Error);
  EXPECT_THROW(mw_update(h, q, NAN, 1.0), Error);
  EXPECT_THROW(mw_update(h, MarginalQuery({3}, {0}), 1.0, 1.0), Error);
}

TEST(MwUpdateTest, ClampsHugeExponents) {
  auto s = schema_of({2});
  auto h = dataset_of(s, {{{0}, 1}, {{1}, 1}});
  MwStats stats;
  const auto out = mw_update(h, MarginalQuery({0}, {0}), 1e6, 1.0, &stats);
  EXPECT_EQ(stats.clamped, 1u);
  EXPECT_GT(out.weight({1}), 0.0);
  EXPECT_NEAR(total_mass(out), 1.0, 1e-12);
}

TEST(MwUpdateTest, KeepsMassAndPositivity) {
  auto s = schema_of({3, 4});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    WeightedDataset h(s);
    for (const auto& x : testing::all_points(*s)) h.add(x, u(rng));
    MarginalQuery q({trial % 2 == 0 ? 0u : 1u}, {static_cast<std::uint32_t>(rng() % 3)});
    const double target = u(rng) * 10;
    const auto out = mw_update(h, q, u(rng) * 40 - 20, target);
    EXPECT_NEAR(total_mass(out), target, 1e-9 * target);
    EXPECT_EQ(out.support_size(), h.support_size());
    for (const auto& [x, w] : out) EXPECT_GT(w, 0.0);
  }
}

// The cell-vector fast path against one literal update per cell.
TEST(MwUpdateWorkloadTest, MatchesSequentialCellUpdates) {
  auto s = schema_of({3, 2, 4});
  const WorkloadSet q = enumerate_workloads(*s, 2);
  auto support = dense_support(s, q);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(support->size());
    for (double& v : w) v = u(rng);
    SupportDataset fast(support, w);
    const double target = fast.total_mass();
    WeightedDataset slow = fast.to_weighted_dataset();

    const std::size_t wi = trial % q.size();
    std::vector<double> measured(q[wi].size());
    for (double& v : measured) v = u(rng) * 10 - 2;

    mw_update_workload(fast, wi, measured, target);
    for (std::size_t c = 0; c < q[wi].size(); ++c) {
      slow = mw_update(slow, q[wi].query(c), measured[c], target);
    }
    for (std::size_t i = 0; i < support->size(); ++i) {
      ASSERT_NEAR(fast.weights()[i], slow.weight(support->point(i)),
                  1e-12 * target);
    }
  }
}

TEST(MwUpdateWorkloadTest, LengthMismatch) {
  auto s = schema_of({2, 2});
  const WorkloadSet q = enumerate_workloads(*s, 1);
  SupportDataset h = SupportDataset::uniform(dense_support(s, q), 1.0);
  EXPECT_THROW(mw_update_workload(h, 0, std::vector<double>{1, 2, 3}, 4.0),
               Error);
}

TEST(MwFitTest, EmptyMeasurementsRescaleInit) {
  auto s = schema_of({2, 2});
  const WorkloadSet q = enumerate_workloads(*s, 1);
  auto init = dataset_of(s, {{{0, 0}, 1}, {{1, 1}, 3}});
  const auto out = mw_fit(q, {}, init, 8.0, 1);
  EXPECT_DOUBLE_EQ(out.weight({0, 0}), 2.0);
  EXPECT_DOUBLE_EQ(out.weight({1, 1}), 6.0);
}

TEST(MwFitTest, OneMeasurementOnePassIsOneUpdate) {
  auto s = schema_of({2, 2});
  const WorkloadSet q{{Workload(*s, {0, 1})}};
  auto init = dataset_of(s, {{{0, 0}, 1}, {{0, 1}, 2}, {{1, 0}, 3}, {{1, 1}, 4}});
  const std::vector<Measurement> m{{0, {2, 2, 2, 4}}};
  const auto fit = mw_fit(q, m, init, 10.0, 1);
  WeightedDataset seq = init;
  for (std::size_t c = 0; c < 4; ++c) {
    seq = mw_update(seq, q[0].query(c), m[0].values[c], 10.0);
  }
  for (const auto& [x, w] : seq) EXPECT_NEAR(fit.weight(x), w, 1e-12);
}

TEST(MwFitTest, ConvergesOnConsistentMeasurements) {
  auto s = schema_of({2, 2});
  const WorkloadSet q = enumerate_workloads(*s, 1);
  auto f = dataset_of(s, {{{0, 0}, 10}, {{0, 1}, 3}, {{1, 0}, 5}, {{1, 1}, 2}});
  std::vector<Measurement> m;
  for (std::size_t i = 0; i < q.size(); ++i) m.push_back({i, eval_workload(q[i], f)});
  auto h = SupportDataset::uniform(dense_support(s, q), 1.0);
  const auto out = mw_fit(m, h, total_mass(f), 50);
  double worst = 0.0;
  for (const auto& mm : m) {
    const auto v = out.workload_values(mm.workload);
    for (std::size_t c = 0; c < v.size(); ++c) {
      worst = std::max(worst, std::abs(v[c] - mm.values[c]));
    }
  }
  EXPECT_LT(worst, 1e-3);
}

TEST(MultiplicativeWeightsFitterTest, NewestOnceThenReplays) {
  auto s = schema_of({3, 2});
  const WorkloadSet q = enumerate_workloads(*s, 1);
  auto support = dense_support(s, q);
  const auto init = SupportDataset::uniform(support, 2.0);
  const std::vector<Measurement> m{{0, {1, 5, 6}}, {1, {9, 3}}};

  MultiplicativeWeightsFitter one(1);
  const auto a = one.fit(m, init, 12.0);
  SupportDataset expect = init;
  mw_update_workload(expect, 1, m[1].values, 12.0);
  for (std::size_t i = 0; i < support->size(); ++i) {
    EXPECT_NEAR(a.weights()[i], expect.weights()[i], 1e-12);
  }
  EXPECT_EQ(one.stats().updates, 2u);

  MultiplicativeWeightsFitter three(3);
  const auto b = three.fit(m, init, 12.0);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& mm : m) mw_update_workload(expect, mm.workload, mm.values, 12.0);
  }
  for (std::size_t i = 0; i < support->size(); ++i) {
    EXPECT_NEAR(b.weights()[i], expect.weights()[i], 1e-12);
  }
  EXPECT_NEAR(b.total_mass(), 12.0, 1e-9);
  EXPECT_THROW(MultiplicativeWeightsFitter(0), Error);
}

// Psi(h) = (1/|f|) sum_x f(x) ln(f(x) / h(x)); one MW step on query q with
// measurement m lowers it by at least
// ((q(h) - q(f)) / 2|f|)^2 - ((m - q(f)) / 2|f|)^2.
TEST(MwUpdateTest, RelativeEntropyDecrease) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = schema_of({static_cast<std::uint32_t>(2 + rng() % 3),
                        static_cast<std::uint32_t>(2 + rng() % 3)});
    const auto points = testing::all_points(*s);
    WeightedDataset f(s), h(s);
    std::vector<double> raw;
    for (const auto& x : points) {
      f.add(x, static_cast<double>(rng() % 6));
      raw.push_back(0.1 + u(rng));
    }
    const double n = total_mass(f);
    if (n == 0.0) continue;
    const double raw_mass = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      h.add(points[i], raw[i] * n / raw_mass);
    }
    const Workload w(*s, {0, 1});
    const auto q = w.query(rng() % w.size());
    const double qh = eval_query(q, h), qf = eval_query(q, f);
    double m = qf + (u(rng) - 0.5) * n;
    m = std::clamp(m, qh - 2 * n, qh + 2 * n);

    auto psi = [&](const WeightedDataset& g) {
      double sum = 0.0;
      for (const auto& x : points) {
        const double fx = f.weight(x);
        if (fx > 0) sum += fx * std::log(fx / g.weight(x));
      }
      return sum / n;
    };
    const auto next = mw_update(h, q, m, n);
    const double bound = std::pow((qh - qf) / (2 * n), 2) - std::pow((m - qf) / (2 * n), 2);
    EXPECT_GE(psi(h) - psi(next), bound - 1e-9);
  }
}

}  // namespace
}  // namespace dpstream
