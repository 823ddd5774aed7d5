#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dpstream/domain.hpp"
#include "dpstream/queries.hpp"

namespace dpstream {

// Noisy cell estimates for one workload of the run's WorkloadSet.
struct Measurement {
  std::size_t workload = 0;
  std::vector<double> values;
};

struct MwStats {
  std::uint64_t updates = 0;
  // Exponents that fell outside [-kMaxExponent, kMaxExponent].
  std::uint64_t clamped = 0;
};

inline constexpr double kMaxExponent = 50.0;

// Fixed, data-independent set of points that synthetic datasets live on,
// with every point's cell index precomputed for each workload of Q.
class Support {
 public:
  Support(SchemaPtr schema, const WorkloadSet& workloads,
          std::vector<DataPoint> points);

  // All of X when |X| <= max_points; otherwise max_points distinct points
  // drawn uniformly from X with the given seed.
  static std::shared_ptr<const Support> working_support(
      SchemaPtr schema, const WorkloadSet& workloads, std::size_t max_points,
      std::uint64_t seed);

  const DomainSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  std::size_t size() const { return points_.size(); }
  const DataPoint& point(std::size_t i) const { return points_[i]; }
  std::span<const DataPoint> points() const { return points_; }

  std::span<const std::uint32_t> cells(std::size_t workload) const {
    return cells_.at(workload);
  }
  std::size_t workload_size(std::size_t workload) const {
    return workload_sizes_.at(workload);
  }
  std::size_t num_workloads() const { return cells_.size(); }

 private:
  SchemaPtr schema_;
  std::vector<DataPoint> points_;
  std::vector<std::vector<std::uint32_t>> cells_;
  std::vector<std::size_t> workload_sizes_;
};

// Dense weight vector over a shared Support.
class SupportDataset {
 public:
  SupportDataset(std::shared_ptr<const Support> support,
                 std::vector<double> weights);
  static SupportDataset uniform(std::shared_ptr<const Support> support,
                                double weight_per_point);

  const Support& support() const { return *support_; }
  const std::shared_ptr<const Support>& support_ptr() const {
    return support_;
  }
  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }

  double total_mass() const;
  void rescale_to(double target_mass);

  std::vector<double> workload_values(std::size_t workload) const;
  WeightedDataset to_weighted_dataset() const;

 private:
  std::shared_ptr<const Support> support_;
  std::vector<double> weights_;
};

// Mean of datasets sharing one support.
SupportDataset average(std::span<const SupportDataset> datasets);

// One multiplicative-weights step for a single marginal query:
// h(x) <- h(x) exp(q(x) (measured - q(h)) / (2 target_mass)), then rescaled
// to target_mass.
WeightedDataset mw_update(const WeightedDataset& h, const MarginalQuery& q,
                          double measured, double target_mass,
                          MwStats* stats = nullptr);

// Cell-vector form on a support: one mw_update per cell of the workload, in
// cell order, each with its own measured value. h must already have mass
// target_mass.
void mw_update_workload(SupportDataset& h, std::size_t workload,
                        std::span<const double> measured, double target_mass,
                        MwStats* stats = nullptr);

// Rescales init to target_mass, then applies every measurement in order,
// `passes` times over the list.
WeightedDataset mw_fit(const WorkloadSet& workloads,
                       std::span<const Measurement> measurements,
                       const WeightedDataset& init, double target_mass,
                       int passes, MwStats* stats = nullptr);

SupportDataset mw_fit(std::span<const Measurement> measurements,
                      const SupportDataset& init, double target_mass,
                      int passes, MwStats* stats = nullptr);

// A_Dataset: turns measurements plus an initial dataset into a dataset of
// the requested mass on the same support.
class DatasetFitter {
 public:
  virtual ~DatasetFitter() = default;
  virtual std::string name() const = 0;
  // The last element of `measurements` is the newest one.
  virtual SupportDataset fit(std::span<const Measurement> measurements,
                             const SupportDataset& init,
                             double target_mass) = 0;
};

// MW fitter used by both synthesizers: rescale init, apply the newest
// measurement once, then replay the full list passes - 1 more times.
class MultiplicativeWeightsFitter final : public DatasetFitter {
 public:
  explicit MultiplicativeWeightsFitter(int passes = 1);

  std::string name() const override { return "mw"; }
  SupportDataset fit(std::span<const Measurement> measurements,
                     const SupportDataset& init, double target_mass) override;

  int passes() const { return passes_; }
  const MwStats& stats() const { return stats_; }

 private:
  int passes_;
  MwStats stats_;
};

}  // namespace dpstream
