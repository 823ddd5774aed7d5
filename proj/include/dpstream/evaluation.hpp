#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpstream/domain.hpp"
#include "dpstream/fitters.hpp"
#include "dpstream/queries.hpp"

namespace dpstream {

// WE = (1/|W|) sum_q |q(f) - q(g)|. With normalize, cell values are divided
// by |f| first.
double workload_error(const Workload& w, const WeightedDataset& f,
                      const WeightedDataset& g, bool normalize = true);

// Cell-vector form; `denominator` is |f| when normalizing, 1 otherwise.
double workload_error(std::span<const double> f_cells,
                      std::span<const double> g_cells, double denominator);

struct RelativeError {
  double value = 0.0;
  // Cells with q(f) = 0, left out of both the sum and the count.
  std::size_t excluded_cells = 0;
};

RelativeError relative_workload_error(const Workload& w,
                                      const WeightedDataset& f,
                                      const WeightedDataset& g);
RelativeError relative_workload_error(std::span<const double> f_cells,
                                      std::span<const double> g_cells);

struct MetricAggregate {
  double avg_we = 0.0;
  double max_we = 0.0;
  double avg_rel_we = 0.0;
  double max_rel_we = 0.0;
};

// Mean and max over the per-workload values of Q.
MetricAggregate aggregate(std::span<const double> we,
                          std::span<const double> rel_we);

struct MetricRow {
  std::size_t t = 0;
  double epsilon = 0.0;
  std::string algorithm;
  std::uint64_t seed = 0;
  MetricAggregate metrics;
  std::size_t rel_excluded_cells = 0;
};

// Per-metric mean over the last `window` rows.
MetricAggregate summarize_tail(std::span<const MetricRow> rows,
                               std::size_t window);

// Tracks the exact W_i(f_t) for every workload from the differentials and
// scores synthetic snapshots against it. Offline analysis only: it reads the
// true data and is not part of any private computation.
class StreamEvaluator {
 public:
  StreamEvaluator(const WorkloadSet& workloads, bool normalize = true);

  void observe(const WeightedDataset& delta);

  double true_mass() const { return mass_; }
  const std::vector<double>& true_cells(std::size_t i) const {
    return cells_.at(i);
  }

  // Scores g_t; g must be defined on a support built for the same workloads.
  MetricRow evaluate(const SupportDataset& g) const;
  MetricRow evaluate(const WeightedDataset& g) const;

 private:
  MetricRow score(const std::vector<std::vector<double>>& g_cells) const;

  const WorkloadSet* workloads_;
  bool normalize_;
  double mass_ = 0.0;
  std::vector<std::vector<double>> cells_;
};

}  // namespace dpstream
