#include "dpstream/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "dpstream/error.hpp"

namespace dpstream {

double workload_error(std::span<const double> f_cells,
                      std::span<const double> g_cells, double denominator) {
  if (f_cells.size() != g_cells.size() || f_cells.empty()) {
    fail(ErrorCode::kInvalidArgument, "workload cell vectors do not match");
  }
  if (!(denominator > 0.0)) {
    fail(ErrorCode::kFailedPrecondition,
         "normalized workload error undefined for |f| = 0");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < f_cells.size(); ++c) {
    sum += std::abs(f_cells[c] / denominator - g_cells[c] / denominator);
  }
  return sum / static_cast<double>(f_cells.size());
}

double workload_error(const Workload& w, const WeightedDataset& f,
                      const WeightedDataset& g, bool normalize) {
  if (!same_schema(f, g)) {
    fail(ErrorCode::kSchemaMismatch, "workload_error: schema mismatch");
  }
  const auto fc = eval_workload(w, f);
  const auto gc = eval_workload(w, g);
  return workload_error(fc, gc, normalize ? total_mass(f) : 1.0);
}

RelativeError relative_workload_error(std::span<const double> f_cells,
                                      std::span<const double> g_cells) {
  if (f_cells.size() != g_cells.size()) {
    fail(ErrorCode::kInvalidArgument, "workload cell vectors do not match");
  }
  RelativeError out;
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < f_cells.size(); ++c) {
    if (f_cells[c] == 0.0) {
      ++out.excluded_cells;
      continue;
    }
    sum += std::abs((f_cells[c] - g_cells[c]) / f_cells[c]);
    ++counted;
  }
  if (counted == 0) {
    fail(ErrorCode::kFailedPrecondition,
         "relative workload error undefined: every true cell is zero");
  }
  out.value = sum / static_cast<double>(counted);
  return out;
}

RelativeError relative_workload_error(const Workload& w,
                                      const WeightedDataset& f,
                                      const WeightedDataset& g) {
  if (!same_schema(f, g)) {
    fail(ErrorCode::kSchemaMismatch, "relative_workload_error: schema mismatch");
  }
  return relative_workload_error(eval_workload(w, f), eval_workload(w, g));
}

MetricAggregate aggregate(std::span<const double> we,
                          std::span<const double> rel_we) {
  if (we.empty() || we.size() != rel_we.size()) {
    fail(ErrorCode::kInvalidArgument, "aggregate needs one value per workload");
  }
  MetricAggregate out;
  for (std::size_t i = 0; i < we.size(); ++i) {
    out.avg_we += we[i];
    out.avg_rel_we += rel_we[i];
    out.max_we = std::max(out.max_we, we[i]);
    out.max_rel_we = std::max(out.max_rel_we, rel_we[i]);
  }
  out.avg_we /= static_cast<double>(we.size());
  out.avg_rel_we /= static_cast<double>(we.size());
  return out;
}

MetricAggregate summarize_tail(std::span<const MetricRow> rows,
                               std::size_t window) {
  if (window == 0) fail(ErrorCode::kInvalidArgument, "window must be positive");
  if (rows.size() < window) {
    fail(ErrorCode::kFailedPrecondition,
         "need " + std::to_string(window) + " rows, have " +
             std::to_string(rows.size()));
  }
  MetricAggregate out;
  for (const auto& r : rows.subspan(rows.size() - window)) {
    out.avg_we += r.metrics.avg_we;
    out.max_we += r.metrics.max_we;
    out.avg_rel_we += r.metrics.avg_rel_we;
    out.max_rel_we += r.metrics.max_rel_we;
  }
  const double n = static_cast<double>(window);
  out.avg_we /= n;
  out.max_we /= n;
  out.avg_rel_we /= n;
  out.max_rel_we /= n;
  return out;
}

StreamEvaluator::StreamEvaluator(const WorkloadSet& workloads, bool normalize)
    : workloads_(&workloads), normalize_(normalize) {
  cells_.reserve(workloads.size());
  for (const auto& w : workloads) cells_.emplace_back(w.size(), 0.0);
}

void StreamEvaluator::observe(const WeightedDataset& delta) {
  for (std::size_t i = 0; i < workloads_->size(); ++i) {
    const auto d = eval_workload((*workloads_)[i], delta);
    for (std::size_t c = 0; c < d.size(); ++c) cells_[i][c] += d[c];
  }
  mass_ += total_mass(delta);
}

MetricRow StreamEvaluator::score(
    const std::vector<std::vector<double>>& g_cells) const {
  std::vector<double> we(cells_.size());
  std::vector<double> rel(cells_.size());
  MetricRow row;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    we[i] = workload_error(cells_[i], g_cells[i], normalize_ ? mass_ : 1.0);
    const RelativeError r = relative_workload_error(cells_[i], g_cells[i]);
    rel[i] = r.value;
    row.rel_excluded_cells += r.excluded_cells;
  }
  row.metrics = aggregate(we, rel);
  return row;
}

MetricRow StreamEvaluator::evaluate(const SupportDataset& g) const {
  std::vector<std::vector<double>> g_cells;
  g_cells.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    g_cells.push_back(g.workload_values(i));
  }
  return score(g_cells);
}

MetricRow StreamEvaluator::evaluate(const WeightedDataset& g) const {
  std::vector<std::vector<double>> g_cells;
  g_cells.reserve(cells_.size());
  for (const auto& w : *workloads_) g_cells.push_back(eval_workload(w, g));
  return score(g_cells);
}

}  // namespace dpstream
