#include "dpstream/fitters.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "dpstream/error.hpp"

namespace dpstream {
namespace {

double clamp_exponent(double x, MwStats* stats) {
  if (!std::isfinite(x)) fail(ErrorCode::kNumerical, "non-finite MW exponent");
  if (x > kMaxExponent || x < -kMaxExponent) {
    if (stats) ++stats->clamped;
    return std::clamp(x, -kMaxExponent, kMaxExponent);
  }
  return x;
}

void check_target(double target_mass) {
  if (!(target_mass > 0.0) || !std::isfinite(target_mass)) {
    fail(ErrorCode::kInvalidArgument, "MW target mass must be positive");
  }
}

std::vector<DataPoint> all_points(const DomainSchema& schema) {
  const std::size_t p = schema.num_attributes();
  std::vector<DataPoint> out;
  out.reserve(static_cast<std::size_t>(schema.domain_size()));
  std::vector<std::uint32_t> v(p, 0);
  while (true) {
    out.emplace_back(v);
    std::size_t i = p;
    while (i > 0) {
      --i;
      if (++v[i] < schema.cardinality(i)) break;
      v[i] = 0;
      if (i == 0) return out;
    }
  }
}

}  // namespace

Support::Support(SchemaPtr schema, const WorkloadSet& workloads,
                 std::vector<DataPoint> points)
    : schema_(std::move(schema)), points_(std::move(points)) {
  for (const auto& x : points_) validate_point(*schema_, x);
  cells_.reserve(workloads.size());
  for (const auto& w : workloads) {
    if (w.columns().back() >= schema_->num_attributes()) {
      fail(ErrorCode::kSchemaMismatch, "workload does not fit the schema");
    }
    std::vector<std::uint32_t> cells(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      cells[i] = static_cast<std::uint32_t>(w.cell_of(points_[i]));
    }
    cells_.push_back(std::move(cells));
    workload_sizes_.push_back(w.size());
  }
}

std::shared_ptr<const Support> Support::working_support(
    SchemaPtr schema, const WorkloadSet& workloads, std::size_t max_points,
    std::uint64_t seed) {
  if (max_points == 0) {
    fail(ErrorCode::kInvalidArgument, "support size must be positive");
  }
  std::vector<DataPoint> points;
  if (schema->domain_size() <= static_cast<double>(max_points)) {
    points = all_points(*schema);
  } else {
    std::mt19937_64 rng(seed);
    std::unordered_set<DataPoint, DataPointHash> seen;
    std::vector<std::uint32_t> v(schema->num_attributes());
    while (points.size() < max_points) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<std::uint32_t>(rng() % schema->cardinality(i));
      }
      DataPoint x(v);
      if (seen.insert(x).second) points.push_back(std::move(x));
    }
    std::sort(points.begin(), points.end());
  }
  return std::make_shared<const Support>(std::move(schema), workloads,
                                         std::move(points));
}

SupportDataset::SupportDataset(std::shared_ptr<const Support> support,
                               std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (!support_) fail(ErrorCode::kInvalidArgument, "null support");
  if (weights_.size() != support_->size()) {
    fail(ErrorCode::kInvalidArgument, "weights do not match support size");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail(ErrorCode::kNumerical, "support weights must be finite and >= 0");
    }
  }
}

SupportDataset SupportDataset::uniform(std::shared_ptr<const Support> support,
                                       double weight_per_point) {
  std::vector<double> w(support->size(), weight_per_point);
  return SupportDataset(std::move(support), std::move(w));
}

double SupportDataset::total_mass() const {
  double sum = 0.0;
  for (double w : weights_) sum += w;
  return sum;
}

void SupportDataset::rescale_to(double target_mass) {
  const double mass = total_mass();
  if (!(mass > 0.0)) {
    fail(ErrorCode::kFailedPrecondition, "cannot rescale a zero-mass dataset");
  }
  const double f = target_mass / mass;
  for (double& w : weights_) w *= f;
}

std::vector<double> SupportDataset::workload_values(std::size_t workload) const {
  std::vector<double> out(support_->workload_size(workload), 0.0);
  const auto cells = support_->cells(workload);
  for (std::size_t i = 0; i < weights_.size(); ++i) out[cells[i]] += weights_[i];
  return out;
}

WeightedDataset SupportDataset::to_weighted_dataset() const {
  WeightedDataset d(support_->schema_ptr());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    d.add(support_->point(i), weights_[i]);
  }
  return d;
}

SupportDataset average(std::span<const SupportDataset> datasets) {
  if (datasets.empty()) fail(ErrorCode::kInvalidArgument, "nothing to average");
  const auto& support = datasets.front().support_ptr();
  std::vector<double> acc(support->size(), 0.0);
  for (const auto& d : datasets) {
    if (d.support_ptr() != support) {
      fail(ErrorCode::kSchemaMismatch, "datasets live on different supports");
    }
    const auto w = d.weights();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w[i];
  }
  const double n = static_cast<double>(datasets.size());
  for (double& v : acc) v /= n;
  return SupportDataset(support, std::move(acc));
}

WeightedDataset mw_update(const WeightedDataset& h, const MarginalQuery& q,
                          double measured, double target_mass,
                          MwStats* stats) {
  check_target(target_mass);
  q.validate(h.schema());
  const double mass = total_mass(h);
  if (!(mass > 0.0)) {
    fail(ErrorCode::kFailedPrecondition, "MW update on a zero-mass dataset");
  }
  const double x =
      clamp_exponent((measured - eval_query(q, h)) / (2.0 * target_mass), stats);
  const double boost = std::exp(x);
  double new_mass = 0.0;
  for (const auto& [p, w] : h) new_mass += q.matches(p) ? w * boost : w;
  const double norm = target_mass / new_mass;
  WeightedDataset out(h.schema_ptr());
  for (const auto& [p, w] : h) out.add(p, (q.matches(p) ? w * boost : w) * norm);
  if (stats) ++stats->updates;
  return out;
}

void mw_update_workload(SupportDataset& h, std::size_t workload,
                        std::span<const double> measured, double target_mass,
                        MwStats* stats) {
  check_target(target_mass);
  const Support& support = h.support();
  const std::size_t n_cells = support.workload_size(workload);
  if (measured.size() != n_cells) {
    fail(ErrorCode::kInvalidArgument, "measurement length does not match |W|");
  }
  // Sequential per-cell updates touch disjoint cells, so they reduce to one
  // multiplier per cell and one global rescale. Cell masses are tracked as
  // scale * unscaled[c] so each step is O(1).
  std::vector<double> unscaled = h.workload_values(workload);
  std::vector<double> factor(n_cells, 1.0);
  double scale = 1.0;
  for (std::size_t c = 0; c < n_cells; ++c) {
    const double cell_mass = scale * unscaled[c];
    const double x =
        clamp_exponent((measured[c] - cell_mass) / (2.0 * target_mass), stats);
    const double boost = std::exp(x);
    const double new_total = target_mass - cell_mass + cell_mass * boost;
    unscaled[c] *= boost;
    factor[c] *= boost;
    scale *= target_mass / new_total;
  }
  if (stats) stats->updates += n_cells;

  auto weights = h.mutable_weights();
  const auto cells = support.cells(workload);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= factor[cells[i]] * scale;
  }
  h.rescale_to(target_mass);
}

SupportDataset mw_fit(std::span<const Measurement> measurements,
                      const SupportDataset& init, double target_mass,
                      int passes, MwStats* stats) {
  check_target(target_mass);
  if (passes < 1) fail(ErrorCode::kInvalidArgument, "passes must be >= 1");
  SupportDataset h = init;
  h.rescale_to(target_mass);
  for (int pass = 0; pass < passes; ++pass) {
    for (const auto& m : measurements) {
      mw_update_workload(h, m.workload, m.values, target_mass, stats);
    }
  }
  return h;
}

WeightedDataset mw_fit(const WorkloadSet& workloads,
                       std::span<const Measurement> measurements,
                       const WeightedDataset& init, double target_mass,
                       int passes, MwStats* stats) {
  std::vector<DataPoint> points;
  std::vector<double> weights;
  for (auto& [x, w] : init.sorted_entries()) {
    points.push_back(std::move(x));
    weights.push_back(w);
  }
  auto support = std::make_shared<const Support>(init.schema_ptr(), workloads,
                                                 std::move(points));
  SupportDataset h(std::move(support), std::move(weights));
  return mw_fit(measurements, h, target_mass, passes, stats)
      .to_weighted_dataset();
}

MultiplicativeWeightsFitter::MultiplicativeWeightsFitter(int passes)
    : passes_(passes) {
  if (passes_ < 1) fail(ErrorCode::kInvalidArgument, "passes must be >= 1");
}

SupportDataset MultiplicativeWeightsFitter::fit(
    std::span<const Measurement> measurements, const SupportDataset& init,
    double target_mass) {
  SupportDataset h = init;
  h.rescale_to(target_mass);
  if (measurements.empty()) return h;
  const Measurement& newest = measurements.back();
  mw_update_workload(h, newest.workload, newest.values, target_mass, &stats_);
  for (int pass = 1; pass < passes_; ++pass) {
    for (const auto& m : measurements) {
      mw_update_workload(h, m.workload, m.values, target_mass, &stats_);
    }
  }
  return h;
}

}  // namespace dpstream
