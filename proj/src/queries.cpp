#include "dpstream/queries.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "dpstream/error.hpp"

namespace dpstream {
namespace {

void check_increasing(std::span<const std::size_t> columns) {
  if (columns.empty()) {
    fail(ErrorCode::kInvalidArgument, "marginal needs at least one column");
  }
  for (std::size_t i = 1; i < columns.size(); ++i) {
    if (columns[i] <= columns[i - 1]) {
      fail(ErrorCode::kInvalidArgument,
           "marginal columns must be strictly increasing");
    }
  }
}

// Cap on |W| so cell vectors stay addressable in memory.
constexpr std::size_t kMaxWorkloadCells = std::size_t{1} << 32;

}  // namespace

MarginalQuery::MarginalQuery(std::vector<std::size_t> columns,
                             std::vector<std::uint32_t> values)
    : columns_(std::move(columns)), values_(std::move(values)) {
  check_increasing(columns_);
  if (columns_.size() != values_.size()) {
    fail(ErrorCode::kInvalidArgument, "marginal columns/values size mismatch");
  }
}

bool MarginalQuery::matches(const DataPoint& x) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (x[columns_[i]] != values_[i]) return false;
  }
  return true;
}

void MarginalQuery::validate(const DomainSchema& schema) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] >= schema.num_attributes()) {
      fail(ErrorCode::kOutOfRange,
           "query column " + std::to_string(columns_[i]) + " out of range");
    }
    if (values_[i] >= schema.cardinality(columns_[i])) {
      fail(ErrorCode::kOutOfRange,
           "query value " + std::to_string(values_[i]) + " out of range");
    }
  }
}

Workload::Workload(const DomainSchema& schema, std::vector<std::size_t> columns)
    : columns_(std::move(columns)) {
  check_increasing(columns_);
  cards_.reserve(columns_.size());
  for (std::size_t c : columns_) {
    if (c >= schema.num_attributes()) {
      fail(ErrorCode::kOutOfRange,
           "workload column " + std::to_string(c) + " out of range");
    }
    const std::uint32_t card = schema.cardinality(c);
    if (size_ > kMaxWorkloadCells / card) {
      fail(ErrorCode::kOutOfRange, "workload has too many cells");
    }
    size_ *= card;
    cards_.push_back(card);
  }
}

MarginalQuery Workload::query(std::size_t cell) const {
  if (cell >= size_) fail(ErrorCode::kOutOfRange, "cell index out of range");
  std::vector<std::uint32_t> values(columns_.size());
  for (std::size_t i = columns_.size(); i-- > 0;) {
    values[i] = static_cast<std::uint32_t>(cell % cards_[i]);
    cell /= cards_[i];
  }
  return MarginalQuery(columns_, std::move(values));
}

WorkloadSet::WorkloadSet(std::vector<Workload> workloads)
    : workloads_(std::move(workloads)) {
  for (std::size_t i = 0; i < workloads_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (workloads_[i] == workloads_[j]) {
        fail(ErrorCode::kInvalidArgument, "duplicate workload in set");
      }
    }
  }
}

double eval_query(const MarginalQuery& q, const WeightedDataset& d) {
  q.validate(d.schema());
  double sum = 0.0;
  for (const auto& [x, w] : d) {
    if (q.matches(x)) sum += w;
  }
  return sum;
}

std::vector<double> eval_workload(const Workload& w, const WeightedDataset& d) {
  const auto cols = w.columns();
  if (cols.back() >= d.schema().num_attributes()) {
    fail(ErrorCode::kOutOfRange, "workload column out of range for dataset");
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (w.cardinalities()[i] != d.schema().cardinality(cols[i])) {
      fail(ErrorCode::kSchemaMismatch, "workload built for another schema");
    }
  }
  std::vector<double> cells(w.size(), 0.0);
  for (const auto& [x, weight] : d) cells[w.cell_of(x)] += weight;
  return cells;
}

WorkloadSet enumerate_workloads(const DomainSchema& schema, std::size_t k) {
  const std::size_t p = schema.num_attributes();
  if (k < 1 || k > p) {
    fail(ErrorCode::kInvalidArgument,
         "workload arity " + std::to_string(k) + " not in [1, " +
             std::to_string(p) + "]");
  }
  std::vector<Workload> out;
  std::vector<std::size_t> cols(k);
  for (std::size_t i = 0; i < k; ++i) cols[i] = i;
  while (true) {
    out.emplace_back(schema, cols);
    // Advance to the next combination in lexicographic order.
    std::size_t i = k;
    while (i > 0 && cols[i - 1] == p - k + (i - 1)) --i;
    if (i == 0) break;
    ++cols[i - 1];
    for (std::size_t j = i; j < k; ++j) cols[j] = cols[j - 1] + 1;
  }
  return WorkloadSet(std::move(out));
}

}  // namespace dpstream
