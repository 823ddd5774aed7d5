#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpstream/domain.hpp"

namespace dpstream {

// k-way marginal query: q(x) = 1 iff x[columns[i]] == values[i] for all i.
class MarginalQuery {
 public:
  MarginalQuery(std::vector<std::size_t> columns,
                std::vector<std::uint32_t> values);

  std::size_t arity() const { return columns_.size(); }
  std::span<const std::size_t> columns() const { return columns_; }
  std::span<const std::uint32_t> values() const { return values_; }

  bool matches(const DataPoint& x) const;

  // Throws if a column or value does not exist in the schema.
  void validate(const DomainSchema& schema) const;

  bool operator==(const MarginalQuery&) const = default;

 private:
  std::vector<std::size_t> columns_;
  std::vector<std::uint32_t> values_;
};

// All marginal queries on a fixed column tuple, in lexicographic value order
// (first column most significant). Cells partition X.
class Workload {
 public:
  Workload(const DomainSchema& schema, std::vector<std::size_t> columns);

  std::span<const std::size_t> columns() const { return columns_; }
  std::span<const std::uint32_t> cardinalities() const { return cards_; }
  std::size_t size() const { return size_; }

  // Index of the unique cell containing x.
  std::size_t cell_of(const DataPoint& x) const {
    std::size_t cell = 0;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      cell = cell * cards_[i] + x[columns_[i]];
    }
    return cell;
  }

  MarginalQuery query(std::size_t cell) const;

  bool operator==(const Workload& other) const {
    return columns_ == other.columns_ && cards_ == other.cards_;
  }

 private:
  std::vector<std::size_t> columns_;
  std::vector<std::uint32_t> cards_;
  std::size_t size_ = 1;
};

// Ordered set Q; the position of a workload is its identity for the run.
class WorkloadSet {
 public:
  WorkloadSet() = default;
  explicit WorkloadSet(std::vector<Workload> workloads);

  std::size_t size() const { return workloads_.size(); }
  bool empty() const { return workloads_.empty(); }
  const Workload& operator[](std::size_t i) const { return workloads_[i]; }
  auto begin() const { return workloads_.begin(); }
  auto end() const { return workloads_.end(); }

 private:
  std::vector<Workload> workloads_;
};

// q(h) = sum_x h(x) q(x).
double eval_query(const MarginalQuery& q, const WeightedDataset& d);

// W(h) = (q(h))_{q in W}, one pass over the support of h.
std::vector<double> eval_workload(const Workload& w, const WeightedDataset& d);

// All C(p, k) k-way workloads, columns in lexicographic order.
WorkloadSet enumerate_workloads(const DomainSchema& schema, std::size_t k);

}  // namespace dpstream
