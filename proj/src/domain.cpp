#include "dpstream/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "dpstream/error.hpp"

namespace dpstream {

DomainSchema::DomainSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  if (attributes_.empty()) {
    fail(ErrorCode::kInvalidArgument, "schema needs at least one attribute");
  }
  std::unordered_set<std::string> seen;
  for (const auto& a : attributes_) {
    if (a.cardinality == 0) {
      fail(ErrorCode::kInvalidArgument,
           "attribute '" + a.name + "' has cardinality 0");
    }
    if (!seen.insert(a.name).second) {
      fail(ErrorCode::kInvalidArgument,
           "duplicate attribute name '" + a.name + "'");
    }
  }
}

std::optional<std::size_t> DomainSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

double DomainSchema::domain_size() const {
  double size = 1.0;
  for (const auto& a : attributes_) size *= a.cardinality;
  return size;
}

SchemaPtr make_schema(std::vector<DomainSchema::Attribute> attributes) {
  return std::make_shared<const DomainSchema>(std::move(attributes));
}

std::size_t DataPointHash::operator()(const DataPoint& x) const noexcept {
  // 64-bit FNV-1a over the value indices.
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint32_t v : x.values()) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= (v >> shift) & 0xffu;
      h *= 1099511628211ULL;
    }
  }
  return static_cast<std::size_t>(h);
}

void validate_point(const DomainSchema& schema, const DataPoint& x) {
  if (x.size() != schema.num_attributes()) {
    fail(ErrorCode::kSchemaMismatch,
         "data point has " + std::to_string(x.size()) + " values, schema has " +
             std::to_string(schema.num_attributes()) + " attributes");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= schema.cardinality(i)) {
      fail(ErrorCode::kOutOfRange,
           "value " + std::to_string(x[i]) + " out of range for attribute '" +
               schema.attribute(i).name + "'");
    }
  }
}

WeightedDataset::WeightedDataset(SchemaPtr schema) : schema_(std::move(schema)) {
  if (!schema_) fail(ErrorCode::kInvalidArgument, "null schema");
}

void WeightedDataset::add(const DataPoint& x, double w) {
  if (!std::isfinite(w)) fail(ErrorCode::kNumerical, "non-finite weight");
  if (w < 0.0) {
    fail(ErrorCode::kInvalidArgument,
         "negative weight rejected: streams are insert-only");
  }
  if (w == 0.0) return;
  validate_point(*schema_, x);
  weights_[x] += w;
}

double WeightedDataset::weight(const DataPoint& x) const {
  auto it = weights_.find(x);
  return it == weights_.end() ? 0.0 : it->second;
}

std::vector<std::pair<DataPoint, double>> WeightedDataset::sorted_entries()
    const {
  std::vector<std::pair<DataPoint, double>> out(weights_.begin(),
                                                weights_.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

double total_mass(const WeightedDataset& d) {
  // Summed in sorted order so the result does not depend on hash layout.
  double sum = 0.0;
  for (const auto& [x, w] : d.sorted_entries()) sum += w;
  return sum;
}

bool same_schema(const WeightedDataset& a, const WeightedDataset& b) {
  return a.schema_ptr() == b.schema_ptr() || a.schema() == b.schema();
}

WeightedDataset accumulate(const WeightedDataset& prefix,
                           const WeightedDataset& delta) {
  if (!same_schema(prefix, delta)) {
    fail(ErrorCode::kSchemaMismatch, "accumulate: schema mismatch");
  }
  WeightedDataset out = prefix;
  for (const auto& [x, w] : delta) out.add(x, w);
  return out;
}

DatasetStream::DatasetStream(SchemaPtr schema) : schema_(std::move(schema)) {
  if (!schema_) fail(ErrorCode::kInvalidArgument, "null schema");
}

void DatasetStream::push_back(WeightedDataset delta) {
  if (delta.schema_ptr() != schema_ && !(delta.schema() == *schema_)) {
    fail(ErrorCode::kSchemaMismatch, "differential schema mismatch");
  }
  differentials_.push_back(std::move(delta));
}

WeightedDataset DatasetStream::prefix(std::size_t t) const {
  if (t > differentials_.size()) {
    fail(ErrorCode::kOutOfRange, "prefix beyond end of stream");
  }
  WeightedDataset f(schema_);
  for (std::size_t s = 0; s < t; ++s) {
    for (const auto& [x, w] : differentials_[s]) f.add(x, w);
  }
  return f;
}

double stream_norm(const DatasetStream& s) {
  double norm = 0.0;
  for (const auto& d : s.differentials()) norm += total_mass(d);
  return norm;
}

double stream_distance(const DatasetStream& a, const DatasetStream& b) {
  if (!(a.schema() == b.schema())) {
    fail(ErrorCode::kSchemaMismatch, "stream_distance: schema mismatch");
  }
  const std::size_t steps = std::max(a.steps(), b.steps());
  double dist = 0.0;
  for (std::size_t t = 0; t < steps; ++t) {
    const WeightedDataset* da = t < a.steps() ? &a.differential(t) : nullptr;
    const WeightedDataset* db = t < b.steps() ? &b.differential(t) : nullptr;
    if (da) {
      for (const auto& [x, w] : *da) {
        dist += std::abs(w - (db ? db->weight(x) : 0.0));
      }
    }
    if (db) {
      for (const auto& [x, w] : *db) {
        if (!da || da->weight(x) == 0.0) dist += w;
      }
    }
  }
  return dist;
}

}  // namespace dpstream
