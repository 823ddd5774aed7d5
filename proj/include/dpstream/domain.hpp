#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dpstream {

// Finite product domain X = X_1 x ... x X_p. Attribute values are dense
// indices in [0, cardinality).
class DomainSchema {
 public:
  struct Attribute {
    std::string name;
    std::uint32_t cardinality = 0;

    bool operator==(const Attribute&) const = default;
  };

  explicit DomainSchema(std::vector<Attribute> attributes);

  std::size_t num_attributes() const { return attributes_.size(); }
  const Attribute& attribute(std::size_t i) const { return attributes_.at(i); }
  std::span<const Attribute> attributes() const { return attributes_; }
  std::uint32_t cardinality(std::size_t i) const {
    return attributes_.at(i).cardinality;
  }

  std::optional<std::size_t> index_of(std::string_view name) const;

  // |X| as a double; exact up to 2^53 and saturating to +inf beyond that.
  double domain_size() const;

  bool operator==(const DomainSchema& other) const {
    return attributes_ == other.attributes_;
  }

 private:
  std::vector<Attribute> attributes_;
};

using SchemaPtr = std::shared_ptr<const DomainSchema>;

SchemaPtr make_schema(std::vector<DomainSchema::Attribute> attributes);

// One point x in X, stored as one value index per attribute.
class DataPoint {
 public:
  DataPoint() = default;
  explicit DataPoint(std::vector<std::uint32_t> values)
      : values_(std::move(values)) {}
  DataPoint(std::initializer_list<std::uint32_t> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  std::uint32_t operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::uint32_t> values() const { return values_; }

  bool operator==(const DataPoint&) const = default;
  auto operator<=>(const DataPoint&) const = default;

 private:
  std::vector<std::uint32_t> values_;
};

struct DataPointHash {
  std::size_t operator()(const DataPoint& x) const noexcept;
};

// Throws kOutOfRange / kSchemaMismatch if x is not a point of the schema.
void validate_point(const DomainSchema& schema, const DataPoint& x);

// Sparse histogram h: X -> R_{>=0}. Zero-weight entries are never stored.
class WeightedDataset {
 public:
  using Map = std::unordered_map<DataPoint, double, DataPointHash>;

  explicit WeightedDataset(SchemaPtr schema);

  const DomainSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }

  // Adds w >= 0 to the weight of x. Negative or non-finite w is rejected.
  void add(const DataPoint& x, double w);
  double weight(const DataPoint& x) const;

  std::size_t support_size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  Map::const_iterator begin() const { return weights_.begin(); }
  Map::const_iterator end() const { return weights_.end(); }

  // Points in sorted order; iteration order of the map is unspecified.
  std::vector<std::pair<DataPoint, double>> sorted_entries() const;

 private:
  SchemaPtr schema_;
  Map weights_;
};

// |h| = sum_x h(x).
double total_mass(const WeightedDataset& d);

bool same_schema(const WeightedDataset& a, const WeightedDataset& b);

// f_t = f_{t-1} + delta_t. Both inputs must share the schema.
WeightedDataset accumulate(const WeightedDataset& prefix,
                           const WeightedDataset& delta);

// Insert-only stream given by its differentials, one per time step.
class DatasetStream {
 public:
  explicit DatasetStream(SchemaPtr schema);

  void push_back(WeightedDataset delta);

  const DomainSchema& schema() const { return *schema_; }
  const SchemaPtr& schema_ptr() const { return schema_; }
  std::size_t steps() const { return differentials_.size(); }
  const WeightedDataset& differential(std::size_t t) const {
    return differentials_.at(t);
  }
  std::span<const WeightedDataset> differentials() const {
    return differentials_;
  }

  // f_t for 1-based t; prefix(0) is empty.
  WeightedDataset prefix(std::size_t t) const;

 private:
  SchemaPtr schema_;
  std::vector<WeightedDataset> differentials_;
};

// ||f||_grad = sum_t sum_x |grad f(x, t)|.
double stream_norm(const DatasetStream& s);

// ||f - g||_grad. Streams of unequal length are padded with empty steps.
double stream_distance(const DatasetStream& a, const DatasetStream& b);

}  // namespace dpstream
