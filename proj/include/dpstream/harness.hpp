#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dpstream/algorithms.hpp"
#include "dpstream/domain.hpp"
#include "dpstream/evaluation.hpp"
#include "dpstream/mechanisms.hpp"

namespace dpstream {

// Schema plus the category labels that map CSV strings to value indices.
struct LabeledSchema {
  SchemaPtr schema;
  std::vector<std::vector<std::string>> values;

  std::optional<std::uint32_t> value_index(std::size_t attribute,
                                           const std::string& label) const;
};

LabeledSchema labeled_schema(
    std::vector<std::pair<std::string, std::vector<std::string>>> attributes);

// JSON: [{"name": ..., "values": [...]}, ...] or {"attributes": [...]}.
LabeledSchema load_schema_file(const std::filesystem::path& path);
LabeledSchema parse_schema_json(const std::string& text);

// Restriction of the schema to the named attributes, in the given order.
LabeledSchema project_schema(const LabeledSchema& schema,
                             const std::vector<std::string>& attributes);

struct IngestedRow {
  DataPoint point;
  // Days since 1970-01-01 when a timestamp column was requested.
  std::optional<std::int64_t> day;
};

// Reads a CSV with a header row. Every schema attribute must be a column;
// other columns are ignored except the optional timestamp column.
std::vector<IngestedRow> ingest_csv(
    const std::filesystem::path& path, const LabeledSchema& schema,
    const std::optional<std::string>& timestamp_column = std::nullopt);

// Accepts YYYY-MM-DD (optionally followed by a time) and MM/DD/YYYY.
std::int64_t parse_date(const std::string& text);

enum class StreamVariant { kTimestampBucketed, kRandomizedBatch, kOrderedBatch };

const char* to_string(StreamVariant v);
StreamVariant parse_stream_variant(const std::string& name);

struct StreamSpec {
  StreamVariant variant = StreamVariant::kOrderedBatch;
  std::string timestamp_column;
  std::int64_t bucket_days = 7;
  std::size_t batch_size = 50;
  std::uint64_t seed = 0;
  std::optional<std::size_t> max_steps;
};

DatasetStream build_stream(const std::vector<IngestedRow>& rows,
                           const SchemaPtr& schema, const StreamSpec& spec);

struct FitterParams {
  std::string name = "mw";
  std::size_t support_size = 10000;
  std::uint64_t support_seed = 0;
  int passes = 1;
};

struct ExperimentConfig {
  std::string name;
  std::filesystem::path dataset;
  std::filesystem::path schema;
  std::vector<std::string> attributes;
  StreamSpec stream;
  std::size_t k_way = 2;
  std::vector<Algorithm> algorithms{Algorithm::kBaseline, Algorithm::kMain};
  std::vector<double> epsilons{0.5, 1.0, 2.0, 4.0};
  std::size_t k = 3;
  CounterOptions counter;
  FitterParams fitter;
  double sensitivity = 0.0;
  bool clamp_measurements = false;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "results";
  NoiseMode noise = NoiseMode::kLaplace;
  bool normalize = true;
  std::size_t summary_window = 10;
};

// Relative paths are resolved against base_dir.
ExperimentConfig parse_experiment_config(
    const std::string& json_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Everything a run needs, loaded once and shared read-only by all triples.
struct PreparedExperiment {
  ExperimentConfig config;
  LabeledSchema schema;
  WorkloadSet workloads;
  DatasetStream stream;
  std::size_t rows = 0;
};

PreparedExperiment prepare_experiment(const ExperimentConfig& config);

struct RunResult {
  Algorithm algorithm = Algorithm::kMain;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::filesystem::path directory;
  std::vector<MetricRow> rows;
  MetricAggregate summary;
};

// Runs one (algorithm, epsilon, seed) triple over the whole stream and
// writes metrics.csv, summary.json and meta.json into its directory.
RunResult run_triple(const PreparedExperiment& prepared, Algorithm algorithm,
                     double epsilon, std::uint64_t seed);

struct ExperimentReport {
  std::vector<RunResult> runs;
  std::size_t failed() const;
  bool all_ok() const { return failed() == 0; }
  std::string to_json() const;
};

// The full grid, `jobs` triples at a time.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                unsigned jobs = 1);

std::filesystem::path run_directory(const ExperimentConfig& config,
                                    Algorithm algorithm, double epsilon,
                                    std::uint64_t seed);

std::string format_epsilon(double epsilon);

}  // namespace dpstream
