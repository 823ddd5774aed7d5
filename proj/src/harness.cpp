#include "dpstream/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "dpstream/error.hpp"
#include "json.hpp"

namespace dpstream {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

// RFC 4180 record splitter; returns false at end of input.
bool next_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (quoted) fail(ErrorCode::kParse, "unterminated quoted CSV field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Days since 1970-01-01 in the proleptic Gregorian calendar.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool valid_ymd(std::int64_t y, unsigned m, unsigned d) {
  static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30,
                                       31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return d <= kDays[m - 1] + (m == 2 && leap ? 1 : 0);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  // Rejection sampling keeps the shuffle identical across standard libraries.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

std::string dataset_name(const ExperimentConfig& c) {
  return c.name.empty() ? c.dataset.stem().string() : c.name;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

json metrics_json(const MetricAggregate& m) {
  return json{{"AvgWE", m.avg_we},
              {"MaxWE", m.max_we},
              {"AvgRelWE", m.avg_rel_we},
              {"MaxRelWE", m.max_rel_we}};
}

}  // namespace

std::optional<std::uint32_t> LabeledSchema::value_index(
    std::size_t attribute, const std::string& label) const {
  const auto& vals = values.at(attribute);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] == label) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

LabeledSchema labeled_schema(
    std::vector<std::pair<std::string, std::vector<std::string>>> attributes) {
  LabeledSchema out;
  std::vector<DomainSchema::Attribute> attrs;
  for (auto& [name, values] : attributes) {
    if (values.empty()) {
      fail(ErrorCode::kInvalidArgument,
           "attribute '" + name + "' has no values");
    }
    std::vector<std::string> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(ErrorCode::kInvalidArgument,
           "attribute '" + name + "' has duplicate values");
    }
    attrs.push_back({name, static_cast<std::uint32_t>(values.size())});
    out.values.push_back(std::move(values));
  }
  out.schema = make_schema(std::move(attrs));
  return out;
}

LabeledSchema parse_schema_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("schema JSON: ") + e.what());
  }
  const json& list = doc.is_object() ? doc.at("attributes") : doc;
  if (!list.is_array()) {
    fail(ErrorCode::kParse, "schema JSON must be a list of attributes");
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> attrs;
  try {
    for (const auto& a : list) {
      std::vector<std::string> values;
      for (const auto& v : a.at("values")) {
        values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
      attrs.emplace_back(a.at("name").get<std::string>(), std::move(values));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("schema JSON: ") + e.what());
  }
  return labeled_schema(std::move(attrs));
}

LabeledSchema load_schema_file(const fs::path& path) {
  return parse_schema_json(read_file(path));
}

LabeledSchema project_schema(const LabeledSchema& schema,
                             const std::vector<std::string>& attributes) {
  std::vector<std::pair<std::string, std::vector<std::string>>> attrs;
  for (const auto& name : attributes) {
    const auto idx = schema.schema->index_of(name);
    if (!idx) {
      fail(ErrorCode::kInvalidArgument, "no attribute named '" + name + "'");
    }
    attrs.emplace_back(name, schema.values[*idx]);
  }
  return labeled_schema(std::move(attrs));
}

std::int64_t parse_date(const std::string& raw) {
  const std::string text = trim(raw);
  long long y = 0;
  unsigned m = 0, d = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%lld-%u-%u%n", &y, &m, &d, &consumed) == 3 &&
      (consumed == static_cast<int>(text.size()) || text[consumed] == 'T' ||
       text[consumed] == ' ')) {
    if (valid_ymd(y, m, d)) return days_from_civil(y, m, d);
  } else if (std::sscanf(text.c_str(), "%u/%u/%lld%n", &m, &d, &y,
                         &consumed) == 3 &&
             (consumed == static_cast<int>(text.size()) ||
              text[consumed] == ' ')) {
    if (valid_ymd(y, m, d)) return days_from_civil(y, m, d);
  }
  fail(ErrorCode::kParse, "unparseable date '" + raw + "'");
}

std::vector<IngestedRow> ingest_csv(
    const fs::path& path, const LabeledSchema& schema,
    const std::optional<std::string>& timestamp_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");

  std::vector<std::string> fields;
  if (!next_record(in, fields)) {
    fail(ErrorCode::kParse, "'" + path.string() + "' has no header row");
  }
  std::unordered_map<std::string, std::size_t> header;
  for (std::size_t i = 0; i < fields.size(); ++i) header[trim(fields[i])] = i;

  const DomainSchema& s = *schema.schema;
  std::vector<std::size_t> source(s.num_attributes());
  for (std::size_t a = 0; a < s.num_attributes(); ++a) {
    auto it = header.find(s.attribute(a).name);
    if (it == header.end()) {
      fail(ErrorCode::kParse,
           "CSV lacks column '" + s.attribute(a).name + "'");
    }
    source[a] = it->second;
  }
  std::optional<std::size_t> ts_col;
  if (timestamp_column) {
    auto it = header.find(*timestamp_column);
    if (it == header.end()) {
      fail(ErrorCode::kParse,
           "CSV lacks timestamp column '" + *timestamp_column + "'");
    }
    ts_col = it->second;
  }

  std::vector<IngestedRow> rows;
  std::size_t line = 1;
  std::vector<std::uint32_t> values(s.num_attributes());
  while (next_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != header.size()) {
      fail(ErrorCode::kParse, "row " + std::to_string(line) + ": expected " +
                                  std::to_string(header.size()) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    }
    for (std::size_t a = 0; a < s.num_attributes(); ++a) {
      const std::string cell = trim(fields[source[a]]);
      const auto v = schema.value_index(a, cell);
      if (!v) {
        fail(ErrorCode::kParse, "row " + std::to_string(line) + ", column '" +
                                    s.attribute(a).name +
                                    "': unknown category '" + cell + "'");
      }
      values[a] = *v;
    }
    IngestedRow row{DataPoint(values), std::nullopt};
    if (ts_col) {
      try {
        row.day = parse_date(fields[*ts_col]);
      } catch (const Error& e) {
        fail(ErrorCode::kParse,
             "row " + std::to_string(line) + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* to_string(StreamVariant v) {
  switch (v) {
    case StreamVariant::kTimestampBucketed:
      return "timestamp_bucketed";
    case StreamVariant::kRandomizedBatch:
      return "randomized_batch";
    case StreamVariant::kOrderedBatch:
      return "ordered_batch";
  }
  return "?";
}

StreamVariant parse_stream_variant(const std::string& name) {
  if (name == "timestamp_bucketed") return StreamVariant::kTimestampBucketed;
  if (name == "randomized_batch") return StreamVariant::kRandomizedBatch;
  if (name == "ordered_batch") return StreamVariant::kOrderedBatch;
  fail(ErrorCode::kInvalidArgument, "unknown stream variant '" + name + "'");
}

DatasetStream build_stream(const std::vector<IngestedRow>& rows,
                           const SchemaPtr& schema, const StreamSpec& spec) {
  DatasetStream stream(schema);
  const std::size_t cap = spec.max_steps.value_or(SIZE_MAX);

  if (spec.variant == StreamVariant::kTimestampBucketed) {
    if (spec.bucket_days < 1) {
      fail(ErrorCode::kInvalidArgument, "bucket width must be >= 1 day");
    }
    if (rows.empty()) return stream;
    std::int64_t first = INT64_MAX;
    for (const auto& r : rows) {
      if (!r.day) {
        fail(ErrorCode::kInvalidArgument,
             "timestamp_bucketed stream needs a timestamp on every row");
      }
      first = std::min(first, *r.day);
    }
    std::vector<WeightedDataset> buckets;
    for (const auto& r : rows) {
      const auto b =
          static_cast<std::size_t>((*r.day - first) / spec.bucket_days);
      if (b >= cap) continue;
      while (buckets.size() <= b) buckets.emplace_back(schema);
      buckets[b].add(r.point, 1.0);
    }
    for (auto& b : buckets) stream.push_back(std::move(b));
    return stream;
  }

  if (spec.batch_size < 1) {
    fail(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  }
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (spec.variant == StreamVariant::kRandomizedBatch) {
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_below(rng, i)]);
    }
  }
  for (std::size_t start = 0; start < order.size() && stream.steps() < cap;
       start += spec.batch_size) {
    WeightedDataset batch(schema);
    const std::size_t end = std::min(order.size(), start + spec.batch_size);
    for (std::size_t i = start; i < end; ++i) batch.add(rows[order[i]].point, 1.0);
    stream.push_back(std::move(batch));
  }
  return stream;
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("config JSON: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.name = doc.value("name", std::string());
    c.dataset = resolve(base_dir, doc.at("dataset").get<std::string>());
    c.schema = resolve(base_dir, doc.at("schema").get<std::string>());
    if (doc.contains("attributes")) {
      c.attributes = doc.at("attributes").get<std::vector<std::string>>();
    }
    const json& st = doc.at("stream");
    c.stream.variant = parse_stream_variant(st.at("variant").get<std::string>());
    c.stream.timestamp_column = st.value("timestamp_column", std::string());
    c.stream.bucket_days = st.value("bucket_days", std::int64_t{7});
    c.stream.batch_size = st.value("batch_size", std::size_t{50});
    c.stream.seed = st.value("seed", std::uint64_t{0});
    if (st.contains("max_steps") && !st.at("max_steps").is_null()) {
      c.stream.max_steps = st.at("max_steps").get<std::size_t>();
    }
    c.k_way = doc.value("k_way", std::size_t{2});
    if (doc.contains("algorithms")) {
      c.algorithms.clear();
      for (const auto& a : doc.at("algorithms")) {
        c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
      }
    }
    if (doc.contains("epsilons")) {
      c.epsilons = doc.at("epsilons").get<std::vector<double>>();
    }
    c.k = doc.value("k", c.k);
    if (doc.contains("counter")) {
      c.counter.kind = parse_counter_kind(doc.at("counter").get<std::string>());
    }
    c.counter.block_size = doc.value("block_size", std::uint64_t{0});
    if (doc.contains("fitter")) {
      const json& f = doc.at("fitter");
      c.fitter.name = f.value("name", c.fitter.name);
      c.fitter.support_size = f.value("support_size", c.fitter.support_size);
      c.fitter.support_seed = f.value("support_seed", c.fitter.support_seed);
      c.fitter.passes = f.value("passes", c.fitter.passes);
    }
    c.sensitivity = doc.value("sensitivity", 0.0);
    c.clamp_measurements = doc.value("clamp_measurements", false);
    if (doc.contains("seeds")) {
      c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    }
    c.output_dir =
        resolve(base_dir, doc.value("output_dir", std::string("results")));
    c.noise = parse_noise_mode(doc.value("noise", std::string("laplace")));
    c.normalize = doc.value("normalize", true);
    c.summary_window = doc.value("summary_window", std::size_t{10});
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }

  if (c.fitter.name != "mw") {
    fail(ErrorCode::kInvalidArgument,
         "fitter '" + c.fitter.name + "' is not available (only \"mw\")");
  }
  if (c.algorithms.empty() || c.epsilons.empty() || c.seeds.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "algorithms, epsilons and seeds must be non-empty");
  }
  for (double e : c.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      fail(ErrorCode::kInvalidArgument, "epsilon values must be > 0");
    }
  }
  if (c.k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (c.stream.variant == StreamVariant::kTimestampBucketed &&
      c.stream.timestamp_column.empty()) {
    fail(ErrorCode::kInvalidArgument,
         "timestamp_bucketed stream needs stream.timestamp_column");
  }
  if (c.stream.batch_size < 1 || c.stream.bucket_days < 1) {
    fail(ErrorCode::kInvalidArgument,
         "batch_size and bucket_days must be >= 1");
  }
  if (c.summary_window < 1) {
    fail(ErrorCode::kInvalidArgument, "summary_window must be >= 1");
  }
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  return parse_experiment_config(read_file(path), path.parent_path());
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  if (!fs::exists(config.dataset)) {
    fail(ErrorCode::kIo, "dataset '" + config.dataset.string() + "' not found");
  }
  if (!fs::exists(config.schema)) {
    fail(ErrorCode::kIo, "schema '" + config.schema.string() + "' not found");
  }
  LabeledSchema schema = load_schema_file(config.schema);
  if (!config.attributes.empty()) {
    schema = project_schema(schema, config.attributes);
  }
  std::optional<std::string> ts;
  if (config.stream.variant == StreamVariant::kTimestampBucketed) {
    ts = config.stream.timestamp_column;
  }
  const auto rows = ingest_csv(config.dataset, schema, ts);
  WorkloadSet workloads = enumerate_workloads(*schema.schema, config.k_way);
  if (config.k > workloads.size()) {
    fail(ErrorCode::kInvalidArgument,
         "k = " + std::to_string(config.k) + " exceeds |Q| = " +
             std::to_string(workloads.size()));
  }
  DatasetStream stream = build_stream(rows, schema.schema, config.stream);
  return PreparedExperiment{config, std::move(schema), std::move(workloads),
                            std::move(stream), rows.size()};
}

std::string format_epsilon(double epsilon) { return fmt::format("{}", epsilon); }

fs::path run_directory(const ExperimentConfig& config, Algorithm algorithm,
                       double epsilon, std::uint64_t seed) {
  return config.output_dir / dataset_name(config) / to_string(algorithm) /
         ("eps" + format_epsilon(epsilon)) / ("seed" + std::to_string(seed));
}

RunResult run_triple(const PreparedExperiment& prepared, Algorithm algorithm,
                     double epsilon, std::uint64_t seed) {
  const ExperimentConfig& cfg = prepared.config;
  RunResult result;
  result.algorithm = algorithm;
  result.epsilon = epsilon;
  result.seed = seed;
  result.directory = run_directory(cfg, algorithm, epsilon, seed);

  json meta{{"dataset", dataset_name(cfg)},
            {"algorithm", to_string(algorithm)},
            {"epsilon", epsilon},
            {"seed", seed},
            {"noise", to_string(cfg.noise)},
            {"k", cfg.k},
            {"k_way", cfg.k_way},
            {"counter", to_string(cfg.counter.kind)},
            {"stream",
             {{"variant", to_string(cfg.stream.variant)},
              {"steps", prepared.stream.steps()},
              {"rows", prepared.rows}}}};

  try {
    fs::create_directories(result.directory);
    RunConfig rc;
    rc.epsilon = epsilon;
    rc.k = cfg.k;
    rc.counter = cfg.counter;
    rc.counter.horizon = prepared.stream.steps();
    rc.sensitivity = cfg.sensitivity;
    rc.mw_passes = cfg.fitter.passes;
    rc.support_size = cfg.fitter.support_size;
    rc.support_seed = cfg.fitter.support_seed;
    rc.clamp_measurements = cfg.clamp_measurements;
    rc.seed = seed;
    rc.noise = cfg.noise;

    auto synth = make_synthesizer(algorithm, rc, prepared.schema.schema,
                                  prepared.workloads);
    StreamEvaluator evaluator(prepared.workloads, cfg.normalize);
    std::size_t excluded = 0;
    std::size_t undefined_rows = 0;
    for (const auto& delta : prepared.stream.differentials()) {
      evaluator.observe(delta);
      const SupportDataset& g = synth->step(delta);
      MetricRow row;
      if (evaluator.true_mass() > 0.0) {
        row = evaluator.evaluate(g);
      } else {
        const double nan = std::nan("");
        row.metrics = {nan, nan, nan, nan};
        ++undefined_rows;
      }
      row.t = synth->time();
      row.epsilon = epsilon;
      row.algorithm = to_string(algorithm);
      row.seed = seed;
      excluded += row.rel_excluded_cells;
      result.rows.push_back(std::move(row));
    }

    std::string csv = "t,AvgWE,MaxWE,AvgRelWE,MaxRelWE\n";
    for (const auto& r : result.rows) {
      csv += fmt::format("{},{},{},{},{}\n", r.t, num(r.metrics.avg_we),
                         num(r.metrics.max_we), num(r.metrics.avg_rel_we),
                         num(r.metrics.max_rel_we));
    }
    write_file(result.directory / "metrics.csv", csv);

    const std::size_t window =
        std::min(cfg.summary_window, std::max<std::size_t>(result.rows.size(), 1));
    json summary{{"algorithm", to_string(algorithm)},
                 {"epsilon", epsilon},
                 {"seed", seed},
                 {"window", window}};
    if (!result.rows.empty()) {
      result.summary = summarize_tail(result.rows, window);
      summary["metrics"] = metrics_json(result.summary);
    }
    write_file(result.directory / "summary.json", summary.dump(2) + "\n");

    bool balanced = true;
    const Fraction half{1, 2};
    for (const auto& s : synth->step_spends()) {
      balanced = balanced && s.selection == half && s.measurement == half;
    }
    meta["status"] = "ok";
    meta["sensitivity"] = synth->sensitivity();
    meta["support_size"] = synth->support().size();
    meta["ledger"] = {
        {"epsilon_spent", epsilon * synth->max_step_share().value()},
        {"max_step_share", synth->max_step_share().str()},
        {"steps_charged", synth->step_spends().size()},
        {"selection_share_per_step", "1/2"},
        {"measurement_share_per_step", "1/2"},
        {"all_steps_balanced", balanced}};
    meta["deviations"] = {
        {"mw_exponent_clamps", synth->mw_stats().clamped},
        {"rel_we_excluded_cells", excluded},
        {"undefined_metric_rows", undefined_rows}};
    meta["mw_updates"] = synth->mw_stats().updates;
    meta["laplace_draws"] = synth->laplace_draws();
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    meta["status"] = "failed";
    meta["error"] = result.error;
  }
  try {
    fs::create_directories(result.directory);
    write_file(result.directory / "meta.json", meta.dump(2) + "\n");
  } catch (const std::exception& e) {
    result.ok = false;
    if (result.error.empty()) result.error = e.what();
  }
  return result;
}

std::size_t ExperimentReport::failed() const {
  return static_cast<std::size_t>(std::count_if(
      runs.begin(), runs.end(), [](const RunResult& r) { return !r.ok; }));
}

std::string ExperimentReport::to_json() const {
  json runs_json = json::array();
  for (const auto& r : runs) {
    json j{{"algorithm", to_string(r.algorithm)},
           {"epsilon", r.epsilon},
           {"seed", r.seed},
           {"ok", r.ok},
           {"directory", r.directory.string()}};
    if (!r.ok) j["error"] = r.error;
    if (r.ok && !r.rows.empty()) j["summary"] = metrics_json(r.summary);
    runs_json.push_back(std::move(j));
  }
  return json{{"runs", runs_json}, {"failed", failed()}}.dump(2);
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                unsigned jobs) {
  const PreparedExperiment prepared = prepare_experiment(config);

  struct Triple {
    Algorithm algorithm;
    double epsilon;
    std::uint64_t seed;
  };
  std::vector<Triple> grid;
  for (Algorithm a : config.algorithms) {
    for (double e : config.epsilons) {
      for (std::uint64_t s : config.seeds) grid.push_back({a, e, s});
    }
  }

  ExperimentReport report;
  report.runs.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      report.runs[i] =
          run_triple(prepared, grid[i].algorithm, grid[i].epsilon, grid[i].seed);
    }
  };
  const unsigned n =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(grid.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return report;
}

}  // namespace dpstream
