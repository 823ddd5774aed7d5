#include "dpstream.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "dpstream/algorithms.hpp"
#include "dpstream/counters.hpp"
#include "dpstream/domain.hpp"
#include "dpstream/error.hpp"
#include "dpstream/harness.hpp"
#include "dpstream/queries.hpp"
#include "json.hpp"

struct dpstream_schema {
  dpstream::SchemaPtr schema;
};

struct dpstream_workloads {
  dpstream::SchemaPtr schema;
  dpstream::WorkloadSet set;
};

struct dpstream_counter {
  dpstream::NoiseSource noise;
  std::unique_ptr<dpstream::Counter> counter;
};

struct dpstream_synth {
  std::unique_ptr<dpstream::StreamingSynthesizer> synth;
};

struct dpstream_report {
  dpstream::ExperimentReport report;
  std::string json;
};

namespace {

thread_local std::string last_error;

dpstream_status set_error(dpstream_status status, const char* message) {
  last_error = message;
  return status;
}

// Runs fn, mapping exceptions to status codes.
template <typename Fn>
dpstream_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return DPSTREAM_OK;
  } catch (const dpstream::Error& e) {
    return set_error(static_cast<dpstream_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DPSTREAM_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DPSTREAM_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(DPSTREAM_E_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) dpstream::fail(dpstream::ErrorCode::kInvalidArgument, what);
}

nlohmann::json workloads_json(const dpstream::DomainSchema& schema,
                              const dpstream::WorkloadSet& set) {
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    nlohmann::json names = nlohmann::json::array();
    for (std::size_t c : set[i].columns()) names.push_back(schema.attribute(c).name);
    list.push_back({{"index", i},
                    {"attributes", names},
                    {"columns", std::vector<std::size_t>(
                                    set[i].columns().begin(),
                                    set[i].columns().end())},
                    {"cells", set[i].size()}});
  }
  return list;
}

}  // namespace

extern "C" {

const char* dpstream_last_error(void) { return last_error.c_str(); }

const char* dpstream_version(void) { return "0.1.0"; }

void dpstream_string_free(char* s) { std::free(s); }

dpstream_status dpstream_schema_create(size_t num_attributes,
                                       const char* const* names,
                                       const uint32_t* cardinalities,
                                       dpstream_schema** out) {
  return guarded([&] {
    require(out != nullptr && names != nullptr && cardinalities != nullptr,
            "null argument");
    std::vector<dpstream::DomainSchema::Attribute> attrs;
    for (size_t i = 0; i < num_attributes; ++i) {
      require(names[i] != nullptr, "null attribute name");
      attrs.push_back({names[i], cardinalities[i]});
    }
    *out = new dpstream_schema{dpstream::make_schema(std::move(attrs))};
  });
}

dpstream_status dpstream_schema_load(const char* path, dpstream_schema** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new dpstream_schema{dpstream::load_schema_file(path).schema};
  });
}

size_t dpstream_schema_num_attributes(const dpstream_schema* s) {
  return s == nullptr ? 0 : s->schema->num_attributes();
}

uint32_t dpstream_schema_cardinality(const dpstream_schema* s,
                                     size_t attribute) {
  if (s == nullptr || attribute >= s->schema->num_attributes()) return 0;
  return s->schema->cardinality(attribute);
}

void dpstream_schema_free(dpstream_schema* s) { delete s; }

dpstream_status dpstream_workloads_enumerate(const dpstream_schema* schema,
                                             size_t k,
                                             dpstream_workloads** out) {
  return guarded([&] {
    require(schema != nullptr && out != nullptr, "null argument");
    *out = new dpstream_workloads{
        schema->schema, dpstream::enumerate_workloads(*schema->schema, k)};
  });
}

size_t dpstream_workloads_count(const dpstream_workloads* w) {
  return w == nullptr ? 0 : w->set.size();
}

size_t dpstream_workloads_cells(const dpstream_workloads* w, size_t i) {
  if (w == nullptr || i >= w->set.size()) return 0;
  return w->set[i].size();
}

size_t dpstream_workloads_columns(const dpstream_workloads* w, size_t i,
                                  size_t* columns, size_t capacity) {
  if (w == nullptr || i >= w->set.size()) return 0;
  const auto cols = w->set[i].columns();
  for (size_t c = 0; c < cols.size() && c < capacity; ++c) columns[c] = cols[c];
  return cols.size();
}

void dpstream_workloads_free(dpstream_workloads* w) { delete w; }

dpstream_status dpstream_enumerate_workloads_json(const char* schema_path,
                                                  size_t k, char** out_json) {
  return guarded([&] {
    require(schema_path != nullptr && out_json != nullptr, "null argument");
    const auto schema = dpstream::load_schema_file(schema_path);
    const auto set = dpstream::enumerate_workloads(*schema.schema, k);
    *out_json = copy_string(workloads_json(*schema.schema, set).dump(2));
  });
}

dpstream_status dpstream_counter_create(const char* kind, double epsilon,
                                        const char* noise, uint64_t seed,
                                        uint64_t block_size, uint64_t horizon,
                                        dpstream_counter** out) {
  return guarded([&] {
    require(kind != nullptr && out != nullptr, "null argument");
    dpstream::CounterOptions opts;
    opts.kind = dpstream::parse_counter_kind(kind);
    opts.block_size = block_size;
    opts.horizon = horizon;
    const auto mode = dpstream::parse_noise_mode(noise ? noise : "laplace");
    auto c = std::make_unique<dpstream_counter>(
        dpstream_counter{dpstream::NoiseSource(mode, seed), nullptr});
    c->counter = dpstream::make_counter(opts, epsilon, c->noise);
    *out = c.release();
  });
}

dpstream_status dpstream_counter_feed(dpstream_counter* c, double value,
                                      double* out) {
  return guarded([&] {
    require(c != nullptr, "null counter");
    const double v = c->counter->feed(value);
    if (out != nullptr) *out = v;
  });
}

double dpstream_counter_peek(const dpstream_counter* c) {
  return c == nullptr ? 0.0 : c->counter->peek();
}

uint64_t dpstream_counter_steps(const dpstream_counter* c) {
  return c == nullptr ? 0 : c->counter->steps();
}

void dpstream_counter_free(dpstream_counter* c) { delete c; }

void dpstream_synth_config_init(dpstream_synth_config* config) {
  if (config == nullptr) return;
  const dpstream::RunConfig d;
  config->algorithm = "main";
  config->epsilon = d.epsilon;
  config->k = d.k;
  config->counter = dpstream::to_string(d.counter.kind);
  config->block_size = d.counter.block_size;
  config->horizon = d.counter.horizon;
  config->sensitivity = d.sensitivity;
  config->mw_passes = d.mw_passes;
  config->support_size = d.support_size;
  config->support_seed = d.support_seed;
  config->clamp_measurements = d.clamp_measurements ? 1 : 0;
  config->seed = d.seed;
  config->noise = dpstream::to_string(d.noise);
}

dpstream_status dpstream_synth_create(const dpstream_synth_config* config,
                                      const dpstream_schema* schema,
                                      const dpstream_workloads* workloads,
                                      dpstream_synth** out) {
  return guarded([&] {
    require(config != nullptr && schema != nullptr && workloads != nullptr &&
                out != nullptr,
            "null argument");
    require(*workloads->schema == *schema->schema,
            "workloads were built for a different schema");
    dpstream::RunConfig rc;
    rc.epsilon = config->epsilon;
    rc.k = config->k;
    rc.counter.kind =
        dpstream::parse_counter_kind(config->counter ? config->counter : "simple");
    rc.counter.block_size = config->block_size;
    rc.counter.horizon = config->horizon;
    rc.sensitivity = config->sensitivity;
    rc.mw_passes = config->mw_passes;
    rc.support_size = config->support_size;
    rc.support_seed = config->support_seed;
    rc.clamp_measurements = config->clamp_measurements != 0;
    rc.seed = config->seed;
    rc.noise = dpstream::parse_noise_mode(config->noise ? config->noise : "laplace");
    const auto algo =
        dpstream::parse_algorithm(config->algorithm ? config->algorithm : "main");
    *out = new dpstream_synth{dpstream::make_synthesizer(
        algo, rc, schema->schema, workloads->set)};
  });
}

dpstream_status dpstream_synth_step(dpstream_synth* s, const uint32_t* points,
                                    const double* weights, size_t count) {
  return guarded([&] {
    require(s != nullptr, "null synthesizer");
    require(count == 0 || points != nullptr, "null points");
    const auto& schema = s->synth->support().schema_ptr();
    const size_t p = schema->num_attributes();
    dpstream::WeightedDataset delta(schema);
    for (size_t r = 0; r < count; ++r) {
      dpstream::DataPoint x(
          std::vector<uint32_t>(points + r * p, points + (r + 1) * p));
      delta.add(x, weights ? weights[r] : 1.0);
    }
    s->synth->step(delta);
  });
}

size_t dpstream_synth_time(const dpstream_synth* s) {
  return s == nullptr ? 0 : s->synth->time();
}

double dpstream_synth_mass(const dpstream_synth* s) {
  return s == nullptr ? 0.0 : s->synth->current().total_mass();
}

dpstream_status dpstream_synth_answers(const dpstream_synth* s,
                                       size_t workload, double* out,
                                       size_t capacity) {
  return guarded([&] {
    require(s != nullptr && out != nullptr, "null argument");
    if (workload >= s->synth->workloads().size()) {
      dpstream::fail(dpstream::ErrorCode::kOutOfRange, "no such workload");
    }
    const auto values = s->synth->current().workload_values(workload);
    require(capacity >= values.size(), "output buffer too small");
    std::copy(values.begin(), values.end(), out);
  });
}

double dpstream_synth_budget_share(const dpstream_synth* s) {
  return s == nullptr ? 0.0 : s->synth->max_step_share().value();
}

void dpstream_synth_free(dpstream_synth* s) { delete s; }

dpstream_status dpstream_run_config(const char* config_path, unsigned jobs,
                                    const char* noise, dpstream_report** out) {
  return guarded([&] {
    require(config_path != nullptr && out != nullptr, "null argument");
    auto config = dpstream::load_experiment_config(config_path);
    if (noise != nullptr) config.noise = dpstream::parse_noise_mode(noise);
    auto r = std::make_unique<dpstream_report>();
    r->report = dpstream::run_experiment(config, jobs);
    r->json = r->report.to_json();
    *out = r.release();
  });
}

size_t dpstream_report_runs(const dpstream_report* r) {
  return r == nullptr ? 0 : r->report.runs.size();
}

size_t dpstream_report_failed(const dpstream_report* r) {
  return r == nullptr ? 0 : r->report.failed();
}

const char* dpstream_report_json(const dpstream_report* r) {
  return r == nullptr ? "" : r->json.c_str();
}

void dpstream_report_free(dpstream_report* r) { delete r; }

dpstream_status dpstream_validate_config(const char* config_path,
                                         char** out_json) {
  return guarded([&] {
    require(config_path != nullptr && out_json != nullptr, "null argument");
    const auto config = dpstream::load_experiment_config(config_path);
    const auto prepared = dpstream::prepare_experiment(config);
    const auto& schema = *prepared.schema.schema;
    nlohmann::json attrs = nlohmann::json::array();
    for (const auto& a : schema.attributes()) {
      attrs.push_back({{"name", a.name}, {"cardinality", a.cardinality}});
    }
    const size_t triples =
        config.algorithms.size() * config.epsilons.size() * config.seeds.size();
    nlohmann::json doc{{"dataset", config.dataset.string()},
                       {"rows", prepared.rows},
                       {"steps", prepared.stream.steps()},
                       {"attributes", attrs},
                       {"domain_size", schema.domain_size()},
                       {"workloads", prepared.workloads.size()},
                       {"triples", triples},
                       {"output_dir", config.output_dir.string()}};
    *out_json = copy_string(doc.dump(2));
  });
}

}  // extern "C"
