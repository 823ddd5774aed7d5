#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dpstream.h"

namespace {

int report_error(const char* what) {
  std::fprintf(stderr, "dpstream: %s: %s\n", what, dpstream_last_error());
  return 2;
}

int cmd_run(const std::string& config, unsigned jobs,
            const std::optional<std::string>& noise) {
  dpstream_report* report = nullptr;
  if (dpstream_run_config(config.c_str(), jobs,
                          noise ? noise->c_str() : nullptr,
                          &report) != DPSTREAM_OK) {
    return report_error("run");
  }
  std::printf("%s\n", dpstream_report_json(report));
  const size_t failed = dpstream_report_failed(report);
  const size_t total = dpstream_report_runs(report);
  std::fprintf(stderr, "dpstream: %zu/%zu runs completed\n", total - failed,
               total);
  dpstream_report_free(report);
  return failed == 0 ? 0 : 1;
}

int print_json(dpstream_status status, char* json, const char* what) {
  if (status != DPSTREAM_OK) return report_error(what);
  std::printf("%s\n", json);
  dpstream_string_free(json);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private synthetic data for streams of categorical records"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dpstream_version());

  std::string config;
  unsigned jobs = 1;
  std::optional<std::string> noise;
  auto* run = app.add_subcommand("run", "Run every (algorithm, epsilon, seed) triple");
  run->add_option("--config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--jobs", jobs, "Triples run in parallel")
      ->check(CLI::PositiveNumber);
  run->add_option("--noise", noise, "Override the config's noise mode")
      ->check(CLI::IsMember({"zero", "laplace"}));

  auto* validate = app.add_subcommand(
      "validate", "Check config, schema and data without running");
  validate->add_option("--config", config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string schema;
  std::size_t k = 2;
  auto* enumerate = app.add_subcommand("enumerate-workloads",
                                       "List the k-way workloads of a schema");
  enumerate->add_option("--schema", schema, "Schema file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  enumerate->add_option("--k", k, "Workload arity");

  CLI11_PARSE(app, argc, argv);

  if (*run) return cmd_run(config, jobs, noise);
  char* json = nullptr;
  if (*validate) {
    const auto status = dpstream_validate_config(config.c_str(), &json);
    return print_json(status, json, "validate");
  }
  const auto status = dpstream_enumerate_workloads_json(schema.c_str(), k, &json);
  return print_json(status, json, "enumerate-workloads");
}
