#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpstream/counters.hpp"
#include "dpstream/domain.hpp"
#include "dpstream/fitters.hpp"
#include "dpstream/mechanisms.hpp"
#include "dpstream/queries.hpp"

namespace dpstream {

enum class Algorithm { kBaseline, kMain };

const char* to_string(Algorithm a);
// "baseline" (StreamingMWEM) or "main" (counter-based).
Algorithm parse_algorithm(const std::string& name);

struct RunConfig {
  double epsilon = 1.0;
  // Workloads selected per time step.
  std::size_t k = 1;
  CounterOptions counter;
  // Exponential-mechanism sensitivity; <= 0 picks the default (1/4 when every
  // workload is 2-way, 1 otherwise).
  double sensitivity = 0.0;
  int mw_passes = 1;
  std::size_t support_size = 10000;
  std::uint64_t support_seed = 0;
  bool clamp_measurements = false;
  std::uint64_t seed = 0;
  NoiseMode noise = NoiseMode::kLaplace;
};

double default_sensitivity(const WorkloadSet& workloads);

// Privacy spend of one time step, as fractions of epsilon.
struct StepSpend {
  std::size_t t = 0;
  Fraction selection;
  Fraction measurement;
};

// Streaming synthesizer g = A(f): consumes one differential per step and
// never sees the accumulated input.
class StreamingSynthesizer {
 public:
  StreamingSynthesizer(RunConfig config, SchemaPtr schema,
                       WorkloadSet workloads);
  virtual ~StreamingSynthesizer() = default;

  StreamingSynthesizer(const StreamingSynthesizer&) = delete;
  StreamingSynthesizer& operator=(const StreamingSynthesizer&) = delete;

  virtual Algorithm algorithm() const = 0;

  // Advances to t + 1 and returns g_{t+1}.
  const SupportDataset& step(const WeightedDataset& delta);

  std::size_t time() const { return t_; }
  const SupportDataset& current() const { return g_; }
  const RunConfig& config() const { return config_; }
  const WorkloadSet& workloads() const { return workloads_; }
  const Support& support() const { return *support_; }
  double sensitivity() const { return sensitivity_; }

  // Indices selected at the latest step, in selection order.
  const std::vector<std::size_t>& last_selected() const { return selected_; }
  // Ledger of the latest step (empty for degenerate steps).
  const BudgetLedger& last_step_ledger() const { return step_ledger_; }
  const std::vector<StepSpend>& step_spends() const { return spends_; }
  // Largest per-step spend; steps touch disjoint records, so this is the
  // run's total privacy loss as a fraction of epsilon.
  Fraction max_step_share() const { return max_step_share_; }
  const MwStats& mw_stats() const { return fitter_.stats(); }
  std::uint64_t laplace_draws() const { return noise_.laplace_draws(); }

 protected:
  virtual void do_step(const WeightedDataset& delta) = 0;

  // e_i = (1/|W_i|) ||target_i - h_i||_1 - |W_i| for each candidate i.
  std::vector<double> utilities(
      std::span<const std::vector<double>> target_cells,
      const SupportDataset& h, std::span<const std::size_t> candidates) const;

  // Draws one unselected workload index with the exponential mechanism and
  // records the spend.
  std::size_t select(std::span<const std::vector<double>> target_cells,
                     const SupportDataset& h);

  std::vector<std::vector<double>> workload_cells(
      const WeightedDataset& d) const;

  Fraction per_call_share() const;
  void spend(const std::string& kind, std::size_t workload);
  void begin_step();
  void end_step();

  RunConfig config_;
  SchemaPtr schema_;
  WorkloadSet workloads_;
  std::shared_ptr<const Support> support_;
  NoiseSource noise_;
  MultiplicativeWeightsFitter fitter_;
  double sensitivity_;

  std::size_t t_ = 0;
  SupportDataset g_;
  std::vector<std::size_t> selected_;
  BudgetLedger step_ledger_;
  std::vector<StepSpend> spends_;
  Fraction max_step_share_;
};

// StreamingMWEM: an independent MWEM run on every differential,
// g_t = g_{t-1} + avg_l h_{t,l}.
class BaselineSynthesizer final : public StreamingSynthesizer {
 public:
  using StreamingSynthesizer::StreamingSynthesizer;
  Algorithm algorithm() const override { return Algorithm::kBaseline; }

 protected:
  void do_step(const WeightedDataset& delta) override;
};

// Counter-based synthesizer: selection against grad f_t + g_{t-1}, one
// multi-dimensional counter per workload, remainders r filled in from the
// synthetic stream while a workload is not selected.
class MainSynthesizer final : public StreamingSynthesizer {
 public:
  using StreamingSynthesizer::StreamingSynthesizer;
  Algorithm algorithm() const override { return Algorithm::kMain; }

  // C_i, or nullptr while workload i has never been selected.
  const MultiDimCounter* counter(std::size_t i) const;
  // C_i(t) (zeros if never selected).
  std::vector<double> counter_value(std::size_t i) const;
  // r(t, i) at the current time.
  std::vector<double> remainder(std::size_t i) const;
  // m(t, i) for every i selected at the current time.
  const std::map<std::size_t, std::vector<double>>& measurements() const {
    return measurements_;
  }

 protected:
  void do_step(const WeightedDataset& delta) override;

 private:
  std::map<std::size_t, std::unique_ptr<MultiDimCounter>> counters_;
  // r(t, j) for j selected at t; unselected remainders follow from g_t.
  std::map<std::size_t, std::vector<double>> remainders_;
  std::map<std::size_t, std::vector<double>> measurements_;
};

std::unique_ptr<StreamingSynthesizer> make_synthesizer(Algorithm algorithm,
                                                       RunConfig config,
                                                       SchemaPtr schema,
                                                       WorkloadSet workloads);

}  // namespace dpstream
