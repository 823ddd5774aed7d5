#include "dpstream/algorithms.hpp"

#include <algorithm>
#include <cmath>

#include "dpstream/error.hpp"

namespace dpstream {

const char* to_string(Algorithm a) {
  return a == Algorithm::kBaseline ? "baseline" : "main";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "baseline") return Algorithm::kBaseline;
  if (name == "main") return Algorithm::kMain;
  fail(ErrorCode::kInvalidArgument, "unknown algorithm '" + name + "'");
}

double default_sensitivity(const WorkloadSet& workloads) {
  for (const auto& w : workloads) {
    if (w.columns().size() != 2) return 1.0;
  }
  return 0.25;
}

StreamingSynthesizer::StreamingSynthesizer(RunConfig config, SchemaPtr schema,
                                           WorkloadSet workloads)
    : config_(std::move(config)),
      schema_(std::move(schema)),
      workloads_(std::move(workloads)),
      support_(Support::working_support(schema_, workloads_,
                                        config_.support_size,
                                        config_.support_seed)),
      noise_(config_.noise, config_.seed),
      fitter_(config_.mw_passes),
      sensitivity_(config_.sensitivity > 0.0 ? config_.sensitivity
                                             : default_sensitivity(workloads_)),
      g_(SupportDataset::uniform(support_, 1.0)),
      step_ledger_(config_.epsilon) {
  if (workloads_.empty()) {
    fail(ErrorCode::kInvalidArgument, "workload set is empty");
  }
  if (config_.k < 1 || config_.k > workloads_.size()) {
    fail(ErrorCode::kInvalidArgument,
         "k must be in [1, |Q|] = [1, " + std::to_string(workloads_.size()) +
             "]");
  }
}

const SupportDataset& StreamingSynthesizer::step(const WeightedDataset& delta) {
  if (!(delta.schema() == *schema_)) {
    fail(ErrorCode::kSchemaMismatch, "differential does not match the schema");
  }
  ++t_;
  begin_step();
  do_step(delta);
  end_step();
  return g_;
}

void StreamingSynthesizer::begin_step() {
  step_ledger_ = BudgetLedger(config_.epsilon);
}

void StreamingSynthesizer::end_step() {
  const Fraction sel = step_ledger_.spent_with_prefix("select");
  const Fraction meas = step_ledger_.spent_with_prefix("measure");
  if (sel.num == 0 && meas.num == 0) return;
  spends_.push_back({t_, sel, meas});
  if (max_step_share_ < step_ledger_.spent()) {
    max_step_share_ = step_ledger_.spent();
  }
}

Fraction StreamingSynthesizer::per_call_share() const {
  return Fraction::of(1, 2 * static_cast<std::int64_t>(config_.k));
}

void StreamingSynthesizer::spend(const std::string& kind, std::size_t workload) {
  step_ledger_.spend(kind + " t=" + std::to_string(t_) + " W" +
                         std::to_string(workload),
                     per_call_share());
}

std::vector<std::vector<double>> StreamingSynthesizer::workload_cells(
    const WeightedDataset& d) const {
  std::vector<std::vector<double>> out;
  out.reserve(workloads_.size());
  for (const auto& w : workloads_) out.push_back(eval_workload(w, d));
  return out;
}

std::vector<double> StreamingSynthesizer::utilities(
    std::span<const std::vector<double>> target_cells, const SupportDataset& h,
    std::span<const std::size_t> candidates) const {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (std::size_t i : candidates) {
    const auto synth = h.workload_values(i);
    const auto& target = target_cells[i];
    double l1 = 0.0;
    for (std::size_t c = 0; c < synth.size(); ++c) {
      l1 += std::abs(target[c] - synth[c]);
    }
    const double n = static_cast<double>(synth.size());
    out.push_back(l1 / n - n);
  }
  return out;
}

std::size_t StreamingSynthesizer::select(
    std::span<const std::vector<double>> target_cells,
    const SupportDataset& h) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < workloads_.size(); ++i) {
    if (std::find(selected_.begin(), selected_.end(), i) == selected_.end()) {
      candidates.push_back(i);
    }
  }
  const auto u = utilities(target_cells, h, candidates);
  const double eps = config_.epsilon / (2.0 * static_cast<double>(config_.k));
  const std::size_t j =
      candidates[exponential_mechanism(u, eps, sensitivity_, noise_)];
  spend("select", j);
  selected_.push_back(j);
  return j;
}

void BaselineSynthesizer::do_step(const WeightedDataset& delta) {
  selected_.clear();
  const double mass = total_mass(delta);
  if (mass == 0.0) return;  // g_t = g_{t-1}, nothing measured.

  const auto delta_cells = workload_cells(delta);
  const double scale = 2.0 * static_cast<double>(config_.k) / config_.epsilon;
  SupportDataset h =
      SupportDataset::uniform(support_, mass / static_cast<double>(support_->size()));
  std::vector<Measurement> measured;
  std::vector<SupportDataset> iterates;
  for (std::size_t l = 0; l < config_.k; ++l) {
    const std::size_t j = select(delta_cells, h);
    Measurement m{j, delta_cells[j]};
    for (double& v : m.values) {
      v += noise_.laplace(scale);
      if (config_.clamp_measurements) v = std::max(v, 0.0);
    }
    spend("measure", j);
    measured.push_back(std::move(m));
    h = fitter_.fit(measured, h, mass);
    iterates.push_back(h);
  }
  const SupportDataset avg = average(iterates);
  auto g = g_.mutable_weights();
  const auto a = avg.weights();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += a[i];
}

const MultiDimCounter* MainSynthesizer::counter(std::size_t i) const {
  auto it = counters_.find(i);
  return it == counters_.end() ? nullptr : it->second.get();
}

std::vector<double> MainSynthesizer::counter_value(std::size_t i) const {
  if (const auto* c = counter(i)) return c->peek();
  return std::vector<double>(workloads_[i].size(), 0.0);
}

std::vector<double> MainSynthesizer::remainder(std::size_t i) const {
  if (i >= workloads_.size()) fail(ErrorCode::kOutOfRange, "no such workload");
  if (auto it = remainders_.find(i); it != remainders_.end()) return it->second;
  if (t_ == 0) return std::vector<double>(workloads_[i].size(), 0.0);
  auto r = g_.workload_values(i);
  const auto c = counter_value(i);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c[k];
  return r;
}

void MainSynthesizer::do_step(const WeightedDataset& delta) {
  // r(t-1, .) for workloads selected at t-1 must survive until looked up.
  std::map<std::size_t, std::vector<double>> previous = std::move(remainders_);
  remainders_.clear();
  selected_.clear();
  measurements_.clear();

  auto remainder_before = [&](std::size_t j) {
    if (t_ == 1) return std::vector<double>(workloads_[j].size(), 0.0);
    if (auto it = previous.find(j); it != previous.end()) return it->second;
    auto r = g_.workload_values(j);
    const auto c = counter_value(j);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] -= c[k];
    return r;
  };

  const double mass = total_mass(delta) + g_.total_mass();
  if (mass == 0.0) return;

  // Selection target: grad f_t + g_{t-1}, cell by cell.
  const auto delta_cells = workload_cells(delta);
  std::vector<std::vector<double>> surrogate(workloads_.size());
  for (std::size_t i = 0; i < workloads_.size(); ++i) {
    surrogate[i] = g_.workload_values(i);
    for (std::size_t c = 0; c < surrogate[i].size(); ++c) {
      surrogate[i][c] += delta_cells[i][c];
    }
  }

  const double counter_eps =
      config_.epsilon / (2.0 * static_cast<double>(config_.k));
  // h_{t,0} = g_{t-1} rescaled to the step's mass. Unscaled, every workload
  // would differ from the target by exactly |grad f_t| and the first
  // selection could not depend on the data.
  SupportDataset h = g_;
  h.rescale_to(mass);
  std::vector<Measurement> measured;
  std::vector<SupportDataset> iterates;
  for (std::size_t l = 0; l < config_.k; ++l) {
    const std::size_t j = select(surrogate, h);
    std::vector<double> r = remainder_before(j);

    auto& slot = counters_[j];
    if (!slot) {
      slot = std::make_unique<MultiDimCounter>(
          workloads_[j].size(), config_.counter, counter_eps, noise_);
    }
    const std::vector<double> c = slot->feed(delta_cells[j]);
    spend("measure", j);

    Measurement m{j, c};
    for (std::size_t k = 0; k < m.values.size(); ++k) {
      m.values[k] += r[k];
      if (config_.clamp_measurements) m.values[k] = std::max(m.values[k], 0.0);
    }
    remainders_[j] = std::move(r);
    measurements_[j] = m.values;
    measured.push_back(std::move(m));

    h = fitter_.fit(measured, h, mass);
    iterates.push_back(h);
  }
  g_ = average(iterates);
}

std::unique_ptr<StreamingSynthesizer> make_synthesizer(Algorithm algorithm,
                                                       RunConfig config,
                                                       SchemaPtr schema,
                                                       WorkloadSet workloads) {
  if (algorithm == Algorithm::kBaseline) {
    return std::make_unique<BaselineSynthesizer>(
        std::move(config), std::move(schema), std::move(workloads));
  }
  return std::make_unique<MainSynthesizer>(std::move(config), std::move(schema),
                                           std::move(workloads));
}

}  // namespace dpstream
