#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dpstream/mechanisms.hpp"

namespace dpstream {

enum class CounterKind { kSimple, kBoundedBlock, kBinaryTree, kUnboundedBlock };

const char* to_string(CounterKind kind);
// Accepts "simple", "block", "binary_tree", "unbounded_block".
CounterKind parse_counter_kind(const std::string& name);

// One Laplace draw and the (1-based, inclusive) range of time steps whose
// inputs sit in the partial sum it perturbs. Recorded only when tracing.
struct NoiseEvent {
  std::uint64_t first_step;
  std::uint64_t last_step;
  double scale;
};

// Continual-observation counter: every feed releases a noisy estimate of the
// running sum of all fed values. The noise source is borrowed and must
// outlive the counter.
class Counter {
 public:
  Counter(double epsilon, NoiseSource& noise);
  virtual ~Counter() = default;

  Counter(const Counter&) = delete;
  Counter& operator=(const Counter&) = delete;

  virtual CounterKind kind() const = 0;

  double feed(double value);
  // Last released value (0 before the first feed). Draws no noise.
  double peek() const { return last_output_; }

  double epsilon() const { return epsilon_; }
  std::uint64_t steps() const { return t_; }

  void enable_trace() { tracing_ = true; }
  const std::vector<NoiseEvent>& trace() const { return trace_; }

 protected:
  virtual double do_feed(double value) = 0;

  double draw(double scale, std::uint64_t first_step);

  double epsilon_;
  NoiseSource* noise_;
  std::uint64_t t_ = 0;

 private:
  double last_output_ = 0.0;
  bool tracing_ = false;
  std::vector<NoiseEvent> trace_;
};

// Adds Lap(1/epsilon) to every increment and releases the running sum.
class SimpleCounter final : public Counter {
 public:
  using Counter::Counter;
  CounterKind kind() const override { return CounterKind::kSimple; }

 protected:
  double do_feed(double value) override;

 private:
  double noisy_sum_ = 0.0;
};

// Two-level counter with a fixed block size. Inside a block each item is
// released with its own Lap(2/epsilon); at block end the exact block sum plus
// one Lap(2/epsilon) is folded into the running block total.
class BlockCounter final : public Counter {
 public:
  BlockCounter(double epsilon, NoiseSource& noise, std::uint64_t block_size);
  CounterKind kind() const override { return CounterKind::kBoundedBlock; }
  std::uint64_t block_size() const { return block_size_; }

 protected:
  double do_feed(double value) override;

 private:
  std::uint64_t block_size_;
  double last_block_ = 0.0;
  double true_in_block_ = 0.0;
  double synth_in_block_ = 0.0;
};

// Dyadic-interval (binary mechanism) counter made unbounded by doubling
// epochs: epoch e covers steps [2^e, 2^(e+1)) with its own tree of e+1
// levels, each node perturbed by Lap((e+2)/epsilon). Completed epochs
// contribute their noisy root.
class BinaryTreeCounter final : public Counter {
 public:
  using Counter::Counter;
  CounterKind kind() const override { return CounterKind::kBinaryTree; }

 protected:
  double do_feed(double value) override;

 private:
  unsigned epoch_ = 0;
  std::uint64_t epoch_start_ = 1;
  double completed_ = 0.0;
  std::vector<double> exact_;
  std::vector<double> noisy_;
};

// Block counter over partitions of length 4, 9, 16, ... with block sizes
// 2, 3, 4, ...
class UnboundedBlockCounter final : public Counter {
 public:
  using Counter::Counter;
  CounterKind kind() const override { return CounterKind::kUnboundedBlock; }

  std::uint64_t block_size() const { return block_size_; }
  std::uint64_t partition_size() const { return partition_size_; }
  bool last_was_block_boundary() const { return at_boundary_; }
  bool last_was_rollover() const { return at_rollover_; }

 protected:
  double do_feed(double value) override;

 private:
  std::uint64_t partition_size_ = 4;
  std::uint64_t block_size_ = 2;
  std::uint64_t t_at_partition_ = 0;
  double last_block_ = 0.0;
  double true_in_block_ = 0.0;
  double synth_in_block_ = 0.0;
  bool at_boundary_ = false;
  bool at_rollover_ = false;
};

// Feeds `counter`, which must be an UnboundedBlockCounter.
double unbounded_block_feed(Counter& counter, double value);

struct CounterOptions {
  CounterKind kind = CounterKind::kSimple;
  // Block size for kBoundedBlock; 0 means ceil(sqrt(horizon)).
  std::uint64_t block_size = 0;
  std::uint64_t horizon = 0;
};

std::unique_ptr<Counter> make_counter(const CounterOptions& options,
                                      double epsilon, NoiseSource& noise);

// One counter per workload cell at a shared epsilon. Cells partition the
// records, so the vector release costs epsilon by parallel composition.
class MultiDimCounter {
 public:
  MultiDimCounter(std::size_t dimension, const CounterOptions& options,
                  double epsilon, NoiseSource& noise);

  std::size_t dimension() const { return cells_.size(); }
  double epsilon() const { return epsilon_; }

  std::vector<double> feed(std::span<const double> cell_values);
  std::vector<double> peek() const;
  std::uint64_t steps() const { return cells_.front()->steps(); }

  const Counter& cell(std::size_t i) const { return *cells_.at(i); }

 private:
  double epsilon_;
  std::vector<std::unique_ptr<Counter>> cells_;
};

}  // namespace dpstream
