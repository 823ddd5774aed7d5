#include "dpstream/counters.hpp"

#include <bit>
#include <cmath>

#include "dpstream/error.hpp"

namespace dpstream {

const char* to_string(CounterKind kind) {
  switch (kind) {
    case CounterKind::kSimple:
      return "simple";
    case CounterKind::kBoundedBlock:
      return "block";
    case CounterKind::kBinaryTree:
      return "binary_tree";
    case CounterKind::kUnboundedBlock:
      return "unbounded_block";
  }
  return "?";
}

CounterKind parse_counter_kind(const std::string& name) {
  if (name == "simple") return CounterKind::kSimple;
  if (name == "block") return CounterKind::kBoundedBlock;
  if (name == "binary_tree") return CounterKind::kBinaryTree;
  if (name == "unbounded_block") return CounterKind::kUnboundedBlock;
  fail(ErrorCode::kInvalidArgument, "unknown counter kind '" + name + "'");
}

Counter::Counter(double epsilon, NoiseSource& noise)
    : epsilon_(epsilon), noise_(&noise) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorCode::kInvalidArgument, "counter epsilon must be positive");
  }
}

double Counter::feed(double value) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::kNumerical, "counter input must be finite");
  }
  ++t_;
  last_output_ = do_feed(value);
  return last_output_;
}

double Counter::draw(double scale, std::uint64_t first_step) {
  if (tracing_) trace_.push_back({first_step, t_, scale});
  return noise_->laplace(scale);
}

double SimpleCounter::do_feed(double value) {
  noisy_sum_ += value + draw(1.0 / epsilon_, t_);
  return noisy_sum_;
}

BlockCounter::BlockCounter(double epsilon, NoiseSource& noise,
                           std::uint64_t block_size)
    : Counter(epsilon, noise), block_size_(block_size) {
  if (block_size_ == 0) {
    fail(ErrorCode::kInvalidArgument, "block size must be positive");
  }
}

double BlockCounter::do_feed(double value) {
  const double scale = 2.0 / epsilon_;
  true_in_block_ += value;
  if (t_ % block_size_ == 0) {
    last_block_ += true_in_block_ + draw(scale, t_ - block_size_ + 1);
    true_in_block_ = 0.0;
    synth_in_block_ = 0.0;
    return last_block_;
  }
  synth_in_block_ += value + draw(scale, t_);
  return last_block_ + synth_in_block_;
}

double BinaryTreeCounter::do_feed(double value) {
  const std::uint64_t epoch_len = std::uint64_t{1} << epoch_;
  const std::uint64_t local = t_ - epoch_start_ + 1;  // 1..epoch_len
  const double scale = static_cast<double>(epoch_ + 2) / epsilon_;
  if (exact_.size() != epoch_ + 1) {
    exact_.assign(epoch_ + 1, 0.0);
    noisy_.assign(epoch_ + 1, 0.0);
  }

  // The lowest set bit of the local index is the level of the node that
  // closes at this step; it absorbs every lower node.
  const auto level = static_cast<unsigned>(std::countr_zero(local));
  double node = value;
  for (unsigned j = 0; j < level; ++j) {
    node += exact_[j];
    exact_[j] = 0.0;
    noisy_[j] = 0.0;
  }
  exact_[level] = node;
  const std::uint64_t span = std::uint64_t{1} << level;
  noisy_[level] = node + draw(scale, t_ - span + 1);

  if (local == epoch_len) {
    completed_ += noisy_[level];
    ++epoch_;
    epoch_start_ = t_ + 1;
    exact_.clear();
    noisy_.clear();
    return completed_;
  }
  double out = completed_;
  for (unsigned j = 0; j <= epoch_; ++j) {
    if (local & (std::uint64_t{1} << j)) out += noisy_[j];
  }
  return out;
}

double UnboundedBlockCounter::do_feed(double value) {
  const double scale = 2.0 / epsilon_;
  const std::uint64_t delta = t_ - t_at_partition_;
  true_in_block_ += value;
  at_boundary_ = delta % block_size_ == 0;
  at_rollover_ = false;
  if (at_boundary_) {
    last_block_ += true_in_block_ + draw(scale, t_ - block_size_ + 1);
    true_in_block_ = 0.0;
    synth_in_block_ = 0.0;
    const double out = last_block_;
    if (delta == partition_size_) {
      at_rollover_ = true;
      t_at_partition_ = t_;
      ++block_size_;
      partition_size_ = block_size_ * block_size_;
    }
    return out;
  }
  synth_in_block_ += value + draw(scale, t_);
  return last_block_ + synth_in_block_;
}

double unbounded_block_feed(Counter& counter, double value) {
  if (counter.kind() != CounterKind::kUnboundedBlock) {
    fail(ErrorCode::kInvalidArgument,
         std::string("unbounded_block_feed on a ") + to_string(counter.kind()) +
             " counter");
  }
  return counter.feed(value);
}

std::unique_ptr<Counter> make_counter(const CounterOptions& options,
                                      double epsilon, NoiseSource& noise) {
  switch (options.kind) {
    case CounterKind::kSimple:
      return std::make_unique<SimpleCounter>(epsilon, noise);
    case CounterKind::kBoundedBlock: {
      std::uint64_t b = options.block_size;
      if (b == 0) {
        if (options.horizon == 0) {
          fail(ErrorCode::kInvalidArgument,
               "block counter needs a block size or a horizon");
        }
        b = static_cast<std::uint64_t>(
            std::ceil(std::sqrt(static_cast<double>(options.horizon))));
      }
      return std::make_unique<BlockCounter>(epsilon, noise, b);
    }
    case CounterKind::kBinaryTree:
      return std::make_unique<BinaryTreeCounter>(epsilon, noise);
    case CounterKind::kUnboundedBlock:
      return std::make_unique<UnboundedBlockCounter>(epsilon, noise);
  }
  fail(ErrorCode::kInvalidArgument, "unknown counter kind");
}

MultiDimCounter::MultiDimCounter(std::size_t dimension,
                                 const CounterOptions& options, double epsilon,
                                 NoiseSource& noise)
    : epsilon_(epsilon) {
  if (dimension == 0) {
    fail(ErrorCode::kInvalidArgument, "multi-dimensional counter needs cells");
  }
  cells_.reserve(dimension);
  for (std::size_t i = 0; i < dimension; ++i) {
    cells_.push_back(make_counter(options, epsilon, noise));
  }
}

std::vector<double> MultiDimCounter::feed(std::span<const double> cell_values) {
  if (cell_values.size() != cells_.size()) {
    fail(ErrorCode::kInvalidArgument,
         "multi-dimensional counter: got " +
             std::to_string(cell_values.size()) + " values for " +
             std::to_string(cells_.size()) + " cells");
  }
  std::vector<double> out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    out[i] = cells_[i]->feed(cell_values[i]);
  }
  return out;
}

std::vector<double> MultiDimCounter::peek() const {
  std::vector<double> out(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) out[i] = cells_[i]->peek();
  return out;
}

}  // namespace dpstream
