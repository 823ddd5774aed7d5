#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace dpstream {

enum class NoiseMode { kLaplace, kZero };

const char* to_string(NoiseMode mode);
NoiseMode parse_noise_mode(const std::string& name);

// Seeded randomness for every privacy mechanism of a run. kZero turns all
// Laplace draws into exact zeros and the exponential mechanism into argmax,
// which makes the algorithms deterministic oracles.
class NoiseSource {
 public:
  NoiseSource(NoiseMode mode, std::uint64_t seed)
      : mode_(mode), seed_(seed), engine_(seed) {}

  NoiseMode mode() const { return mode_; }
  std::uint64_t seed() const { return seed_; }
  bool is_zero() const { return mode_ == NoiseMode::kZero; }

  // Uniform on the open interval (0, 1), 53 bits.
  double uniform();

  // One Laplace(0, scale) draw by inverse CDF; exactly 0 in kZero mode.
  double laplace(double scale);

  // Number of Laplace draws taken so far (zero-mode draws included).
  std::uint64_t laplace_draws() const { return laplace_draws_; }

 private:
  NoiseMode mode_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t laplace_draws_ = 0;
};

double laplace(double scale, NoiseSource& src);

// Returns i with probability proportional to exp(epsilon * u_i / (2 *
// sensitivity)); argmax (lowest index on ties) in kZero mode.
std::size_t exponential_mechanism(std::span<const double> utilities,
                                  double epsilon, double sensitivity,
                                  NoiseSource& src);

// Selection probabilities used by exponential_mechanism in kLaplace mode.
std::vector<double> exponential_mechanism_probabilities(
    std::span<const double> utilities, double epsilon, double sensitivity);

// Exact non-negative rational.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction of(std::int64_t num, std::int64_t den);

  double value() const { return static_cast<double>(num) / den; }
  std::string str() const;

  friend Fraction operator+(Fraction a, Fraction b);
  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend bool operator<(const Fraction& a, const Fraction& b);
  friend bool operator<=(const Fraction& a, const Fraction& b) {
    return !(b < a);
  }
};

// Sequential-composition ledger. Spends are fractions of total_epsilon so the
// accounting is exact (e.g. k spends of epsilon/2k add up to exactly
// epsilon/2).
class BudgetLedger {
 public:
  struct Entry {
    std::string label;
    Fraction share;
  };

  explicit BudgetLedger(double total_epsilon);

  double total_epsilon() const { return total_epsilon_; }

  // Throws kBudgetExceeded if the spend would push the total above 1.
  void spend(std::string label, Fraction share);

  // Parallel composition: mechanisms on disjoint data cost the max share.
  void spend_parallel(std::string label, std::span<const Fraction> shares);

  Fraction spent() const { return spent_; }
  double spent_epsilon() const { return spent_.value() * total_epsilon_; }
  double epsilon_of(const Entry& e) const {
    return e.share.value() * total_epsilon_;
  }
  const std::vector<Entry>& entries() const { return entries_; }

  // Sum of the shares whose label starts with prefix.
  Fraction spent_with_prefix(const std::string& prefix) const;

 private:
  double total_epsilon_;
  Fraction spent_;
  std::vector<Entry> entries_;
};

}  // namespace dpstream
