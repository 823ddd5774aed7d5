#include "dpstream/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpstream/error.hpp"

namespace dpstream {

const char* to_string(NoiseMode mode) {
  return mode == NoiseMode::kZero ? "zero" : "laplace";
}

NoiseMode parse_noise_mode(const std::string& name) {
  if (name == "laplace") return NoiseMode::kLaplace;
  if (name == "zero") return NoiseMode::kZero;
  fail(ErrorCode::kInvalidArgument, "unknown noise mode '" + name + "'");
}

double NoiseSource::uniform() {
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double NoiseSource::laplace(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    fail(ErrorCode::kInvalidArgument, "Laplace scale must be positive");
  }
  ++laplace_draws_;
  if (is_zero()) return 0.0;
  const double u = uniform();
  return u < 0.5 ? scale * std::log(2.0 * u)
                 : -scale * std::log(2.0 * (1.0 - u));
}

double laplace(double scale, NoiseSource& src) { return src.laplace(scale); }

namespace {

void check_em_args(std::span<const double> utilities, double epsilon,
                   double sensitivity) {
  if (utilities.empty()) {
    fail(ErrorCode::kInvalidArgument, "exponential mechanism: no candidates");
  }
  if (!(epsilon > 0.0) || !(sensitivity > 0.0)) {
    fail(ErrorCode::kInvalidArgument,
         "exponential mechanism: epsilon and sensitivity must be positive");
  }
  for (double u : utilities) {
    if (!std::isfinite(u)) {
      fail(ErrorCode::kNumerical, "exponential mechanism: non-finite utility");
    }
  }
}

}  // namespace

std::vector<double> exponential_mechanism_probabilities(
    std::span<const double> utilities, double epsilon, double sensitivity) {
  check_em_args(utilities, epsilon, sensitivity);
  const double coeff = epsilon / (2.0 * sensitivity);
  const double top = *std::max_element(utilities.begin(), utilities.end());
  std::vector<double> p(utilities.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(coeff * (utilities[i] - top));
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

std::size_t exponential_mechanism(std::span<const double> utilities,
                                  double epsilon, double sensitivity,
                                  NoiseSource& src) {
  check_em_args(utilities, epsilon, sensitivity);
  if (src.is_zero()) {
    return static_cast<std::size_t>(
        std::max_element(utilities.begin(), utilities.end()) -
        utilities.begin());
  }
  const double coeff = epsilon / (2.0 * sensitivity);
  const double top = *std::max_element(utilities.begin(), utilities.end());
  std::vector<double> w(utilities.size());
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(coeff * (utilities[i] - top));
    z += w[i];
  }
  double target = src.uniform() * z;
  for (std::size_t i = 0; i < w.size(); ++i) {
    target -= w[i];
    if (target < 0.0) return i;
  }
  // Rounding left a sliver of mass past the end; pick the last positive.
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] > 0.0) return i;
  }
  return 0;
}

Fraction Fraction::of(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) {
    fail(ErrorCode::kInvalidArgument, "fraction must be non-negative");
  }
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

std::string Fraction::str() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

Fraction operator+(Fraction a, Fraction b) {
  const std::int64_t l = std::lcm(a.den, b.den);
  return Fraction::of(a.num * (l / a.den) + b.num * (l / b.den), l);
}

bool operator<(const Fraction& a, const Fraction& b) {
  // Shares have small denominators (2k), so the cross products fit.
  return static_cast<__int128>(a.num) * b.den <
         static_cast<__int128>(b.num) * a.den;
}

BudgetLedger::BudgetLedger(double total_epsilon)
    : total_epsilon_(total_epsilon) {
  if (!(total_epsilon > 0.0) || !std::isfinite(total_epsilon)) {
    fail(ErrorCode::kInvalidArgument, "total epsilon must be positive");
  }
}

void BudgetLedger::spend(std::string label, Fraction share) {
  if (share.num <= 0) {
    fail(ErrorCode::kInvalidArgument, "spend must be positive");
  }
  const Fraction next = spent_ + share;
  if (Fraction{1, 1} < next) {
    fail(ErrorCode::kBudgetExceeded,
         "privacy budget exceeded by '" + label + "': " + next.str() +
             " of epsilon");
  }
  spent_ = next;
  entries_.push_back({std::move(label), share});
}

void BudgetLedger::spend_parallel(std::string label,
                                  std::span<const Fraction> shares) {
  if (shares.empty()) return;
  Fraction top = shares.front();
  for (const auto& s : shares) {
    if (top < s) top = s;
  }
  spend(std::move(label), top);
}

Fraction BudgetLedger::spent_with_prefix(const std::string& prefix) const {
  Fraction sum{0, 1};
  for (const auto& e : entries_) {
    if (e.label.rfind(prefix, 0) == 0) sum = sum + e.share;
  }
  return sum;
}

}  // namespace dpstream
