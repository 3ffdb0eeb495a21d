#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpbandit/laplace.hpp"

namespace dpbandit {

/// A value handed to a mechanism exceeded its declared magnitude bound.
class SensitivityViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Private continual sum over a stream whose per-item magnitude bound B_t may
/// grow over time.
///
/// Item t finalizes the p-sum at level i = (index of the lowest set bit of t),
/// which absorbs every lower level plus the new item and covers the last 2^i
/// items. The finalized p-sum is perturbed once with Laplace noise of scale
/// 2 B_t / eps', eps' = eps / ln(T), and the released running sum is the sum
/// of the noisy p-sums at the set bits of t.
class AdaptiveTree {
 public:
  AdaptiveTree(std::uint64_t horizon, double eps, NoiseSource noise,
               std::size_t arm = 0);

  /// Inserts the next item and returns the noisy running sum.
  ///
  /// Throws SensitivityViolation if |value| > bound, std::invalid_argument if
  /// bound is smaller than an earlier bound, and std::out_of_range past the
  /// horizon. `round` only tags the ledger entry.
  double insert(double value, double bound, std::uint64_t round = 0);

  std::uint64_t horizon() const { return horizon_; }
  double eps() const { return eps_; }
  double eps_prime() const { return eps_prime_; }
  std::uint64_t count() const { return t_; }

  /// Noisy running sum after the latest insertion (0 before any).
  double estimate() const { return estimate_; }

  std::size_t levels() const { return psums_.size(); }
  double psum(std::size_t level) const { return psums_.at(level); }
  double noisy_psum(std::size_t level) const { return noisy_psums_.at(level); }

  /// Item ranges [first, last] (1-based) covered by the finalized p-sums, from
  /// the highest level down. Their union is exactly {1..count()}.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> covered_ranges() const;

  const NoiseSource& noise() const { return noise_; }
  NoiseSource& noise() { return noise_; }

 private:
  std::uint64_t horizon_;
  double eps_;
  double eps_prime_;
  std::size_t arm_;
  NoiseSource noise_;
  std::uint64_t t_ = 0;
  double last_bound_ = 0.0;
  double estimate_ = 0.0;
  std::vector<double> psums_;
  std::vector<double> noisy_psums_;
};

/// High-probability envelope (2 B_t / eps) ln^1.5(T) ln(1/delta) on
/// |S_hat(t) - S(t)|.
double tree_noise_bound(double bound, double eps, double horizon,
                        double delta);

}  // namespace dpbandit
