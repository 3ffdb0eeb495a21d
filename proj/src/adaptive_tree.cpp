#include "dpbandit/adaptive_tree.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace dpbandit {

AdaptiveTree::AdaptiveTree(std::uint64_t horizon, double eps, NoiseSource noise,
                           std::size_t arm)
    : horizon_(horizon), eps_(eps), arm_(arm), noise_(std::move(noise)) {
  if (horizon < 2) throw std::invalid_argument("tree horizon must be >= 2");
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("privacy budget must be positive");
  }
  eps_prime_ = eps / std::log(static_cast<double>(horizon));
  const auto levels = static_cast<std::size_t>(std::bit_width(horizon));
  psums_.assign(levels, 0.0);
  noisy_psums_.assign(levels, 0.0);
}

double AdaptiveTree::insert(double value, double bound, std::uint64_t round) {
  if (t_ >= horizon_) {
    throw std::out_of_range("tree insertion past horizon " +
                            std::to_string(horizon_));
  }
  if (!(std::abs(value) <= bound)) {
    throw SensitivityViolation("tree item " + std::to_string(value) +
                               " exceeds bound " + std::to_string(bound));
  }
  if (bound < last_bound_) {
    throw std::invalid_argument("tree bound decreased from " +
                                std::to_string(last_bound_) + " to " +
                                std::to_string(bound));
  }
  last_bound_ = bound;
  ++t_;
  if (auto* ledger = noise_.ledger()) {
    ledger->inputs.push_back(
        {MechanismSite::kTreePsum, arm_, arm_, t_, round, value, bound});
  }

  const auto level = static_cast<std::size_t>(std::countr_zero(t_));
  double merged = value;
  for (std::size_t j = 0; j < level; ++j) {
    merged += psums_[j];
    psums_[j] = 0.0;
    noisy_psums_[j] = 0.0;
  }
  psums_[level] = merged;
  const double scale = 2.0 * bound / eps_prime_;
  noisy_psums_[level] =
      merged + noise_.draw(scale, bound, MechanismSite::kTreePsum, arm_, t_);

  double sum = 0.0;
  for (std::size_t j = levels(); j-- > 0;) {
    if ((t_ >> j) & 1u) sum += noisy_psums_[j];
  }
  estimate_ = sum;
  return estimate_;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>>
AdaptiveTree::covered_ranges() const {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  std::uint64_t first = 1;
  for (std::size_t j = levels(); j-- > 0;) {
    if ((t_ >> j) & 1u) {
      const std::uint64_t len = std::uint64_t{1} << j;
      out.emplace_back(first, first + len - 1);
      first += len;
    }
  }
  return out;
}

double tree_noise_bound(double bound, double eps, double horizon,
                        double delta) {
  const double log_t = std::log(horizon);
  return 2.0 * bound / eps * std::pow(log_t, 1.5) * std::log(1.0 / delta);
}

}  // namespace dpbandit
