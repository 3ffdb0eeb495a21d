#include "dpbandit/laplace.hpp"

#include <cmath>
#include <stdexcept>

namespace dpbandit {

LaplaceScale::LaplaceScale(double b) : b_(b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("Laplace scale must be positive and finite");
  }
}

double laplace_quantile(double u, LaplaceScale scale) {
  const double b = scale.value();
  if (u < 0.5) return b * std::log(2.0 * u);
  return -b * std::log(2.0 * (1.0 - u));
}

double lap_sample(LaplaceScale scale, RandomStream& rng) {
  return laplace_quantile(rng.uniform_open(), scale);
}

const char* to_string(MechanismSite site) {
  switch (site) {
    case MechanismSite::kTreePsum:
      return "tree-psum";
    case MechanismSite::kEliminationMean:
      return "elimination-mean";
    case MechanismSite::kLocalReward:
      return "local-reward";
  }
  return "?";
}

NoiseSource::NoiseSource(RandomStream rng, NoiseMode mode,
                         MechanismLedger* ledger)
    : rng_(std::move(rng)), mode_(mode), ledger_(ledger) {
#ifndef DPBANDIT_TEST_HOOKS
  if (mode != NoiseMode::kLaplace) {
    throw std::logic_error("noise hooks are disabled in this build");
  }
#endif
}

double NoiseSource::draw(double scale, double bound, MechanismSite site,
                         std::size_t arm, std::uint64_t index) {
  const double used = scale * scale_fault_;
  ++draws_;
  if (ledger_ != nullptr) {
    ledger_->draws.push_back({site, arm, index, bound, used});
  }
  switch (mode_) {
    case NoiseMode::kZero:
      return 0.0;
    case NoiseMode::kUnit:
      return 1.0;
    case NoiseMode::kLaplace:
      break;
  }
  return lap_sample(LaplaceScale(used), rng_);
}

}  // namespace dpbandit
