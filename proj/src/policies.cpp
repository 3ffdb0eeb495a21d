#include "dpbandit/policies.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dpbandit {

namespace {

double truncate(double x, double bound) {
  return std::abs(x) <= bound ? x : 0.0;
}

// Lowest index wins ties.
std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

EliminationResult eliminate(std::span<const std::size_t> viable,
                            std::vector<double> estimates, double width) {
  EliminationResult out;
  const double top = estimates[argmax(estimates)];
  for (std::size_t i = 0; i < viable.size(); ++i) {
    if (!(top - estimates[i] > width)) out.survivors.push_back(viable[i]);
  }
  out.estimates = std::move(estimates);
  return out;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kDprucb:
      return "dprucb";
    case Algorithm::kDprse:
      return "dprse";
    case Algorithm::kLdprse:
      return "ldprse";
    case Algorithm::kRucb:
      return "rucb";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "dprucb") return Algorithm::kDprucb;
  if (name == "dprse") return Algorithm::kDprse;
  if (name == "ldprse") return Algorithm::kLdprse;
  if (name == "rucb") return Algorithm::kRucb;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

Policy::Policy(PolicyConfig config) : config_(std::move(config)) {
  if (config_.arms == 0) throw std::invalid_argument("policy needs >= 1 arm");
  if (config_.horizon < config_.arms) {
    throw std::invalid_argument("horizon must be at least the number of arms");
  }
  if (!(config_.eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (config_.record_ledger) ledger_ = std::make_unique<MechanismLedger>();
}

NoiseSource Policy::make_noise(StreamPurpose purpose, std::size_t arm) const {
  NoiseSource src(RandomStream(StreamKey{config_.seed, config_.rep, arm, purpose}),
                  config_.noise_mode, ledger_.get());
  src.set_scale_fault(config_.faults.noise_scale_factor);
  return src;
}

void Policy::expect_pending(std::size_t arm) const {
  if (!pending_ || *pending_ != arm) {
    throw std::logic_error("observe() must follow select_arm() for arm " +
                           std::to_string(arm));
  }
}

// ---------------------------------------------------------------------------

DpRobustUcb::DpRobustUcb(PolicyConfig config)
    : Policy(std::move(config)), counts_(config_.arms, 0) {
  if (config_.horizon < 2) throw std::invalid_argument("horizon must be >= 2");
  trees_.reserve(config_.arms);
  for (std::size_t a = 0; a < config_.arms; ++a) {
    trees_.emplace_back(config_.horizon, config_.eps,
                        make_noise(StreamPurpose::kTreeNoise, a), a);
  }
}

double DpRobustUcb::private_mean(std::size_t arm) const {
  return trees_.at(arm).estimate() / static_cast<double>(counts_.at(arm));
}

double DpRobustUcb::index(std::size_t arm, std::uint64_t t) const {
  return private_mean(arm) +
         ucb_radius(config_.moments, config_.eps, counts_[arm], t,
                    static_cast<double>(config_.horizon));
}

std::size_t DpRobustUcb::select_arm(std::uint64_t t) {
  round_ = t;
  std::size_t choice = 0;
  if (t <= config_.arms) {
    choice = static_cast<std::size_t>(t - 1);
  } else {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < config_.arms; ++a) {
      const double idx = index(a, t);
      if (idx > best) {
        best = idx;
        choice = a;
      }
    }
  }
  pending_ = choice;
  return choice;
}

std::optional<double> DpRobustUcb::observe(std::size_t arm, double reward) {
  expect_pending(arm);
  pending_.reset();
  const auto n = ++counts_[arm];
  const double bound = ucb_trunc_threshold(config_.moments, config_.eps, n,
                                           static_cast<double>(config_.horizon));
  const double x = config_.faults.skip_truncation ? reward : truncate(reward, bound);
  trees_[arm].insert(x, bound, round_);
  return x;
}

// ---------------------------------------------------------------------------

RobustUcb::RobustUcb(PolicyConfig config)
    : Policy(std::move(config)), sums_(config_.arms, 0.0),
      counts_(config_.arms, 0) {}

std::size_t RobustUcb::select_arm(std::uint64_t t) {
  round_ = t;
  std::size_t choice = 0;
  if (t <= config_.arms) {
    choice = static_cast<std::size_t>(t - 1);
  } else {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < config_.arms; ++a) {
      const double idx =
          sums_[a] / static_cast<double>(counts_[a]) +
          nonprivate_ucb_radius(config_.moments, counts_[a],
                                static_cast<double>(t));
      if (idx > best) {
        best = idx;
        choice = a;
      }
    }
  }
  pending_ = choice;
  return choice;
}

std::optional<double> RobustUcb::observe(std::size_t arm, double reward) {
  expect_pending(arm);
  pending_.reset();
  const auto n = ++counts_[arm];
  const double t = std::max(2.0, static_cast<double>(round_));
  const double x =
      truncate(reward, nonprivate_ucb_threshold(config_.moments, n, t));
  sums_[arm] += x;
  return x;
}

// ---------------------------------------------------------------------------

EliminationResult se_eliminate_central(std::span<const std::size_t> viable,
                                       std::span<const double> epoch_sums,
                                       const EpochSchedule& schedule,
                                       double eps,
                                       std::span<NoiseSource> noise,
                                       std::uint64_t epoch) {
  const double r = static_cast<double>(schedule.pulls);
  const double scale = 2.0 * schedule.trunc_bound / (r * eps);
  std::vector<double> estimates;
  estimates.reserve(viable.size());
  for (std::size_t i = 0; i < viable.size(); ++i) {
    const auto arm = viable[i];
    estimates.push_back(epoch_sums[i] / r +
                        noise[arm].draw(scale, schedule.trunc_bound,
                                        MechanismSite::kEliminationMean, arm,
                                        epoch));
  }
  return eliminate(viable, std::move(estimates), 12.0 * schedule.radius);
}

EliminationResult se_eliminate_local(std::span<const std::size_t> viable,
                                     std::span<const double> epoch_sums,
                                     const EpochSchedule& schedule) {
  const double r = static_cast<double>(schedule.pulls);
  std::vector<double> estimates;
  estimates.reserve(viable.size());
  for (std::size_t i = 0; i < viable.size(); ++i) {
    estimates.push_back(epoch_sums[i] / r);
  }
  return eliminate(viable, std::move(estimates), 14.0 * schedule.radius);
}

SuccessiveElimination::SuccessiveElimination(PolicyConfig config, Model model)
    : Policy(std::move(config)),
      model_(model),
      sums_(config_.arms, 0.0),
      pulls_(config_.arms, 0),
      best_estimates_(config_.arms, std::numeric_limits<double>::quiet_NaN()) {
  const auto purpose = model == Model::kCentral ? StreamPurpose::kEliminationNoise
                                                : StreamPurpose::kLocalNoise;
  for (std::size_t a = 0; a < config_.arms; ++a) {
    viable_.push_back(a);
    noise_.push_back(make_noise(purpose, a));
  }
  if (config_.arms == 1) committed_ = 0;
}

std::uint64_t SuccessiveElimination::noise_draws() const {
  std::uint64_t n = 0;
  for (const auto& src : noise_) n += src.draw_count();
  return n;
}

EpochSchedule SuccessiveElimination::schedule_for(std::uint64_t tau,
                                                  std::size_t viable) const {
  const double beta = config_.effective_beta();
  return model_ == Model::kCentral
             ? dpse_schedule(config_.moments, config_.eps, beta, tau, viable)
             : ldpse_schedule(config_.moments, config_.eps, beta, tau, viable);
}

void SuccessiveElimination::start_epoch(std::uint64_t t) {
  const std::uint64_t remaining = config_.horizon - (t - 1);
  std::optional<EpochSchedule> next;
  try {
    next = schedule_for(tau_ + 1, viable_.size());
  } catch (const ScheduleOverflow&) {
    next.reset();
  }
  const bool fits =
      next && next->pulls <= remaining / static_cast<std::uint64_t>(viable_.size());
  if (!fits) {
    if (epochs_.empty()) {
      uninformed_ = true;
      return;
    }
    std::vector<double> est;
    for (auto a : viable_) est.push_back(best_estimates_[a]);
    committed_ = viable_[argmax(est)];
    return;
  }
  ++tau_;
  schedule_ = next;
  reps_done_ = 0;
  cursor_ = 0;
  for (auto a : viable_) sums_[a] = 0.0;
  epochs_.push_back({tau_, viable_, *next, t, 0, {}, {}});
}

void SuccessiveElimination::finish_epoch() {
  std::vector<double> epoch_sums;
  epoch_sums.reserve(viable_.size());
  for (auto a : viable_) epoch_sums.push_back(sums_[a]);
  auto result = model_ == Model::kCentral
                    ? se_eliminate_central(viable_, epoch_sums, *schedule_,
                                           config_.eps, noise_, tau_)
                    : se_eliminate_local(viable_, epoch_sums, *schedule_);
  for (std::size_t i = 0; i < viable_.size(); ++i) {
    best_estimates_[viable_[i]] = result.estimates[i];
  }
  auto& rec = epochs_.back();
  rec.last_round = round_;
  rec.estimates = result.estimates;
  rec.survivors = result.survivors;
  assert(!result.survivors.empty());
  viable_ = std::move(result.survivors);
  schedule_.reset();
  if (viable_.size() == 1) committed_ = viable_.front();
}

std::size_t SuccessiveElimination::select_arm(std::uint64_t t) {
  round_ = t;
  if (!committed_ && !schedule_ && !uninformed_) start_epoch(t);
  const std::size_t choice = committed_ ? *committed_ : viable_[cursor_];
  pending_ = choice;
  return choice;
}

std::optional<double> SuccessiveElimination::observe(std::size_t arm,
                                                     double reward) {
  expect_pending(arm);
  pending_.reset();
  ++pulls_[arm];
  if (committed_) return std::nullopt;
  if (uninformed_) {
    cursor_ = (cursor_ + 1) % viable_.size();
    return std::nullopt;
  }

  const double bound = schedule_->trunc_bound;
  const double x = config_.faults.skip_truncation ? reward : truncate(reward, bound);
  const auto site = model_ == Model::kCentral ? MechanismSite::kEliminationMean
                                              : MechanismSite::kLocalReward;
  if (ledger_) {
    ledger_->inputs.push_back({site, arm, arm, tau_, round_, x, bound});
  }
  double stored = x;
  if (model_ == Model::kLocal) {
    stored += noise_[arm].draw(2.0 * bound / config_.eps, bound, site, arm, tau_);
  }
  sums_[arm] += stored;

  if (++cursor_ == viable_.size()) {
    cursor_ = 0;
    if (++reps_done_ == schedule_->pulls) finish_epoch();
  }
  return x;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(Algorithm algorithm, PolicyConfig config) {
  switch (algorithm) {
    case Algorithm::kDprucb:
      return std::make_unique<DpRobustUcb>(std::move(config));
    case Algorithm::kDprse:
      return std::make_unique<SuccessiveElimination>(
          std::move(config), SuccessiveElimination::Model::kCentral);
    case Algorithm::kLdprse:
      return std::make_unique<SuccessiveElimination>(
          std::move(config), SuccessiveElimination::Model::kLocal);
    case Algorithm::kRucb:
      return std::make_unique<RobustUcb>(std::move(config));
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace dpbandit
