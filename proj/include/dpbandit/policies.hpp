#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dpbandit/adaptive_tree.hpp"
#include "dpbandit/laplace.hpp"
#include "dpbandit/schedules.hpp"

namespace dpbandit {

enum class Algorithm { kDprucb, kDprse, kLdprse, kRucb };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Test-only faults for the privacy audit.
struct FaultInjection {
  double noise_scale_factor = 1.0;
  bool skip_truncation = false;
};

struct PolicyConfig {
  MomentParams moments{1.0, 1.0};
  double eps = 1.0;
  std::uint64_t horizon = 2;
  /// Confidence of successive elimination; 0 selects 1/horizon.
  double beta = 0.0;
  std::size_t arms = 1;
  std::uint64_t seed = 0;
  std::uint64_t rep = 0;
  NoiseMode noise_mode = NoiseMode::kLaplace;
  bool record_ledger = false;
  FaultInjection faults{};

  double effective_beta() const {
    return beta > 0.0 ? beta : 1.0 / static_cast<double>(horizon);
  }
};

/// Common contract: select_arm(t) for t = 1, 2, ... followed by exactly one
/// observe() of the selected arm.
class Policy {
 public:
  explicit Policy(PolicyConfig config);
  virtual ~Policy() = default;
  Policy(const Policy&) = delete;
  Policy& operator=(const Policy&) = delete;

  virtual Algorithm algorithm() const = 0;
  virtual std::size_t select_arm(std::uint64_t t) = 0;

  /// Feeds the reward of the arm returned by the last select_arm(). Returns
  /// the truncated value handed to a mechanism or estimator, or nullopt when
  /// the reward is not used.
  virtual std::optional<double> observe(std::size_t arm, double reward) = 0;

  /// Arm the policy has permanently settled on, if any.
  virtual std::optional<std::size_t> committed() const { return std::nullopt; }

  const PolicyConfig& config() const { return config_; }
  /// Null unless the config asked for a ledger.
  const MechanismLedger* ledger() const { return ledger_.get(); }
  MechanismLedger* mutable_ledger() { return ledger_.get(); }

 protected:
  NoiseSource make_noise(StreamPurpose purpose, std::size_t arm) const;
  void expect_pending(std::size_t arm) const;

  PolicyConfig config_;
  std::unique_ptr<MechanismLedger> ledger_;
  std::uint64_t round_ = 0;
  std::optional<std::size_t> pending_;
};

/// DP robust UCB: each arm streams truncated rewards into its own adaptive
/// tree and the index is tree_sum / n + ucb_radius.
class DpRobustUcb final : public Policy {
 public:
  explicit DpRobustUcb(PolicyConfig config);

  Algorithm algorithm() const override { return Algorithm::kDprucb; }
  std::size_t select_arm(std::uint64_t t) override;
  std::optional<double> observe(std::size_t arm, double reward) override;

  std::uint64_t pulls(std::size_t arm) const { return counts_.at(arm); }
  /// Private mean estimate tree_sum / n (arm must have been pulled).
  double private_mean(std::size_t arm) const;
  double index(std::size_t arm, std::uint64_t t) const;
  const AdaptiveTree& tree(std::size_t arm) const { return trees_.at(arm); }

 private:
  std::vector<AdaptiveTree> trees_;
  std::vector<std::uint64_t> counts_;
};

/// Non-private robust UCB with truncated empirical means. Each reward is
/// truncated once, at the level for its pull count and round.
class RobustUcb final : public Policy {
 public:
  explicit RobustUcb(PolicyConfig config);

  Algorithm algorithm() const override { return Algorithm::kRucb; }
  std::size_t select_arm(std::uint64_t t) override;
  std::optional<double> observe(std::size_t arm, double reward) override;

  std::uint64_t pulls(std::size_t arm) const { return counts_.at(arm); }

 private:
  std::vector<double> sums_;
  std::vector<std::uint64_t> counts_;
};

struct EliminationResult {
  std::vector<double> estimates;  // aligned with the viable set
  std::vector<std::size_t> survivors;
};

/// Central elimination: mean = sum / R plus Laplace(2 B / (R eps)) per arm,
/// drop arms more than 12 err below the best noisy mean. `noise` is indexed
/// by arm; `epoch` tags the ledger.
EliminationResult se_eliminate_central(std::span<const std::size_t> viable,
                                       std::span<const double> epoch_sums,
                                       const EpochSchedule& schedule,
                                       double eps,
                                       std::span<NoiseSource> noise,
                                       std::uint64_t epoch = 0);

/// Local elimination: mean of the already-perturbed rewards, drop arms more
/// than 14 err below the best. Draws no noise.
EliminationResult se_eliminate_local(std::span<const std::size_t> viable,
                                     std::span<const double> epoch_sums,
                                     const EpochSchedule& schedule);

struct EpochRecord {
  std::uint64_t tau;
  std::vector<std::size_t> viable;
  EpochSchedule schedule;
  std::uint64_t first_round;
  std::uint64_t last_round = 0;
  std::vector<double> estimates;
  std::vector<std::size_t> survivors;
};

/// Robust successive elimination, central (Laplace on epoch means) or local
/// (Laplace on every truncated reward).
///
/// Epochs run round-robin over the viable set in index order. An epoch only
/// starts when all of its |S| R_tau pulls fit in the remaining horizon;
/// otherwise the policy commits to the best viable arm of the last completed
/// epoch, or keeps cycling the viable set without using rewards when no epoch
/// has completed yet.
class SuccessiveElimination final : public Policy {
 public:
  enum class Model { kCentral, kLocal };

  SuccessiveElimination(PolicyConfig config, Model model);

  Algorithm algorithm() const override {
    return model_ == Model::kCentral ? Algorithm::kDprse : Algorithm::kLdprse;
  }
  std::size_t select_arm(std::uint64_t t) override;
  std::optional<double> observe(std::size_t arm, double reward) override;
  std::optional<std::size_t> committed() const override { return committed_; }

  Model model() const { return model_; }
  std::span<const std::size_t> viable() const { return viable_; }
  std::span<const EpochRecord> epochs() const { return epochs_; }
  std::uint64_t pulls(std::size_t arm) const { return pulls_.at(arm); }
  bool uninformed() const { return uninformed_; }
  std::uint64_t noise_draws() const;

  EpochSchedule schedule_for(std::uint64_t tau, std::size_t viable) const;

 private:
  void start_epoch(std::uint64_t t);
  void finish_epoch();

  Model model_;
  std::vector<std::size_t> viable_;
  std::vector<NoiseSource> noise_;
  std::vector<double> sums_;
  std::vector<std::uint64_t> pulls_;
  std::vector<double> best_estimates_;  // per arm, last completed epoch
  std::vector<EpochRecord> epochs_;
  std::optional<EpochSchedule> schedule_;
  std::uint64_t tau_ = 0;
  std::uint64_t reps_done_ = 0;  // r: completed round-robin passes
  std::size_t cursor_ = 0;
  bool uninformed_ = false;
  std::optional<std::size_t> committed_;
};

std::unique_ptr<Policy> make_policy(Algorithm algorithm, PolicyConfig config);

}  // namespace dpbandit
