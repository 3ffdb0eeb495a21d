#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpbandit/distributions.hpp"
#include "dpbandit/laplace.hpp"
#include "dpbandit/policies.hpp"

namespace dpbandit {

enum class SettingKind { kS1, kS2, kS3, kTwoArmHard, kKArmHard };

std::string_view to_string(SettingKind s);
SettingKind parse_setting_kind(std::string_view name);

/// Builds the bandit instance for a setting. The hard settings use
/// gap 0.1 (two-arm, P_bar flavor) and means {0.5, 0.4, 0.3, 0.2, 0.1}.
BanditInstance make_instance(SettingKind setting, double v);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::kDprse;
  SettingKind setting = SettingKind::kS1;
  double v = 0.9;
  double eps = 1.0;
  std::uint64_t horizon = 100000;
  std::uint64_t repetitions = 1;
  std::uint64_t base_seed = 0;
  /// Record every `checkpoint_stride` rounds; 0 selects geometric spacing.
  std::uint64_t checkpoint_stride = 0;
  std::size_t geometric_checkpoints = 200;
  /// Successive-elimination confidence; 0 selects 1/horizon.
  double beta = 0.0;
  NoiseMode noise_mode = NoiseMode::kLaplace;
  /// Worker threads for repetitions; 0 uses the hardware concurrency.
  unsigned threads = 1;
  std::string output_path;

  /// Throws std::invalid_argument on a config that cannot run on `arms`.
  void validate(std::size_t arms) const;
};

/// Rounds at which cumulative regret is recorded: 0, the stride or geometric
/// grid, and the horizon, sorted and deduplicated.
std::vector<std::uint64_t> checkpoint_rounds(const ExperimentConfig& config);

/// Cumulative pseudo-regret sum_a gap_a N_a(t) at each checkpoint.
struct RegretTrace {
  std::vector<std::uint64_t> rounds;
  std::vector<double> cum_regret;
  std::vector<std::uint64_t> pull_counts;  // N_a(T)
};

/// One row of the versioned policy transcript.
struct TranscriptRow {
  std::uint64_t round;
  std::size_t arm;
  double reward;
  std::optional<double> truncated;
  bool committed;
};

inline constexpr std::string_view kTranscriptSchema = "dpbandit-transcript/1";

void write_transcript(std::ostream& out, std::span<const TranscriptRow> rows);

/// Runs repetition `rep`. Policy and reward streams are keyed by
/// (base_seed, rep, arm, purpose), so the result does not depend on which
/// worker runs it. Appends to `transcript` when given.
RegretTrace run_single(const ExperimentConfig& config, std::uint64_t rep,
                       std::vector<TranscriptRow>* transcript = nullptr);

/// Same as run_single but on a prepared instance and policy; the policy's
/// config must match the instance.
RegretTrace run_policy(Policy& policy, const BanditInstance& instance,
                       std::uint64_t horizon, std::uint64_t base_seed,
                       std::uint64_t rep, std::span<const std::uint64_t> rounds,
                       std::vector<TranscriptRow>* transcript = nullptr);

PolicyConfig policy_config(const ExperimentConfig& config,
                           const BanditInstance& instance, std::uint64_t rep);

struct SummaryStats {
  std::vector<std::uint64_t> rounds;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation, 0 for one rep
  std::size_t n_reps = 0;
};

SummaryStats summarize(std::span<const RegretTrace> traces);

struct ExperimentResult {
  std::vector<RegretTrace> traces;
  SummaryStats summary;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes <path>.runs.csv, <path>.summary.csv and <path>.meta.
void write_csv(const ExperimentResult& result, const ExperimentConfig& config,
               const std::string& path);

struct RunRow {
  std::string algo;
  std::string setting;
  double epsilon;
  double v;
  std::uint64_t rep;
  std::uint64_t t;
  double cum_regret;
};

std::vector<RunRow> read_runs_csv(std::istream& in);

inline constexpr std::string_view kRunsHeader =
    "algo,setting,epsilon,v,rep,t,cum_regret";
inline constexpr std::string_view kSummaryHeader =
    "algo,setting,epsilon,v,t,mean,std,n_reps";

}  // namespace dpbandit
