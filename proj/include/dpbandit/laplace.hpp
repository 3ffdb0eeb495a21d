#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dpbandit/random.hpp"

namespace dpbandit {

/// Scale b of a Laplace law, density exp(-|x|/b) / (2b). Always positive and
/// finite.
class LaplaceScale {
 public:
  explicit LaplaceScale(double b);
  double value() const { return b_; }

 private:
  double b_;
};

/// Inverse CDF of Laplace(0, b) at u in (0, 1).
double laplace_quantile(double u, LaplaceScale scale);

double lap_sample(LaplaceScale scale, RandomStream& rng);

/// Where a mechanism consumed data or drew noise.
enum class MechanismSite : std::uint8_t {
  kTreePsum,         // p-sum finalization in the adaptive tree
  kEliminationMean,  // central successive elimination, per-epoch arm mean
  kLocalReward,      // local successive elimination, per reward
};

const char* to_string(MechanismSite site);

/// One value handed to a mechanism. `index` is the tree insertion count or
/// the epoch, `round` the global round the reward was collected in.
struct MechanismInput {
  MechanismSite site;
  std::size_t mechanism_arm;
  std::size_t source_arm;
  std::uint64_t index;
  std::uint64_t round;
  double value;
  double bound;
};

/// One Laplace draw. `bound` is the magnitude bound that calibrated it and
/// `scale` the scale actually used.
struct NoiseDraw {
  MechanismSite site;
  std::size_t arm;
  std::uint64_t index;
  double bound;
  double scale;
};

/// Append-only record of everything that touched a mechanism during a run.
struct MechanismLedger {
  std::vector<MechanismInput> inputs;
  std::vector<NoiseDraw> draws;
};

enum class NoiseMode : std::uint8_t {
  kLaplace,
  kZero,  // test hook: every draw returns 0
  kUnit,  // test hook: every draw returns 1
};

/// Per-mechanism source of Laplace noise. Owns its random stream and,
/// optionally, reports every draw to a ledger owned by the caller.
class NoiseSource {
 public:
  NoiseSource(RandomStream rng, NoiseMode mode = NoiseMode::kLaplace,
              MechanismLedger* ledger = nullptr);

  /// Draws Laplace(scale) noise calibrated for `bound`, tagging the ledger
  /// entry with (site, arm, index).
  double draw(double scale, double bound, MechanismSite site, std::size_t arm,
              std::uint64_t index);

  NoiseMode mode() const { return mode_; }
  std::uint64_t draw_count() const { return draws_; }
  MechanismLedger* ledger() const { return ledger_; }

  /// Fault injection for audit tests: multiplies every scale actually used.
  void set_scale_fault(double factor) { scale_fault_ = factor; }

 private:
  RandomStream rng_;
  NoiseMode mode_;
  MechanismLedger* ledger_;
  std::uint64_t draws_ = 0;
  double scale_fault_ = 1.0;
};

}  // namespace dpbandit
