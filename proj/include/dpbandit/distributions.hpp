#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dpbandit/random.hpp"

namespace dpbandit {

/// Pareto law with density alpha * lam^alpha / x^(alpha+1) on [lam, inf).
class ParetoModel {
 public:
  ParetoModel(double alpha, double lam);

  double alpha() const { return alpha_; }
  double lam() const { return lam_; }

  friend bool operator==(const ParetoModel&, const ParetoModel&) = default;

 private:
  double alpha_;
  double lam_;
};

struct Atom {
  double value;
  double prob;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Discrete law on finitely many points. Atoms are sorted by value, atoms
/// sharing a value are merged, and zero-probability atoms are dropped, so
/// two models describing the same law compare equal.
class FiniteSupportModel {
 public:
  explicit FiniteSupportModel(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const { return atoms_; }

  /// Inverse of the cumulative distribution at u in (0, 1).
  double quantile(double u) const;

  friend bool operator==(const FiniteSupportModel& a,
                         const FiniteSupportModel& b) {
    return a.atoms_ == b.atoms_;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

using RewardModel = std::variant<ParetoModel, FiniteSupportModel>;

/// lam * (1 - u)^(-1/alpha).
double pareto_quantile(double alpha, double lam, double u);

double sample(const RewardModel& model, RandomStream& rng);
double mean(const RewardModel& model);

/// Analytic E|X|^(1+v). Throws std::domain_error for a Pareto model whose
/// (1+v)-th moment is infinite (alpha <= 1 + v).
double moment_bound(const RewardModel& model, double v);

enum class Setting { kS1, kS2, kS3 };

std::string_view to_string(Setting s);
Setting parse_setting(std::string_view name);

/// K arms with exact means, the moment order v, and the instance moment bound
/// u (tight maximum over arms). Immutable after construction.
class BanditInstance {
 public:
  BanditInstance(std::string name, std::vector<RewardModel> arms, double v);

  const std::string& name() const { return name_; }
  std::size_t size() const { return arms_.size(); }
  const RewardModel& arm(std::size_t a) const { return arms_.at(a); }
  std::span<const RewardModel> arms() const { return arms_; }
  double v() const { return v_; }
  double u() const { return u_; }
  std::span<const double> means() const { return means_; }
  std::span<const double> gaps() const { return gaps_; }
  /// Lowest-index arm with zero gap.
  std::size_t best_arm() const { return best_arm_; }

 private:
  std::string name_;
  std::vector<RewardModel> arms_;
  double v_;
  double u_ = 0.0;
  std::vector<double> means_;
  std::vector<double> gaps_;
  std::size_t best_arm_ = 0;
};

/// Five Pareto arms with alpha = 1.05 + v and lam_a = (alpha - 1) mu_a / alpha.
BanditInstance make_pareto_instance(Setting setting, double v);

/// Arm means of the Pareto settings, best arm first.
std::vector<double> setting_means(Setting setting);

/// Arm a puts mass s^(1+v)/2 on 1/s, s = (2 mu_a)^(1/v), rest on 0.
/// Means must be nonincreasing and lie in (0, 1/2].
BanditInstance make_central_hard_instance(std::span<const double> means,
                                          double v);

/// Perturbed arm of the K-arm lower-bound construction: adds mass
/// 2 delta gamma on 1/gamma, gamma = (4 delta)^(1/v), so the mean becomes
/// mu + 2 delta. Requires mu^(1+v) <= 1/6 and delta^(1+v) <= 1/12.
FiniteSupportModel make_central_shifted_arm(double mu, double delta, double v);

enum class HardFlavor { kPBar, kQBar };

/// Two-arm lower-bound instance with gamma = (5 delta)^(1/v). Arm 1 has mean
/// 2.5 delta; arm 2 has mean 1.5 delta (P_bar) or 3.5 delta (Q_bar).
BanditInstance make_two_arm_hard_instance(double delta, double v,
                                          HardFlavor flavor);

/// Line-based key=value description (name, K, v, u, per-arm parameters).
std::string to_key_value(const BanditInstance& instance);
BanditInstance instance_from_key_value(std::string_view text);

}  // namespace dpbandit
