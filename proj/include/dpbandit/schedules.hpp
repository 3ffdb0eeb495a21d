#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace dpbandit {

/// E|X|^(1+v) <= u for every arm.
class MomentParams {
 public:
  MomentParams(double u, double v);
  double u() const { return u_; }
  double v() const { return v_; }

 private:
  double u_;
  double v_;
};

/// Per-epoch constants of successive elimination.
struct EpochSchedule {
  double target_gap;     // Delta_tau
  std::uint64_t pulls;   // R_tau, pulls per viable arm
  double trunc_bound;    // B_tau
  double radius;         // err_tau
};

/// An epoch length that does not fit kMaxEpochLength.
class ScheduleOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Largest representable R_tau. Anything longer than 2^40 pulls per arm is
/// far beyond any simulated horizon.
inline constexpr std::uint64_t kMaxEpochLength = std::uint64_t{1} << 40;

/// (eps u n / ln^1.5 T)^(1/(1+v)).
double ucb_trunc_threshold(const MomentParams& p, double eps, std::uint64_t n,
                           double horizon);

/// 18 u^(1/(1+v)) (ln(2 t^4) ln^(1.5+1/v)(T) / (n eps))^(v/(1+v)).
double ucb_radius(const MomentParams& p, double eps, std::uint64_t n,
                  std::uint64_t t, double horizon);

/// Epoch tau of central successive elimination with `viable` arms left:
/// Delta = 2^-tau, L = ln(4 |S| tau^2 / beta),
/// R = ceil(u^(1/v) 24^((1+v)/v) L / (eps Delta^((1+v)/v)) + 1),
/// B = (u R eps / L)^(1/(1+v)), err = u^(1/(1+v)) (L / (R eps))^(v/(1+v)).
/// Throws ScheduleOverflow when R exceeds kMaxEpochLength.
EpochSchedule dpse_schedule(const MomentParams& p, double eps, double beta,
                            std::uint64_t tau, std::size_t viable);

/// Epoch tau of local successive elimination:
/// Delta = 4^-tau, L = ln(8 |S| tau^2 / beta),
/// R = ceil(u^(2/v) 28^(2(1+v)/v) L / (eps^2 Delta^(2(1+v)/v)) + L),
/// B = (u sqrt(R) eps / sqrt(L))^(1/(1+v)),
/// err = u^(1/(1+v)) (sqrt(L) / (R eps))^(v/(1+v)).
EpochSchedule ldpse_schedule(const MomentParams& p, double eps, double beta,
                             std::uint64_t tau, std::size_t viable);

/// Non-private robust UCB truncation level (u n / ln(t^2))^(1/(1+v)).
double nonprivate_ucb_threshold(const MomentParams& p, std::uint64_t n,
                                double t);

/// Non-private robust UCB radius 4 u^(1/(1+v)) (ln(t^2) / n)^(v/(1+v)).
double nonprivate_ucb_radius(const MomentParams& p, std::uint64_t n,
                             double t);

}  // namespace dpbandit
