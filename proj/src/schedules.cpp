#include "dpbandit/schedules.hpp"

#include <cmath>
#include <string>

namespace dpbandit {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_common(double eps, double beta, std::uint64_t tau,
                  std::size_t viable) {
  require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(tau >= 1, "epoch index starts at 1");
  require(viable >= 1, "viable set cannot be empty");
}

std::uint64_t epoch_length(double real_length, std::uint64_t tau) {
  const double r = std::ceil(real_length);
  if (!(r <= static_cast<double>(kMaxEpochLength))) {
    throw ScheduleOverflow("epoch " + std::to_string(tau) +
                           " needs more than 2^40 pulls per arm");
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace

MomentParams::MomentParams(double u, double v) : u_(u), v_(v) {
  require(u > 0.0 && std::isfinite(u), "moment bound u must be positive");
  require(v > 0.0 && v <= 1.0, "moment parameter v must lie in (0, 1]");
}

double ucb_trunc_threshold(const MomentParams& p, double eps, std::uint64_t n,
                           double horizon) {
  require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
  require(n >= 1, "pull count must be >= 1");
  require(horizon >= 2.0, "horizon must be >= 2");
  const double log_t = std::log(horizon);
  return std::pow(eps * p.u() * static_cast<double>(n) / std::pow(log_t, 1.5),
                  1.0 / (1.0 + p.v()));
}

double ucb_radius(const MomentParams& p, double eps, std::uint64_t n,
                  std::uint64_t t, double horizon) {
  require(eps > 0.0 && std::isfinite(eps), "eps must be positive");
  require(horizon >= 2.0, "horizon must be >= 2");
  require(n >= 1, "pull count must be >= 1");
  require(t >= 1, "round must be >= 1");
  const double v = p.v();
  const double td = static_cast<double>(t);
  const double log_t = std::log(horizon);
  const double numer =
      std::log(2.0 * td * td * td * td) * std::pow(log_t, 1.5 + 1.0 / v);
  return 18.0 * std::pow(p.u(), 1.0 / (1.0 + v)) *
         std::pow(numer / (static_cast<double>(n) * eps), v / (1.0 + v));
}

EpochSchedule dpse_schedule(const MomentParams& p, double eps, double beta,
                            std::uint64_t tau, std::size_t viable) {
  check_common(eps, beta, tau, viable);
  const double u = p.u();
  const double v = p.v();
  const double td = static_cast<double>(tau);
  const double gap = std::exp2(-td);
  const double log_term =
      std::log(4.0 * static_cast<double>(viable) * td * td / beta);
  const double ratio = (1.0 + v) / v;
  const double real_len = std::pow(u, 1.0 / v) * std::pow(24.0, ratio) *
                              log_term / (eps * std::pow(gap, ratio)) +
                          1.0;
  const auto pulls = epoch_length(real_len, tau);
  const double r = static_cast<double>(pulls);
  return {
      gap,
      pulls,
      std::pow(u * r * eps / log_term, 1.0 / (1.0 + v)),
      std::pow(u, 1.0 / (1.0 + v)) *
          std::pow(log_term / (r * eps), v / (1.0 + v)),
  };
}

EpochSchedule ldpse_schedule(const MomentParams& p, double eps, double beta,
                             std::uint64_t tau, std::size_t viable) {
  check_common(eps, beta, tau, viable);
  const double u = p.u();
  const double v = p.v();
  const double td = static_cast<double>(tau);
  const double gap = std::pow(4.0, -td);
  const double log_term =
      std::log(8.0 * static_cast<double>(viable) * td * td / beta);
  const double ratio = 2.0 * (1.0 + v) / v;
  const double real_len = std::pow(u, 2.0 / v) * std::pow(28.0, ratio) *
                              log_term /
                              (eps * eps * std::pow(gap, ratio)) +
                          log_term;
  const auto pulls = epoch_length(real_len, tau);
  const double r = static_cast<double>(pulls);
  return {
      gap,
      pulls,
      std::pow(u * std::sqrt(r) * eps / std::sqrt(log_term), 1.0 / (1.0 + v)),
      std::pow(u, 1.0 / (1.0 + v)) *
          std::pow(std::sqrt(log_term) / (r * eps), v / (1.0 + v)),
  };
}

double nonprivate_ucb_threshold(const MomentParams& p, std::uint64_t n,
                                double t) {
  require(n >= 1, "pull count must be >= 1");
  require(t >= 2.0, "round must be >= 2");
  return std::pow(p.u() * static_cast<double>(n) / std::log(t * t),
                  1.0 / (1.0 + p.v()));
}

double nonprivate_ucb_radius(const MomentParams& p, std::uint64_t n,
                             double t) {
  require(n >= 1, "pull count must be >= 1");
  const double v = p.v();
  return 4.0 * std::pow(p.u(), 1.0 / (1.0 + v)) *
         std::pow(std::log(t * t) / static_cast<double>(n), v / (1.0 + v));
}

}  // namespace dpbandit
