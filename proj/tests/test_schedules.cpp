#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "dpbandit/schedules.hpp"

using namespace dpbandit;

TEST_CASE("moment params validation") {
  CHECK_NOTHROW(MomentParams(1.0, 1.0));
  CHECK_THROWS_AS(MomentParams(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(MomentParams(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MomentParams(1.0, 1.01), std::invalid_argument);
}

TEST_CASE("ucb_trunc_threshold") {
  const MomentParams p(1.0, 1.0);
  CHECK(ucb_trunc_threshold(p, 1.0, 100, 1024.0) ==
        doctest::Approx(2.3408894492973724).epsilon(1e-14));

  for (double v : {0.3, 0.9, 1.0}) {
    const MomentParams q(2.5, v);
    const double base = ucb_trunc_threshold(q, 0.7, 1000, 5000.0);
    const double scaled = std::pow(2.0, 1.0 + v) * 1000.0;
    // Homogeneity: n scaled by 2^(1+v) doubles the threshold.
    CHECK(std::pow(0.7 * 2.5 * scaled / std::pow(std::log(5000.0), 1.5),
                   1.0 / (1.0 + v)) == doctest::Approx(2.0 * base).epsilon(1e-13));
    CHECK(ucb_trunc_threshold(q, 0.7, 8000, 5000.0) >
          ucb_trunc_threshold(q, 0.7, 7999, 5000.0));
  }
  CHECK(ucb_trunc_threshold(p, 1e-300, 1, 1024.0) < 1e-140);
  CHECK_THROWS_AS(ucb_trunc_threshold(p, 0.0, 1, 1024.0), std::invalid_argument);
  CHECK_THROWS_AS(ucb_trunc_threshold(p, 1.0, 0, 1024.0), std::invalid_argument);
  CHECK_THROWS_AS(ucb_trunc_threshold(p, 1.0, 1, 1.0), std::invalid_argument);
}

TEST_CASE("ucb_radius") {
  const MomentParams p(1.0, 1.0);
  CHECK(ucb_radius(p, 1.0, 1000, 10, 1024.0) ==
        doctest::Approx(20.146444485490143).epsilon(1e-13));
  CHECK(ucb_radius(p, 1.0, 1000, 10, 1024.0) == doctest::Approx(20.14).epsilon(1e-3));

  for (double v : {0.4, 0.9, 1.0}) {
    const MomentParams q(3.0, v);
    double prev = INFINITY;
    for (std::uint64_t n = 1; n <= 4096; n *= 2) {
      const double r = ucb_radius(q, 0.5, n, 100, 1e5);
      CHECK(r < prev);
      prev = r;
    }
  }
  // Radius halves when n grows by 2^((1+v)/v); v = 1 gives a factor of 4.
  CHECK(ucb_radius(p, 1.0, 400, 50, 1e4) ==
        doctest::Approx(0.5 * ucb_radius(p, 1.0, 100, 50, 1e4)).epsilon(1e-14));
  const MomentParams half(1.0, 0.5);
  CHECK(ucb_radius(half, 1.0, 800, 50, 1e4) ==
        doctest::Approx(0.5 * ucb_radius(half, 1.0, 100, 50, 1e4)).epsilon(1e-13));
}

TEST_CASE("dpse_schedule: documented epoch") {
  const MomentParams p(1.0, 1.0);
  const auto e1 = dpse_schedule(p, 1.0, 0.1, 1, 5);
  CHECK(e1.target_gap == 0.5);
  CHECK(e1.pulls == 12209);
  CHECK(e1.radius == doctest::Approx(0.020831902656297016).epsilon(1e-13));
  CHECK(12.0 * e1.radius < e1.target_gap / 2.0);
  CHECK(dpse_schedule(p, 1.0, 0.1, 3, 5).target_gap == 0.125);

  // B and err balance: B^(1+v) = u R eps / L and err = u / B^v.
  const double l = std::log(200.0);
  CHECK(std::pow(e1.trunc_bound, 2.0) ==
        doctest::Approx(12209.0 / l).epsilon(1e-12));
  CHECK(e1.radius == doctest::Approx(1.0 / e1.trunc_bound).epsilon(1e-12));
}

TEST_CASE("ldpse_schedule: documented epoch") {
  const MomentParams p(1.0, 1.0);
  const auto e1 = ldpse_schedule(p, 1.0, 0.1, 1, 5);
  CHECK(e1.target_gap == 0.25);
  CHECK(e1.pulls == 942768552);
  CHECK(14.0 * e1.radius == doctest::Approx(0.0007133599784063449).epsilon(1e-12));
  CHECK(14.0 * e1.radius <= e1.target_gap / 2.0);
  CHECK(static_cast<double>(e1.pulls) >= std::log(400.0));
  CHECK(ldpse_schedule(p, 1.0, 0.1, 2, 5).target_gap == 1.0 / 16.0);
}

TEST_CASE("elimination schedules: width inequality and balance across a grid") {
  for (double u : {0.1, 1.0, 8.0}) {
    for (double v : {0.25, 0.5, 0.9, 1.0}) {
      for (double eps : {0.1, 1.0, 5.0}) {
        for (double beta : {1e-5, 0.1}) {
          for (std::size_t s : {std::size_t{1}, std::size_t{5}, std::size_t{20}}) {
            const MomentParams p(u, v);
            for (std::uint64_t tau = 1; tau <= 6; ++tau) {
              CAPTURE(u);
              CAPTURE(v);
              CAPTURE(eps);
              CAPTURE(tau);
              try {
                const auto c = dpse_schedule(p, eps, beta, tau, s);
                CHECK(12.0 * c.radius < c.target_gap / 2.0);
                CHECK(c.radius == doctest::Approx(u / std::pow(c.trunc_bound, v))
                                      .epsilon(1e-9));
              } catch (const ScheduleOverflow&) {
              }
              try {
                const auto l = ldpse_schedule(p, eps, beta, tau, s);
                CHECK(14.0 * l.radius <= l.target_gap / 2.0);
                const double ln = std::log(8.0 * s * tau * tau / beta);
                CHECK(static_cast<double>(l.pulls) >= ln);
                CHECK(l.radius ==
                      doctest::Approx(std::pow(u, 1.0 / (1.0 + v)) *
                                      std::pow(std::sqrt(ln) / (double(l.pulls) * eps),
                                               v / (1.0 + v)))
                          .epsilon(1e-9));
              } catch (const ScheduleOverflow&) {
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("elimination schedules: pure and overflow-checked") {
  const MomentParams p(1.0, 0.5);
  const auto a = dpse_schedule(p, 1.0, 0.01, 2, 3);
  const auto b = dpse_schedule(p, 1.0, 0.01, 2, 3);
  CHECK(a.pulls == b.pulls);
  CHECK(a.trunc_bound == b.trunc_bound);
  CHECK(a.radius == b.radius);
  CHECK_THROWS_AS(dpse_schedule(p, 1.0, 0.01, 40, 3), ScheduleOverflow);
  CHECK_THROWS_AS(ldpse_schedule(p, 1.0, 0.01, 3, 3), ScheduleOverflow);
  CHECK_THROWS_AS(dpse_schedule(p, 1.0, 0.01, 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(dpse_schedule(p, 1.0, 1.0, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(ldpse_schedule(p, 1.0, 0.1, 1, 0), std::invalid_argument);
}

TEST_CASE("nonprivate robust UCB") {
  const MomentParams p(1.0, 1.0);
  CHECK(nonprivate_ucb_threshold(p, 1, std::exp(1.0)) ==
        doctest::Approx(0.7071067811865476).epsilon(1e-14));
  for (double v : {0.5, 1.0}) {
    const double c = 3.0;
    CHECK(nonprivate_ucb_threshold(MomentParams(c, v), 10, 100.0) ==
          doctest::Approx(std::pow(c, 1.0 / (1.0 + v)) *
                          nonprivate_ucb_threshold(MomentParams(1.0, v), 10, 100.0))
              .epsilon(1e-14));
  }
  CHECK(nonprivate_ucb_radius(p, 4, 10.0) ==
        doctest::Approx(4.0 * std::sqrt(std::log(100.0) / 4.0)).epsilon(1e-14));
  CHECK_THROWS_AS(nonprivate_ucb_threshold(p, 1, 1.5), std::invalid_argument);
}
