#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dlog/analysis.hpp"
#include "dlog/integrator.hpp"
#include "dlog/scenarios.hpp"

using namespace dlog;

namespace {

SolverConfig config(double t_end) {
  SolverConfig cfg;
  cfg.t_end = t_end;
  return cfg;
}

}  // namespace

TEST_CASE("exponential solution is reproduced to 1e-8 over [0,5]") {
  // the exponential solution is a separatrix: perturbations grow like
  // exp(integral of r c e^{r(t-1)}), so direct tracking is possible only
  // while c e^{-r} (e^{rT} - 1) stays moderate; (r, c) = (0.5, 1) gives
  // 6.8, well inside the double-precision budget
  const double r = 0.5;
  SolverConfig cfg = config(5.0);
  cfg.rtol = 1e-10;
  cfg.atol = 1e-13;
  const Params p(r, std::exp(-r));
  const HistoryFn phi = HistoryFn::exp_profile(1.0, r, {});
  const Trajectory tr = integrate(p, phi, cfg);
  REQUIRE(tr.status() == TrajStatus::completed);
  double worst = 0.0;
  for (double t = 0.0; t <= 5.0; t += 0.01) {
    worst = std::max(worst, std::abs(tr.x_at(t) / std::exp(r * t) - 1.0));
  }
  CHECK(worst < 1e-8);
  CHECK(tr.x_at(2.5) == doctest::Approx(std::exp(r * 2.5)).epsilon(1e-8));
}

TEST_CASE("steep exponential loci defeat direct tracking at desk tolerances") {
  // for (r, c) = (1, 1) the perturbation amplification over [0,5] is
  // e^{54}; any double-precision run must leave the separatrix and
  // either blow up or collapse before t = 5. Pin that behavior so a
  // regression toward silent wrong answers is caught.
  const double r = 1.0;
  const Params p(r, std::exp(-r));
  const HistoryFn phi = HistoryFn::exp_profile(1.0, r, {});
  const Trajectory tr = integrate(p, phi, config(5.0));
  if (tr.status() == TrajStatus::completed) {
    double worst = 0.0;
    for (double t = 0.0; t <= 5.0; t += 0.01) {
      worst = std::max(worst, std::abs(tr.x_at(t) / std::exp(t) - 1.0));
    }
    CHECK(worst > 1e-4);
  } else {
    CHECK(tr.status() == TrajStatus::blown_up);
    CHECK(tr.end_time() > 3.5);  // departure happens late, not from gross error
  }
}

TEST_CASE("constant equilibrium history stays at the equilibrium") {
  const Params p(1.0, 0.0);
  const Trajectory tr = integrate(p, HistoryFn::constant(1.0), config(10.0));
  REQUIRE(tr.status() == TrajStatus::completed);
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    CHECK(tr.x_at(t) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("blow-up seed blows up at 1/h with the closed-form profile") {
  const Params p(1.0, 1.0);
  const Trajectory tr = integrate(p, make_blowup_seed(p, 4.0), config(1.0));
  REQUIRE(tr.status() == TrajStatus::blown_up);
  const BlowUpReport& report = *tr.blowup();
  CHECK(report.t_blowup == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(report.bracket_width <= 1e-9);

  // closed form x = 1/(1/q - t) with q = 4, while the delayed term is 1
  for (double t = 0.0; t < 0.25 - 1e-7; t += 0.01) {
    const double exact = 1.0 / (0.25 - t);
    CHECK(tr.x_at(t) == doctest::Approx(exact).epsilon(1e-7));
  }
  CHECK(tr.x_at(0.2) == doctest::Approx(20.0).epsilon(1e-7));
  // finite and large close to the blow-up time
  const double near = tr.x_at(0.2499);
  CHECK(near > 1e3);
  CHECK(std::isfinite(near));
}

TEST_CASE("trajectory evaluation domain") {
  const Params p(1.0, 1.0);
  const Trajectory tr = integrate(p, make_blowup_seed(p, 4.0), config(1.0));
  REQUIRE(tr.status() == TrajStatus::blown_up);
  CHECK_THROWS_AS(tr.x_at(-0.1), std::domain_error);
  CHECK_THROWS_AS(tr.x_at(tr.blowup()->t_blowup), std::domain_error);
  CHECK_THROWS_AS(tr.x_at(0.9), std::domain_error);

  const Params wright(0.5, 0.0);
  const Trajectory ok = integrate(wright, HistoryFn::constant(0.5), config(2.0));
  REQUIRE(ok.status() == TrajStatus::completed);
  CHECK(ok.x_at(2.0) > 0.0);  // closed end is evaluable
  CHECK(ok.x_at(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(ok.x_at(2.0 + 1e-9), std::domain_error);
}

TEST_CASE("x(0) equals phi(0) exactly and breakpoints restart on the unit mesh") {
  const Params p(1.0, -0.5);
  const HistoryFn phi = HistoryFn::step_ramp(1.0, -0.5, 3.0);
  const Trajectory tr = integrate(p, phi, config(4.5));
  REQUIRE(tr.status() == TrajStatus::completed);
  CHECK(tr.x_at(0.0) == 3.0);

  const std::vector<double> expected{0.0, 1.0, 2.0, 3.0, 4.0};
  REQUIRE(tr.breakpoints() == expected);
  // no dense piece straddles a mesh point
  for (const auto& piece : tr.pieces()) {
    const double lo = std::floor(piece.seg.t0 + 1e-12);
    CHECK(piece.seg.t_end <= lo + 1.0 + 1e-12);
  }
}

TEST_CASE("long Wright run converges to the equilibrium") {
  const Params p(0.5, 0.0);  // r < pi/2: stable
  const Trajectory tr = integrate(p, HistoryFn::constant(0.5), config(80.0));
  REQUIRE(tr.status() == TrajStatus::completed);
  CHECK(std::abs(tr.x_at(80.0) - 1.0) < 1e-6);
}

TEST_CASE("positivity for randomized parameters and histories") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ualpha(-2.0, 0.0);
  std::uniform_real_distribution<double> ur(0.3, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Params p(ur(rng), ualpha(rng));
    const HistoryFn phi = random_positive_history(rng());
    const Trajectory tr = integrate(p, phi, config(10.0));
    REQUIRE(tr.status() == TrajStatus::completed);
    for (double t = 0.0; t <= 10.0; t += 0.05) {
      CHECK(tr.x_at(t) > 0.0);
    }
  }
}

TEST_CASE("coordinate switch thresholds do not change the solution") {
  const Params p(1.0, 1.0);
  const HistoryFn seed = make_blowup_seed(p, 4.0);
  SolverConfig lo = config(1.0);
  lo.x_switch = 10.0;  // long reciprocal phase
  SolverConfig hi = config(1.0);
  hi.x_switch = 1e6;
  const Trajectory tr_lo = integrate(p, seed, lo);
  const Trajectory tr_hi = integrate(p, seed, hi);
  REQUIRE(tr_lo.status() == TrajStatus::blown_up);
  REQUIRE(tr_hi.status() == TrajStatus::blown_up);
  CHECK(std::abs(tr_lo.end_time() - tr_hi.end_time()) < 1e-9);
  // the low-threshold run did switch
  bool any_recip = false;
  for (const auto& piece : tr_lo.pieces()) {
    any_recip = any_recip || piece.coord == Trajectory::Coord::reciprocal;
  }
  CHECK(any_recip);
  const double t_hi = std::min(tr_lo.end_time(), tr_hi.end_time()) - 1e-4;
  double worst = 0.0;
  for (double t = 0.0; t <= t_hi; t += 1e-3) {
    worst = std::max(worst, std::abs(tr_lo.x_at(t) - tr_hi.x_at(t)) / tr_hi.x_at(t));
  }
  CHECK(worst <= 10.0 * lo.rtol);
}

TEST_CASE("switch-back hysteresis handles rise-and-fall solutions") {
  // alpha < 0 with a large history spike: x dips from above x_switch
  const Params p(2.0, -1.0);
  SolverConfig cfg = config(6.0);
  cfg.x_switch = 2.0;  // force switching around the equilibrium scale
  const Trajectory tr = integrate(p, HistoryFn::constant(3.0), cfg);
  REQUIRE(tr.status() == TrajStatus::completed);
  bool saw_recip = false, saw_direct_after = false;
  for (const auto& piece : tr.pieces()) {
    if (piece.coord == Trajectory::Coord::reciprocal) saw_recip = true;
    if (saw_recip && piece.coord == Trajectory::Coord::direct) saw_direct_after = true;
  }
  CHECK(saw_recip);
  CHECK(saw_direct_after);
  // solution still tends to x* = 1/2
  CHECK(std::abs(tr.x_at(6.0) - 0.5) < 0.2);
}

TEST_CASE("aborts on step budget without misreporting blow-up") {
  const Params p(1.0, 1.0);
  SolverConfig cfg = config(1.0);
  cfg.max_steps = 10;
  const Trajectory tr = integrate(p, make_blowup_seed(p, 4.0), cfg);
  CHECK(tr.status() == TrajStatus::aborted);
  CHECK(tr.abort_reason() == "step budget");
  CHECK_FALSE(tr.blowup().has_value());
}

TEST_CASE("gen integration with single-delay terms reduces to integrate") {
  const double r = 1.3, alpha = -0.4;
  const HistoryFn phi = HistoryFn::step_ramp(1.0, -0.25, 2.0);
  const Trajectory ref = integrate(Params(r, alpha), phi, config(6.0));
  const GenParams g(r, {{alpha, 0.0}, {-1.0, 1.0}});
  const Trajectory gen = integrate_gen(g, phi, config(6.0));
  REQUIRE(ref.status() == TrajStatus::completed);
  REQUIRE(gen.status() == TrajStatus::completed);
  double worst = 0.0;
  for (double t = 0.0; t <= 6.0; t += 0.01) {
    worst = std::max(worst, std::abs(ref.x_at(t) - gen.x_at(t)) / ref.x_at(t));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("gen exponential solutions are preserved over a trackable horizon") {
  SolverConfig cfg = config(3.0);
  cfg.rtol = 1e-10;
  cfg.atol = 1e-13;
  {
    const double r = std::log(2.0);
    const GenParams g(r, {{0.5, 0.0}, {-1.0, 1.0}});
    CHECK(std::abs(genlog_residual(g)) < 1e-15);
    const Trajectory tr = integrate_gen(g, HistoryFn::exp_profile(1.0, r, {}), cfg);
    REQUIRE(tr.status() == TrajStatus::completed);
    double worst = 0.0;
    for (double t = 0.0; t <= 3.0; t += 0.01) {
      worst = std::max(worst, std::abs(tr.x_at(t) / std::exp(r * t) - 1.0));
    }
    CHECK(worst < 1e-8);
  }
  {
    // two positive delays; rate from the residual root
    const std::vector<DelayTerm> terms{{1.0, 0.5}, {-2.0, 1.0}};
    const auto rate = exp_solution_rate_gen(terms, 0.05, 20.0);
    REQUIRE(rate.has_value());
    CHECK(*rate == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
    const GenParams g(*rate, terms);
    const Trajectory tr = integrate_gen(g, HistoryFn::exp_profile(1.0, *rate, {}), cfg);
    REQUIRE(tr.status() == TrajStatus::completed);
    double worst = 0.0;
    for (double t = 0.0; t <= 3.0; t += 0.01) {
      worst = std::max(worst, std::abs(tr.x_at(t) / std::exp(*rate * t) - 1.0));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("gen mesh contains all delay sums, deduplicated") {
  const GenParams g(1.0, {{0.3, 0.5}, {-1.0, 1.0}});
  const Trajectory tr = integrate_gen(g, HistoryFn::constant(1.0), config(2.2));
  REQUIRE(tr.status() == TrajStatus::completed);
  const std::vector<double> expected{0.0, 0.5, 1.0, 1.5, 2.0};
  REQUIRE(tr.breakpoints().size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(tr.breakpoints()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
}

TEST_CASE("incommensurate delays trip the mesh cap") {
  const GenParams g(1.0, {{0.2, 1.0}, {-1.0, 3.14159265358979}});
  SolverConfig cfg = config(100.0);
  cfg.max_mesh_points = 50;
  const Trajectory tr = integrate_gen(g, HistoryFn::constant(1.0, -3.2), cfg);
  CHECK(tr.status() == TrajStatus::aborted);
  CHECK(tr.abort_reason() == "mesh explosion");
}

TEST_CASE("history domain must cover the longest delay") {
  const GenParams g(1.0, {{-0.5, 0.0}, {-1.0, 2.0}});
  CHECK_THROWS_AS(integrate_gen(g, HistoryFn::constant(1.0), config(3.0)), std::invalid_argument);
  const Trajectory tr = integrate_gen(g, HistoryFn::constant(1.0, -2.0), config(3.0));
  CHECK(tr.status() == TrajStatus::completed);
}

TEST_CASE("log-ratio run with psi = 0 stays at z = 0") {
  const double r = 1.0;
  const Params p(r, std::exp(-r));
  const Trajectory zr = integrate_z(p, 1.0, HistoryFn::exp_profile(1.0, r, {}), config(5.0));
  REQUIRE(zr.status() == TrajStatus::completed);
  REQUIRE(zr.log_ratio());
  for (double t = 0.0; t <= 5.0; t += 0.1) {
    CHECK(std::abs(zr.value_at(t)) < 1e-9);
  }
  CHECK(zr.x_at(5.0) == doctest::Approx(std::exp(5.0)).epsilon(1e-7));
}

TEST_CASE("log-ratio monotonicity for ordered histories") {
  const double r = 1.0, c = 1.0, delta = 0.5;
  const Params p(r, std::exp(-r));
  {
    const Trajectory zr =
        integrate_z(p, c, make_below_exponential_history(c, r, delta), config(30.0));
    REQUIRE(zr.status() == TrajStatus::blown_up);
    double prev = zr.value_at(0.0);
    for (double t = 0.05; t < zr.end_time() - 1e-6; t += 0.05) {
      const double z = zr.value_at(t);
      CHECK(z > prev - 1e-10);
      prev = z;
    }
    CHECK(prev > 0.0);
  }
  {
    const Trajectory zr =
        integrate_z(p, c, make_above_exponential_history(c, r, delta), config(20.0));
    REQUIRE(zr.status() == TrajStatus::completed);
    double prev = zr.value_at(0.0);
    for (double t = 0.05; t <= 20.0; t += 0.05) {
      const double z = zr.value_at(t);
      CHECK(z < prev + 1e-10);
      prev = z;
    }
    CHECK(prev < 0.0);
  }
}

TEST_CASE("log-ratio oracle agrees with direct integration") {
  const double r = 1.0, c = 1.0, delta = 0.5;
  const Params p(r, std::exp(-r));
  const HistoryFn phi = make_below_exponential_history(c, r, delta);
  const SolverConfig cfg = config(30.0);
  const Trajectory xr = integrate(p, phi, cfg);
  const Trajectory zr = integrate_z(p, c, phi, cfg);
  REQUIRE(xr.status() == TrajStatus::blown_up);
  REQUIRE(zr.status() == TrajStatus::blown_up);
  CHECK(std::abs(xr.blowup()->t_blowup - zr.blowup()->t_blowup) < 1e-6);
  // inside the last 0.01 the relative gap measures only the difference
  // of the two independently located blow-up times (~rtol), amplified
  // by 1/(T - t); compare on the rest of the common span
  const double t_hi = std::min(xr.end_time(), zr.end_time()) - 0.01;
  double worst = 0.0;
  for (double t = 0.0; t <= t_hi; t += 0.02) {
    const double xd = xr.x_at(t);
    worst = std::max(worst, std::abs(xd - zr.x_at(t)) / xd);
  }
  CHECK(worst < 100.0 * cfg.rtol);
}

TEST_CASE("integrate_z validates the exponential-locus precondition") {
  CHECK_THROWS_AS(integrate_z(Params(1.0, 0.5), 1.0, HistoryFn::constant(1.0), config(1.0)),
                  std::invalid_argument);
}

TEST_CASE("solver config validation") {
  SolverConfig cfg;  // t_end unset
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.t_end = 1.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.rtol = 1e-17;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
