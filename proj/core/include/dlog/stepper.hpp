#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "dlog/rootfind.hpp"

namespace dlog {

/// Tolerances and limits for one adaptive integration run.
struct StepControl {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_init = 0.0;   // 0: choose automatically
  double h_fixed = 0.0;  // > 0: constant step size, adaptivity off
  double h_max = 0.0;    // 0: length of the integration interval
  long max_steps = 2'000'000;
};

/// Quartic dense-output piece of one accepted step [t0, t0+h].
/// Coverage may be truncated (t_end <= t0+h) when an event or the
/// interval end lands inside the step.
struct DenseSeg {
  double t0 = 0.0;
  double h = 0.0;
  double t_end = 0.0;
  double c[5] = {0, 0, 0, 0, 0};

  double eval_theta(double theta) const {
    const double th1 = 1.0 - theta;
    return c[0] + theta * (c[1] + th1 * (c[2] + theta * (c[3] + th1 * c[4])));
  }
  double eval(double t) const { return eval_theta((t - t0) / h); }
};

/// Event: a sign crossing of g(t, y) along the dense output, in the
/// given direction (+1: g goes negative -> nonnegative, -1: reverse).
struct CrossingEvent {
  std::function<double(double t, double y)> g;
  int direction = +1;
  double locate_tol = 1e-12;  // width of the final time bracket
};

enum class OdeOutcome { reached_end, event_hit, step_underflow, step_budget };

struct OdeRun {
  OdeOutcome outcome = OdeOutcome::reached_end;
  double t_final = 0.0;
  double y_final = 0.0;
  int event_index = -1;       // which CrossingEvent fired
  double event_bracket = 0.0; // final bracket width of the located crossing
  long n_steps = 0;
  long n_accepted = 0;
  long n_rejected = 0;
};

namespace rk {

// Dormand-Prince 5(4) coefficients, FSAL.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat (error estimator weights)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace rk

namespace detail {

template <class F>
double initial_step(F&& f, double t0, double y0, double f0, double t_span,
                    const StepControl& ctl) {
  const double sk = ctl.atol + ctl.rtol * std::abs(y0);
  const double d0 = std::abs(y0) / sk;
  const double d1 = std::abs(f0) / sk;
  double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_span);
  const double y1 = y0 + h0 * f0;
  const double f1 = f(t0 + h0, y1);
  const double d2 = std::abs(f1 - f0) / sk / h0;
  double h1;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  }
  return std::min({100.0 * h0, h1, t_span});
}

}  // namespace detail

/// Integrates the scalar ODE y' = f(t, y) from t0 to t1 (t1 > t0) with
/// the Dormand-Prince 5(4) pair, PI step-size control, and quartic
/// dense output appended to `segments`. Stops early when one of
/// `events` fires; the crossing is located on the dense output to
/// event.locate_tol and the covering segment is truncated there.
template <class F>
OdeRun integrate_ode(F&& f, double t0, double t1, double y0, const StepControl& ctl,
                     std::span<const CrossingEvent> events, std::vector<DenseSeg>& segments) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_ode: need t1 > t0");
  if (!(ctl.rtol >= 10.0 * std::numeric_limits<double>::epsilon())) {
    throw std::invalid_argument("integrate_ode: rtol too small");
  }

  OdeRun run;
  double t = t0;
  double y = y0;
  double k1 = f(t, y);

  const bool adaptive = ctl.h_fixed <= 0.0;
  const double span = t1 - t0;
  const double hmax = ctl.h_max > 0.0 ? std::min(ctl.h_max, span) : span;

  double h;
  if (!adaptive) {
    h = ctl.h_fixed;
  } else if (ctl.h_init > 0.0) {
    h = std::min(ctl.h_init, hmax);
  } else {
    h = detail::initial_step(f, t, y, k1, hmax, ctl);
  }

  // PI controller constants as in classic embedded RK5(4) codes
  const double beta = 0.04;
  const double expo1 = 0.2 - beta * 0.75;
  const double safe = 0.9;
  const double facc1 = 1.0 / 0.2;   // max step growth 5x denominator form
  const double facc2 = 1.0 / 10.0;  // max step reduction 10x
  double facold = 1e-4;

  std::vector<double> g_start(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) g_start[i] = events[i].g(t, y);

  bool last = false;
  while (true) {
    if (run.n_steps >= ctl.max_steps) {
      run.outcome = OdeOutcome::step_budget;
      run.t_final = t;
      run.y_final = y;
      return run;
    }
    if (adaptive) h = std::min(h, hmax);
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    } else {
      last = false;
    }
    if (!(h > std::numeric_limits<double>::epsilon() * 32.0 * std::max(1.0, std::abs(t)))) {
      run.outcome = OdeOutcome::step_underflow;
      run.t_final = t;
      run.y_final = y;
      return run;
    }

    ++run.n_steps;
    const double k2 = f(t + rk::c2 * h, y + h * (rk::a21 * k1));
    const double k3 = f(t + rk::c3 * h, y + h * (rk::a31 * k1 + rk::a32 * k2));
    const double k4 = f(t + rk::c4 * h, y + h * (rk::a41 * k1 + rk::a42 * k2 + rk::a43 * k3));
    const double k5 =
        f(t + rk::c5 * h, y + h * (rk::a51 * k1 + rk::a52 * k2 + rk::a53 * k3 + rk::a54 * k4));
    const double k6 = f(
        t + h, y + h * (rk::a61 * k1 + rk::a62 * k2 + rk::a63 * k3 + rk::a64 * k4 + rk::a65 * k5));
    const double y1 =
        y + h * (rk::b1 * k1 + rk::b3 * k3 + rk::b4 * k4 + rk::b5 * k5 + rk::b6 * k6);
    const double k7 = f(t + h, y1);

    const double sk = ctl.atol + ctl.rtol * std::max(std::abs(y), std::abs(y1));
    const double err_raw =
        h * (rk::e1 * k1 + rk::e3 * k3 + rk::e4 * k4 + rk::e5 * k5 + rk::e6 * k6 + rk::e7 * k7);
    double err = std::abs(err_raw) / sk;
    if (!std::isfinite(err)) err = 1e10;  // force rejection on overflow/NaN

    if (adaptive && err > 1.0) {
      ++run.n_rejected;
      const double fac11 = std::pow(err, expo1);
      h /= std::min(facc1, fac11 / safe);
      continue;
    }

    // accept
    ++run.n_accepted;
    DenseSeg seg;
    seg.t0 = t;
    seg.h = h;
    seg.t_end = t + h;
    const double ydiff = y1 - y;
    const double bspl = h * k1 - ydiff;
    seg.c[0] = y;
    seg.c[1] = ydiff;
    seg.c[2] = bspl;
    seg.c[3] = ydiff - h * k7 - bspl;
    seg.c[4] = h * (rk::d1 * k1 + rk::d3 * k3 + rk::d4 * k4 + rk::d5 * k5 + rk::d6 * k6 +
                    rk::d7 * k7);

    // event check: sign crossing of g between step endpoints
    int hit = -1;
    double hit_t = 0.0, hit_y = 0.0, hit_bracket = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double ge = events[i].g(t + h, y1);
      const bool crossed = events[i].direction > 0 ? (g_start[i] < 0.0 && ge >= 0.0)
                                                   : (g_start[i] > 0.0 && ge <= 0.0);
      if (crossed) {
        const auto& ev = events[i];
        auto gd = [&](double tt) { return ev.g(tt, seg.eval(tt)); };
        // the dense endpoint value can differ from y1 by an ulp; fall
        // back to the step end when it does not bracket the crossing
        const double ga = gd(t);
        const double gb = gd(t + h);
        double root_t, root_y, root_w;
        if (ga != 0.0 && gb != 0.0 && std::signbit(ga) != std::signbit(gb)) {
          const RootResult root = brent(gd, t, t + h, ev.locate_tol, 200);
          root_t = root.root;
          root_y = seg.eval(root_t);
          root_w = std::max(root.bracket_width, 0.0);
        } else {
          root_t = t + h;
          root_y = y1;
          root_w = ev.locate_tol;
        }
        if (hit < 0 || root_t < hit_t) {
          hit = static_cast<int>(i);
          hit_t = root_t;
          hit_y = root_y;
          hit_bracket = root_w;
        }
      }
      g_start[i] = ge;
    }
    if (hit >= 0) {
      seg.t_end = hit_t;
      segments.push_back(seg);
      run.outcome = OdeOutcome::event_hit;
      run.event_index = hit;
      run.event_bracket = hit_bracket;
      run.t_final = hit_t;
      run.y_final = hit_y;
      return run;
    }

    segments.push_back(seg);
    t += h;
    y = y1;
    k1 = k7;  // FSAL

    if (last) {
      run.outcome = OdeOutcome::reached_end;
      run.t_final = t1;
      run.y_final = y;
      return run;
    }

    if (adaptive) {
      const double fac11 = std::pow(std::max(err, 1e-32), expo1);
      double fac = fac11 / std::pow(facold, beta);
      fac = std::max(facc2, std::min(facc1, fac / safe));
      h = h / fac;
      facold = std::max(err, 1e-4);
    }
  }
}

}  // namespace dlog
