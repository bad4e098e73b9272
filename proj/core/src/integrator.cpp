#include "dlog/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace dlog {

namespace {

constexpr double kMeshDedupeTol = 1e-12;
constexpr double kSwitchLocateTol = 1e-12;

// Unit mesh {0, 1, ..., floor(t_end)} plus t_end.
std::vector<double> unit_mesh(double t_end) {
  std::vector<double> mesh;
  for (double m = 0.0; m < t_end; m += 1.0) mesh.push_back(m);
  mesh.push_back(t_end);
  return mesh;
}

// All sums of positive delays up to t_end, deduplicated; empty on
// cap overflow.
std::vector<double> delay_sum_mesh(const GenParams& p, double t_end, long cap) {
  std::vector<double> delays;
  for (const auto& term : p.terms) {
    if (term.tau > 0.0) delays.push_back(term.tau);
  }
  std::priority_queue<double, std::vector<double>, std::greater<>> heap;
  heap.push(0.0);
  std::vector<double> mesh;
  while (!heap.empty()) {
    const double m = heap.top();
    heap.pop();
    if (!mesh.empty() && m <= mesh.back() + kMeshDedupeTol) continue;
    mesh.push_back(m);
    if (static_cast<long>(mesh.size()) > cap) return {};
    for (double tau : delays) {
      const double cand = m + tau;
      if (cand <= t_end + kMeshDedupeTol) heap.push(cand);
    }
  }
  if (mesh.back() < t_end - kMeshDedupeTol) {
    mesh.push_back(t_end);
  } else {
    mesh.back() = t_end;
  }
  return mesh;
}

}  // namespace

void SolverConfig::validate() const {
  auto bad = [](const char* what) { throw std::invalid_argument(what); };
  if (!(rtol >= 10.0 * std::numeric_limits<double>::epsilon())) {
    bad("SolverConfig: rtol must be at least 10 * machine epsilon");
  }
  if (!(atol > 0.0)) bad("SolverConfig: atol must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) bad("SolverConfig: t_end must be positive and finite");
  if (!(x_switch > 0.0)) bad("SolverConfig: x_switch must be positive");
  if (!(blowup_time_tol > 0.0)) bad("SolverConfig: blowup_time_tol must be positive");
  if (max_steps <= 0) bad("SolverConfig: max_steps must be positive");
  if (max_mesh_points <= 0) bad("SolverConfig: max_mesh_points must be positive");
}

const Trajectory::Piece& Trajectory::piece_at(double t) const {
  // last piece whose t0 <= t; pieces are contiguous
  const auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                                   [](double tt, const Piece& p) { return tt < p.seg.t0; });
  if (it == pieces_.begin()) throw std::domain_error("Trajectory: t before coverage");
  return *(it - 1);
}

double Trajectory::x_at(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("Trajectory: t must be nonnegative");
  const bool open_end = status_ == TrajStatus::blown_up;
  if (open_end ? !(t < end_time_) : !(t <= end_time_)) {
    throw std::domain_error("Trajectory: t beyond covered span");
  }
  const Piece& p = piece_at(t);
  const double v = p.seg.eval(t);
  if (p.coord == Coord::reciprocal) return 1.0 / v;
  return log_ratio_ ? c_ref_ * std::exp(v + rate_ * t) : v;
}

double Trajectory::value_at(double t) const {
  if (!log_ratio_) return x_at(t);
  if (!(t >= 0.0)) throw std::domain_error("Trajectory: t must be nonnegative");
  const bool open_end = status_ == TrajStatus::blown_up;
  if (open_end ? !(t < end_time_) : !(t <= end_time_)) {
    throw std::domain_error("Trajectory: t beyond covered span");
  }
  const Piece& p = piece_at(t);
  const double v = p.seg.eval(t);
  if (p.coord == Coord::direct) return v;
  return -std::log(c_ref_ * v) - rate_ * t;
}

void Trajectory::set_blowup_lower_bound(double lb) {
  if (!blowup_) throw std::logic_error("Trajectory: no blow-up report to annotate");
  blowup_->lower_bound = lb;
}

// ---------------------------------------------------------------------------
// Method-of-steps driver, shared by the x-, gen- and z-systems.
// ---------------------------------------------------------------------------

class MethodOfSteps {
 public:
  // Value conversion and right-hand sides for one coordinate system.
  struct Hooks {
    std::function<double(double t, double v)> direct_rhs;
    std::function<double(double t, double w)> recip_rhs;
    std::function<double(double t, double v)> switch_up_g;  // crossing up => go reciprocal
    std::function<double(double t, double v)> to_recip;
    std::function<double(double t, double w)> to_direct;
    bool blowup_possible = false;
  };

  MethodOfSteps(const SolverConfig& cfg, bool log_ratio, double c_ref, double rate)
      : cfg_(cfg) {
    traj_.log_ratio_ = log_ratio;
    traj_.c_ref_ = c_ref;
    traj_.rate_ = rate;
  }

  Trajectory run(const std::vector<double>& mesh, double v0, const Hooks& hooks);

  // Direct-space value at any committed time (history handled by caller's
  // lambdas for t < 0). Only valid for t at or before the last commit.
  double committed_value(double t) const {
    const Trajectory::Piece& p = traj_.piece_at(t);
    const double v = p.seg.eval(t);
    if (p.coord == Trajectory::Coord::reciprocal) {
      return traj_.log_ratio_ ? -std::log(traj_.c_ref_ * v) - traj_.rate_ * t : 1.0 / v;
    }
    return v;
  }

  // x-space value at a committed time (z mapped back for log-ratio runs).
  double committed_x(double t) const {
    const Trajectory::Piece& p = traj_.piece_at(t);
    const double v = p.seg.eval(t);
    if (p.coord == Trajectory::Coord::reciprocal) return 1.0 / v;
    return traj_.log_ratio_ ? traj_.c_ref_ * std::exp(v + traj_.rate_ * t) : v;
  }

  static Trajectory aborted_before_start(const std::string& reason) {
    Trajectory tr;
    tr.status_ = TrajStatus::aborted;
    tr.abort_reason_ = reason;
    tr.end_time_ = 0.0;
    return tr;
  }

 private:
  void commit(std::vector<DenseSeg>& segs, Trajectory::Coord coord) {
    for (const DenseSeg& s : segs) traj_.pieces_.push_back({s, coord});
    segs.clear();
  }

  Trajectory finalize(TrajStatus status, double end_time, std::string reason,
                      std::optional<BlowUpReport> report) {
    traj_.status_ = status;
    traj_.end_time_ = end_time;
    traj_.abort_reason_ = std::move(reason);
    traj_.blowup_ = std::move(report);
    return std::move(traj_);
  }

  const SolverConfig& cfg_;
  Trajectory traj_;
};

Trajectory MethodOfSteps::run(const std::vector<double>& mesh, double v0, const Hooks& hooks) {
  using Coord = Trajectory::Coord;
  Coord coord = Coord::direct;
  double t = 0.0;
  double v = v0;
  long budget = cfg_.max_steps;
  std::vector<DenseSeg> scratch;

  const double w_back_level = 10.0 / cfg_.x_switch;

  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const double t_stop = mesh[k + 1];
    traj_.breakpoints_.push_back(mesh[k]);

    while (t < t_stop) {
      // hysteresis band: switch immediately if the phase starts outside it
      if (coord == Coord::direct && hooks.switch_up_g(t, v) >= 0.0) {
        v = hooks.to_recip(t, v);
        coord = Coord::reciprocal;
      } else if (coord == Coord::reciprocal && v >= w_back_level) {
        v = hooks.to_direct(t, v);
        coord = Coord::direct;
      }

      if (budget <= 0) return finalize(TrajStatus::aborted, t, "step budget", std::nullopt);

      StepControl ctl;
      ctl.rtol = cfg_.rtol;
      ctl.atol = cfg_.atol;
      ctl.max_steps = budget;

      std::vector<CrossingEvent> events;
      int blowup_event = -1;
      if (coord == Coord::direct) {
        events.push_back({hooks.switch_up_g, +1, kSwitchLocateTol});
      } else {
        if (hooks.blowup_possible) {
          blowup_event = 0;
          events.push_back({[](double, double w) { return w; }, -1, cfg_.blowup_time_tol});
        }
        events.push_back(
            {[w_back_level](double, double w) { return w - w_back_level; }, +1, kSwitchLocateTol});
      }

      OdeRun run;
      if (coord == Coord::direct) {
        run = integrate_ode(hooks.direct_rhs, t, t_stop, v, ctl, events, scratch);
      } else {
        run = integrate_ode(hooks.recip_rhs, t, t_stop, v, ctl, events, scratch);
      }
      budget -= run.n_steps;
      commit(scratch, coord);

      switch (run.outcome) {
        case OdeOutcome::reached_end:
          t = t_stop;
          v = run.y_final;
          break;
        case OdeOutcome::event_hit:
          if (run.event_index == blowup_event) {
            BlowUpReport report;
            report.t_blowup = run.t_final;
            report.bracket_width = run.event_bracket;
            return finalize(TrajStatus::blown_up, run.t_final, {}, report);
          }
          // coordinate switch; conversion is exact at the located time
          t = run.t_final;
          if (coord == Coord::direct) {
            v = hooks.to_recip(t, run.y_final);
            coord = Coord::reciprocal;
          } else {
            v = hooks.to_direct(t, run.y_final);
            coord = Coord::direct;
          }
          break;
        case OdeOutcome::step_underflow:
          return finalize(TrajStatus::aborted, run.t_final, "stiffness/underflow", std::nullopt);
        case OdeOutcome::step_budget:
          return finalize(TrajStatus::aborted, run.t_final, "step budget", std::nullopt);
      }
    }
  }
  return finalize(TrajStatus::completed, mesh.back(), {}, std::nullopt);
}

// ---------------------------------------------------------------------------

Trajectory integrate(const Params& p, const HistoryFn& phi, const SolverConfig& cfg) {
  cfg.validate();
  if (phi.domain_start() > -1.0) {
    throw std::invalid_argument("integrate: history must cover [-1, 0]");
  }

  MethodOfSteps driver(cfg, false, 1.0, 0.0);

  // t = 0 reads the history: phi(0) = x(0), and segments of the
  // in-flight interval are not committed yet.
  auto x_delayed = [&driver, &phi](double t) {
    return t <= 0.0 ? phi(t) : driver.committed_x(t);
  };

  MethodOfSteps::Hooks hooks;
  hooks.direct_rhs = [p, x_delayed](double t, double x) {
    return rhs(p, x, x_delayed(t - 1.0));
  };
  hooks.recip_rhs = [p, x_delayed](double t, double w) {
    return -p.r * (1.0 - x_delayed(t - 1.0)) * w - p.r * p.alpha;
  };
  const double x_switch = cfg.x_switch;
  hooks.switch_up_g = [x_switch](double, double x) { return x - x_switch; };
  hooks.to_recip = [](double, double x) { return 1.0 / x; };
  hooks.to_direct = [](double, double w) { return 1.0 / w; };
  hooks.blowup_possible = p.alpha > 0.0;

  return driver.run(unit_mesh(cfg.t_end), phi(0.0), hooks);
}

Trajectory integrate_gen(const GenParams& p, const HistoryFn& phi, const SolverConfig& cfg) {
  cfg.validate();
  if (phi.domain_start() > -p.max_delay()) {
    throw std::invalid_argument("integrate_gen: history must cover [-max_delay, 0]");
  }

  const std::vector<double> mesh = delay_sum_mesh(p, cfg.t_end, cfg.max_mesh_points);
  if (mesh.empty()) return MethodOfSteps::aborted_before_start("mesh explosion");

  MethodOfSteps driver(cfg, false, 1.0, 0.0);

  auto x_delayed = [&driver, &phi](double t) {
    return t <= 0.0 ? phi(t) : driver.committed_x(t);
  };

  const double a0 = p.instantaneous_coeff();

  MethodOfSteps::Hooks hooks;
  hooks.direct_rhs = [&p, x_delayed](double t, double x) {
    double feedback = 1.0;
    for (const auto& term : p.terms) {
      feedback += term.a * (term.tau == 0.0 ? x : x_delayed(t - term.tau));
    }
    return p.r * x * feedback;
  };
  hooks.recip_rhs = [&p, x_delayed, a0](double t, double w) {
    double delayed_part = 1.0;
    for (const auto& term : p.terms) {
      if (term.tau > 0.0) delayed_part += term.a * x_delayed(t - term.tau);
    }
    return -p.r * delayed_part * w - p.r * a0;
  };
  const double x_switch = cfg.x_switch;
  hooks.switch_up_g = [x_switch](double, double x) { return x - x_switch; };
  hooks.to_recip = [](double, double x) { return 1.0 / x; };
  hooks.to_direct = [](double, double w) { return 1.0 / w; };
  hooks.blowup_possible = a0 > 0.0;

  return driver.run(mesh, phi(0.0), hooks);
}

Trajectory integrate_z(const Params& p, double c, const HistoryFn& phi, const SolverConfig& cfg) {
  cfg.validate();
  if (!(c > 0.0)) throw std::invalid_argument("integrate_z: c must be positive");
  if (std::abs(p.alpha - std::exp(-p.r)) > 1e-12) {
    throw std::invalid_argument("integrate_z: requires alpha = e^{-r} (to 1e-12)");
  }
  if (phi.domain_start() > -1.0) {
    throw std::invalid_argument("integrate_z: history must cover [-1, 0]");
  }

  const double r = p.r;
  MethodOfSteps driver(cfg, true, c, r);

  // z history is psi(s) = ln(phi(s) / (c e^{rs}))
  auto z_delayed = [&driver, &phi, c, r](double t) {
    return t <= 0.0 ? std::log(phi(t) / (c * std::exp(r * t))) : driver.committed_value(t);
  };
  auto x_delayed = [&driver, &phi](double t) {
    return t <= 0.0 ? phi(t) : driver.committed_x(t);
  };

  MethodOfSteps::Hooks hooks;
  hooks.direct_rhs = [r, c, z_delayed](double t, double z) {
    return r * c * std::exp(r * (t - 1.0)) * (std::exp(z) - std::exp(z_delayed(t - 1.0)));
  };
  hooks.recip_rhs = [p, x_delayed](double t, double w) {
    return -p.r * (1.0 - x_delayed(t - 1.0)) * w - p.r * p.alpha;
  };
  const double log_switch = std::log(cfg.x_switch / c);
  hooks.switch_up_g = [r, log_switch](double t, double z) { return z + r * t - log_switch; };
  hooks.to_recip = [r, c](double t, double z) { return std::exp(-z - r * t) / c; };
  hooks.to_direct = [r, c](double t, double w) { return -std::log(c * w) - r * t; };
  hooks.blowup_possible = true;

  const double z0 = std::log(phi(0.0) / c);
  return driver.run(unit_mesh(cfg.t_end), z0, hooks);
}

}  // namespace dlog
