#include "dlog/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dlog/analysis.hpp"

namespace dlog {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::string config_summary(const SolverConfig& cfg) {
  std::ostringstream os;
  os << "rtol=" << cfg.rtol << " atol=" << cfg.atol << " t_end=" << cfg.t_end
     << " x_switch=" << cfg.x_switch << " blowup_time_tol=" << cfg.blowup_time_tol;
  return os.str();
}

SolverConfig default_config(double t_end) {
  SolverConfig cfg;
  cfg.t_end = t_end;
  return cfg;
}

void finish(SuiteReport& report) {
  report.overall_pass = std::all_of(report.cases.begin(), report.cases.end(),
                                    [](const CaseResult& c) { return c.pass; });
}

const char* status_name(TrajStatus s) {
  switch (s) {
    case TrajStatus::completed: return "completed";
    case TrajStatus::blown_up: return "blown_up";
    case TrajStatus::aborted: return "aborted";
  }
  return "?";
}

}  // namespace

HistoryFn random_positive_history(std::uint64_t case_seed) {
  std::mt19937_64 rng(case_seed);
  std::uniform_real_distribution<double> dist(0.2, 5.0);
  std::vector<double> s{-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0};
  std::vector<double> v{dist(rng), dist(rng), dist(rng), dist(rng)};
  return HistoryFn::tabulated(std::move(s), std::move(v));
}

// ---------------------------------------------------------------------------

SuiteReport suite_blowup_construction(std::uint64_t seed) {
  SuiteReport report{"thm1-blowup", seed, {}, {}, false};
  const SolverConfig cfg = default_config(1.0);
  report.config_summary = config_summary(cfg);

  const std::pair<double, double> ra[] = {{1.0, 1.0}, {2.0, 0.5}, {0.7, 0.3}};
  const double hs[] = {2.5, 4.0, 10.0};
  for (const auto& [r, alpha] : ra) {
    for (double h : hs) {
      const Params p(r, alpha);
      const double q = h / (r * alpha);
      const double t_pred = 1.0 / h;
      std::ostringstream ps;
      ps << "r=" << r << " alpha=" << alpha << " h=" << h;

      const Trajectory tr = integrate(p, make_blowup_seed(p, h), cfg);

      CaseResult time_case;
      time_case.id = "blowup-time r=" + fmt(r) + " alpha=" + fmt(alpha) + " h=" + fmt(h);
      time_case.params = ps.str();
      time_case.expected = "blown_up at t=" + fmt(t_pred);
      time_case.tolerance = 1e-6;
      time_case.certified = true;
      if (tr.status() == TrajStatus::blown_up) {
        const double t_obs = tr.blowup()->t_blowup;
        time_case.observed = "blown_up at t=" + fmt(t_obs);
        time_case.pass = std::abs(t_obs - t_pred) < 1e-6;
      } else {
        time_case.observed = status_name(tr.status());
        time_case.pass = false;
      }
      report.cases.push_back(time_case);

      CaseResult form_case;
      form_case.id = "closed-form r=" + fmt(r) + " alpha=" + fmt(alpha) + " h=" + fmt(h);
      form_case.params = ps.str();
      form_case.expected = "x(t)=1/(1/q-r*alpha*t) to rel 1e-6 on [0,1/h)";
      form_case.tolerance = 1e-6;
      form_case.certified = true;
      if (tr.status() == TrajStatus::blown_up) {
        double worst = 0.0;
        for (int j = 0; j < 1000; ++j) {
          const double t = t_pred * j / 1000.0;
          const double exact = 1.0 / (1.0 / q - r * alpha * t);
          worst = std::max(worst, std::abs(tr.x_at(t) - exact) / exact);
        }
        form_case.observed = "max rel err " + fmt(worst);
        form_case.pass = worst < 1e-6;
      } else {
        form_case.observed = status_name(tr.status());
        form_case.pass = false;
      }
      report.cases.push_back(form_case);
    }
  }
  finish(report);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// max over [0, t_end] of |x/(c e^{rt}) - 1| sampled at spacing dt
double max_exponential_deviation(const Trajectory& tr, double r, double c, double t_end,
                                 double dt) {
  double worst = 0.0;
  for (double t = 0.0; t <= t_end + 1e-12; t += dt) {
    const double tt = std::min(t, t_end);
    worst = std::max(worst, std::abs(tr.x_at(tt) / (c * std::exp(r * tt)) - 1.0));
  }
  return worst;
}

}  // namespace

SuiteReport suite_exponential(std::uint64_t seed) {
  SuiteReport report{"exponential", seed, {}, {}, false};
  // tightest sensible tolerances: the exponential solution is a
  // separatrix, so tracking error is amplified by roughly
  // exp(c e^{-r} (e^{rT} - 1)); pairs whose amplification exceeds the
  // double-precision budget cannot meet the 1e-8 bound on [0,5] and
  // are reported as failures with their observed departure
  SolverConfig cfg = default_config(5.0);
  cfg.rtol = 1e-11;
  cfg.atol = 1e-14;
  report.config_summary = config_summary(cfg);

  for (double r : {0.5, 1.0, 2.0}) {
    for (double c : {0.1, 1.0, 5.0}) {
      const Params p(r, std::exp(-r));
      const HistoryFn phi = HistoryFn::exp_profile(c, r, {});
      const Trajectory tr = integrate(p, phi, cfg);

      CaseResult cr;
      cr.id = "exp r=" + fmt(r) + " c=" + fmt(c);
      cr.params = "r=" + fmt(r) + " alpha=e^-r c=" + fmt(c);
      cr.expected = "max rel deviation from c*e^{rt} below 1e-8 on [0,5]";
      cr.tolerance = 1e-8;
      cr.certified = true;
      if (tr.status() == TrajStatus::completed) {
        const double worst = max_exponential_deviation(tr, r, c, 5.0, 0.01);
        cr.observed = "max rel deviation " + fmt(worst);
        cr.pass = worst < 1e-8;
      } else {
        cr.observed = std::string(status_name(tr.status())) + " at t=" + fmt(tr.end_time()) +
                      " (left the separatrix)";
        cr.pass = false;
      }
      report.cases.push_back(cr);
    }
  }

  // multi-delay rates solved from the residual
  struct GenCase {
    const char* id;
    std::vector<DelayTerm> terms;
  };
  const GenCase gen_cases[] = {
      {"gen instantaneous+unit-delay", {{0.5, 0.0}, {-1.0, 1.0}}},
      {"gen two-delay", {{1.0, 0.5}, {-2.0, 1.0}}},
  };
  for (const auto& gc : gen_cases) {
    CaseResult cr;
    cr.id = gc.id;
    cr.expected = "rate solves residual; max rel deviation below 1e-8 on [0,5]";
    cr.tolerance = 1e-8;
    cr.certified = true;
    const auto rate = exp_solution_rate_gen(gc.terms, 0.05, 20.0);
    if (!rate) {
      cr.observed = "no residual root in (0.05, 20)";
      cr.pass = false;
    } else {
      const GenParams gp(*rate, gc.terms);
      cr.params = "r=" + fmt(*rate);
      const double c = 1.0;
      const HistoryFn phi = HistoryFn::exp_profile(c, *rate, {});
      const Trajectory tr = integrate_gen(gp, phi, cfg);
      if (tr.status() == TrajStatus::completed) {
        const double worst = max_exponential_deviation(tr, *rate, c, 5.0, 0.01);
        cr.observed = "rate " + fmt(*rate) + ", max rel deviation " + fmt(worst);
        cr.pass = worst < 1e-8;
      } else {
        cr.observed = std::string(status_name(tr.status())) + " at t=" + fmt(tr.end_time()) +
                      " (left the separatrix)";
        cr.pass = false;
      }
    }
    report.cases.push_back(cr);
  }
  finish(report);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// strict sample ordering of x against the envelope c e^{rt}; returns
// the worst signed margin of (x - envelope) * sign
double ordering_margin(const Trajectory& tr, double r, double c, double t_lo, double t_hi,
                       double dt, int sign) {
  double worst = std::numeric_limits<double>::infinity();
  for (double t = t_lo; t <= t_hi + 1e-12; t += dt) {
    const double tt = std::min(t, t_hi);
    const double margin = sign * (tr.x_at(tt) - c * std::exp(r * tt));
    worst = std::min(worst, margin);
  }
  return worst;
}

// z samples must move monotonically (sign +1 increasing, -1
// decreasing) with 1e-10 slack for roundoff plateaus
bool z_monotone(const Trajectory& zr, double t_hi, double dt, int sign) {
  double prev = zr.value_at(0.0);
  double first = prev, last = prev;
  for (double t = dt; t <= t_hi + 1e-12; t += dt) {
    const double z = zr.value_at(std::min(t, t_hi));
    if (sign * (z - prev) < -1e-10) return false;
    prev = z;
    last = z;
  }
  return sign * (last - first) > 0.0;
}

}  // namespace

SuiteReport suite_ordering(std::uint64_t seed) {
  SuiteReport report{"thm2-thm3", seed, {}, {}, false};
  const SolverConfig cfg_below = default_config(60.0);
  const SolverConfig cfg_above = default_config(20.0);
  report.config_summary = "below: " + config_summary(cfg_below) + "; above: " + config_summary(cfg_above);

  for (double r : {0.5, 1.0, 2.0}) {
    for (double c : {0.5, 1.0, 2.0}) {
      for (double delta : {0.1, 0.5, 2.0}) {
        const Params p(r, std::exp(-r));
        const std::string tag = "r=" + fmt(r) + " c=" + fmt(c) + " delta=" + fmt(delta);

        // below the envelope: must blow up, stay above the envelope,
        // and respect the closed-form lower bound on the blow-up time
        {
          const HistoryFn phi = make_below_exponential_history(c, r, delta);
          Trajectory tr = integrate(p, phi, cfg_below);
          const double lb = blowup_time_lower_bound(r, c);

          CaseResult cr;
          cr.id = "below " + tag;
          cr.params = tag;
          cr.expected = "blown_up, x > c*e^{rt} at samples, t_blowup >= " + fmt(lb) + " - 1e-9";
          cr.tolerance = 1e-9;
          cr.certified = true;
          if (tr.status() == TrajStatus::blown_up) {
            tr.set_blowup_lower_bound(lb);
            const double t_obs = tr.blowup()->t_blowup;
            const double margin =
                ordering_margin(tr, r, c, 0.05, t_obs - 1e-6, 0.05, +1);
            cr.observed = "t_blowup " + fmt(t_obs) + ", min ordering margin " + fmt(margin);
            cr.pass = margin > 0.0 && t_obs >= lb - 1e-9;
          } else {
            cr.observed = status_name(tr.status());
            cr.pass = false;
          }
          report.cases.push_back(cr);

          CaseResult zc;
          zc.id = "below-z " + tag;
          zc.params = tag;
          zc.expected = "z strictly increasing on its span";
          zc.tolerance = 1e-10;
          zc.certified = true;
          const Trajectory zr = integrate_z(p, c, phi, cfg_below);
          if (zr.status() == TrajStatus::blown_up || zr.status() == TrajStatus::completed) {
            const double t_hi =
                (zr.status() == TrajStatus::blown_up ? zr.end_time() - 1e-6 : zr.end_time());
            const bool mono = z_monotone(zr, t_hi, 0.05, +1);
            zc.observed = std::string(status_name(zr.status())) + ", monotone=" +
                          (mono ? "true" : "false");
            zc.pass = mono && zr.status() == TrajStatus::blown_up;
          } else {
            zc.observed = status_name(zr.status());
            zc.pass = false;
          }
          report.cases.push_back(zc);
        }

        // above the envelope: global existence below the envelope
        {
          const HistoryFn phi = make_above_exponential_history(c, r, delta);
          const Trajectory tr = integrate(p, phi, cfg_above);

          CaseResult cr;
          cr.id = "above " + tag;
          cr.params = tag;
          cr.expected = "completed through t=20 with x < c*e^{rt} at samples";
          cr.tolerance = 0.0;
          cr.certified = true;
          if (tr.status() == TrajStatus::completed) {
            const double margin = ordering_margin(tr, r, c, 0.05, 20.0, 0.05, -1);
            cr.observed = "completed, min ordering margin " + fmt(margin);
            cr.pass = margin > 0.0;
          } else {
            cr.observed = status_name(tr.status());
            cr.pass = false;
          }
          report.cases.push_back(cr);

          CaseResult zc;
          zc.id = "above-z " + tag;
          zc.params = tag;
          zc.expected = "z strictly decreasing on its span";
          zc.tolerance = 1e-10;
          zc.certified = true;
          const Trajectory zr = integrate_z(p, c, phi, cfg_above);
          if (zr.status() == TrajStatus::completed) {
            const bool mono = z_monotone(zr, 20.0, 0.05, -1);
            zc.observed = std::string("completed, monotone=") + (mono ? "true" : "false");
            zc.pass = mono;
          } else {
            zc.observed = status_name(zr.status());
            zc.pass = false;
          }
          report.cases.push_back(zc);
        }
      }
    }
  }
  finish(report);
  return report;
}

// ---------------------------------------------------------------------------

namespace {

double history_grid_max(const HistoryFn& phi) {
  double hi = 0.0;
  double s = phi.domain_start();
  while (true) {
    hi = std::max(hi, phi(s));
    if (s >= 0.0) break;
    s = std::min(s + 1e-3, 0.0);
  }
  return hi;
}

double trajectory_sample_max(const Trajectory& tr, double dt) {
  const double hi_t = tr.status() == TrajStatus::blown_up ? tr.end_time() - 1e-6 : tr.end_time();
  double hi = 0.0;
  for (double t = 0.0; t <= hi_t; t += dt) hi = std::max(hi, tr.x_at(t));
  return hi;
}

}  // namespace

SuiteReport suite_regions(std::uint64_t seed) {
  SuiteReport report{"regions", seed, {}, {}, false};
  const SolverConfig cfg = default_config(200.0);
  report.config_summary = config_summary(cfg);
  std::uint64_t case_counter = 0;

  // alpha <= -1: the equilibrium attracts every sampled solution
  for (const auto& [alpha, r] : std::vector<std::pair<double, double>>{{-1.0, 1.0}, {-2.0, 5.0}}) {
    const Params p(r, alpha);
    const double x_star = equilibrium(p).value;
    for (int i = 0; i < 10; ++i) {
      const HistoryFn phi = random_positive_history(seed ^ (0x9e3779b97f4a7c15ULL + case_counter++));
      const Trajectory tr = integrate(p, phi, cfg);
      CaseResult cr;
      cr.id = "global alpha=" + fmt(alpha) + " r=" + fmt(r) + " history#" + std::to_string(i);
      cr.params = "alpha=" + fmt(alpha) + " r=" + fmt(r);
      cr.expected = "|x - x*| < 1e-6 on [195,200] (heuristic for global stability)";
      cr.tolerance = 1e-6;
      cr.certified = false;
      if (tr.status() == TrajStatus::completed) {
        double worst = 0.0;
        for (double t = 195.0; t <= 200.0; t += 0.25) {
          worst = std::max(worst, std::abs(tr.x_at(t) - x_star));
        }
        cr.observed = "max late deviation " + fmt(worst);
        cr.pass = worst < 1e-6;
      } else {
        cr.observed = status_name(tr.status());
        cr.pass = false;
      }
      report.cases.push_back(cr);
    }
  }

  // -1 < alpha <= 0: bounded by the comparison bound
  for (const auto& [alpha, r] : std::vector<std::pair<double, double>>{{-0.5, 10.0}, {0.0, 2.0}}) {
    const Params p(r, alpha);
    for (int i = 0; i < 10; ++i) {
      const HistoryFn phi = random_positive_history(seed ^ (0xda3e39cb94b95bdbULL + case_counter++));
      // alpha < 0: x' <= r x (1 + alpha x) caps x at max(x(0), -1/alpha);
      // alpha = 0: any local maximum is at most e^r, so max(sup phi, 1) e^r
      const double bound = alpha < 0.0
                               ? std::max(phi(0.0), -1.0 / alpha) * (1.0 + 1e-6)
                               : std::max(history_grid_max(phi), 1.0) * std::exp(r) * (1.0 + 1e-6);
      const Trajectory tr = integrate(p, phi, cfg);
      CaseResult cr;
      cr.id = "bounded alpha=" + fmt(alpha) + " r=" + fmt(r) + " history#" + std::to_string(i);
      cr.params = "alpha=" + fmt(alpha) + " r=" + fmt(r);
      cr.expected = "completed with max x below " + fmt(bound) + " (heuristic horizon)";
      cr.tolerance = 0.0;
      cr.certified = false;
      if (tr.status() == TrajStatus::completed) {
        const double hi = trajectory_sample_max(tr, 0.1);
        cr.observed = "max x " + fmt(hi);
        cr.pass = hi <= bound;
      } else {
        cr.observed = status_name(tr.status());
        cr.pass = false;
      }
      report.cases.push_back(cr);
    }
  }

  // alpha >= 1: unbounded growth evidence (blow-up or escape past 1e6)
  for (const auto& [alpha, r] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {1.5, 1.0}}) {
    const Params p(r, alpha);
    for (int i = 0; i < 5; ++i) {
      const HistoryFn phi = random_positive_history(seed ^ (0xc2b2ae3d27d4eb4fULL + case_counter++));
      const Trajectory tr = integrate(p, phi, cfg);
      CaseResult cr;
      cr.id = "unbounded alpha=" + fmt(alpha) + " r=" + fmt(r) + " history#" + std::to_string(i);
      cr.params = "alpha=" + fmt(alpha) + " r=" + fmt(r);
      cr.expected = "blown_up, or max x above 1e6 (heuristic evidence)";
      cr.tolerance = 0.0;
      cr.certified = false;
      if (tr.status() == TrajStatus::blown_up) {
        cr.observed = "blown_up at t=" + fmt(tr.blowup()->t_blowup);
        cr.pass = true;
      } else {
        const double hi = trajectory_sample_max(tr, 0.05);
        cr.observed = std::string(status_name(tr.status())) + ", max x " + fmt(hi);
        cr.pass = hi > 1e6;
      }
      report.cases.push_back(cr);
    }
  }
  finish(report);
  return report;
}

// ---------------------------------------------------------------------------

SuiteReport suite_boundary(std::uint64_t seed) {
  SuiteReport report{"boundary", seed, {}, {}, false};
  const double horizon = 80.0;
  const SolverConfig cfg = default_config(horizon);
  report.config_summary = config_summary(cfg);

  for (double alpha : {-0.5, 0.0, 0.5}) {
    const double r_star = stability_boundary_r(alpha);

    CaseResult oracle;
    oracle.id = "oracle alpha=" + fmt(alpha);
    oracle.params = "alpha=" + fmt(alpha);
    oracle.expected = "closed form and characteristic-root bisection agree to 1e-8";
    oracle.tolerance = 1e-8;
    oracle.certified = true;
    const double diff = std::abs(char_root_boundary(alpha) - r_star);
    oracle.observed = "difference " + fmt(diff);
    oracle.pass = diff <= 1e-8;
    report.cases.push_back(oracle);

    // perturbation response in a late window vs an early window
    for (int side : {-1, +1}) {
      const double r = (side < 0 ? 0.9 : 1.1) * r_star;
      const Params p(r, alpha);
      const double x_star = equilibrium(p).value;
      const HistoryFn phi = HistoryFn::constant(x_star + 1e-4);
      const Trajectory tr = integrate(p, phi, cfg);

      CaseResult cr;
      cr.id = std::string(side < 0 ? "decay" : "growth") + " alpha=" + fmt(alpha);
      cr.params = "alpha=" + fmt(alpha) + " r=" + fmt(r);
      cr.expected = side < 0 ? "late perturbation below early/3 (heuristic)"
                             : "late perturbation above 3x early, or blow-up (heuristic)";
      cr.tolerance = 0.0;
      cr.certified = false;
      if (tr.status() == TrajStatus::blown_up) {
        cr.observed = "blown_up";
        cr.pass = side > 0;
      } else if (tr.status() != TrajStatus::completed) {
        cr.observed = status_name(tr.status());
        cr.pass = false;
      } else {
        double early = 0.0, late = 0.0;
        for (double t = 0.0; t <= 0.2 * horizon; t += 0.05) {
          early = std::max(early, std::abs(tr.x_at(t) - x_star));
        }
        for (double t = 0.8 * horizon; t <= horizon; t += 0.05) {
          late = std::max(late, std::abs(tr.x_at(t) - x_star));
        }
        cr.observed = "early " + fmt(early) + ", late " + fmt(late);
        cr.pass = side < 0 ? late < early / 3.0 : late > 3.0 * early;
      }
      report.cases.push_back(cr);
    }
  }
  finish(report);
  return report;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"thm1-blowup", "exponential", "thm2-thm3",
                                              "regions", "boundary"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "thm1-blowup") return suite_blowup_construction(seed);
  if (name == "exponential") return suite_exponential(seed);
  if (name == "thm2-thm3") return suite_ordering(seed);
  if (name == "regions") return suite_regions(seed);
  if (name == "boundary") return suite_boundary(seed);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

namespace {

nlohmann::json report_to_json(const SuiteReport& report) {
  nlohmann::json cases = nlohmann::json::array();
  for (const CaseResult& c : report.cases) {
    cases.push_back({{"id", c.id},
                     {"params", c.params},
                     {"expected", c.expected},
                     {"observed", c.observed},
                     {"tol", c.tolerance},
                     {"pass", c.pass},
                     {"certified", c.certified}});
  }
  return nlohmann::json{{"suite", report.suite_name},
                        {"seed", report.seed},
                        {"config", report.config_summary},
                        {"cases", std::move(cases)},
                        {"overall_pass", report.overall_pass}};
}

}  // namespace

std::string report_json(const SuiteReport& report) { return report_to_json(report).dump(2); }

std::string combined_report_json(std::span<const SuiteReport> reports) {
  nlohmann::json suites = nlohmann::json::array();
  bool all = true;
  for (const SuiteReport& r : reports) {
    suites.push_back(report_to_json(r));
    all = all && r.overall_pass;
  }
  return nlohmann::json{{"suites", std::move(suites)}, {"overall_pass", all}}.dump(2);
}

}  // namespace dlog
