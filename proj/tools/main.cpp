// Command-line front end: simulate trajectories, classify parameter
// points, export the stability chart, and run the verification suites.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dlog/analysis.hpp"
#include "dlog/history.hpp"
#include "dlog/integrator.hpp"
#include "dlog/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAborted = 2;
constexpr int kExitSuiteFailed = 3;

struct SimulateArgs {
  double r = 0.0;
  double alpha = 0.0;
  bool alpha_exp = false;
  std::string history;
  double t_end = 0.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  double dt_out = 0.01;
  double x_switch = 1e3;
  double blowup_tol = 1e-9;
  std::string out;
};

std::string sidecar_path(const std::string& csv_path) {
  const auto dot = csv_path.find_last_of('.');
  const auto slash = csv_path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv_path.substr(0, dot) + ".json";
  }
  return csv_path + ".json";
}

const char* status_name(dlog::TrajStatus s) {
  switch (s) {
    case dlog::TrajStatus::completed: return "completed";
    case dlog::TrajStatus::blown_up: return "blown_up";
    case dlog::TrajStatus::aborted: return "aborted";
  }
  return "?";
}

int count_sign_changes(const std::vector<double>& values) {
  int changes = 0;
  int prev_sign = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double diff = values[i] - values[i - 1];
    if (std::abs(diff) <= 1e-12) continue;
    const int sign = diff > 0.0 ? 1 : -1;
    if (prev_sign != 0 && sign != prev_sign) ++changes;
    prev_sign = sign;
  }
  return changes;
}

int run_simulate(const SimulateArgs& args) {
  const double alpha = args.alpha_exp ? std::exp(-args.r) : args.alpha;
  const dlog::Params p(args.r, alpha);

  const dlog::HistoryFn phi = dlog::parse_history_spec(args.history, args.r);

  dlog::SolverConfig cfg;
  cfg.rtol = args.rtol;
  cfg.atol = args.atol;
  cfg.t_end = args.t_end;
  cfg.x_switch = args.x_switch;
  cfg.blowup_time_tol = args.blowup_tol;
  cfg.validate();

  dlog::Trajectory tr = dlog::integrate(p, phi, cfg);

  // the log-ratio column applies on the exponential-solution locus
  // when the history carries an envelope constant
  const bool z_active =
      std::abs(alpha - std::exp(-args.r)) <= 1e-12 && phi.exp_reference_c().has_value();
  const double c_ref = z_active ? *phi.exp_reference_c() : 0.0;

  // certified below-exponential histories get the closed-form lower
  // bound for the blow-up time attached
  std::optional<double> lower_bound;
  if (z_active) {
    const auto cert = dlog::certify_order(phi, p, c_ref, 1000);
    if (cert.relation == dlog::OrderRelation::below_exponential) {
      lower_bound = dlog::blowup_time_lower_bound(args.r, c_ref);
      if (tr.status() == dlog::TrajStatus::blown_up) tr.set_blowup_lower_bound(*lower_bound);
    }
  }

  // sample grid: strictly below a blow-up, closed end otherwise
  std::vector<double> ts;
  const double limit = tr.end_time();
  for (long j = 0;; ++j) {
    const double t = j * args.dt_out;
    if (t >= limit) break;
    ts.push_back(t);
  }
  if (tr.status() != dlog::TrajStatus::blown_up) ts.push_back(limit);

  std::ostringstream csv;
  csv.precision(15);
  csv << (z_active ? "t,x,z\n" : "t,x\n");
  std::vector<double> z_samples;
  for (double t : ts) {
    const double x = tr.x_at(t);
    csv << t << ',' << x;
    if (z_active) {
      const double z = std::log(x / (c_ref * std::exp(args.r * t)));
      z_samples.push_back(z);
      csv << ',' << z;
    }
    csv << '\n';
  }

  nlohmann::json sidecar{
      {"status", status_name(tr.status())},
      {"t_blowup", nullptr},
      {"bracket_width", nullptr},
      {"lower_bound_prop3", nullptr},
  };
  if (tr.blowup()) {
    sidecar["t_blowup"] = tr.blowup()->t_blowup;
    sidecar["bracket_width"] = tr.blowup()->bracket_width;
  }
  if (lower_bound) sidecar["lower_bound_prop3"] = *lower_bound;
  if (tr.status() == dlog::TrajStatus::aborted) sidecar["abort_reason"] = tr.abort_reason();
  if (z_active) {
    // observed sign changes of the ratio x/(c e^{rt}); no claim attached
    sidecar["z_ratio_sign_changes"] = count_sign_changes(z_samples);
  }

  if (args.out.empty()) {
    std::cout << csv.str();
    std::cerr << sidecar.dump() << '\n';
  } else {
    std::ofstream csv_file(args.out);
    if (!csv_file) {
      std::cerr << "cannot open output file '" << args.out << "'\n";
      return kExitUsage;
    }
    csv_file << csv.str();
    const std::string meta_path = sidecar_path(args.out);
    std::ofstream meta(meta_path);
    if (!meta) {
      std::cerr << "cannot open sidecar file '" << meta_path << "'\n";
      return kExitUsage;
    }
    meta << sidecar.dump(2) << '\n';
  }
  return tr.status() == dlog::TrajStatus::aborted ? kExitAborted : kExitOk;
}

int write_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream file(out);
  if (!file) {
    std::cerr << "cannot open output file '" << out << "'\n";
    return kExitUsage;
  }
  file << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dlog: numerical laboratory for the delay logistic equation "
               "x'(t) = r x(t) (1 + alpha x(t) - x(t-1))"};
  app.require_subcommand(1);

  // --- simulate ---
  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory, write CSV and a JSON sidecar");
  simulate->set_config("--config");
  simulate->add_option("--r", sim.r, "growth rate r > 0")->required();
  CLI::Option* alpha_opt = simulate->add_option("--alpha", sim.alpha, "instantaneous feedback ratio alpha");
  CLI::Option* alpha_exp_opt =
      simulate->add_flag("--alpha-exp", sim.alpha_exp, "set alpha = e^{-r} exactly");
  alpha_opt->excludes(alpha_exp_opt);
  alpha_exp_opt->excludes(alpha_opt);
  simulate->add_option("--history", sim.history,
                       "history spec: const:v= | stepramp:q= | exp:c= | thm2:c=,delta= | "
                       "thm3:c=,delta= | osc:c=,delta=,k= | table:<path.csv>")
      ->required();
  simulate->add_option("--t-end", sim.t_end, "integration horizon")->required();
  simulate->add_option("--rtol", sim.rtol, "relative tolerance");
  simulate->add_option("--atol", sim.atol, "absolute tolerance");
  simulate->add_option("--dt-out", sim.dt_out, "CSV sample spacing")->check(CLI::PositiveNumber);
  simulate->add_option("--x-switch", sim.x_switch, "reciprocal-coordinate switch threshold");
  simulate->add_option("--blowup-tol", sim.blowup_tol, "blow-up time bracket width");
  simulate->add_option("--out", sim.out, "CSV path (sidecar written next to it); stdout if omitted");

  // --- classify ---
  double cl_r = 0.0, cl_alpha = 0.0;
  bool cl_alpha_exp = false;
  CLI::App* classify_cmd = app.add_subcommand("classify", "print the region classification of (alpha, r) as JSON");
  classify_cmd->set_config("--config");
  classify_cmd->add_option("--r", cl_r, "growth rate r > 0")->required();
  CLI::Option* cl_alpha_opt = classify_cmd->add_option("--alpha", cl_alpha, "feedback ratio alpha");
  CLI::Option* cl_alpha_exp_opt =
      classify_cmd->add_flag("--alpha-exp", cl_alpha_exp, "set alpha = e^{-r} exactly");
  cl_alpha_opt->excludes(cl_alpha_exp_opt);
  cl_alpha_exp_opt->excludes(cl_alpha_opt);

  // --- boundary ---
  double b_min = 0.0, b_max = 0.0;
  int b_n = 0;
  std::string b_out;
  CLI::App* boundary = app.add_subcommand("boundary", "export the stability-chart CSV over an alpha grid");
  boundary->set_config("--config");
  boundary->add_option("--alpha-min", b_min, "grid start, inside (-1, 1)")->required();
  boundary->add_option("--alpha-max", b_max, "grid end, inside (-1, 1)")->required();
  boundary->add_option("--n", b_n, "number of grid points")->required()->check(CLI::PositiveNumber);
  boundary->add_option("--out", b_out, "CSV path; stdout if omitted");

  // --- verify ---
  std::string v_suite;
  std::uint64_t v_seed = 0;
  std::string v_out;
  CLI::App* verify = app.add_subcommand("verify", "run verification suites and write a JSON report");
  verify->set_config("--config");
  std::vector<std::string> suite_choices = dlog::suite_names();
  suite_choices.push_back("all");
  verify->add_option("--suite", v_suite, "thm1-blowup|exponential|thm2-thm3|regions|boundary|all")
      ->required()
      ->check(CLI::IsMember(suite_choices));
  verify->add_option("--seed", v_seed, "seed for randomized cases");
  verify->add_option("--out", v_out, "report path; stdout if omitted");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (!sim.alpha_exp && alpha_opt->count() == 0) {
        std::cerr << "simulate: one of --alpha or --alpha-exp is required\n";
        return kExitUsage;
      }
      return run_simulate(sim);
    }
    if (classify_cmd->parsed()) {
      if (!cl_alpha_exp && cl_alpha_opt->count() == 0) {
        std::cerr << "classify: one of --alpha or --alpha-exp is required\n";
        return kExitUsage;
      }
      const double alpha = cl_alpha_exp ? std::exp(-cl_r) : cl_alpha;
      const dlog::Params p(cl_r, alpha);
      std::cout << dlog::region_class_json(p, dlog::classify(p)) << '\n';
      return kExitOk;
    }
    if (boundary->parsed()) {
      std::ostringstream csv;
      dlog::write_stability_chart_csv(csv, b_min, b_max, b_n);
      return write_text(b_out, csv.str());
    }
    if (verify->parsed()) {
      std::vector<dlog::SuiteReport> reports;
      if (v_suite == "all") {
        for (const std::string& name : dlog::suite_names()) {
          reports.push_back(dlog::run_suite(name, v_seed));
        }
      } else {
        reports.push_back(dlog::run_suite(v_suite, v_seed));
      }
      const std::string text = reports.size() == 1 ? dlog::report_json(reports.front())
                                                   : dlog::combined_report_json(reports);
      const int rc = write_text(v_out, text + "\n");
      if (rc != kExitOk) return rc;
      for (const dlog::SuiteReport& r : reports) {
        if (!r.overall_pass) return kExitSuiteFailed;
      }
      return kExitOk;
    }
  } catch (const dlog::HistorySpecError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
