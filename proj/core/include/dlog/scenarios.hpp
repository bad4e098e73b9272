#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlog/history.hpp"
#include "dlog/integrator.hpp"
#include "dlog/params.hpp"

namespace dlog {

struct CaseResult {
  std::string id;
  std::string params;
  std::string expected;
  std::string observed;
  double tolerance;
  bool pass;
  // true for finite-horizon closed-form comparisons; false for
  // asymptotic claims, which desk-scale runs can only support
  // heuristically.
  bool certified;
};

struct SuiteReport {
  std::string suite_name;
  std::uint64_t seed;
  std::string config_summary;
  std::vector<CaseResult> cases;
  bool overall_pass;
};

/// Constructive blow-up checks: seeded solutions blow up at 1/h and
/// follow 1/(1/q - r alpha t) on [0, 1/h).
SuiteReport suite_blowup_construction(std::uint64_t seed);

/// Exponential solutions x = c e^{rt} at alpha = e^{-r}, including
/// multi-delay rates from the residual root.
SuiteReport suite_exponential(std::uint64_t seed);

/// Order preservation against the exponential envelope: histories
/// below it blow up (with the closed-form lower bound on the blow-up
/// time), histories above it exist globally; the log-ratio z is
/// monotone either way.
SuiteReport suite_ordering(std::uint64_t seed);

/// Region behavior at desk scale: convergence for alpha <= -1,
/// boundedness for -1 < alpha <= 0, unbounded growth evidence for
/// alpha >= 1 (heuristic).
SuiteReport suite_regions(std::uint64_t seed);

/// Stability boundary: oracle agreement plus perturbation decay/growth
/// flips across r = r* (heuristic window test).
SuiteReport suite_boundary(std::uint64_t seed);

/// Registered CLI suite names: thm1-blowup, exponential, thm2-thm3,
/// regions, boundary.
const std::vector<std::string>& suite_names();

/// Runs a suite by CLI name; throws std::invalid_argument for unknown
/// names.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

std::string report_json(const SuiteReport& report);
std::string combined_report_json(std::span<const SuiteReport> reports);

/// Seeded positive history used by the randomized suites: a
/// monotone-cubic interpolant through four knots with values in
/// [0.2, 5].
HistoryFn random_positive_history(std::uint64_t case_seed);

}  // namespace dlog
