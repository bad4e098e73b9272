#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dlog/history.hpp"
#include "dlog/params.hpp"
#include "dlog/stepper.hpp"

namespace dlog {

struct SolverConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double t_end = 0.0;            // required > 0
  double x_switch = 1e3;         // switch to w = 1/x above this; back below x_switch/10
  double blowup_time_tol = 1e-9; // width of the blow-up time bracket
  long max_steps = 2'000'000;    // across the whole integration
  long max_mesh_points = 100'000;

  void validate() const;  // throws std::invalid_argument
};

struct BlowUpReport {
  double t_blowup = 0.0;
  double bracket_width = 0.0;
  // ln(1 + e^r/c)/r, filled by callers once the ordering hypotheses
  // of the below-exponential blow-up class are certified.
  std::optional<double> lower_bound;
};

enum class TrajStatus { completed, blown_up, aborted };

/// Dense piecewise solution on [0, end_time()). Pieces are quartic
/// dense-output segments, each confined to a single delay-mesh
/// interval; segments integrated past the coordinate switch hold the
/// reciprocal w = 1/x. Trajectories of the log-ratio equation (see
/// integrate_z) expose z = ln(x / (c e^{rt})) through value_at() and
/// still expose x through x_at().
class Trajectory {
 public:
  enum class Coord { direct, reciprocal };
  struct Piece {
    DenseSeg seg;
    Coord coord;
  };

  TrajStatus status() const { return status_; }
  double end_time() const { return end_time_; }
  const std::optional<BlowUpReport>& blowup() const { return blowup_; }
  const std::string& abort_reason() const { return abort_reason_; }
  bool log_ratio() const { return log_ratio_; }

  /// Solution value x(t); 0 <= t <= end_time() (strictly below the
  /// blow-up time for blown-up trajectories). Throws std::domain_error
  /// outside that span.
  double x_at(double t) const;

  /// The trajectory's primary variable: x(t), or z(t) for log-ratio runs.
  double value_at(double t) const;

  /// Delay-mesh points at which integration restarted (0 included).
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  void set_blowup_lower_bound(double lb);

 private:
  friend class MethodOfSteps;

  const Piece& piece_at(double t) const;

  TrajStatus status_ = TrajStatus::aborted;
  std::string abort_reason_;
  std::optional<BlowUpReport> blowup_;
  double end_time_ = 0.0;
  bool log_ratio_ = false;
  double c_ref_ = 1.0;  // envelope constant of log-ratio runs
  double rate_ = 0.0;   // envelope rate of log-ratio runs
  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
};

/// Method-of-steps integration of x'(t) = r x(t) (1 + alpha x(t) - x(t-1))
/// from the positive history phi on [-1, 0]. Integration restarts at
/// every unit mesh point; delayed values are read from the history or
/// from committed dense output, never across a restart. Finite-time
/// blow-up is detected as a located zero of w = 1/x.
Trajectory integrate(const Params& p, const HistoryFn& phi, const SolverConfig& cfg);

/// Multi-delay variant; phi must cover [-max_delay, 0]. The restart
/// mesh is every sum of delays n_1 tau_1 + ... + n_k tau_k <= t_end,
/// deduplicated to 1e-12; exceeding cfg.max_mesh_points aborts with
/// reason "mesh explosion".
Trajectory integrate_gen(const GenParams& p, const HistoryFn& phi, const SolverConfig& cfg);

/// Integrates the log-ratio equation
///   z'(t) = r c e^{r(t-1)} (e^{z(t)} - e^{z(t-1)}),
/// equivalent to the delay logistic equation at alpha = e^{-r} under
/// x = c e^{z + rt}; the z history is ln(phi(s) / (c e^{rs})).
/// Requires |alpha - e^{-r}| <= 1e-12. Used as a consistency oracle
/// against integrate().
Trajectory integrate_z(const Params& p, double c, const HistoryFn& phi, const SolverConfig& cfg);

}  // namespace dlog
