#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dlog/params.hpp"

namespace dlog {

/// Exponent profile psi for exponential-envelope histories
/// phi(s) = c * exp(r*s + psi(s)); psi is a polynomial plus an
/// optional sinusoidal term amp * sin(2*pi*k*s).
struct ExpProfileSpec {
  std::vector<double> poly;  // psi(s) += sum_j poly[j] * s^j
  double sine_amp = 0.0;
  int sine_k = 0;

  double operator()(double s) const;
};

/// A positive continuous initial function phi on [domain_start, 0]
/// (domain_start = -1 for the single-delay equation). Strict positivity
/// is checked at construction on a 1e-3-spaced grid; construction
/// throws std::invalid_argument if the check fails.
class HistoryFn {
 public:
  enum class Kind { constant, step_ramp, exp_profile, tabulated };

  static HistoryFn constant(double value, double domain_start = -1.0);

  /// phi = plateau_value on [-1, plateau_end], then a linear ramp from
  /// (plateau_end, plateau_value) to (0, terminal_value). Domain [-1, 0].
  static HistoryFn step_ramp(double plateau_value, double plateau_end, double terminal_value);

  static HistoryFn exp_profile(double c, double r, ExpProfileSpec psi, double domain_start = -1.0);

  /// Samples with strictly ascending abscissae spanning [s.front(), 0];
  /// evaluation uses monotone-preserving piecewise-cubic interpolation,
  /// so positive samples yield a positive interpolant.
  static HistoryFn tabulated(std::vector<double> s, std::vector<double> phi);

  /// phi(s); throws std::domain_error outside [domain_start(), 0].
  double operator()(double s) const;

  double domain_start() const { return domain_start_; }
  Kind kind() const { return kind_; }

  /// The envelope constant c for exp_profile histories (used for
  /// trajectory/exponential-solution comparisons), absent otherwise.
  std::optional<double> exp_reference_c() const;
  /// The envelope rate r for exp_profile histories, absent otherwise.
  std::optional<double> exp_reference_r() const;

 private:
  HistoryFn() = default;
  double eval_unchecked(double s) const;
  void check_positive() const;

  Kind kind_ = Kind::constant;
  double domain_start_ = -1.0;

  // constant
  double const_value_ = 1.0;
  // step_ramp
  double plateau_value_ = 0.0, plateau_end_ = 0.0, terminal_value_ = 0.0;
  // exp_profile
  double env_c_ = 0.0, env_r_ = 0.0;
  ExpProfileSpec psi_;
  // tabulated
  std::vector<double> tab_s_, tab_v_, tab_d_;  // knots, values, knot slopes
};

/// History that forces x'(t) = r*alpha*x(t)^2 on [0, 1/2]:
/// plateau 1 on [-1, -1/2], ramp up to q = h_param / (r*alpha) at 0.
/// The solution blows up at exactly t = 1/h_param. Requires alpha > 0
/// and h_param >= 2 (so the blow-up lands inside the plateau window).
HistoryFn make_blowup_seed(const Params& p, double h_param);

/// phi(s) = c * exp(r*s - delta*s^2): touches the exponential solution
/// c*e^{r s} at s = 0 and lies strictly below it on [-1, 0).
HistoryFn make_below_exponential_history(double c, double r, double delta);

/// phi(s) = c * exp(r*s + delta*s^2): touches at s = 0, strictly above
/// the exponential solution on [-1, 0).
HistoryFn make_above_exponential_history(double c, double r, double delta);

enum class OrderRelation { below_exponential, above_exponential, neither };

/// Grid-checked ordering of a history against c * e^{r s}.
/// The check is necessary, not sufficient: it samples a finite grid.
struct OrderCertificate {
  OrderRelation relation;
  double c;
  double checked_grid_spacing;
};

/// Checks phi(0) = c (to 1e-12) and the ordering phi <=/>= c*e^{r s}
/// on a uniform grid of grid_n+1 points of [-1, 0], with the strict
/// endpoint condition phi(-1) </> c*e^{-r}. grid_n >= 100.
OrderCertificate certify_order(const HistoryFn& h, const Params& p, double c, int grid_n);

/// Thrown by parse_history_spec; message names the offending token.
class HistorySpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses the history mini-language:
///   const:v=<x> | stepramp:q=<x> | exp:c=<x> | thm2:c=<x>,delta=<x>
///   | thm3:c=<x>,delta=<x> | osc:c=<x>,delta=<x>,k=<int> | table:<path.csv>
/// Families with an exponential envelope take their rate from `r`.
HistoryFn parse_history_spec(const std::string& spec, double r);

}  // namespace dlog
